import argparse
import logging
from pathlib import Path

from core.errors import FieldFormatError
from core.field_io import read_field, write_field
from core.grid import ScalarField, norm
from middleware.run_manifest import RunContext, manifest_beside, run_command, write_json_file
from routes.inputs import grid_arguments, load_current
from service.decompose import DebyePotentials, debye_decompose, debye_synthesize, helmholtz

logger = logging.getLogger("vsf")


def cmd_decompose(args: argparse.Namespace, ctx: RunContext) -> int:
    """Split a vector field into Helmholtz parts or Debye potentials."""
    ctx.input(args.input)
    V = load_current(args.input, args.l_max, args.n_r, args.r_max)
    out = Path(args.output)
    v_norm = norm(V)

    if args.mode == "helmholtz":
        parts = helmholtz(V)
        write_field(ctx.output(out / "longitudinal.vsf.json"), parts.longitudinal)
        write_field(ctx.output(out / "transverse.vsf.json"), parts.transverse)
        write_field(ctx.output(out / "potential.vsf.json"), parts.potential)
        report = {
            "mode": "helmholtz",
            "input_norm": v_norm,
            "longitudinal_norm": norm(parts.longitudinal),
            "transverse_norm": norm(parts.transverse),
            "residual": parts.residual,
            "orthogonality": parts.orthogonality,
        }
    else:
        p = debye_decompose(V, args.tol)
        for name in ("phi", "psi", "chi"):
            write_field(ctx.output(out / f"{name}.vsf.json"), getattr(p, name))
        rebuilt = debye_synthesize(p)
        report = {
            "mode": "debye",
            "input_norm": v_norm,
            "psi_route_residual": p.psi_route_residual,
            "round_trip": norm(rebuilt - V) / v_norm if v_norm > 0 else 0.0,
        }

    write_json_file(ctx.output(out / "report.json"), report)
    logger.info(f"✅ DECOMPOSE ({args.mode}) written to {out}")
    return 0


def _read_scalar(path: str, ctx: RunContext) -> ScalarField:
    ctx.input(path)
    f = read_field(path)
    if not isinstance(f, ScalarField):
        raise FieldFormatError(f"{path} holds a vector field, expected a scalar potential", key="kind")
    return f


def cmd_synthesize(args: argparse.Namespace, ctx: RunContext) -> int:
    """grad(phi) + L psi + N chi from three potential files."""
    p = DebyePotentials(
        _read_scalar(args.phi, ctx),
        _read_scalar(args.psi, ctx),
        _read_scalar(args.chi, ctx),
    )
    write_field(ctx.output(args.output), debye_synthesize(p))
    logger.info(f"✅ SYNTHESIZE written to {args.output}")
    return 0


def _run_decompose(args: argparse.Namespace) -> int:
    return run_command("decompose", args, cmd_decompose, Path(args.output) / "manifest.json")


def _run_synthesize(args: argparse.Namespace) -> int:
    return run_command("synthesize", args, cmd_synthesize, manifest_beside(args.output))


def register(sub) -> None:
    p = sub.add_parser("decompose", parents=[grid_arguments()], help="Helmholtz or Debye decomposition of a vector field")
    p.add_argument("--input", required=True, help="vsf-1 file or builtin:<kind>?key=value")
    p.add_argument("--mode", choices=["helmholtz", "debye"], default="helmholtz")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=_run_decompose)

    s = sub.add_parser("synthesize", help="rebuild a vector field from Debye potential files")
    s.add_argument("--phi", required=True)
    s.add_argument("--psi", required=True)
    s.add_argument("--chi", required=True)
    s.add_argument("--output", required=True, help="output vsf-1 file")
    s.set_defaults(func=_run_synthesize)
