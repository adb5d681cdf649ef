import argparse
import logging

import numpy as np

from core.tables import TableRow, write_table
from middleware.run_manifest import RunContext, manifest_beside, run_command
from routes.inputs import grid_arguments, load_current
from service.multipole import compute_moments, form_factors, siegert_split

logger = logging.getLogger("vsf")


def cmd_moments(args: argparse.Namespace, ctx: RunContext) -> int:
    """
    Moment table of a current: Qdot (with charge radii), M, T^(2n), the form
    factors on the requested k grid and the Siegert residual per (l, m).
    """
    ctx.input(args.input)
    J = load_current(args.input, args.l_max, args.n_r, args.r_max)
    l_top = min(args.moment_lmax, J.grid.l_max)
    k_grid = np.linspace(args.kmin, args.kmax, args.nk)

    rows = compute_moments(J, l_top, args.nmax).rows()
    for l in range(1, l_top + 1):
        for m in range(-l, l + 1):
            rows += form_factors(J, l, m, k_grid).rows()
            split = siegert_split(J, l, m, k_grid)
            rows.append(TableRow(l, m, 0, complex(split.residual), "siegert_residual"))

    write_table(ctx.output(args.output), rows)
    print("   ℹ️  l=0 rows are omitted for M, E and T (no transverse channels at l=0)")
    logger.info(f"✅ MOMENTS: {len(rows)} rows written to {args.output}")
    return 0


def _run_moments(args: argparse.Namespace) -> int:
    return run_command("moments", args, cmd_moments, manifest_beside(args.output))


def register(sub) -> None:
    p = sub.add_parser("moments", parents=[grid_arguments()], help="multipole moments and form factors of a current")
    p.add_argument("--input", required=True, help="vsf-1 file or builtin:<kind>?key=value")
    p.add_argument("--lmax", dest="moment_lmax", type=int, default=3, help="highest moment degree")
    p.add_argument("--kmin", type=float, default=0.01)
    p.add_argument("--kmax", type=float, default=0.3)
    p.add_argument("--nk", type=int, default=16)
    p.add_argument("--nmax", type=int, default=2, help="highest radial index n of T^(2n) and Qdot^(2n)")
    p.add_argument("--output", required=True, help="output CSV file")
    p.set_defaults(func=_run_moments)
