import argparse
import logging
from pathlib import Path

from core.config import config
from core.errors import ConfigurationError
from functions.identity_registry import load_registry
from functions.verification_checks import SUITES, run_named_suite
from middleware.run_manifest import RunContext, manifest_beside, run_command, write_json_file
from service.algebra import IdentityReport, suite_passed

logger = logging.getLogger("vsf")

# radial nodes for the polynomial identity fields on the unit ball
ALGEBRA_N_R = 16
# manifest written to the working directory when --output is not given
DEFAULT_MANIFEST = "verify.manifest.json"

_usage: dict[str, str] = {}


def print_report_table(reports: list[IdentityReport]) -> None:
    width = max((len(rep.name) for rep in reports), default=10)
    print(f"{'identity'.ljust(width)}  {'max rel residual':>16}  {'trials':>6}  verdict  tags")
    for rep in reports:
        tags = ",".join(rep.tags)
        print(f"{rep.name.ljust(width)}  {rep.max_rel_residual:16.3e}  {rep.n_trials:6d}  {rep.verdict:<7}  {tags}")
        if rep.note:
            print(f"{''.ljust(width)}  ℹ️  {rep.note}")


def cmd_verify(args: argparse.Namespace, ctx: RunContext) -> int:
    """Run a verification suite; exit 0 iff every non-suspect check passes."""
    if args.suite not in SUITES:
        print(_usage.get("verify", ""), end="")
        raise ConfigurationError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    l_max = args.l_max or config.grid.L_MAX
    seed = config.verify.SEED if args.seed is None else args.seed
    tol = args.tol or config.tolerance.TOL
    n_trials = args.n_trials or config.verify.N_TRIALS
    registry = load_registry(ctx.input(args.registry)) if args.registry else None

    reports = run_named_suite(args.suite, l_max, ALGEBRA_N_R, seed, n_trials, tol, registry)
    passed = suite_passed(reports)
    print_report_table(reports)

    if args.output:
        payload = {
            "suite": args.suite,
            "l_max": l_max,
            "seed": seed,
            "tol": tol,
            "n_trials": n_trials,
            "passed": passed,
            "reports": [rep.model_dump() for rep in reports],
        }
        write_json_file(ctx.output(args.output), payload)

    if passed:
        logger.info(f"✅ VERIFY {args.suite.upper()}: {len(reports)} checks passed")
        return 0
    failed = [rep.name for rep in reports if rep.verdict == "fail" and not rep.suspect]
    logger.error(f"❌ VERIFY {args.suite.upper()}: failed {failed}")
    return 1



def _run_verify(args: argparse.Namespace) -> int:
    manifest = manifest_beside(args.output) if args.output else Path(DEFAULT_MANIFEST)
    return run_command("verify", args, cmd_verify, manifest)


def register(sub) -> None:
    p = sub.add_parser("verify", help="run the operator-identity and physics verification suites")
    p.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)}")
    p.add_argument("--lmax", dest="l_max", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--trials", dest="n_trials", type=int, default=None)
    p.add_argument("--registry", default=None, help="JSON identity registry replacing the shipping one")
    p.add_argument("--output", default=None, help="JSON report file")
    p.set_defaults(func=_run_verify)
    _usage["verify"] = p.format_usage()
