from dataclasses import dataclass, field
from datetime import datetime, timezone
import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable

import numpy as np
import scipy
from pydantic import BaseModel, Field

from core.config import config
from core.errors import ToolkitError

logger = logging.getLogger("vsf")

VERSION = "1.0"


def log_command_operation(operation: str, status: str, details: dict | None = None, additional_info: str = ""):
    """Log command lifecycle events with detailed information"""
    print(f"🧮 COMMAND {operation.upper()}: status={status}")
    if additional_info:
        print(f"   ℹ️  {additional_info}")
    if details:
        for key, value in details.items():
            print(f"   📋 {key}: {value}")
    print(f"   ⏰ Timestamp: {datetime.now(timezone.utc).isoformat()}")
    print("   " + "="*50)


class RunManifest(BaseModel):
    command: str
    arguments: dict[str, Any]
    config: dict[str, Any]
    version: str = VERSION
    libraries: dict[str, str] = Field(default_factory=dict)
    inputs: list[str] = Field(default_factory=list)
    outputs: list[str] = Field(default_factory=list)
    wall_time: float = 0.0
    exit_code: int = 0
    message: str | None = None


@dataclass
class RunContext:
    """Collects the files a command reads and writes."""

    command: str
    manifest_path: Path | None = None
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)

    def input(self, path: str | Path) -> str:
        self.inputs.append(str(path))
        return str(path)

    def output(self, path: str | Path) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        self.outputs.append(str(p))
        return p


def write_json_file(path: str | Path, payload: Any) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with p.open("w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _plain(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if callable(value):
        return None
    return value


# data suffixes stripped before naming a manifest that sits next to its output
OUTPUT_SUFFIXES = (".json", ".vsf", ".csv")


def manifest_beside(output: str | Path) -> Path:
    """rebuilt.vsf.json -> rebuilt.manifest.json, moments.csv -> moments.manifest.json"""
    out = Path(output)
    name = Path(out.name)
    while name.suffix in OUTPUT_SUFFIXES:
        name = Path(name.stem)
    return out.with_name(f"{name}.manifest.json")


def config_snapshot(args: argparse.Namespace) -> dict[str, Any]:
    """Effective numeric settings: config defaults overridden by CLI flags."""
    snapshot = {
        "l_max": config.grid.L_MAX,
        "n_r": config.grid.N_R,
        "r_max": config.grid.R_MAX,
        "tol": config.tolerance.TOL,
        "decay_tol": config.tolerance.DECAY_TOL,
        "edge_tol": config.tolerance.EDGE_TOL,
        "fit_degree": config.tolerance.FIT_DEGREE,
        "fit_points": config.tolerance.FIT_POINTS,
        "seed": config.verify.SEED,
        "n_trials": config.verify.N_TRIALS,
    }
    for key in snapshot:
        value = getattr(args, key, None)
        if value is not None:
            snapshot[key] = value
    return snapshot


def run_command(command: str, args: argparse.Namespace, handler: Callable[[argparse.Namespace, RunContext], int], manifest_path: str | Path | None) -> int:
    """
    Run handler, map exceptions onto the exit-code contract
    (0 ok, 1 I/O / format / domain, 2 gauge violation, 3 fit) and write the
    RunManifest next to the outputs.
    """
    ctx = RunContext(command, Path(manifest_path) if manifest_path else None)
    arguments = {k: _plain(v) for k, v in sorted(vars(args).items()) if not callable(v)}
    log_command_operation(command, "START", arguments)
    started = time.perf_counter()
    message = None
    try:
        exit_code = handler(args, ctx)
    except ToolkitError as e:
        exit_code = e.exit_code
        message = e.detail
        logger.error(f"❌ {command.upper()} FAILED: {e.detail}")
        print(f"error: {e.detail}", file=sys.stderr)
    except OSError as e:
        exit_code = 1
        message = str(e)
        logger.error(f"❌ {command.upper()} I/O ERROR: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
    wall = time.perf_counter() - started

    if ctx.manifest_path is not None:
        manifest = RunManifest(
            command=command,
            arguments=arguments,
            config=config_snapshot(args),
            libraries={"numpy": np.__version__, "scipy": scipy.__version__},
            inputs=ctx.inputs,
            outputs=ctx.outputs,
            wall_time=wall,
            exit_code=exit_code,
            message=message,
        )
        try:
            write_json_file(ctx.manifest_path, manifest.model_dump())
        except OSError as e:
            logger.error(f"❌ MANIFEST WRITE ERROR: {str(e)}")
            exit_code = exit_code or 1

    log_command_operation(command, "DONE" if exit_code == 0 else "FAILED", {"exit_code": exit_code, "wall_time": f"{wall:.3f}s"})
    return exit_code
