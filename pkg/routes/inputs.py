"""
Input addressing shared by the sub-commands: a vsf-1 file path or a built-in
source written as builtin:<kind>?key=value&key=value, e.g.
builtin:toroidal_solenoid?sigma=0.5&radius=3&tube=1.
"""

import argparse
import logging
from urllib.parse import parse_qsl, urlsplit

from pydantic import ValidationError

from core.config import config
from core.errors import ConfigurationError, FieldFormatError
from core.field_io import read_field
from core.grid import VectorField, make_grid
from service.sources import SourceSpec, make_source

logger = logging.getLogger("vsf")

BUILTIN = "builtin:"


def parse_builtin(text: str) -> SourceSpec:
    parts = urlsplit(text[len(BUILTIN):])
    params: dict = dict(parse_qsl(parts.query, strict_parsing=bool(parts.query)))
    if "center" in params:
        params["center"] = tuple(float(c) for c in params["center"].split(","))
    try:
        return SourceSpec(kind=parts.path, **params)
    except ValidationError as e:
        logger.error(f"❌ BUILTIN SOURCE ERROR: {str(e)}")
        raise ConfigurationError(f"invalid built-in source {text!r}: {e.errors()[0]['msg']}")


def load_input(text: str, l_max: int | None = None, n_r: int | None = None, r_max: float | None = None):
    """Field named by text; built-in sources are sampled on a fresh grid."""
    if not text.startswith(BUILTIN):
        return read_field(text)
    spec = parse_builtin(text)
    grid = make_grid(
        l_max or config.grid.L_MAX,
        n_r or config.grid.N_R,
        r_max or config.grid.R_MAX,
    )
    return make_source(spec, grid)


def load_current(text: str, l_max: int | None = None, n_r: int | None = None, r_max: float | None = None) -> VectorField:
    field = load_input(text, l_max, n_r, r_max)
    if not isinstance(field, VectorField):
        raise FieldFormatError(f"{text} holds a scalar field, expected a vector field", key="kind")
    return field


def grid_arguments() -> argparse.ArgumentParser:
    """Grid flags for commands that sample built-in sources."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--grid-lmax", dest="l_max", type=int, default=None, help=f"band limit (default {config.grid.L_MAX})")
    parent.add_argument("--grid-nr", dest="n_r", type=int, default=None, help=f"radial nodes (default {config.grid.N_R})")
    parent.add_argument("--grid-rmax", dest="r_max", type=float, default=None, help=f"outer radius (default {config.grid.R_MAX})")
    return parent
