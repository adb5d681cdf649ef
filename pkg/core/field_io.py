"""
vsf-1 field files: one JSON document holding the grid header and the
coefficient array (base64 of little-endian float64, interleaved re/im, in
channel -> radial node -> flat harmonic order). Node positions are never
stored; they are recomputed from the header.
"""

import base64
import json
import logging
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ValidationError

from core.errors import ConfigurationError, FieldFormatError
from core.grid import ScalarField, SphericalGrid, VectorField, make_grid

logger = logging.getLogger("vsf")

FORMAT = "vsf-1"


class GridHeader(BaseModel):
    l_max: int
    n_r: int
    r_max: float
    n_theta: int
    n_phi: int
    r_inner: float = 0.0


class FieldDocument(BaseModel):
    format: Literal["vsf-1"]
    grid: GridHeader
    kind: Literal["scalar", "vector"]
    data: str


def header_for(grid: SphericalGrid) -> GridHeader:
    return GridHeader(
        l_max=grid.l_max,
        n_r=grid.n_r,
        r_max=grid.r_max,
        n_theta=grid.n_theta,
        n_phi=grid.n_phi,
        r_inner=grid.r_inner,
    )


def encode_coefficients(coef: np.ndarray) -> str:
    interleaved = np.ascontiguousarray(coef, dtype=np.complex128).view(np.float64)
    return base64.b64encode(interleaved.astype("<f8").tobytes()).decode("ascii")


def decode_coefficients(data: str, shape: tuple) -> np.ndarray:
    try:
        raw = base64.b64decode(data, validate=True)
    except ValueError as e:
        raise FieldFormatError(f"data is not valid base64: {e}", key="data")
    expected = 16 * int(np.prod(shape))
    if len(raw) != expected:
        raise FieldFormatError(f"data holds {len(raw)} bytes, header implies {expected}", key="data")
    values = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    return values.view(np.complex128).reshape(shape).copy()


def to_document(field: ScalarField | VectorField) -> FieldDocument:
    return FieldDocument(
        format=FORMAT,
        grid=header_for(field.grid),
        kind="vector" if isinstance(field, VectorField) else "scalar",
        data=encode_coefficients(field.coef),
    )


def from_document(doc: FieldDocument) -> ScalarField | VectorField:
    h = doc.grid
    try:
        grid = make_grid(h.l_max, h.n_r, h.r_max, h.r_inner, h.n_theta, h.n_phi)
    except ConfigurationError as e:
        raise FieldFormatError(e.detail, key="grid")
    if doc.kind == "scalar":
        return ScalarField(grid, decode_coefficients(doc.data, (grid.n_r, grid.n_h)))
    return VectorField(grid, decode_coefficients(doc.data, (3, grid.n_r, grid.n_h)))


def write_field(path: str | Path, field: ScalarField | VectorField) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_document(field).model_dump(), indent=2, sort_keys=True) + "\n")
    logger.info(f"💾 FIELD WRITTEN: {path}")
    return path


def read_field(path: str | Path) -> ScalarField | VectorField:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as e:
        raise FieldFormatError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise FieldFormatError(f"{path} is not JSON: {e}")
    try:
        doc = FieldDocument.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"])
        raise FieldFormatError(f"{path}: {first['msg']}", key=key)
    return from_document(doc)
