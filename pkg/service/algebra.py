"""
Numerical verifier for operator identities.

An identity is two sums of terms, each term a coefficient, an optional
Levi-Civita / Kronecker factor over index variables, optional summed
indices and an operator pipeline written in mathematical order (the last
op acts first):

    {"coef": -1.0, "factor": "eps", "factor_indices": ["i", "j", "k"],
     "sum": ["k"], "ops": ["L_k", "lap"]}

Indexed ops carry an index variable after an underscore (x_i, d_i, L_i,
N_i, M_i, comp_i). Free indices range over the three Cartesian axes and the
identity is checked for every assignment.
"""

import itertools
import logging
import math
from typing import Callable, Literal

import numpy as np
from pydantic import BaseModel, Field

from core.errors import SpecError
from core.grid import ScalarField, SphericalGrid, VectorField, make_grid, norm
from service import operators as ops

logger = logging.getLogger("vsf")

SCALAR, VECTOR = "scalar", "vector"


class Term(BaseModel):
    coef: float = 1.0
    factor: Literal["none", "eps", "delta"] = "none"
    factor_indices: list[str] = Field(default_factory=list)
    sum: list[str] = Field(default_factory=list)
    ops: list[str] = Field(default_factory=list)


class IdentitySpec(BaseModel):
    name: str
    kind: Literal["scalar", "vector"] = "scalar"
    free: list[str] = Field(default_factory=list)
    lhs: list[Term]
    rhs: list[Term] = Field(default_factory=list)
    tags: list[str] = Field(default_factory=list)
    note: str | None = None


class IdentityReport(BaseModel):
    name: str
    max_rel_residual: float = Field(ge=0.0)
    n_trials: int
    verdict: Literal["pass", "fail"]
    tags: list[str] = Field(default_factory=list)
    note: str | None = None

    @property
    def suspect(self) -> bool:
        return "paper-suspect" in self.tags


def _mdot(V: VectorField) -> ScalarField:
    parts = ops.cartesian_components(V)
    return sum((ops.M_component(c, i) for i, c in enumerate(parts)), ScalarField.zeros(V.grid))


def _ndot(V: VectorField) -> ScalarField:
    parts = ops.cartesian_components(V)
    return sum((ops.N_component(c, i) for i, c in enumerate(parts)), ScalarField.zeros(V.grid))


# op name -> {input kind: (output kind, fn(field))}
_PLAIN: dict[str, dict[str, tuple[str, Callable]]] = {
    "id": {SCALAR: (SCALAR, lambda f: f), VECTOR: (VECTOR, lambda V: V)},
    "grad": {SCALAR: (VECTOR, ops.gradient)},
    "div": {VECTOR: (SCALAR, ops.divergence)},
    "curl": {VECTOR: (VECTOR, ops.curl)},
    "L": {SCALAR: (VECTOR, ops.apply_L)},
    "N": {SCALAR: (VECTOR, ops.apply_N)},
    "M": {SCALAR: (VECTOR, ops.apply_M)},
    "lap": {SCALAR: (SCALAR, ops.laplacian), VECTOR: (VECTOR, ops.vector_laplacian)},
    "L2": {SCALAR: (SCALAR, ops.angular_laplacian)},
    "r2": {SCALAR: (SCALAR, ops.multiply_r2), VECTOR: (VECTOR, ops.multiply_r2)},
    "Dr": {SCALAR: (SCALAR, ops.euler), VECTOR: (VECTOR, ops.euler)},
    "dr": {SCALAR: (SCALAR, ops.radial_derivative)},
    "rvec": {SCALAR: (VECTOR, ops.position_times)},
    "rdot": {VECTOR: (SCALAR, ops.r_dot)},
    "rcross": {VECTOR: (VECTOR, ops.r_cross)},
    "Ldot": {VECTOR: (SCALAR, ops.L_dot)},
    "Mdot": {VECTOR: (SCALAR, _mdot)},
    "Ndot": {VECTOR: (SCALAR, _ndot)},
}

_INDEXED: dict[str, dict[str, tuple[str, Callable]]] = {
    "x": {SCALAR: (SCALAR, ops.multiply_coordinate)},
    "d": {SCALAR: (SCALAR, ops.partial)},
    "L": {SCALAR: (SCALAR, ops.L_component)},
    "N": {SCALAR: (SCALAR, ops.N_component)},
    "M": {SCALAR: (SCALAR, ops.M_component)},
    "comp": {VECTOR: (SCALAR, ops.component)},
}


def _parse(token: str) -> tuple[str, str | None]:
    if "_" in token:
        base, var = token.split("_", 1)
        if base not in _INDEXED:
            raise SpecError(f"unknown indexed operator {token!r}")
        return base, var
    if token not in _PLAIN:
        raise SpecError(f"unknown operator {token!r}")
    return token, None


def _term_kind(term: Term, kind: str, bound: set[str]) -> str:
    for token in reversed(term.ops):
        base, var = _parse(token)
        table = _PLAIN[base] if var is None else _INDEXED[base]
        if var is not None and var not in bound and not var.isdigit():
            raise SpecError(f"index {var!r} in {token!r} is neither free nor summed")
        if kind not in table:
            raise SpecError(f"operator {token!r} cannot act on a {kind} field")
        kind = table[kind][0]
    return kind


def type_check(spec: IdentitySpec) -> str:
    """Output kind shared by every term; raises SpecError otherwise."""
    if not spec.lhs:
        raise SpecError(f"{spec.name}: empty left-hand side")
    kinds = set()
    for term in spec.lhs + spec.rhs:
        if term.factor == "eps" and len(term.factor_indices) != 3:
            raise SpecError(f"{spec.name}: eps needs three indices")
        if term.factor == "delta" and len(term.factor_indices) != 2:
            raise SpecError(f"{spec.name}: delta needs two indices")
        bound = set(spec.free) | set(term.sum)
        unbound = [v for v in term.factor_indices if v not in bound and not v.isdigit()]
        if unbound:
            raise SpecError(f"{spec.name}: factor indices {unbound} are not bound")
        kinds.add(_term_kind(term, spec.kind, bound))
    if len(kinds) != 1:
        raise SpecError(f"{spec.name}: sides produce mixed kinds {sorted(kinds)}")
    return kinds.pop()


def levi_civita(i: int, j: int, k: int) -> int:
    return (i - j) * (j - k) * (k - i) // 2


def _index(var: str, assignment: dict) -> int:
    return int(var) - 1 if var.isdigit() else assignment[var]


def _factor(term: Term, assignment: dict) -> float:
    idx = [_index(v, assignment) for v in term.factor_indices]
    if term.factor == "eps":
        return float(levi_civita(*idx))
    if term.factor == "delta":
        return 1.0 if idx[0] == idx[1] else 0.0
    return 1.0


def _apply(term: Term, field, assignment: dict):
    for token in reversed(term.ops):
        base, var = _parse(token)
        kind = VECTOR if isinstance(field, VectorField) else SCALAR
        if var is None:
            field = _PLAIN[base][kind][1](field)
        else:
            field = _INDEXED[base][kind][1](field, _index(var, assignment))
    return field


def _evaluate(terms: list[Term], field, assignment: dict, out_kind: str):
    g = field.grid
    total = VectorField.zeros(g) if out_kind == VECTOR else ScalarField.zeros(g)
    for term in terms:
        for values in itertools.product(range(3), repeat=len(term.sum)):
            full = {**assignment, **dict(zip(term.sum, values))}
            factor = _factor(term, full)
            if factor == 0.0:
                continue
            total = total + _apply(term, field, full) * (term.coef * factor)
    return total


def random_scalar(grid: SphericalGrid, rng: np.random.Generator, band: int) -> ScalarField:
    """sum_lm c_lm r^l (a0 + a1 r^2) Y_lm over l <= band, complex normal c_lm."""
    coef = np.zeros((grid.n_r, grid.n_h), dtype=complex)
    r = grid.r_nodes
    for l in range(band + 1):
        for m in range(-l, l + 1):
            c = complex(rng.standard_normal(), rng.standard_normal())
            a0, a1 = rng.standard_normal(2)
            coef[:, l * (l + 1) + m] = c * r**l * (a0 + a1 * r**2)
    return ScalarField(grid, coef)


def random_vector(grid: SphericalGrid, rng: np.random.Generator, band: int) -> VectorField:
    """grad(phi) + L psi + N chi with independent random scalars."""
    phi, psi, chi = (random_scalar(grid, rng, band) for _ in range(3))
    return ops.gradient(phi) + ops.apply_L(psi) + ops.apply_N(chi)


def verify_identity(
    spec: IdentitySpec,
    l_max: int,
    n_r: int,
    seed: int,
    n_trials: int,
    tol: float,
    r_max: float = 1.0,
) -> IdentityReport:
    """
    Max over trials and free-index assignments of
    ||lhs - rhs|| / max(||lhs||, ||rhs||, ||input||).
    Test fields are band-limited to l_max - 2.
    """
    out_kind = type_check(spec)
    grid = make_grid(l_max, n_r, r_max)
    band = max(l_max - 2, 0)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_trials):
        field = random_scalar(grid, rng, band) if spec.kind == SCALAR else random_vector(grid, rng, band)
        base = norm(field)
        for values in itertools.product(range(3), repeat=len(spec.free)):
            assignment = dict(zip(spec.free, values))
            lhs = _evaluate(spec.lhs, field, assignment, out_kind)
            rhs = _evaluate(spec.rhs, field, assignment, out_kind)
            scale = max(norm(lhs), norm(rhs), base, np.finfo(float).tiny)
            worst = max(worst, norm(lhs - rhs) / scale)
    verdict = "pass" if worst < tol else "fail"
    note = spec.note
    if verdict == "fail" and "paper-suspect" in spec.tags:
        note = (note + "; " if note else "") + "fails as printed, see corrected companion"
    return IdentityReport(
        name=spec.name,
        max_rel_residual=worst if math.isfinite(worst) else float("inf"),
        n_trials=n_trials,
        verdict=verdict,
        tags=list(spec.tags),
        note=note,
    )


def run_suite(
    registry: list[IdentitySpec],
    l_max: int,
    n_r: int,
    seed: int,
    n_trials: int,
    tol: float,
) -> list[IdentityReport]:
    reports = []
    for spec in registry:
        report = verify_identity(spec, l_max, n_r, seed, n_trials, tol)
        marker = "✅" if report.verdict == "pass" else ("⚠️" if report.suspect else "❌")
        logger.info(f"{marker} IDENTITY {spec.name}: residual={report.max_rel_residual:.3e}")
        reports.append(report)
    return sorted(reports, key=lambda rep: rep.name)


def suite_passed(reports: list[IdentityReport]) -> bool:
    """Failures of identities tagged paper-suspect do not count."""
    return all(rep.verdict == "pass" or rep.suspect for rep in reports)
