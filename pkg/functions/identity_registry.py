"""
Shipping registry of operator identities, with L = -r x grad, N = curl L,
M = -r x L. Entries whose printed form does not hold in this convention are
tagged paper-suspect and sit next to the corrected form.
"""

import json
import logging
from pathlib import Path

from pydantic import TypeAdapter, ValidationError

from core.errors import SpecError
from service.algebra import IdentitySpec

logger = logging.getLogger("vsf")


def _t(ops, coef=1.0, factor="none", idx=(), sum=()):
    return {"coef": coef, "factor": factor, "factor_indices": list(idx), "sum": list(sum), "ops": list(ops)}


def _commutator(a, b):
    return [_t([a, b]), _t([b, a], -1.0)]


SUSPECT = ["paper-suspect"]
CORRECTED = ["corrected"]

_ENTRIES = [
    # zero commutators and products
    {"name": "[L,r^2]=0", "lhs": [_t(["L", "r2"]), _t(["r2", "L"], -1.0)]},
    {"name": "[L,lap]=0", "lhs": [_t(["L", "lap"]), _t(["lap", "L"], -1.0)], "note": "p^2 = -lap"},
    {"name": "[N,lap]=0", "lhs": [_t(["N", "lap"]), _t(["lap", "N"], -1.0)]},
    {"name": "r.L=0", "lhs": [_t(["rdot", "L"])]},
    {"name": "div L=0", "lhs": [_t(["div", "L"])]},
    {"name": "L.N=0", "lhs": [_t(["Ldot", "N"])]},
    {"name": "L.M=0", "lhs": [_t(["Ldot", "M"])]},
    {"name": "M.L=0", "lhs": [_t(["Mdot", "L"])]},
    {"name": "curl N=-L lap", "lhs": [_t(["curl", "N"])], "rhs": [_t(["L", "lap"], -1.0)]},
    {
        "name": "[L^2,r_i]=(r x L - L x r)_i",
        "free": ["i"],
        "lhs": [_t(["L2", "x_i"]), _t(["x_i", "L2"], -1.0)],
        "rhs": [
            _t(["x_j", "L_k"], 1.0, "eps", ("i", "j", "k"), ("j", "k")),
            _t(["L_j", "x_k"], -1.0, "eps", ("i", "j", "k"), ("j", "k")),
        ],
    },
    # Laplacian on vectors
    {
        "name": "lap=grad div-curl curl",
        "kind": "vector",
        "lhs": [_t(["lap"])],
        "rhs": [_t(["grad", "div"]), _t(["curl", "curl"], -1.0)],
    },
    # [M, lap]
    {
        "name": "[M,lap]=-6grad",
        "lhs": [_t(["M", "lap"]), _t(["lap", "M"], -1.0)],
        "rhs": [_t(["grad"], -6.0)],
        "tags": SUSPECT,
    },
    {
        "name": "[M,lap]=2N",
        "lhs": [_t(["M", "lap"]), _t(["lap", "M"], -1.0)],
        "rhs": [_t(["N"], 2.0)],
        "tags": CORRECTED,
    },
    # component commutators
    {
        "name": "[r_i,d_k]=-delta_ik",
        "free": ["i", "k"],
        "lhs": _commutator("x_i", "d_k"),
        "rhs": [_t(["id"], -1.0, "delta", ("i", "k"))],
    },
    {
        "name": "[r_i,L_k]=-eps_ikj r_j",
        "free": ["i", "k"],
        "lhs": _commutator("x_i", "L_k"),
        "rhs": [_t(["x_j"], -1.0, "eps", ("i", "k", "j"), ("j",))],
        "tags": SUSPECT,
    },
    {
        "name": "[r_i,L_k]=eps_ikj r_j",
        "free": ["i", "k"],
        "lhs": _commutator("x_i", "L_k"),
        "rhs": [_t(["x_j"], 1.0, "eps", ("i", "k", "j"), ("j",))],
        "tags": CORRECTED,
    },
    {
        "name": "[d_i,L_k]=-eps_ikj d_j",
        "free": ["i", "k"],
        "lhs": _commutator("d_i", "L_k"),
        "rhs": [_t(["d_j"], -1.0, "eps", ("i", "k", "j"), ("j",))],
        "tags": SUSPECT,
    },
    {
        "name": "[d_i,L_k]=eps_ikj d_j",
        "free": ["i", "k"],
        "lhs": _commutator("d_i", "L_k"),
        "rhs": [_t(["d_j"], 1.0, "eps", ("i", "k", "j"), ("j",))],
        "tags": CORRECTED,
    },
    {
        "name": "[d_i,N_k]=d_i d_k-lap delta_ik",
        "free": ["i", "k"],
        "lhs": _commutator("d_i", "N_k"),
        "rhs": [_t(["d_i", "d_k"]), _t(["lap"], -1.0, "delta", ("i", "k"))],
    },
    {
        "name": "[r_i,M_k]=r_i r_k-r^2 delta_ik",
        "free": ["i", "k"],
        "lhs": _commutator("x_i", "M_k"),
        "rhs": [_t(["x_i", "x_k"]), _t(["r2"], -1.0, "delta", ("i", "k"))],
        "tags": SUSPECT,
    },
    {
        "name": "[r_i,M_k]=r^2 delta_ik-r_i r_k",
        "free": ["i", "k"],
        "lhs": _commutator("x_i", "M_k"),
        "rhs": [_t(["r2"], 1.0, "delta", ("i", "k")), _t(["x_i", "x_k"], -1.0)],
        "tags": CORRECTED,
    },
    {
        "name": "[L_i,M_k]=eps_ikj r_j-r^2 eps_ikj d_j",
        "free": ["i", "k"],
        "lhs": _commutator("L_i", "M_k"),
        "rhs": [
            _t(["x_j"], 1.0, "eps", ("i", "k", "j"), ("j",)),
            _t(["r2", "d_j"], -1.0, "eps", ("i", "k", "j"), ("j",)),
        ],
        "tags": SUSPECT,
    },
    {
        "name": "[L_i,M_k]=eps_ikj M_j",
        "free": ["i", "k"],
        "lhs": _commutator("L_i", "M_k"),
        "rhs": [_t(["M_j"], 1.0, "eps", ("i", "k", "j"), ("j",))],
        "tags": CORRECTED,
    },
    {
        "name": "[L_i,L_j]=eps_ijk L_k",
        "free": ["i", "j"],
        "lhs": _commutator("L_i", "L_j"),
        "rhs": [_t(["L_k"], 1.0, "eps", ("i", "j", "k"), ("k",))],
    },
    {
        "name": "[L_i,N_j]=eps_ijk N_k",
        "free": ["i", "j"],
        "lhs": _commutator("L_i", "N_j"),
        "rhs": [_t(["N_k"], 1.0, "eps", ("i", "j", "k"), ("k",))],
    },
    {
        "name": "[N_i,N_j]=-eps_ijk L_k lap",
        "free": ["i", "j"],
        "lhs": _commutator("N_i", "N_j"),
        "rhs": [_t(["L_k", "lap"], -1.0, "eps", ("i", "j", "k"), ("k",))],
    },
    # expanded forms
    {
        "name": "N=-r lap+grad(r.grad)+grad",
        "lhs": [_t(["N"])],
        "rhs": [_t(["rvec", "lap"], -1.0), _t(["grad", "Dr"]), _t(["grad"])],
    },
    {
        "name": "r x N=-(1+r.grad)L",
        "lhs": [_t(["rcross", "N"])],
        "rhs": [_t(["L"], -1.0), _t(["Dr", "L"], -1.0)],
    },
    {
        "name": "(r.grad)^2=r^2 d_r^2+r.grad",
        "lhs": [_t(["Dr", "Dr"])],
        "rhs": [_t(["r2", "dr", "dr"]), _t(["Dr"])],
    },
    # r . N
    {"name": "r.N=0", "lhs": [_t(["rdot", "N"])], "tags": SUSPECT},
    {"name": "r.N=L^2", "lhs": [_t(["rdot", "N"])], "rhs": [_t(["L2"])], "tags": SUSPECT},
    {"name": "r.N=-L^2", "lhs": [_t(["rdot", "N"])], "rhs": [_t(["L2"], -1.0)], "tags": CORRECTED},
]

_adapter = TypeAdapter(list[IdentitySpec])


def shipping_registry() -> list[IdentitySpec]:
    return _adapter.validate_python(_ENTRIES)


def registry_to_json(registry: list[IdentitySpec]) -> str:
    return json.dumps([spec.model_dump() for spec in registry], indent=2)


def load_registry(path: str | Path) -> list[IdentitySpec]:
    try:
        payload = json.loads(Path(path).read_text())
        return _adapter.validate_python(payload)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        logger.error(f"❌ REGISTRY LOAD ERROR: {str(e)}")
        raise SpecError(f"cannot load identity registry {path}: {e}")
