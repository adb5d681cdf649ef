import json

import pytest

from core.errors import SpecError
from functions.identity_registry import load_registry, registry_to_json, shipping_registry
from service.algebra import (
    IdentityReport,
    IdentitySpec,
    levi_civita,
    run_suite,
    suite_passed,
    type_check,
    verify_identity,
)


def spec(**kwargs) -> IdentitySpec:
    return IdentitySpec.model_validate({"name": "test", **kwargs})


def test_levi_civita():
    assert levi_civita(0, 1, 2) == 1
    assert levi_civita(1, 2, 0) == 1
    assert levi_civita(1, 0, 2) == -1
    assert levi_civita(0, 0, 2) == 0


@pytest.mark.parametrize(
    "bad",
    [
        {"lhs": [{"ops": ["div"]}]},
        {"lhs": [{"ops": ["grad"]}], "rhs": [{"ops": ["lap"]}]},
        {"lhs": [{"ops": ["frobnicate"]}]},
        {"lhs": [{"ops": ["x_i"]}]},
        {"free": ["i"], "lhs": [{"ops": ["x_i"], "factor": "eps", "factor_indices": ["i", "j"]}]},
        {"lhs": [{"ops": ["id"], "factor": "delta", "factor_indices": ["i", "k"]}]},
        {"lhs": []},
    ],
)
def test_type_check_rejects(bad):
    with pytest.raises(SpecError):
        type_check(spec(**bad))


def test_type_check_output_kind():
    assert type_check(spec(lhs=[{"ops": ["curl", "grad"]}])) == "vector"
    assert type_check(spec(kind="vector", lhs=[{"ops": ["div", "curl"]}])) == "scalar"


def test_true_and_false_identities():
    ok = verify_identity(spec(lhs=[{"ops": ["div", "L"]}]), 6, 16, seed=1, n_trials=3, tol=1e-9)
    assert ok.verdict == "pass"
    assert ok.max_rel_residual < 1e-9
    wrong = verify_identity(
        spec(lhs=[{"ops": ["lap"]}], rhs=[{"ops": ["L2"]}]), 6, 16, seed=1, n_trials=3, tol=1e-9
    )
    assert wrong.verdict == "fail"


def test_fixed_indices_and_sums():
    # sum_i d_i d_i = lap
    s = spec(lhs=[{"ops": ["d_i", "d_i"], "sum": ["i"]}], rhs=[{"ops": ["lap"]}])
    assert verify_identity(s, 6, 16, seed=42, n_trials=2, tol=1e-9).verdict == "pass"
    # [x_1, d_1] = -1
    s = spec(lhs=[{"ops": ["x_1", "d_1"]}, {"ops": ["d_1", "x_1"], "coef": -1.0}], rhs=[{"ops": ["id"], "coef": -1.0}])
    assert verify_identity(s, 6, 16, seed=42, n_trials=2, tol=1e-9).verdict == "pass"


def test_verification_is_deterministic():
    s = spec(lhs=[{"ops": ["rdot", "N"]}], rhs=[{"ops": ["L2"], "coef": -1.0}])
    a = verify_identity(s, 6, 16, seed=7, n_trials=2, tol=1e-9)
    b = verify_identity(s, 6, 16, seed=7, n_trials=2, tol=1e-9)
    assert a == b


def test_shipping_registry():
    reports = run_suite(shipping_registry(), 6, 16, seed=42, n_trials=2, tol=1e-8)
    assert [r.name for r in reports] == sorted(r.name for r in reports)
    for rep in reports:
        if rep.suspect:
            assert rep.verdict == "fail", rep.name
            assert "corrected companion" in rep.note
        else:
            assert rep.verdict == "pass", (rep.name, rep.max_rel_residual)
    assert suite_passed(reports)


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 42, 1337])
def test_full_registry_at_acceptance_settings(seed):
    reports = run_suite(shipping_registry(), 8, 16, seed=seed, n_trials=20, tol=1e-9)
    for rep in reports:
        if not rep.suspect:
            assert rep.verdict == "pass", (rep.name, rep.max_rel_residual)
            assert rep.n_trials >= 20
    assert suite_passed(reports)


def test_corrected_forms_sit_next_to_suspect_ones():
    names = {s.name: s for s in shipping_registry()}
    assert "paper-suspect" in names["r.N=0"].tags
    assert "corrected" in names["r.N=-L^2"].tags
    assert "corrected" in names["[M,lap]=2N"].tags
    assert "corrected" in names["[L_i,M_k]=eps_ikj M_j"].tags


def test_suite_passed_ignores_suspect_failures():
    good = IdentityReport(name="a", max_rel_residual=0.0, n_trials=1, verdict="pass")
    suspect = IdentityReport(name="b", max_rel_residual=1.0, n_trials=1, verdict="fail", tags=["paper-suspect"])
    bad = IdentityReport(name="c", max_rel_residual=1.0, n_trials=1, verdict="fail")
    assert suite_passed([good, suspect])
    assert not suite_passed([good, bad])


def test_registry_file_round_trip(tmp_path):
    path = tmp_path / "registry.json"
    path.write_text(registry_to_json(shipping_registry()))
    assert load_registry(path) == shipping_registry()


def test_registry_load_errors(tmp_path):
    path = tmp_path / "registry.json"
    path.write_text(json.dumps([{"name": "no sides"}]))
    with pytest.raises(SpecError):
        load_registry(path)
    with pytest.raises(SpecError):
        load_registry(tmp_path / "missing.json")
