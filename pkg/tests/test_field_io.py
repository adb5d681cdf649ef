import json

import numpy as np
import pytest

from core.errors import FieldFormatError
from core.field_io import read_field, to_document, write_field
from core.grid import ScalarField, VectorField
from core.tables import TableRow, lookup, read_table, write_series, write_table
from service.algebra import random_scalar, random_vector


def test_vector_field_file_is_exact(tmp_path, unit_shell, rng):
    V = random_vector(unit_shell, rng, 3)
    path = write_field(tmp_path / "v.vsf.json", V)
    back = read_field(path)
    assert isinstance(back, VectorField)
    assert back.grid == unit_shell
    assert np.array_equal(back.coef, V.coef)


def test_scalar_field_file_is_exact_and_deterministic(tmp_path, unit_ball, rng):
    f = random_scalar(unit_ball, rng, 4)
    a = write_field(tmp_path / "a.vsf.json", f)
    b = write_field(tmp_path / "b.vsf.json", f)
    assert a.read_bytes() == b.read_bytes()
    back = read_field(a)
    assert isinstance(back, ScalarField)
    assert np.array_equal(back.coef, f.coef)


def _document(unit_ball) -> dict:
    return to_document(ScalarField.zeros(unit_ball)).model_dump()


@pytest.mark.parametrize(
    "mutate, key",
    [
        (lambda d: d.update(format="vsf-2"), "format"),
        (lambda d: d["grid"].pop("l_max"), "grid.l_max"),
        (lambda d: d.update(kind="tensor"), "kind"),
        (lambda d: d.update(data="AAAA"), "data"),
        (lambda d: d.update(data="not base64!"), "data"),
        (lambda d: d["grid"].update(n_theta=1), "grid"),
    ],
)
def test_malformed_files_name_the_key(tmp_path, unit_ball, mutate, key):
    doc = _document(unit_ball)
    mutate(doc)
    path = tmp_path / "bad.vsf.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(FieldFormatError) as info:
        read_field(path)
    assert info.value.key == key
    assert info.value.exit_code == 1
    assert repr(key) in info.value.detail


def test_unreadable_files(tmp_path):
    with pytest.raises(FieldFormatError):
        read_field(tmp_path / "missing.vsf.json")
    junk = tmp_path / "junk.vsf.json"
    junk.write_text("{not json")
    with pytest.raises(FieldFormatError):
        read_field(junk)


def test_table_round_trip(tmp_path):
    rows = [
        TableRow(1, 0, 0, complex(2.720699046351326, 0.0), "Qdot"),
        TableRow(1, -1, 0.1, complex(1 / 3, -2e-17), "E_k"),
        TableRow(2, 1, 2, complex(-0.1, 7.0), "T"),
    ]
    path = write_table(tmp_path / "m.csv", rows)
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    assert raw.startswith(b"l,m,n_or_k,re,im,quantity\n")
    back = read_table(path)
    assert back == rows
    assert lookup(back, "E_k", 1, -1)[0].value == complex(1 / 3, -2e-17)
    assert lookup(back, "M", 1, 0) == []


def test_series_writer(tmp_path):
    path = write_series(tmp_path / "s.csv", ("k2", "re"), ([0.01, 0.04], [1 / 3, 2.0]))
    lines = path.read_text().splitlines()
    assert lines == ["k2,re", "0.01,0.3333333333333333", "0.04,2.0"]
