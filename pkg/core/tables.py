"""
CSV tables for moments and form factors.

Columns: l, m, n_or_k, re, im, quantity. Floats are written with repr so
they round-trip exactly; files are UTF-8 with LF line endings.
"""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

HEADER = ("l", "m", "n_or_k", "re", "im", "quantity")


@dataclass(frozen=True)
class TableRow:
    l: int
    m: int
    n_or_k: float
    value: complex
    quantity: str


def _fmt(x: float) -> str:
    return repr(float(x))


def write_table(path: str | Path, rows: Iterable[TableRow]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for row in rows:
            n_or_k = str(row.n_or_k) if isinstance(row.n_or_k, int) else _fmt(row.n_or_k)
            writer.writerow(
                [row.l, row.m, n_or_k, _fmt(row.value.real), _fmt(row.value.imag), row.quantity]
            )
    return path


def read_table(path: str | Path) -> list[TableRow]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for rec in reader:
            raw = rec["n_or_k"]
            n_or_k = int(raw) if raw.lstrip("-").isdigit() else float(raw)
            rows.append(
                TableRow(
                    int(rec["l"]),
                    int(rec["m"]),
                    n_or_k,
                    complex(float(rec["re"]), float(rec["im"])),
                    rec["quantity"],
                )
            )
        return rows


def lookup(rows: Iterable[TableRow], quantity: str, l: int, m: int) -> list[TableRow]:
    return [r for r in rows if r.quantity == quantity and r.l == l and r.m == m]


def write_series(path: str | Path, header: Iterable[str], columns: Iterable[Iterable[float]]) -> Path:
    """Plot-ready columns of real numbers, same float format as the tables."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for values in zip(*columns):
            writer.writerow([_fmt(v) for v in values])
    return path
