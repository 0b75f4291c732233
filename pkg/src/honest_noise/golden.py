"""Published reference values for the reproduced tables, as a read-only dataset.

Every cell carries a provenance string naming the table, row and column it
was transcribed from. Values are as printed (four decimals).
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType


@dataclass(frozen=True)
class GoldenCell:
    table: int
    row: str
    quantity: str
    value: float
    provenance: str


# default comparison tolerance per table
DEFAULT_TOL = MappingProxyType({1: 2e-3, 2: 5e-4, 3: 2e-3, 4: 5e-4, 5: 2e-3})

_CHI = ("chi00", "chi11", "chi22", "chi33")


def _row(table: int, row: str, names, values, what: str):
    return tuple(
        GoldenCell(table, row, q, v, f"table {table} / {what} {row} / column {q}")
        for q, v in zip(names, values)
    )


_TABLE1 = {
    "1": (0.9860, 0.0020, 0.0040, 0.0080, 0.0152),
    "2": (0.9700, 0.0100, 0.0100, 0.0100, 0.0),
    "3,0": (0.9900, 0.0, 0.0, 0.0100, 0.0281),
    "3,1": (0.9860, 0.0022, 0.0040, 0.0078, 0.0359),
    "3,2": (0.9850, 0.0050, 0.0050, 0.0050, 0.0381),
    "3,3": (0.9860, 0.0078, 0.0040, 0.0022, 0.0359),
    "3,4": (0.9900, 0.0100, 0.0, 0.0, 0.0281),
}

GOLDEN: MappingProxyType = MappingProxyType({
    1: sum((_row(1, k, _CHI + ("diamond",), v, "Pauli approximation of channel") for k, v in _TABLE1.items()),
           ()),
    2: _row(2, "1", ("chi00",), (0.9900,), "channel")
       + _row(2, "2", ("chi00",), (0.9700,), "channel")
       + _row(2, "3,j", ("chi00",), (0.9999,), "channel"),
    3: _row(3, "3,0", _CHI + ("diamond",), (0.9929, 0.0, 0.0, 0.0071, 0.0151), "Pauli+Z90 approximation of channel"),
    4: sum((_row(4, k, ("twirl_diamond", "pauli_diamond"), v, "channel")
            for k, v in {"1": (0.0071, 0.0152), "3,0": (0.0020, 0.0281),
                         "3,1": (0.0020, 0.0359), "3,2": (0.0020, 0.0381)}.items()), ()),
    5: _row(5, "2q", ("chi_II", "chi_XX", "diamond"), (0.9900, 0.0100, 0.0281), "two-qubit sparse approximation"),
})


def cells(table: int) -> tuple:
    if table not in GOLDEN:
        raise KeyError(f"no reference table {table}; choose from {sorted(GOLDEN)}")
    return GOLDEN[table]


def lookup(table: int, row: str, quantity: str) -> GoldenCell:
    for c in cells(table):
        if c.row == row and c.quantity == quantity:
            return c
    raise KeyError(f"table {table} has no cell ({row}, {quantity})")
