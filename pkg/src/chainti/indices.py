"""Degree-based topological indices TI(G) = sum over edges of h(d_u, d_v)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph import Graph

MAX_DEGREE = 16
SYMMETRY_TOL = 1e-12


class IndexDefinitionError(ValueError):
    """Invalid index definition or unknown catalog name."""


class SymmetryError(IndexDefinitionError):
    def __init__(self, x: int, y: int, gap: float):
        super().__init__(f"h is not symmetric: |h({x},{y}) - h({y},{x})| = {gap:.3g}")
        self.witness = (x, y)


class NonFiniteError(IndexDefinitionError):
    def __init__(self, x: int, y: int, value: float):
        super().__init__(f"h({x},{y}) = {value} is not finite")
        self.witness = (x, y)


def _tabulate(h: Callable[[float, float], float]) -> np.ndarray:
    table = np.zeros((MAX_DEGREE + 1, MAX_DEGREE + 1))
    for x in range(1, MAX_DEGREE + 1):
        for y in range(1, MAX_DEGREE + 1):
            try:
                val = float(h(float(x), float(y)))
            except (ValueError, ZeroDivisionError, OverflowError):
                val = math.nan
            if not math.isfinite(val):
                raise NonFiniteError(x, y, val)
            table[x, y] = val
    for x in range(1, MAX_DEGREE + 1):
        for y in range(x + 1, MAX_DEGREE + 1):
            gap = abs(table[x, y] - table[y, x])
            if gap > SYMMETRY_TOL:
                raise SymmetryError(x, y, gap)
    return table


@dataclass(frozen=True)
class IndexFunction:
    """A symmetric degree-pair function ``h`` with a display name.

    ``h`` is checked for symmetry and finiteness on ``1..MAX_DEGREE`` squared
    when the object is created; the resulting table is used for lookups.
    """

    name: str
    h: Callable[[float, float], float]
    formula: str = ""
    table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "table", _tabulate(self.h))

    def __call__(self, x: int, y: int) -> float:
        if 1 <= x <= MAX_DEGREE and 1 <= y <= MAX_DEGREE:
            return float(self.table[x, y])
        return float(self.h(float(x), float(y)))


# Module-level callables so IndexFunction pickles across worker processes.
def _sombor(x, y):
    return math.sqrt(x * x + y * y)


def _ga(x, y):
    return 2.0 * math.sqrt(x * y) / (x + y)


def _isi(x, y):
    return x * y / (x + y)


def _m2(x, y):
    return x * y


def _m1(x, y):
    return x + y


def _randic(x, y):
    return 1.0 / math.sqrt(x * y)


def _harmonic(x, y):
    return 2.0 / (x + y)


def _sum_connectivity(x, y):
    return 1.0 / math.sqrt(x + y)


_CATALOG = {
    "sombor": (_sombor, "sqrt(x^2+y^2)"),
    "ga": (_ga, "2*sqrt(x*y)/(x+y)"),
    "isi": (_isi, "x*y/(x+y)"),
    "m2": (_m2, "x*y"),
    "m1": (_m1, "x+y"),
    "randic": (_randic, "1/sqrt(x*y)"),
    "harmonic": (_harmonic, "2/(x+y)"),
    "sum_connectivity": (_sum_connectivity, "1/sqrt(x+y)"),
}

BUILTIN_NAMES = tuple(_CATALOG)
_cache: dict[str, IndexFunction] = {}


def builtin(name: str) -> IndexFunction:
    try:
        h, formula = _CATALOG[name]
    except KeyError:
        raise IndexDefinitionError(
            f"unknown index {name!r}; choose from {', '.join(BUILTIN_NAMES)}"
        ) from None
    if name not in _cache:
        _cache[name] = IndexFunction(name, h, formula)
    return _cache[name]


def catalog() -> list[IndexFunction]:
    return [builtin(name) for name in BUILTIN_NAMES]


def topological_index(g: Graph, f: IndexFunction) -> float:
    """Sum ``f(d_u, d_v)`` over the edges of ``g``.

    The sum is correctly rounded (``math.fsum``), so the result does not
    depend on the order edges are visited in.
    """
    if g.edge_count == 0:
        return 0.0
    deg = np.fromiter((len(a) for a in g.adjacency), dtype=np.int64, count=g.vertex_count)
    eu, ev = g.edge_endpoints()
    du = deg[np.asarray(eu, dtype=np.int64)]
    dv = deg[np.asarray(ev, dtype=np.int64)]
    if du.max() <= MAX_DEGREE and dv.max() <= MAX_DEGREE:
        return math.fsum(f.table[du, dv])
    return math.fsum(f(int(a), int(b)) for a, b in zip(du, dv))


def vertex_power_sum(g: Graph, a: float) -> float:
    """Sum of ``d_v ** (a + 1)`` over all vertices."""
    return math.fsum(float(len(nbrs)) ** (a + 1) for nbrs in g.adjacency)


def degree_power_index(a: float) -> IndexFunction:
    """The index with ``h(x, y) = x**a + y**a``."""
    return IndexFunction(f"power_{a:g}", _PowerSum(a), f"x^{a:g}+y^{a:g}")


@dataclass(frozen=True)
class _PowerSum:
    a: float

    def __call__(self, x, y):
        return x**self.a + y**self.a
