"""Random chain families: explicit G_2, attachment rules and 0MP checks.

Every family keeps the terminal unit of the chain as a tuple ``t`` of vertex
ids in cyclic order. For bridge and spiro families ``t[0]`` is the entry
vertex; for phenylene and hexagonal chains ``(t[0], t[1])`` is the entry
edge. Links are numbered from 1 and link 1 is always the one
whose increment differs from the others.

Vertex labelling of G_2 (ids in creation order):

* polyphenyl / cyclooctane: ring 1 is ``0..k-1``, ring 2 is ``k..2k-1``,
  bridge ``(0, k)``; entry vertex ``k``.
* phenylene: hexagon ``0..5``; square ``(0, 1, 7, 6)``; hexagon ``6..11``
  with entry edge ``(6, 7)``.
* hexagonal: hexagon ``0..5``; second hexagon ``0, 1, 6, 7, 8, 9`` fused on
  ``(0, 1)``, which is also the entry edge.
* spiro: hexagon ``0..5``; second hexagon ``0, 6..10`` sharing vertex 0,
  which is the entry vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .indices import IndexFunction, topological_index

PROB_TOL = 1e-9


class ChainError(ValueError):
    pass


class LinkDistribution:
    """Probabilities ``p_1..p_m`` of the link types."""

    __slots__ = ("probs",)

    def __init__(self, probs):
        probs = tuple(float(p) for p in probs)
        if len(probs) < 1:
            raise ChainError("need at least one link probability")
        if any(not math.isfinite(p) or p < 0 for p in probs):
            raise ChainError(f"link probabilities must be non-negative, got {probs}")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ChainError(f"link probabilities must sum to 1, got sum {total:.12g}")
        self.probs = probs

    @classmethod
    def default(cls, m: int, p1: float = 0.5) -> "LinkDistribution":
        """``p_1`` fixed, remaining mass spread uniformly over links 2..m."""
        if m == 1:
            return cls([1.0])
        rest = (1.0 - p1) / (m - 1)
        return cls([p1] + [rest] * (m - 1))

    @property
    def m(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.array(self.probs)

    def __len__(self):
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)

    def __eq__(self, other):
        return isinstance(other, LinkDistribution) and self.probs == other.probs

    def __repr__(self):
        return f"LinkDistribution({list(self.probs)})"


@dataclass
class ChainState:
    """A realized chain G_n.

    ``history`` holds the link choices L_3..L_n and stands in for the
    growth sigma-field. ``last_new_edges`` lists the edges added by the most
    recent attach (all edges for a freshly built chain).
    """

    graph: Graph
    units: int
    terminal: tuple
    history: list = field(default_factory=list)
    last_new_edges: list = field(default_factory=list)

    def copy(self) -> "ChainState":
        return ChainState(self.graph.copy(), self.units, self.terminal, list(self.history), list(self.last_new_edges))


class _Recorder:
    """Collects edges added to a graph during one construction step."""

    def __init__(self, g: Graph):
        self.g = g
        self.edges = []

    def edge(self, u, v):
        self.g.add_edge(u, v)
        self.edges.append((min(u, v), max(u, v)))

    def path(self, vertices, close=False):
        vs = list(vertices)
        for u, v in zip(vs, vs[1:]):
            self.edge(u, v)
        if close:
            self.edge(vs[-1], vs[0])


class ChainFamily:
    """Base class: a named family with ``m`` link types."""

    name = ""
    m = 0
    ring = 6
    has_graphs = True

    def counts(self, n: int) -> tuple[int, int]:
        """Closed-form ``(vertex_count, edge_count)`` of G_n."""
        raise NotImplementedError

    def single_unit(self) -> ChainState:
        g = Graph(self.ring)
        rec = _Recorder(g)
        rec.path(range(self.ring), close=True)
        return ChainState(g, 1, tuple(range(self.ring)), [], rec.edges)

    def initial(self) -> ChainState:
        raise NotImplementedError

    def _attach(self, state: ChainState, link: int, rec: _Recorder) -> tuple:
        raise NotImplementedError

    def attach(self, state: ChainState, link: int) -> ChainState:
        """Grow ``state`` in place by one unit using ``link`` (1-based)."""
        if not 1 <= link <= self.m:
            raise ChainError(f"link must be in 1..{self.m} for {self.name}, got {link}")
        if state.units < 2:
            raise ChainError("attach starts from G_2; use initial()")
        rec = _Recorder(state.graph)
        state.terminal = self._attach(state, link, rec)
        state.units += 1
        state.history.append(link)
        state.last_new_edges = rec.edges
        return state

    def grow(self, history) -> ChainState:
        state = self.initial()
        for link in history:
            self.attach(state, int(link))
        return state

    def __repr__(self):
        return f"<{self.name} chain family, m={self.m}>"


class _BridgeFamily(ChainFamily):
    """Rings joined by cut edges (polyphenyl, cyclooctane)."""

    def counts(self, n):
        return self.ring * n, (self.ring + 1) * n - 1

    def initial(self):
        k = self.ring
        g = Graph(2 * k)
        rec = _Recorder(g)
        rec.path(range(k), close=True)
        rec.path(range(k, 2 * k), close=True)
        rec.edge(0, k)
        return ChainState(g, 2, tuple(range(k, 2 * k)), [], rec.edges)

    def _attach(self, state, link, rec):
        a = state.terminal[link]  # t2, t3, ... for links 1, 2, ...
        new = state.graph.add_vertices(self.ring)
        rec.path(new, close=True)
        rec.edge(a, new[0])
        return tuple(new)


class Polyphenyl(_BridgeFamily):
    name = "polyphenyl"
    m = 3
    ring = 6


class Cyclooctane(_BridgeFamily):
    name = "cyclooctane"
    m = 4
    ring = 8


# exit edge of the terminal hexagon per link, as 0-based positions in t
_EXIT_EDGES = {1: (3, 4), 2: (2, 3), 3: (4, 5)}


class Phenylene(ChainFamily):
    name = "phenylene"
    m = 3

    def counts(self, n):
        return 6 * n, 8 * n - 2

    def initial(self):
        g = Graph(12)
        rec = _Recorder(g)
        rec.path(range(6), close=True)
        rec.edge(0, 6)
        rec.edge(1, 7)
        rec.path(range(6, 12), close=True)
        return ChainState(g, 2, tuple(range(6, 12)), [], rec.edges)

    def _attach(self, state, link, rec):
        i, j = _EXIT_EDGES[link]
        e1, e2 = state.terminal[i], state.terminal[j]
        new = state.graph.add_vertices(6)
        rec.edge(e1, new[0])
        rec.edge(e2, new[1])
        rec.path(new, close=True)
        return tuple(new)


class Hexagonal(ChainFamily):
    name = "hexagonal"
    m = 3

    def counts(self, n):
        return 4 * n + 2, 5 * n + 1

    def initial(self):
        g = Graph(10)
        rec = _Recorder(g)
        rec.path(range(6), close=True)
        rec.path([1, 6, 7, 8, 9, 0])
        return ChainState(g, 2, (0, 1, 6, 7, 8, 9), [], rec.edges)

    def _attach(self, state, link, rec):
        i, j = _EXIT_EDGES[link]
        e1, e2 = state.terminal[i], state.terminal[j]
        new = state.graph.add_vertices(4)
        rec.path([e2, *new, e1])
        return (e1, e2, *new)


class Spiro(ChainFamily):
    name = "spiro"
    m = 3

    def counts(self, n):
        return 5 * n + 1, 6 * n

    def initial(self):
        g = Graph(11)
        rec = _Recorder(g)
        rec.path(range(6), close=True)
        rec.path([0, 6, 7, 8, 9, 10], close=True)
        return ChainState(g, 2, (0, 6, 7, 8, 9, 10), [], rec.edges)

    def _attach(self, state, link, rec):
        a = state.terminal[link]
        new = state.graph.add_vertices(5)
        rec.path([a, *new], close=True)
        return (a, *new)


@dataclass(frozen=True)
class IncrementFamily:
    """A 0MP chain given only by TI_2 and its per-link increments.

    Graph-level operations are not available; theory and the fast
    simulation path work from ``ti2`` and ``alpha`` directly.
    """

    m: int
    ti2: float
    alpha: tuple
    name: str = "custom"
    has_graphs = False

    def __post_init__(self):
        if self.m < 1 or len(self.alpha) != self.m:
            raise ChainError(f"custom family needs m >= 1 and {self.m} alpha values, got {len(self.alpha)}")

    @classmethod
    def from_mapping(cls, data: dict) -> "IncrementFamily":
        missing = {"m", "ti2", "alpha"} - set(data)
        if missing:
            raise ChainError(f"custom family config is missing {sorted(missing)}")
        return cls(int(data["m"]), float(data["ti2"]), tuple(float(a) for a in data["alpha"]))


FAMILIES = {cls.name: cls() for cls in (Phenylene, Polyphenyl, Cyclooctane, Hexagonal, Spiro)}
ABC_FAMILIES = ("phenylene", "polyphenyl", "cyclooctane")


def get_family(name: str) -> ChainFamily:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ChainError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}") from None


def initial_chain(family: ChainFamily) -> ChainState:
    return family.initial()


def attach(family: ChainFamily, state: ChainState, link: int) -> ChainState:
    return family.attach(state, link)


def three_chains(family: ChainFamily) -> list[ChainState]:
    """G_3^1..G_3^m, each grown from a fresh G_2."""
    return [family.attach(family.initial(), i) for i in range(1, family.m + 1)]


def ti2(family, f: IndexFunction) -> float:
    if isinstance(family, IncrementFamily):
        return family.ti2
    return topological_index(family.initial().graph, f)


def alpha_vector(family, f: IndexFunction) -> np.ndarray:
    """``alpha_i = TI(G_3^i) - TI(G_2)`` computed on the built graphs."""
    if isinstance(family, IncrementFamily):
        return np.array(family.alpha)
    base = topological_index(family.initial().graph, f)
    return np.array([topological_index(s.graph, f) - base for s in three_chains(family)])


@dataclass
class ZeroOrderReport:
    passed: bool
    steps_checked: int
    counterexample: dict | None = None

    def __bool__(self):
        return self.passed


def verify_0mp(family: ChainFamily, f: IndexFunction, depth: int, trials: int, seed: int) -> ZeroOrderReport:
    """Check TI(G_n) - TI(G_{n-1}) == alpha_{L_n} along random histories.

    Each of ``trials`` histories is grown to ``depth`` units with uniformly
    random links; TI is recomputed from scratch on every intermediate graph.
    """
    if depth < 3:
        raise ChainError(f"depth must be >= 3 to contain a growth step, got {depth}")
    alpha = alpha_vector(family, f)
    rng = np.random.Generator(np.random.Philox(seed))
    steps = 0
    for trial in range(trials):
        state = family.initial()
        prev = topological_index(state.graph, f)
        for link in rng.integers(1, family.m + 1, size=depth - 2):
            family.attach(state, int(link))
            cur = topological_index(state.graph, f)
            steps += 1
            expected = alpha[link - 1]
            if abs((cur - prev) - expected) > 1e-9 * (1 + abs(cur)):
                return ZeroOrderReport(False, steps, {
                    "trial": trial,
                    "n": state.units,
                    "history": list(state.history),
                    "increment": cur - prev,
                    "alpha": float(expected),
                })
            prev = cur
    return ZeroOrderReport(True, steps)
