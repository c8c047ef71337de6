"""Seeded replication engine for random chain experiments.

Replication ``r`` of a run with master seed ``s`` draws its links from a
Philox generator keyed by ``SeedSequence(s, spawn_key=(r,))``, the same
stream ``SeedSequence(s).spawn(r + 1)[r]`` would give. Results therefore do
not depend on which worker ran a replication or in what order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chains import ChainFamily, IncrementFamily, LinkDistribution, alpha_vector, ti2
from .indices import IndexFunction, topological_index
from .theory import MomentSummary


class SimulationError(ValueError):
    pass


def stream(master_seed: int, r: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(r,))))


def draw_links(rng: np.random.Generator, probs: LinkDistribution, steps: int) -> np.ndarray:
    """``steps`` i.i.d. link labels in ``1..m``."""
    return rng.choice(probs.m, size=steps, p=probs.as_array()) + 1


def _replicate(family, probs, n, fs, rng, fast):
    links = draw_links(rng, probs, n - 2)
    x = np.bincount(links - 1, minlength=probs.m)
    if fast or not getattr(family, "has_graphs", False):
        tis = []
        for f in fs:
            alpha = alpha_vector(family, f)
            tis.append(math.fsum([ti2(family, f), *(alpha * x)]))
        return tis, x
    state = family.initial()
    for link in links:
        family.attach(state, int(link))
    return [topological_index(state.graph, f) for f in fs], x


def simulate_chain(family, probs, n: int, f: IndexFunction, seed, fast: bool = False):
    """Grow one G_n and return ``(TI_n, link counts)``.

    ``seed`` is an int or a ``numpy.random.Generator``. With ``fast`` the
    graph is skipped and TI_n is assembled from the alpha increments.
    """
    if n < 2:
        raise SimulationError(f"n must be >= 2, got {n}")
    probs = _dist(probs, family)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(np.random.Philox(seed))
    tis, x = _replicate(family, probs, n, [f], rng, fast)
    return tis[0], x


@dataclass
class SampleSet:
    family: str
    index: str
    n: int
    probs: LinkDistribution
    master_seed: int
    ti_values: np.ndarray
    x_counts: np.ndarray
    fast: bool = False

    @property
    def reps(self) -> int:
        return len(self.ti_values)

    def to_csv(self) -> str:
        m = self.x_counts.shape[1]
        lines = ["rep,ti," + ",".join(f"x{i + 1}" for i in range(m))]
        for r, (ti, x) in enumerate(zip(self.ti_values, self.x_counts)):
            lines.append(f"{r},{float(ti)!r}," + ",".join(str(int(v)) for v in x))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "index": self.index,
            "n": self.n,
            "p": list(self.probs.probs),
            "seed": self.master_seed,
            "reps": self.reps,
            "fast_increments": self.fast,
            "ti": [float(v) for v in self.ti_values],
            "x": self.x_counts.tolist(),
        }


def _dist(probs, family):
    probs = probs if isinstance(probs, LinkDistribution) else LinkDistribution(probs)
    if probs.m != family.m:
        raise SimulationError(f"{family.name} has {family.m} link types, got {probs.m} probabilities")
    return probs


def _chunk(args):
    family, probs, n, fs, master_seed, reps, fast = args
    return [_replicate(family, probs, n, fs, stream(master_seed, r), fast) for r in reps]


def run_experiments(family, probs, n: int, fs, reps: int, master_seed: int,
                    workers: int = 1, fast: bool = False) -> dict[str, SampleSet]:
    """Like :func:`run_experiment` for several indices on the same chains."""
    if reps < 1:
        raise SimulationError(f"reps must be >= 1, got {reps}")
    if n < 2:
        raise SimulationError(f"n must be >= 2, got {n}")
    probs = _dist(probs, family)
    fs = list(fs)
    if workers <= 1:
        results = _chunk((family, probs, n, fs, master_seed, range(reps), fast))
    else:
        chunks = [range(r0, min(reps, r0 + 8)) for r0 in range(0, reps, 8)]
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_chunk, [(family, probs, n, fs, master_seed, c, fast) for c in chunks])
            results = [item for part in parts for item in part]
    x_counts = np.array([x for _, x in results], dtype=np.int64)
    out = {}
    for k, f in enumerate(fs):
        ti_values = np.array([tis[k] for tis, _ in results])
        out[f.name] = SampleSet(family.name, f.name, n, probs, master_seed, ti_values, x_counts, fast)
    return out


def run_experiment(family, probs, n: int, f: IndexFunction, reps: int, master_seed: int,
                   workers: int = 1, fast: bool = False) -> SampleSet:
    """``reps`` independent replications of G_n, replication ``r`` on ``stream(master_seed, r)``."""
    return run_experiments(family, probs, n, [f], reps, master_seed, workers, fast)[f.name]


# Summaries -----------------------------------------------------------------


def normal_cdf(z):
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def ks_statistic(z) -> float:
    """Kolmogorov distance between the empirical CDF of ``z`` and N(0, 1)."""
    z = np.sort(np.asarray(z, dtype=float))
    k = len(z)
    cdf = np.array([normal_cdf(v) for v in z])
    upper = np.arange(1, k + 1) / k - cdf
    lower = cdf - np.arange(0, k) / k
    return float(max(upper.max(), lower.max()))


@dataclass
class SampleSummary:
    mean: float
    variance: float
    ks_statistic: float | None
    reps: int
    degenerate: bool = False
    notes: list = field(default_factory=list)


def summarize(s: SampleSet, theory: MomentSummary) -> SampleSummary:
    if s.reps < 2:
        raise SimulationError("summarize needs at least 2 replications")
    values = np.asarray(s.ti_values, dtype=float)
    mean = math.fsum(values) / len(values)
    variance = math.fsum((values - mean) ** 2) / (len(values) - 1)
    if theory.variance <= 0:
        return SampleSummary(mean, variance, None, s.reps, True,
                             ["theory variance is zero; KS statistic skipped"])
    z = (values - theory.mean) / math.sqrt(theory.variance)
    return SampleSummary(mean, variance, ks_statistic(z), s.reps)


def silverman_bandwidth(values) -> float:
    """``0.9 * min(sd, IQR / 1.34) * k**(-1/5)``; falls back to ``sd`` when IQR is 0."""
    values = np.asarray(values, dtype=float)
    sd = float(np.std(values, ddof=1))
    q75, q25 = np.percentile(values, [75, 25])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * spread * len(values) ** (-0.2)


def kde(s, grid_points: int = 512):
    """Gaussian KDE of the sample on an evenly spaced grid.

    ``s`` is a SampleSet or a 1-d array. The grid spans three bandwidths
    beyond the extreme observations.
    """
    values = np.asarray(s.ti_values if isinstance(s, SampleSet) else s, dtype=float)
    if len(values) < 2:
        raise SimulationError("KDE needs at least 2 observations")
    if np.std(values) == 0:
        raise SimulationError("KDE bandwidth is undefined for a sample with zero variance")
    if grid_points < 2:
        raise SimulationError("KDE needs at least 2 grid points")
    bw = silverman_bandwidth(values)
    grid = np.linspace(values.min() - 3 * bw, values.max() + 3 * bw, grid_points)
    u = (grid[:, None] - values[None, :]) / bw
    density = np.exp(-0.5 * u * u).sum(axis=1) / (len(values) * bw * math.sqrt(2 * math.pi))
    return grid, density


def trapezoid_mass(grid, density) -> float:
    return float(np.trapezoid(density, grid)) if hasattr(np, "trapezoid") else float(np.trapz(density, grid))


def linear_identity_residuals(s: SampleSet, abc) -> np.ndarray:
    """``|ti - (A x_1 + B n + C)| / (1 + |ti|)`` per replication."""
    pred = abc.A * s.x_counts[:, 0] + abc.B * s.n + abc.C
    return np.abs(s.ti_values - pred) / (1 + np.abs(s.ti_values))
