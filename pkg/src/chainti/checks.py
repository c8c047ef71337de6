"""Invariant battery run by ``chainti check``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import theory
from .chains import ABC_FAMILIES, LinkDistribution, alpha_vector, get_family, ti2, verify_0mp
from .indices import IndexFunction, builtin, degree_power_index, topological_index, vertex_power_sum
from .oracle import OracleLimit, enumerate_exact, total_variation
from .tolerances import IDENTITY_TOL, TV_TOL


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _close(a, b, tol=IDENTITY_TOL):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def check_alpha_abc(family_name: str, f: IndexFunction, alpha=None) -> CheckResult:
    fam = get_family(family_name)
    alpha = alpha_vector(fam, f) if alpha is None else np.asarray(alpha)
    abc = theory.abc_constants(family_name, f)
    base = ti2(fam, f)
    ok = _close(alpha[0], abc.A + abc.B) and all(_close(a, abc.B) for a in alpha[1:]) \
        and _close(base, 2 * abc.B + abc.C)
    return CheckResult(f"alpha-vs-ABC {family_name}/{f.name}", ok,
                       f"alpha={np.round(alpha, 9).tolist()} A={abc.A:.9g} B={abc.B:.9g} C={abc.C:.9g} TI2={base:.9g}")


def check_oracle(family_name: str, f: IndexFunction, probs, n: int, limit: OracleLimit,
                 alpha=None) -> CheckResult:
    fam = get_family(family_name)
    alpha = alpha_vector(fam, f) if alpha is None else np.asarray(alpha)
    base = ti2(fam, f)
    oracle = enumerate_exact(fam, f, probs, n, limit)
    exact = theory.exact_distribution(alpha, probs, base, n)
    mom = theory.moments(alpha, probs, base, n)
    tv = total_variation(oracle, exact)
    ok = tv < TV_TOL and _close(oracle.mean, mom.mean) and _close(oracle.variance, mom.variance)
    return CheckResult(f"oracle-vs-multinomial {family_name}/{f.name} n={n}", ok,
                       f"{fam.m ** (n - 2)} sequences, TV={tv:.3g}")


def check_0mp(family_name: str, f: IndexFunction, seed: int, depth: int = 50, trials: int = 100) -> CheckResult:
    report = verify_0mp(get_family(family_name), f, depth, trials, seed)
    detail = f"{report.steps_checked} steps" if report else f"counterexample {report.counterexample}"
    return CheckResult(f"0MP {family_name}/{f.name}", report.passed, detail)


def check_abc_symmetry(f: IndexFunction) -> CheckResult:
    rpc = theory.abc_constants("phenylene", f)
    rpoc = theory.abc_constants("polyphenyl", f)
    rcc = theory.abc_constants("cyclooctane", f)
    ok = abs(rcc.A - rpoc.A) <= 1e-12 and abs(rpoc.A + rpc.A) <= 1e-12 and abs(rcc.C - rpoc.C) <= 1e-12
    return CheckResult(f"A_RCC = A_RPoC = -A_RPC, C_RCC = C_RPoC ({f.name})", ok,
                       f"A=({rcc.A:.6g}, {rpoc.A:.6g}, {rpc.A:.6g})")


def check_degenerate(family_name: str, n: int, probs) -> CheckResult:
    """First Zagreb index: zero variance and a single atom at B n + C."""
    fam = get_family(family_name)
    f = builtin("m1")
    alpha = alpha_vector(fam, f)
    base = ti2(fam, f)
    mom = theory.moments(alpha, probs, base, n)
    exact = theory.exact_distribution(alpha, probs, base, n)
    ok = mom.variance == 0.0 and len(exact.support) == 1
    if family_name in ABC_FAMILIES:
        abc = theory.abc_constants(family_name, f)
        ok = ok and _close(exact.support[0], abc.B * n + abc.C)
    return CheckResult(f"degenerate m1 {family_name} n={n}", ok,
                       f"variance={mom.variance} atoms={len(exact.support)}")


def check_vertex_power(family_name: str, seed: int, n: int = 30) -> CheckResult:
    fam = get_family(family_name)
    rng = np.random.Generator(np.random.Philox(seed))
    state = fam.grow(rng.integers(1, fam.m + 1, size=n - 2))
    worst = 0.0
    for a in (0, 1, 2):
        lhs = topological_index(state.graph, degree_power_index(a))
        rhs = vertex_power_sum(state.graph, a)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return CheckResult(f"edge power sum = vertex power sum {family_name}", worst <= IDENTITY_TOL,
                       f"max rel gap {worst:.3g}")


def run_battery(families, indices, max_n: int = 7, seed: int = 2024,
                limit: OracleLimit = OracleLimit(), p1: float = 0.5, alpha_offset: float = 0.0):
    """All checks for the given families and indices.

    ``alpha_offset`` is added to alpha_1 on the theory side; it exists to
    exercise failure reporting.
    """
    results = []
    for f in indices:
        results.append(check_abc_symmetry(f))
    for name in families:
        fam = get_family(name)
        probs = LinkDistribution.default(fam.m, p1)
        for f in indices:
            alpha = alpha_vector(fam, f)
            if alpha_offset:
                alpha = alpha.copy()
                alpha[0] += alpha_offset
            if name in ABC_FAMILIES:
                results.append(check_alpha_abc(name, f, alpha))
            for n in range(3, max_n + 1):
                results.append(check_oracle(name, f, probs, n, limit, alpha))
            results.append(check_0mp(name, f, seed))
        results.append(check_degenerate(name, max_n, probs))
        results.append(check_vertex_power(name, seed))
    return results
