"""Seeded property suites: oracle agreement, belief algebra, and fixed-point properties.

Every suite draws from its own `random.Random(seed)` stream and returns a
SuiteResult listing each violation it found, so the same seed always gives
the same cases and the same verdicts.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .beliefs import (
    MarginalBelief,
    check_reverse_bayes,
    condition,
    is_log_concave,
    log_concave_weights,
    message_types,
    rank_map,
    virtual_cost,
)
from .game import (
    quantity_comparison_violations,
    run_rationalizability,
    costly_type_disclosure_violations,
    hidden_type_silence_violations,
)
from .menus import (
    brute_force_best_menu,
    expected_principal_payoff,
    optimal_menu,
    optimal_quantities,
)
from .model import Contract, make_type_grid, make_value_function, validate_value_function
from .scenario import random_scenario_dict, random_value_spec, scenario_from_dict


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    violations: list[str] = field(default_factory=list)
    seconds: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def _timed(fn: Callable[..., SuiteResult]):
    def run(*args, **kwargs) -> SuiteResult:
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# ---------------------------------------------------------------------------
# random ingredients


def random_log_concave_weights(rng: random.Random, n: int, top: int = 6) -> list[int]:
    while True:
        ws = [rng.randint(1, top) for _ in range(n)]
        if log_concave_weights(ws):
            return ws


def random_value_table(rng: random.Random, b: int, start: int) -> dict:
    """Marginal values falling by less than 1 per step, never integers, all positive."""
    while True:
        steps = [Fraction(rng.randint(1, 6 * start), 7) + Fraction(1, 13)]
        for _ in range(b - 1):
            steps.append(steps[-1] - Fraction(rng.randint(1, 12), 13))
        values = [Fraction(0)]
        for d in steps:
            values.append(values[-1] + d)
        spec = {"table": [str(x) for x in values]}
        if validate_value_function(make_value_function(spec, b)).ok:
            return spec


def oracle_fixture(rng: random.Random):
    """A small instance the brute-force search can cover: b <= 8, at most 3 supported types."""
    k = rng.choice([1, 2, 2, 3, 3])
    m = rng.randint(max(k, 2), 3)
    b = rng.randint(2 * m, 7 if k == 3 else 8)
    gamma = rng.randint(b + 1, 3 * b)
    lo = rng.randint(1, m - k + 1)
    support = (lo, lo + k - 1)
    p = MarginalBelief.from_weights((1, m), support, random_log_concave_weights(rng, k, 4))
    v = make_value_function(random_value_table(rng, b, m + 3), b)
    return make_type_grid(gamma, m), v, p


def _perturbed_payoff(sol, p, v, types) -> Fraction:
    """The FOC menu with one unit added to the most efficient type's transfer."""
    rows = [(r.contract.q, r.contract.t) for r in sol.rows]
    q, t = rows[0]
    rows[0] = (q, t + 1)
    menu = frozenset(Contract(q, t) for q, t in rows)
    return expected_principal_payoff(menu, p, v, types)


@_timed
def oracle_suite(seed: int, n: int = 50, fault: bool = False) -> SuiteResult:
    """FOC menu payoff against exhaustive search, adversarial tie-breaking.

    With fault=True the FOC menu is deliberately broken (see _perturbed_payoff)
    and a violation is reported whenever the oracle fails to notice.
    """
    rng = random.Random(seed)
    res = SuiteResult("oracle-fault-injection" if fault else "oracle-equivalence")
    res.notes.update(non_robust=0, by_types={1: 0, 2: 0, 3: 0})
    while res.cases < n:
        types, v, p = oracle_fixture(rng)
        sol = optimal_menu(p, v, types)
        if fault and sol.rows[0].contract.q == 0:
            continue  # the broken transfer is never chosen, nothing to detect
        res.cases += 1
        res.notes["by_types"][len(p.supported)] += 1
        if not sol.robust:
            res.notes["non_robust"] += 1
        best, _ = brute_force_best_menu(p, v, types)
        ours = _perturbed_payoff(sol, p, v, types) if fault else expected_principal_payoff(sol.menu, p, v, types)
        label = f"case {res.cases}: gamma={types.gamma} b={v.b} belief={[str(x) for x in p.probs]}"
        if fault and ours == best:
            res.violations.append(f"{label}: perturbed menu still matches the oracle")
        if not fault and ours != best:
            res.violations.append(f"{label}: FOC payoff {ours} vs oracle {best}")
    return res


# ---------------------------------------------------------------------------
# belief algebra


@_timed
def truncation_suite(seed: int, n: int = 100) -> SuiteResult:
    """Conditioning a full-support log-concave belief on a truncation.

    Checks ratio preservation along the rank map, log-concavity of the
    conditional, and the lower-tail-over-own-probability identity.
    """
    rng = random.Random(seed)
    res = SuiteResult("truncation-identities")
    for _ in range(n):
        m = rng.randint(2, 7)
        big = MarginalBelief.from_weights((1, m), (1, m), random_log_concave_weights(rng, m, 9))
        lo = rng.randint(1, m)
        hi = rng.randint(lo, m)
        small = condition(big, (lo, hi))
        res.cases += 1
        tag = f"weights {[str(x) for x in big.probs]} on [{lo},{hi}]"
        jmap = rank_map((lo, hi), (1, m))
        # i-th highest type of the truncation sits at rank jmap[i] in the full range
        top_small = list(reversed(message_types((lo, hi))))
        top_big = list(reversed(message_types((1, m))))
        for i in jmap:
            for h in range(1, len(top_small) - i + 1):
                a, b = top_small[i - 1], top_small[i + h - 1]
                if small.p(b) / small.p(a) != big.p(top_big[jmap[i + h] - 1]) / big.p(top_big[jmap[i] - 1]):
                    res.violations.append(f"{tag}: ratio identity fails at ranks {i},{i + h}")
        if not is_log_concave(small):
            res.violations.append(f"{tag}: conditional is not log-concave")
        for i in jmap:
            for k in range(1, len(top_small) - i + 1):
                lhs = sum(small.p(top_small[i + h - 1]) for h in range(1, k + 1)) / small.p(top_small[i - 1])
                rhs = sum(big.p(top_big[jmap[i + h] - 1]) for h in range(1, k + 1)) / big.p(top_big[jmap[i] - 1])
                if lhs != rhs:
                    res.violations.append(f"{tag}: tail identity fails at rank {i}, depth {k}")
    return res


def random_rb_pair(rng: random.Random, m: int):
    """Two reverse-Bayesian log-concave beliefs drawn from one weight vector.

    The large belief lives on the full range; the small one on a message
    whose lowest type is at or above the large support's lowest type.
    """
    ws = random_log_concave_weights(rng, m, 9)
    a = rng.randint(1, m)
    b = rng.randint(a, m)
    big = MarginalBelief.from_weights((1, m), (a, b), ws[a - 1:b])
    lo = rng.randint(a, b)
    hi = rng.randint(max(lo, b), m)
    a2 = rng.randint(lo, b)
    b2 = rng.randint(a2, min(b, hi))
    small = MarginalBelief.from_weights((lo, hi), (a2, b2), ws[a2 - 1:b2])
    return big, small


@_timed
def cross_awareness_suite(seed: int, n: int = 100) -> SuiteResult:
    """Quantity sets of common types under reverse-Bayesian pairs.

    Same lowest support: identical quantity sets. Large belief starting
    lower: every quantity under the small belief is at least every quantity
    under the large one, strictly when the newly counted tail outweighs the
    type's own probability.
    """
    rng = random.Random(seed)
    res = SuiteResult("cross-awareness-quantities")
    res.notes.update(equal_min=0, lower_min=0, strict_trigger=0)
    while res.cases < n:
        m = rng.randint(2, 6)
        big, small = random_rb_pair(rng, m)
        if not check_reverse_bayes(big, small):
            res.violations.append(f"generator produced a non-RB pair {big} {small}")
            continue
        floor = Fraction(m + 9 * m)
        b, spec = random_value_spec(rng, floor, 2 * m)
        v = make_value_function(spec, b)
        res.cases += 1
        lo_big, lo_small = big.supported[0], small.supported[0]
        common = [j for j in small.supported if j in big.supported]
        for j in common:
            qs = optimal_quantities(v, virtual_cost(small, j))
            qb = optimal_quantities(v, virtual_cost(big, j))
            tag = f"big {big.probs} small {small.message}:{small.probs} type {j}"
            if lo_big == lo_small:
                res.notes["equal_min"] += 1
                if qs != qb:
                    res.violations.append(f"{tag}: quantity sets {qs} vs {qb} differ")
            else:
                res.notes["lower_min"] += 1
                if min(qs) < max(qb):
                    res.violations.append(f"{tag}: {qs} not above {qb}")
                tail = sum((big.p(i) for i in big.supported if i < small.message[0]), Fraction(0))
                if tail > big.p(j):
                    res.notes["strict_trigger"] += 1
                    if min(qs) <= max(qb):
                        res.violations.append(f"{tag}: tail {tail} > {big.p(j)} but {qs} not strictly above {qb}")
    return res


# ---------------------------------------------------------------------------
# fixed points


def _scenario_stream(seed: int, side: str, n: int):
    rng = random.Random(seed)
    for i in range(n):
        m = rng.choice([3, 4, 5])
        W = rng.choice([1, 2, 3])
        d = random_scenario_dict(rng, side, m, W)
        yield i, d, scenario_from_dict(d, name=f"{side}-{seed}-{i}")


@_timed
def high_side_suite(seed: int, n: int = 20) -> SuiteResult:
    """Unaware of costly types: at the fixed point every such type reveals its whole tree."""
    res = SuiteResult("high-side-full-disclosure")
    res.notes.update(levels=[])
    for i, d, s in _scenario_stream(seed, "high", n):
        st = run_rationalizability(s)
        res.cases += 1
        res.notes["levels"].append(st.level)
        tag = f"scenario {i} (m={s.types.m}, W={s.W}, aware={s.theta_p})"
        if not st.converged:
            res.violations.append(f"{tag}: no fixed point by level {st.level}")
            continue
        for j, tree, allowed in costly_type_disclosure_violations(st):
            res.violations.append(f"{tag}: type {j} in tree {tree} may send {sorted(allowed)}")
        res.violations += [f"{tag}: {x}" for x in quantity_comparison_violations(st)]
    return res


@_timed
def low_side_suite(seed: int, n: int = 20) -> SuiteResult:
    """Unaware of efficient types: nobody reveals, and hidden types take the lowest known contract.

    Violations of the two parts are counted separately in `notes`.
    """
    res = SuiteResult("low-side-non-disclosure")
    res.notes.update(levels=[], disclosure=0, bunching=0, failing_hidden_counts=[])
    for i, d, s in _scenario_stream(seed, "low", n):
        st = run_rationalizability(s)
        res.cases += 1
        res.notes["levels"].append(st.level)
        tag = f"scenario {i} (m={s.types.m}, W={s.W}, aware={s.theta_p})"
        if not st.converged:
            res.violations.append(f"{tag}: no fixed point by level {st.level}")
            continue
        found = hidden_type_silence_violations(st)
        disclosure = [x for x in found if "may send" in x]
        res.notes["disclosure"] += len(disclosure)
        res.notes["bunching"] += len(found) - len(disclosure)
        if disclosure:
            res.notes["failing_hidden_counts"].append(s.theta_p[0] - 1)
        res.violations += [f"{tag}: {x}" for x in found]
        res.violations += [f"{tag}: {x}" for x in quantity_comparison_violations(st)]
    return res


SUITES = {
    "oracle": oracle_suite,
    "truncation": truncation_suite,
    "cross-awareness": cross_awareness_suite,
    "high-side": high_side_suite,
    "low-side": low_side_suite,
}


def run_all(seed: int) -> list[SuiteResult]:
    return [fn(seed) for fn in SUITES.values()]
