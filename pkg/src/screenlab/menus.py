"""Optimal contract menus from a marginal belief, plus a brute-force oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .beliefs import MarginalBelief, virtual_cost
from .model import (
    NULL_CONTRACT,
    Contract,
    TypeGrid,
    ValueFunction,
    agent_utility,
    ceil_times_int,
    forward_diff,
    principal_utility,
)

OUTSIDE = None  # the outside option in choice sets


def optimal_quantities(v: ValueFunction, c: Fraction) -> tuple[int, ...]:
    """Quantities q with forward diff <= c <= backward diff (one side at the ends)."""
    if c <= 0:
        raise ValueError("virtual cost must be positive")
    out = []
    for q in range(v.b + 1):
        if q < v.b and forward_diff(v, q) > c:
            continue
        if q > 0 and forward_diff(v, q - 1) < c:
            continue
        out.append(q)
    return tuple(out)


@dataclass(frozen=True)
class MenuRow:
    type_index: int
    quantities: tuple[int, ...]
    contract: Contract


@dataclass(frozen=True)
class MenuSolution:
    belief: MarginalBelief
    rows: tuple[MenuRow, ...]  # supported types, increasing cost
    unique: bool
    robust: bool
    principal_expected_payoff: Fraction

    @property
    def menu(self) -> frozenset[Contract]:
        return frozenset(r.contract for r in self.rows)

    def contract_for(self, j: int) -> Contract:
        for r in self.rows:
            if r.type_index == j:
                return r.contract
        raise KeyError(f"type {j} is not supported")


def optimal_menu(p: MarginalBelief, v: ValueFunction, types: TypeGrid | None = None) -> MenuSolution:
    """FOC quantities per supported type, transfers from binding constraints.

    With a two-point quantity set the larger quantity is used; such a
    solution is flagged non-unique and non-robust. `types` is only used to
    check the rounding identity against gamma.
    """
    supported = p.supported
    if p.support is None:
        raise ValueError("support has gaps; the belief is not log-concave")
    qsets = [optimal_quantities(v, virtual_cost(p, j)) for j in supported]
    chosen = [max(s) for s in qsets]
    for k in range(len(chosen) - 1):
        # pooling can only happen at the ends of the grid
        if chosen[k] <= chosen[k + 1] and not chosen[k] == chosen[k + 1] in (0, v.b):
            raise ArithmeticError(
                f"quantities not strictly decreasing at types {supported[k]}, {supported[k + 1]}")
    transfers = [0] * len(chosen)
    for k in reversed(range(len(chosen))):
        j = supported[k]
        if k == len(chosen) - 1:
            if types is None:
                transfers[k] = j * chosen[k]
            else:
                transfers[k] = ceil_times_int(types.theta(j), chosen[k], types.gamma)
        else:
            transfers[k] = transfers[k + 1] + j * (chosen[k] - chosen[k + 1])
    rows = tuple(MenuRow(j, s, Contract(q, t)) for j, s, q, t in zip(supported, qsets, chosen, transfers))
    unique = all(len(s) == 1 for s in qsets)
    payoff = sum((p.p(r.type_index) * principal_utility(r.contract, v) for r in rows), Fraction(0))
    return MenuSolution(p, rows, unique, unique, payoff)


def is_robust(sol: MenuSolution) -> bool:
    return all(len(r.quantities) == 1 for r in sol.rows)


def agent_choice(menu: Iterable[Contract], theta: Fraction) -> set:
    """Payoff-maximizing options in menu plus the outside option (None)."""
    options = [OUTSIDE] + sorted(set(menu))
    values = [agent_utility(c, theta) for c in options]
    best = max(values)
    return {c for c, u in zip(options, values) if u == best}


def agent_payoff(menu: Iterable[Contract], theta: Fraction) -> Fraction:
    return max([Fraction(0)] + [agent_utility(c, theta) for c in menu])


def expected_principal_payoff(menu: Iterable[Contract], p: MarginalBelief, v: ValueFunction,
                              types: TypeGrid, tie_rule: str = "adversarial") -> Fraction:
    if tie_rule not in ("adversarial", "optimistic"):
        raise ValueError(f"unknown tie rule {tie_rule!r}")
    pick = min if tie_rule == "adversarial" else max
    menu = list(menu)
    total = Fraction(0)
    for j in p.supported:
        choices = agent_choice(menu, types.theta(j))
        total += p.p(j) * pick(principal_utility(c, v) for c in choices)
    return total


def information_rent(sol: MenuSolution, j: int, types: TypeGrid) -> Fraction:
    """Round-up rent q/gamma at own contract plus the quantities of higher supported types."""
    own = sol.contract_for(j)
    higher = sum(r.contract.q for r in sol.rows if r.type_index > j)
    rent = Fraction(own.q, types.gamma) + higher
    direct = agent_utility(own, types.theta(j))
    if rent != direct:
        raise AssertionError(f"rent {rent} differs from utility {direct} at type {j}")
    return rent


@dataclass(frozen=True)
class ConstraintCheck:
    kind: str  # "PC" or "IC"
    type_index: int
    other: int | None
    slack: Fraction

    @property
    def status(self) -> str:
        return "strict" if self.slack > 0 else "weak" if self.slack == 0 else "violated"


def verify_constraints(sol: MenuSolution, types: TypeGrid) -> list[ConstraintCheck]:
    out = []
    for r in sol.rows:
        theta = types.theta(r.type_index)
        own = agent_utility(r.contract, theta)
        out.append(ConstraintCheck("PC", r.type_index, None, own))
        for o in sol.rows:
            if o is not r:
                out.append(ConstraintCheck("IC", r.type_index, o.type_index,
                                           own - agent_utility(o.contract, theta)))
    return out


def menu_from_rows(rows: Sequence[tuple[int, int]]) -> frozenset[Contract]:
    return frozenset(Contract(q, t) for q, t in rows)


# ---------------------------------------------------------------------------
# brute-force oracle

ORACLE_LIMIT = 10 ** 8


def oracle_transfer_bound(p: MarginalBelief, v: ValueFunction) -> int:
    """Largest transfer the oracle tries: ceil of the top message type times b."""
    return p.message[1] * v.b


def brute_force_best_menu(p: MarginalBelief, v: ValueFunction, types: TypeGrid,
                          max_contracts: int | None = None) -> tuple[Fraction, list[frozenset[Contract]]]:
    """Every menu of at most `max_contracts` distinct contracts, adversarial ties.

    Contracts range over q in {0..b} and t in {0..T} (see oracle_transfer_bound).
    Returns the best adversarial expected payoff and all menus reaching it.
    Payoffs are scaled to integers so the search runs on numpy int64 arrays.
    """
    import numpy as np

    supported = p.supported
    k = max_contracts if max_contracts is not None else len(supported)
    T = oracle_transfer_bound(p, v)
    contracts = [Contract(q, t) for q in range(v.b + 1) for t in range(T + 1)]
    n = len(contracts)
    if n ** k > ORACLE_LIMIT:
        raise OverflowError(f"{n}^{k} menus exceed the oracle limit {ORACLE_LIMIT}")

    g = types.gamma
    vden = lcm(*(x.denominator for x in v.values))
    pden = lcm(*(p.p(j).denominator for j in supported))
    q = np.array([c.q for c in contracts], dtype=np.int64)
    t = np.array([c.t for c in contracts], dtype=np.int64)
    vq = np.array([int(v(c.q) * vden) for c in contracts], dtype=np.int64)
    principal = vq - t * vden  # scaled by vden
    weights = [int(p.p(j) * pden) for j in supported]
    # agent utility times gamma: gamma*t - (j*gamma - 1)*q
    agent = [g * t - (j * g - 1) * q for j in supported]

    best_value = None
    best_menus: list[tuple[int, ...]] = []
    for size in range(1, k + 1):
        flat = itertools.chain.from_iterable(itertools.combinations(range(n), size))
        combos = np.fromiter(flat, dtype=np.int64).reshape(-1, size)
        total = np.zeros(len(combos), dtype=np.int64)
        for w, ua in zip(weights, agent):
            util = ua[combos]
            top = util.max(axis=1)
            pay = np.where(util == top[:, None], principal[combos], np.iinfo(np.int64).max)
            worst = pay.min(axis=1)
            # the outside option is in the choice set when it ties or beats the menu
            worst = np.where(top < 0, 0, np.where(top == 0, np.minimum(worst, 0), worst))
            total += w * worst
        m = total.max()
        if best_value is None or m > best_value:
            best_value, best_menus = m, []
        if m == best_value:
            best_menus.extend(tuple(row) for row in combos[total == m])
    value = Fraction(int(best_value), vden * pden)
    menus = [frozenset(contracts[i] for i in idx) for idx in best_menus]
    return value, menus
