"""The disclosure game: message lattice and iterated elimination.

Principal strategies are represented by belief systems: one contiguous
support per message plus a shared weight vector, each yielding a unique
optimal menu per message. The tuple of menus over all messages is the
strategy profile; the agent in tree T only sees its projection onto the
messages inside T.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import lp
from .beliefs import (
    MarginalBelief,
    Message,
    check_monotone_supports,
    check_reverse_bayes,
    check_wariness,
    contains,
    enumerate_belief_families,
    is_log_concave,
    message_types,
)
from .menus import MenuSolution, agent_choice, agent_payoff, optimal_menu
from .model import (
    Contract,
    QuantityGrid,
    TypeGrid,
    ValueFunction,
    check_grid_sizes,
    principal_utility,
    validate_value_function,
)


class EngineError(RuntimeError):
    pass


@dataclass(frozen=True)
class Scenario:
    types: TypeGrid
    quantities: QuantityGrid
    v: ValueFunction
    theta_p: Message
    W: int = 2
    level_cap: int = 12
    extra_families: tuple[Mapping[Message, MarginalBelief], ...] = ()
    belief: MarginalBelief | None = None
    name: str = ""

    @property
    def theta_bar(self) -> Message:
        return (1, self.types.m)

    @property
    def side(self) -> str:
        """Which end of the type range the principal is unaware of."""
        lo, hi = self.theta_p
        low, high = lo > 1, hi < self.types.m
        return {(False, False): "none", (False, True): "high",
                (True, False): "low", (True, True): "both"}[(low, high)]


def scenario_problems(s: Scenario) -> list[str]:
    problems = check_grid_sizes(s.types, s.quantities)
    if s.v.b != s.quantities.b:
        problems.append(f"value table covers b={s.v.b}, grid has b={s.quantities.b}")
    report = validate_value_function(s.v)
    problems += [f"value function fails: {line}" for line in report.lines() if "FAIL" in line]
    lo, hi = s.theta_p
    if not 1 <= lo <= hi <= s.types.m:
        problems.append(f"aware range {s.theta_p} is not inside 1..{s.types.m}")
    if s.W < 1:
        problems.append("weight bound must be positive")
    if s.level_cap < 2:
        problems.append("level cap must be at least 2")
    return problems


# ---------------------------------------------------------------------------
# message lattice


@dataclass(frozen=True)
class MessageLattice:
    m: int
    theta_p: Message
    messages: tuple[Message, ...]

    def sub(self, msg: Message) -> tuple[Message, ...]:
        return tuple(x for x in self.messages if contains(msg, x))

    def index(self, msg: Message) -> int:
        return self.messages.index(msg)


def enumerate_messages(s: Scenario) -> MessageLattice:
    lo, hi = s.theta_p
    m = s.types.m
    if not 1 <= lo <= hi <= m:
        raise ValueError(f"aware range {s.theta_p} is not inside 1..{m}")
    msgs = sorted((a, b) for a in range(1, lo + 1) for b in range(hi, m + 1))
    return MessageLattice(m, s.theta_p, tuple(msgs))


# ---------------------------------------------------------------------------
# principal side


@dataclass(frozen=True)
class PrincipalEntry:
    message: Message
    support: Message
    belief: MarginalBelief
    solution: MenuSolution

    @property
    def menu(self) -> frozenset[Contract]:
        return self.solution.menu


@dataclass(frozen=True)
class BeliefSystem:
    """One admissible belief system and the menu profile it rationalizes."""

    entries: tuple[PrincipalEntry, ...]  # aligned with lattice.messages
    profile: tuple[int, ...]  # menu ids aligned with lattice.messages
    source: str  # "grid" or "fixture"


@dataclass
class PrincipalStrategySet:
    lattice: MessageLattice
    systems: list[BeliefSystem]
    menus: list[frozenset[Contract]]  # menu registry, indexed by menu id

    @property
    def profiles(self) -> frozenset[tuple[int, ...]]:
        return frozenset(s.profile for s in self.systems)

    def entries(self, msg: Message) -> list[PrincipalEntry]:
        i = self.lattice.index(msg)
        seen, out = set(), []
        for s in self.systems:
            e = s.entries[i]
            key = (e.support, e.belief.probs)
            if key not in seen:
                seen.add(key)
                out.append(e)
        return sorted(out, key=lambda e: (e.support, e.belief.probs))

    def supports(self, msg: Message) -> list[Message]:
        i = self.lattice.index(msg)
        return sorted({s.entries[i].support for s in self.systems})

    def menu_ids(self, msg: Message) -> list[int]:
        i = self.lattice.index(msg)
        return sorted({s.profile[i] for s in self.systems})


def _support_candidates(msg: Message, theta_p: Message) -> list[Message]:
    lo, hi = msg
    out = []
    for a in range(lo, hi + 1):
        for b in range(a, hi + 1):
            if lo < theta_p[0] and a != lo:
                continue
            if hi > theta_p[1] and b != hi:
                continue
            out.append((a, b))
    return out


def support_assignments(lattice: MessageLattice) -> list[dict[Message, Message]]:
    """Wary, monotone support assignments with the aware range fully supported."""
    msgs = lattice.messages
    cands = [[lattice.theta_p] if msg == lattice.theta_p else _support_candidates(msg, lattice.theta_p)
             for msg in msgs]
    out = []

    def extend(k, chosen):
        if k == len(msgs):
            out.append(dict(zip(msgs, chosen)))
            return
        msg = msgs[k]
        for s in cands[k]:
            ok = True
            for prev_msg, prev_s in zip(msgs, chosen):
                if prev_msg[0] <= msg[0] and prev_msg[1] <= msg[1]:
                    ok = prev_s[0] <= s[0] and prev_s[1] <= s[1]
                elif msg[0] <= prev_msg[0] and msg[1] <= prev_msg[1]:
                    ok = s[0] <= prev_s[0] and s[1] <= prev_s[1]
                if not ok:
                    break
            if ok:
                extend(k + 1, chosen + [s])

    extend(0, [])
    return out


class _MenuCache:
    def __init__(self, s: Scenario):
        self.s = s
        self.solutions: dict = {}
        self.registry: list[frozenset[Contract]] = []
        self.ids: dict[frozenset[Contract], int] = {}

    def solve(self, p: MarginalBelief) -> MenuSolution | None:
        key = (p.support, p.restricted())
        if key not in self.solutions:
            sol = optimal_menu(p, self.s.v, self.s.types)
            self.solutions[key] = sol if sol.robust else None
        sol = self.solutions[key]
        if sol is None:
            return None
        if sol.belief != p:
            sol = MenuSolution(p, sol.rows, sol.unique, sol.robust, sol.principal_expected_payoff)
        return sol

    def menu_id(self, menu: frozenset[Contract]) -> int:
        if menu not in self.ids:
            self.ids[menu] = len(self.registry)
            self.registry.append(menu)
        return self.ids[menu]


def family_problems(members: Mapping[Message, MarginalBelief], lattice: MessageLattice) -> list[str]:
    problems = []
    missing = set(lattice.messages) - set(members)
    if missing:
        problems.append(f"no marginal for messages {sorted(missing)}")
    for msg, p in members.items():
        if p.message != msg:
            problems.append(f"marginal for {msg} is stated over {p.message}")
        if not is_log_concave(p):
            problems.append(f"marginal at {msg} is not log-concave")
        elif not check_wariness(p, lattice.theta_p):
            problems.append(f"marginal at {msg} is not wary")
    for (m1, p1), (m2, p2) in itertools.combinations(members.items(), 2):
        if not check_reverse_bayes(p1, p2):
            problems.append(f"marginals at {m1} and {m2} are not reverse Bayesian")
    if not check_monotone_supports(members):
        problems.append("supports do not move monotonically")
    p = members.get(lattice.theta_p)
    if p is not None and p.support != lattice.theta_p:
        problems.append("the aware range must be fully supported")
    return problems


def principal_universe(s: Scenario, lattice: MessageLattice) -> PrincipalStrategySet:
    """All grid (and fixture) belief systems with robust menus at every message."""
    cache = _MenuCache(s)
    systems = []

    def build(members: Mapping[Message, MarginalBelief], source: str):
        entries = []
        for msg in lattice.messages:
            p = members[msg]
            sol = cache.solve(p)
            if sol is None:
                return None
            entries.append(PrincipalEntry(msg, p.support, p, sol))
        profile = tuple(cache.menu_id(e.menu) for e in entries)
        return BeliefSystem(tuple(entries), profile, source)

    for assignment in support_assignments(lattice):
        for fam in enumerate_belief_families(lattice.messages, lattice.theta_p, assignment, s.W):
            system = build(fam.members, "grid")
            if system is not None:
                systems.append(system)
    for members in s.extra_families:
        problems = family_problems(members, lattice)
        if problems:
            raise ValueError("fixture belief family rejected: " + "; ".join(problems))
        system = build(members, "fixture")
        if system is None:
            raise ValueError("fixture belief family has a non-robust menu")
        systems.append(system)
    return PrincipalStrategySet(lattice, systems, cache.registry)


# ---------------------------------------------------------------------------
# agent side

AgentSets = dict[tuple[int, Message], frozenset[Message]]


def initial_agent_sets(lattice: MessageLattice) -> AgentSets:
    return {(j, tree): frozenset(lattice.sub(tree))
            for tree in lattice.messages for j in message_types(tree)}


def forced_disclosure_types(agent: AgentSets, msg: Message) -> frozenset[int]:
    return frozenset(j for j in message_types(msg) if agent[(j, msg)] == frozenset([msg]))


def senders(agent: AgentSets, msg: Message) -> frozenset[int]:
    return frozenset(j for j in message_types(msg) if msg in agent[(j, msg)])


def agent_message_payoff(theta: Fraction, message: Message, entry: PrincipalEntry) -> Fraction:
    if entry.message != message:
        raise ValueError(f"entry is for {entry.message}, not {message}")
    return agent_payoff(entry.menu, theta)


def exists_full_support_rationalizing_belief(candidate: int, payoff_table: Sequence[Sequence]) -> bool:
    """Is `candidate` a weak best reply to some belief with full support on the rows?

    Each row holds one principal entry's payoffs for every message. Identical
    rows are merged, which does not change the answer. Cheap certificates
    decide most cases; the rest go to an exact LP that maximizes a common
    lower bound delta on all belief weights.
    """
    rows = sorted(set(tuple(r) for r in payoff_table))
    if not rows:
        raise ValueError("empty entry set")
    n = len(rows[0])
    alts = [a for a in range(n) if a != candidate]
    if not alts:
        return True
    d = [tuple(r[candidate] - r[a] for a in alts) for r in rows]
    for k in range(len(alts)):
        col = [x[k] for x in d]
        if max(col) <= 0 and min(col) < 0:
            return False  # that alternative does strictly better under any such belief
    if all(v >= 0 for x in d for v in x):
        return True
    if any(all(v > 0 for v in x) for x in d):
        return True
    d = sorted(set(d))
    S = len(d)
    # variables: delta, mu_1..mu_S, slack_1..slack_A;  lambda_s = delta + mu_s
    A, b = [], []
    for k in range(len(alts)):
        row = [sum(x[k] for x in d)] + [x[k] for x in d] + [-int(i == k) for i in range(len(alts))]
        A.append(row)
        b.append(0)
    A.append([S] + [1] * S + [0] * len(alts))
    b.append(1)
    c = [1] + [0] * (S + len(alts))
    res = lp.solve(c, A, b)
    if res.status == lp.INFEASIBLE:
        return False
    return res.value > 0


def agent_step(agent: AgentSets, principal: PrincipalStrategySet | None,
               lattice: MessageLattice, types: TypeGrid) -> AgentSets:
    if principal is None:
        return dict(agent)
    g = types.gamma
    scaled = {}  # (type, menu id) -> gamma * payoff, an integer

    def pay(j, mid):
        key = (j, mid)
        if key not in scaled:
            scaled[key] = int(agent_payoff(principal.menus[mid], types.theta(j)) * g)
        return scaled[key]

    out = {}
    for tree in lattice.messages:
        subs = lattice.sub(tree)
        idx = [lattice.index(x) for x in subs]
        proj = {tuple(prof[i] for i in idx) for prof in principal.profiles}
        for j in message_types(tree):
            prev = agent[(j, tree)]
            if len(subs) == 1:
                out[(j, tree)] = prev
                continue
            table = {tuple(pay(j, mid) for mid in pr) for pr in proj}
            keep = frozenset(x for x in prev
                             if exists_full_support_rationalizing_belief(subs.index(x), table))
            if not keep:
                raise EngineError(f"type {j} in tree {tree} has no rationalizable message")
            out[(j, tree)] = keep
    return out


def support_allowed(support: Message, msg: Message, agent: AgentSets) -> bool:
    send = senders(agent, msg)
    span = set(message_types(support))
    if send and not span <= send:
        return False
    return forced_disclosure_types(agent, msg) <= span


def principal_step(agent: AgentSets, current: PrincipalStrategySet,
                   universe: PrincipalStrategySet) -> PrincipalStrategySet:
    lattice = universe.lattice
    keep_profiles = current.profiles
    systems = [s for s in universe.systems
               if s.profile in keep_profiles
               and all(support_allowed(e.support, e.message, agent) for e in s.entries)]
    if not systems:
        raise EngineError("no principal strategy survives; check the scenario")
    return PrincipalStrategySet(lattice, systems, universe.menus)


# ---------------------------------------------------------------------------
# the level loop


@dataclass(frozen=True)
class TraceRecord:
    level: int
    actor: str
    object: str
    reason: str


@dataclass(frozen=True)
class LevelSnapshot:
    level: int
    agent: Mapping[tuple[int, Message], frozenset[Message]]
    supports: Mapping[Message, tuple[Message, ...]] | None  # None: unrestricted
    menu_counts: Mapping[Message, int] | None
    forced: Mapping[Message, frozenset[int]]


@dataclass
class RationalizabilityState:
    scenario: Scenario
    lattice: MessageLattice
    level: int
    agent: AgentSets
    principal: PrincipalStrategySet | None
    history: list[LevelSnapshot] = field(default_factory=list)
    trace: list[TraceRecord] = field(default_factory=list)
    converged: bool = False


def _fmt_msg(msg: Message) -> str:
    return f"[{msg[0]},{msg[1]}]"


def _snapshot(level, agent, principal, lattice) -> LevelSnapshot:
    forced = {msg: forced_disclosure_types(agent, msg) for msg in lattice.messages}
    if principal is None:
        return LevelSnapshot(level, dict(agent), None, None, forced)
    supports = {msg: tuple(principal.supports(msg)) for msg in lattice.messages}
    counts = {msg: len(principal.menu_ids(msg)) for msg in lattice.messages}
    return LevelSnapshot(level, dict(agent), supports, counts, forced)


def _agent_trace(level, before, after, lattice) -> list[TraceRecord]:
    out = []
    for key in sorted(before):
        for msg in sorted(before[key] - after[key]):
            j, tree = key
            out.append(TraceRecord(level, "agent", f"type {j} in tree {_fmt_msg(tree)}: send {_fmt_msg(msg)}",
                                   "no full-support belief over surviving principal strategies makes it a best reply"))
    return out


def _principal_trace(level, agent, before, after, lattice) -> list[TraceRecord]:
    out = []
    for msg in lattice.messages:
        old = set(before.supports(msg)) if before is not None else set()
        new = set(after.supports(msg))
        if before is None:
            for sup in sorted(new):
                out.append(TraceRecord(level, "principal", f"message {_fmt_msg(msg)}: support {_fmt_msg(sup)}",
                                       "admissible support"))
            continue
        for sup in sorted(old - new):
            forced = forced_disclosure_types(agent, msg) - set(message_types(sup))
            send = senders(agent, msg)
            outside = set(message_types(sup)) - send if send else set()
            if forced:
                reason = f"excludes type(s) {sorted(forced)} that must send this message"
            elif outside:
                reason = f"includes type(s) {sorted(outside)} that no longer send this message"
            else:
                reason = "every belief system using it was eliminated elsewhere"
            out.append(TraceRecord(level, "principal", f"message {_fmt_msg(msg)}: support {_fmt_msg(sup)}", reason))
        dropped = len(set(before.menu_ids(msg)) - set(after.menu_ids(msg)))
        if dropped:
            out.append(TraceRecord(level, "principal", f"message {_fmt_msg(msg)}: {dropped} menu(s)",
                                   "no surviving belief system supports them"))
    return out


def run_rationalizability(s: Scenario, level_cap: int | None = None) -> RationalizabilityState:
    problems = scenario_problems(s)
    if problems:
        raise ValueError("invalid scenario: " + "; ".join(problems))
    cap = level_cap if level_cap is not None else s.level_cap
    lattice = enumerate_messages(s)
    universe = principal_universe(s, lattice)
    agent = initial_agent_sets(lattice)
    state = RationalizabilityState(s, lattice, 0, agent, None)
    state.history.append(_snapshot(0, agent, None, lattice))

    principal = None  # levels 0 and 1: any menu profile
    for k in range(1, cap + 1):
        new_agent = agent_step(agent, principal, lattice, s.types)
        if k == 1:
            new_principal = None
        elif principal is None:
            new_principal = principal_step(agent, universe, universe)
        else:
            new_principal = principal_step(agent, principal, universe)
        state.trace += _agent_trace(k, agent, new_agent, lattice)
        if new_principal is not None:
            state.trace += _principal_trace(k, agent, principal, new_principal, lattice)
        unchanged = (k >= 3 and new_agent == agent
                     and new_principal.profiles == principal.profiles)
        agent, principal = new_agent, new_principal
        state.level, state.agent, state.principal = k, agent, principal
        state.history.append(_snapshot(k, agent, principal, lattice))
        if unchanged:
            state.converged = True
            break
    return state


# ---------------------------------------------------------------------------
# reporting helpers


@dataclass(frozen=True)
class OutcomeRow:
    type_index: int
    message: Message
    menu_id: int
    contracts: tuple  # agent's choice set, None for the outside option
    designed_for: tuple[int, ...]  # supported types whose contract it is
    agent_payoff: Fraction
    principal_payoff: Fraction  # worst for the principal among the agent's choices
    bunching: bool


def outcome_summary(state: RationalizabilityState, true_tree: Message | None = None) -> list[OutcomeRow]:
    if state.principal is None:
        raise ValueError("the principal side is still unrestricted")
    tree = true_tree or state.scenario.theta_bar
    s = state.scenario
    rows = []
    for j in message_types(tree):
        theta = s.types.theta(j)
        for msg in sorted(state.agent[(j, tree)]):
            entries = state.principal.entries(msg)
            ids = {menu: i for i, menu in enumerate(state.principal.menus)}
            by_menu = {}
            for e in entries:
                by_menu.setdefault(ids[e.menu], e)
            for mid in sorted(by_menu):
                e = by_menu[mid]
                choice = agent_choice(e.menu, theta)
                owners = tuple(sorted(r.type_index for r in e.solution.rows if r.contract in choice))
                rows.append(OutcomeRow(
                    j, msg, mid,
                    tuple(sorted(choice, key=lambda c: (c is not None, c))),
                    owners,
                    agent_payoff(e.menu, theta),
                    min(principal_utility(c, s.v) for c in choice),
                    bool(owners) and j not in owners and not all(c is None or c.q == 0 for c in choice),
                ))
    return rows


def costly_type_disclosure_violations(state: RationalizabilityState) -> list[tuple[int, Message, frozenset[Message]]]:
    """Types outside the aware range that do not always disclose the full message of their tree."""
    lat = state.lattice
    out = []
    for tree in lat.messages:
        for j in message_types(tree):
            if lat.theta_p[0] <= j <= lat.theta_p[1]:
                continue
            allowed = state.agent[(j, tree)]
            if allowed != frozenset([tree]):
                out.append((j, tree, allowed))
    return out


def hidden_type_silence_violations(state: RationalizabilityState) -> list[str]:
    """Universal non-disclosure, and types below the aware range taking its lowest contract."""
    lat = state.lattice
    s = state.scenario
    out = []
    for (j, tree), allowed in sorted(state.agent.items()):
        if allowed != frozenset([lat.theta_p]):
            out.append(f"type {j} in tree {_fmt_msg(tree)} may send {sorted(allowed)}")
    for e in state.principal.entries(lat.theta_p):
        low = e.belief.supported[0]
        target = e.solution.contract_for(low)
        for j in range(1, lat.theta_p[0]):
            if agent_choice(e.menu, s.types.theta(j)) != {target}:
                out.append(f"type {j} does not take the contract of type {low} in menu {sorted(e.menu)}")
    return out


def quantity_comparison_violations(state: RationalizabilityState) -> list[str]:
    """Within each surviving system, compare quantities at each message with those at the aware range.

    Equal lowest support: identical quantities on common types. A support
    starting higher: weakly larger quantities there; starting lower: weakly
    smaller.
    """
    lat = state.lattice
    ip = lat.index(lat.theta_p)
    out = []
    for system in state.principal.systems:
        base = system.entries[ip]
        for e in system.entries:
            if e is base:
                continue
            common = set(e.belief.supported) & set(base.belief.supported)
            for j in sorted(common):
                q, q0 = e.solution.contract_for(j).q, base.solution.contract_for(j).q
                lo, lo0 = e.belief.supported[0], base.belief.supported[0]
                if (lo == lo0 and q != q0) or (lo > lo0 and q < q0) or (lo < lo0 and q > q0):
                    out.append(f"type {j}: {q} at {_fmt_msg(e.message)} vs {q0} at the aware range")
    return out
