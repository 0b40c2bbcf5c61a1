"""Marginal beliefs over cost types and the restrictions placed on them.

A message is a contiguous index range (lo, hi) of types. A marginal belief
stores one exact probability per type of its message, zeros included.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .model import as_fraction

Message = tuple[int, int]


def message_types(msg: Message) -> range:
    return range(msg[0], msg[1] + 1)


def contains(outer: Message, inner: Message) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


@dataclass(frozen=True)
class MarginalBelief:
    message: Message
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        lo, hi = self.message
        if not 1 <= lo <= hi:
            raise ValueError(f"bad message range {self.message}")
        if len(self.probs) != hi - lo + 1:
            raise ValueError(f"{len(self.probs)} probabilities for message {self.message}")
        if any(p < 0 for p in self.probs):
            raise ValueError("negative probability")
        if sum(self.probs) != 1:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, not 1")

    @classmethod
    def from_mapping(cls, message: Message, probs: Mapping) -> "MarginalBelief":
        """Build from {type index: probability}; missing types get zero."""
        table = {int(k): as_fraction(x) for k, x in probs.items()}
        stray = set(table) - set(message_types(message))
        if stray:
            raise ValueError(f"types {sorted(stray)} are outside message {message}")
        return cls(message, tuple(table.get(j, Fraction(0)) for j in message_types(message)))

    @classmethod
    def from_weights(cls, message: Message, support: Message, weights: Sequence[int]) -> "MarginalBelief":
        """Normalize `weights` (one per type of `support`) inside `message`."""
        total = sum(weights)
        probs = [Fraction(0)] * (message[1] - message[0] + 1)
        for j, w in zip(message_types(support), weights):
            probs[j - message[0]] = Fraction(w, total)
        return cls(message, tuple(probs))

    def p(self, j: int) -> Fraction:
        if self.message[0] <= j <= self.message[1]:
            return self.probs[j - self.message[0]]
        return Fraction(0)

    @property
    def supported(self) -> tuple[int, ...]:
        return tuple(j for j in message_types(self.message) if self.p(j) > 0)

    @property
    def support(self) -> Message | None:
        """Support as an index range, or None when it has gaps."""
        s = self.supported
        if s[-1] - s[0] + 1 != len(s):
            return None
        return (s[0], s[-1])

    def restricted(self) -> tuple[Fraction, ...]:
        return tuple(self.p(j) for j in self.supported)


def is_log_concave(p: MarginalBelief) -> bool:
    ps = p.probs
    return all(ps[i] * ps[i] >= ps[i - 1] * ps[i + 1] for i in range(1, len(ps) - 1))


def virtual_cost(p: MarginalBelief, j: int) -> Fraction:
    """ceil(theta_j) plus the supported mass below type j over p(j)."""
    pj = p.p(j)
    if pj == 0:
        raise ValueError(f"type {j} has zero probability")
    below = sum((p.p(i) for i in range(p.message[0], j)), Fraction(0))
    return j + below / pj


def condition(p_big: MarginalBelief, msg: Message) -> MarginalBelief:
    if not contains(p_big.message, msg):
        raise ValueError(f"{msg} is not inside {p_big.message}")
    mass = sum(p_big.p(j) for j in message_types(msg))
    if mass == 0:
        raise ValueError(f"no probability mass on {msg}")
    return MarginalBelief(msg, tuple(p_big.p(j) / mass for j in message_types(msg)))


def common_support(p: MarginalBelief, p2: MarginalBelief) -> list[int]:
    s2 = set(p2.supported)
    return [j for j in p.supported if j in s2]


def check_reverse_bayes(p: MarginalBelief, p2: MarginalBelief) -> bool:
    common = common_support(p, p2)
    return all(p.p(i) * p2.p(j) == p.p(j) * p2.p(i)
               for i, j in itertools.combinations(common, 2))


def check_wariness(p: MarginalBelief, theta_p: Message) -> bool:
    lo, hi = p.message
    if not contains(p.message, theta_p):
        raise ValueError(f"message {p.message} does not contain {theta_p}")
    if lo < theta_p[0] and p.p(lo) == 0:
        return False
    if hi > theta_p[1] and p.p(hi) == 0:
        return False
    return True


def _monotone_pair(p: MarginalBelief, p2: MarginalBelief) -> bool:
    # p's message is weakly below p2's message on both ends
    s, s2 = p.supported, p2.supported
    overall_min = min(s[0], s2[0])
    overall_max = max(s[-1], s2[-1])
    return p.p(overall_min) > 0 and p2.p(overall_max) > 0


def check_monotone_supports(fam) -> bool:
    members = list(_members(fam))
    for p, p2 in itertools.permutations(members, 2):
        (lo, hi), (lo2, hi2) = p.message, p2.message
        if lo <= lo2 and hi <= hi2 and not _monotone_pair(p, p2):
            return False
    return True


def _members(fam):
    if isinstance(fam, BeliefFamily):
        return fam.members.values()
    if isinstance(fam, Mapping):
        return fam.values()
    return fam


def hazard_sum_identity_check(p_big: MarginalBelief, p_small: MarginalBelief) -> bool:
    """Lower-tail over own-probability ratios agree on common supported types.

    Tails run over types supported by both beliefs. Raises if the pair is not
    reverse Bayesian.
    """
    if not check_reverse_bayes(p_big, p_small):
        raise ValueError("hazard-sum identity needs a reverse-Bayesian pair")
    common = common_support(p_big, p_small)
    for j in common:
        tail = [i for i in common if i < j]
        lhs = sum((p_small.p(i) for i in tail), Fraction(0)) / p_small.p(j)
        rhs = sum((p_big.p(i) for i in tail), Fraction(0)) / p_big.p(j)
        if lhs != rhs:
            return False
    return True


def rank_map(msg: Message, big: Message) -> dict[int, int]:
    """j(i): rank of the i-th highest type of msg within big, both descending."""
    if not contains(big, msg):
        raise ValueError(f"{msg} is not inside {big}")
    return {i: big[1] - t + 1 for i, t in enumerate(reversed(message_types(msg)), 1)}


def newly_counted_tail(p_big: MarginalBelief, p_small: MarginalBelief, j: int) -> Fraction:
    """Mass p_big puts below the small belief's lowest supported type, over p_big(j).

    For a reverse-Bayesian pair where p_big's support starts lower, this is
    exactly how much larger its virtual cost at j is.
    """
    start = p_small.supported[0]
    mass = sum((p_big.p(i) for i in p_big.supported if i < start), Fraction(0))
    return mass / p_big.p(j)


@dataclass(frozen=True)
class BeliefFamily:
    """One marginal per message, generated from a shared weight vector."""

    members: Mapping[Message, MarginalBelief]
    weights: tuple[tuple[int, int], ...] = ()  # (type index, weight)

    def __getitem__(self, msg: Message) -> MarginalBelief:
        return self.members[msg]


def _interval(support) -> Message:
    if isinstance(support, tuple) and len(support) == 2 and support[0] <= support[1]:
        return support
    s = sorted(set(support))
    if not s or s[-1] - s[0] + 1 != len(s):
        raise ValueError(f"support {s} is not contiguous")
    return (s[0], s[-1])


def support_assignment_problems(supports: Mapping[Message, Message], theta_p: Message) -> list[str]:
    problems = []
    for msg, (a, b) in supports.items():
        if not contains(msg, (a, b)):
            problems.append(f"support {(a, b)} leaves message {msg}")
            continue
        if msg[0] < theta_p[0] and a != msg[0]:
            problems.append(f"message {msg}: newly disclosed lowest type {msg[0]} unsupported")
        if msg[1] > theta_p[1] and b != msg[1]:
            problems.append(f"message {msg}: newly disclosed highest type {msg[1]} unsupported")
    for (m1, s1), (m2, s2) in itertools.permutations(supports.items(), 2):
        if m1[0] <= m2[0] and m1[1] <= m2[1] and not (s1[0] <= s2[0] and s1[1] <= s2[1]):
            problems.append(f"supports {s1} at {m1} and {s2} at {m2} do not move monotonically")
    return problems


def log_concave_weights(ws: Sequence[int]) -> bool:
    return all(ws[i] * ws[i] >= ws[i - 1] * ws[i + 1] for i in range(1, len(ws) - 1))


def enumerate_belief_families(messages: Sequence[Message], theta_p: Message,
                              supports: Mapping[Message, object], W: int) -> Iterator[BeliefFamily]:
    """All families from weight vectors in {1..W} on the union of the supports.

    Supports that share a type are tied together by the shared vector, which is
    what keeps every overlapping pair reverse Bayesian. Supports that share no
    type draw on disjoint coordinates of the vector, so they stay independent.
    Weight profiles that are not log-concave on some support are skipped.
    """
    if W < 1:
        raise ValueError("weight bound W must be at least 1")
    intervals = {msg: _interval(supports[msg]) for msg in messages}
    problems = support_assignment_problems(intervals, theta_p)
    if problems:
        raise ValueError("infeasible support assignment: " + "; ".join(problems))
    union = sorted({j for s in intervals.values() for j in message_types(s)})
    pos = {j: k for k, j in enumerate(union)}
    for w in itertools.product(range(1, W + 1), repeat=len(union)):
        members = {}
        for msg in messages:
            s = intervals[msg]
            ws = [w[pos[j]] for j in message_types(s)]
            if not log_concave_weights(ws):
                break
            members[msg] = MarginalBelief.from_weights(msg, s, ws)
        else:
            yield BeliefFamily(members, tuple(zip(union, w)))
