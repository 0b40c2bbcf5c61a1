"""Primitives of the screening model: type grid, quantity grid, value function.

Everything is exact rational arithmetic. Types are identified by their index
j = 1..m; the cost of type j is j - 1/gamma, so its ceiling is j itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


def as_fraction(x) -> Fraction:
    """Parse an int, Fraction, or a decimal / "p/q" string exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational (floats are rejected)")


@dataclass(frozen=True)
class TypeGrid:
    gamma: int
    m: int
    types: tuple[Fraction, ...] = field(repr=False)

    def theta(self, j: int) -> Fraction:
        return self.types[j - 1]

    def index(self, theta: Fraction) -> int:
        j = ceil(theta)
        if not 1 <= j <= self.m or self.types[j - 1] != theta:
            raise ValueError(f"{theta} is not a type of this grid")
        return j

    @property
    def indices(self) -> range:
        return range(1, self.m + 1)


def make_type_grid(gamma: int, m: int) -> TypeGrid:
    if not isinstance(gamma, int) or gamma < 2:
        raise ValueError(f"gamma must be an integer >= 2, got {gamma!r}")
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    inv = Fraction(1, gamma)
    return TypeGrid(gamma, m, tuple(j - inv for j in range(1, m + 1)))


@dataclass(frozen=True)
class QuantityGrid:
    b: int

    @property
    def D(self) -> range:
        return range(self.b + 1)


def make_quantity_grid(b: int) -> QuantityGrid:
    if not isinstance(b, int) or b < 1:
        raise ValueError(f"b must be a positive integer, got {b!r}")
    return QuantityGrid(b)


def check_grid_sizes(types: TypeGrid, quantities: QuantityGrid) -> list[str]:
    """Problems with pairing a type grid and a quantity grid (empty if fine).

    gamma > b keeps ceil(theta * n) = ceil(theta) * n on the whole grid;
    b >= 2m is the size proxy we use for "b large compared to m".
    """
    issues = []
    if not types.gamma > quantities.b:
        issues.append(f"gamma={types.gamma} must exceed b={quantities.b}")
    if quantities.b < 2 * types.m:
        issues.append(f"b={quantities.b} is below the size proxy 2m={2 * types.m}")
    return issues


@dataclass(frozen=True)
class ValueFunction:
    values: tuple[Fraction, ...]

    @property
    def b(self) -> int:
        return len(self.values) - 1

    def __call__(self, q: int) -> Fraction:
        return self.values[q]


def make_value_function(spec, b: int) -> ValueFunction:
    """Tabulate v over {0..b}.

    `spec` is either a pair (a, c) for v(q) = a*q - c*q**2, a mapping
    {"quadratic": {"a": .., "c": ..}} / {"table": [...]}, or a plain sequence
    of b+1 values. The shape checks live in validate_value_function.
    """
    if isinstance(spec, dict):
        if "quadratic" in spec:
            spec = (spec["quadratic"]["a"], spec["quadratic"]["c"])
        elif "table" in spec:
            spec = list(spec["table"])
        else:
            raise ValueError(f"unknown value function spec keys: {sorted(spec)}")
    if isinstance(spec, tuple) and len(spec) == 2:
        a, c = as_fraction(spec[0]), as_fraction(spec[1])
        return ValueFunction(tuple(a * q - c * q * q for q in range(b + 1)))
    table = tuple(as_fraction(x) for x in spec)
    if len(table) != b + 1:
        raise ValueError(f"value table has {len(table)} entries, expected b+1={b + 1}")
    return ValueFunction(table)


def forward_diff(v: ValueFunction, q: int) -> Fraction:
    if not 0 <= q <= v.b - 1:
        raise ValueError(f"forward difference needs 0 <= q <= {v.b - 1}, got {q}")
    return v.values[q + 1] - v.values[q]


def backward_diff(v: ValueFunction, q: int) -> Fraction:
    if not 1 <= q <= v.b:
        raise ValueError(f"backward difference needs 1 <= q <= {v.b}, got {q}")
    return v.values[q] - v.values[q - 1]


def second_diff(v: ValueFunction, q: int) -> Fraction:
    """Forward difference of the backward difference, defined for 1 <= q <= b-1."""
    return forward_diff(v, q) - backward_diff(v, q)


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    ok: bool
    first_violation: int | None = None


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[PropertyCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.ok]

    def lines(self) -> list[str]:
        out = []
        for i, c in enumerate(self.checks, 1):
            where = "" if c.ok else f" (first violation at q={c.first_violation})"
            out.append(f"property {i} {c.name}: {'pass' if c.ok else 'FAIL'}{where}")
        return out


def _first(qs: Iterable[int], pred) -> int | None:
    for q in qs:
        if not pred(q):
            return q
    return None


def validate_value_function(v: ValueFunction) -> ValidationReport:
    b = v.b
    zero = None if v(0) == 0 else 0
    inc = _first(range(b), lambda q: v(q + 1) > v(q))
    concave = _first(range(1, b), lambda q: v(q + 1) + v(q - 1) < 2 * v(q))
    curvature = _first(range(1, b), lambda q: second_diff(v, q) >= -1)
    non_integer = _first(range(b), lambda q: forward_diff(v, q).denominator != 1)
    return ValidationReport((
        PropertyCheck("v(0) = 0", zero is None, zero),
        PropertyCheck("strictly increasing", inc is None, inc),
        PropertyCheck("strictly concave", concave is None, concave),
        PropertyCheck("second difference >= -1", curvature is None, curvature),
        PropertyCheck("marginal value never an integer", non_integer is None, non_integer),
    ))


def ceil_times_int(theta: Fraction, n: int, gamma: int | None = None) -> int:
    """ceil(theta * n), asserting it equals ceil(theta) * n.

    The identity holds for grid types as long as n < gamma; larger n means
    the grids were paired incorrectly.
    """
    if gamma is not None and n >= gamma:
        raise AssertionError(f"n={n} >= gamma={gamma}: ceil(theta*n) = ceil(theta)*n may fail")
    value = ceil(theta * n)
    if value != ceil(theta) * n:
        raise AssertionError(f"ceil({theta}*{n}) = {value} differs from ceil({theta})*{n}")
    return value


@dataclass(frozen=True, order=True)
class Contract:
    """A (quantity, transfer) pair. Transfers are nonnegative integers."""

    q: int
    t: int

    def __post_init__(self):
        if self.q < 0 or self.t < 0:
            raise ValueError(f"contract entries must be nonnegative: {self}")


NULL_CONTRACT = Contract(0, 0)


def agent_utility(c: Contract | None, theta: Fraction) -> Fraction:
    if c is None:
        return Fraction(0)
    return c.t - theta * c.q


def principal_utility(c: Contract | None, v: ValueFunction) -> Fraction:
    if c is None:
        return Fraction(0)
    return v(c.q) - c.t


def argmax_quantities(v: ValueFunction, c: Fraction) -> list[int]:
    """Exhaustive argmax of v(q) - c*q over the grid (reference for FOC checks)."""
    scores = [v(q) - c * q for q in range(v.b + 1)]
    best = max(scores)
    return [q for q, s in enumerate(scores) if s == best]


def rationals(xs: Sequence) -> tuple[Fraction, ...]:
    return tuple(as_fraction(x) for x in xs)
