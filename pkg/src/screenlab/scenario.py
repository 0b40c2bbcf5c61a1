"""Scenario files, embedded reproduction targets, and seeded random scenarios."""

from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

from .beliefs import MarginalBelief
from .game import Scenario, scenario_problems
from .model import (
    make_quantity_grid,
    make_type_grid,
    make_value_function,
    validate_value_function,
)


def _message(d) -> tuple[int, int]:
    return (int(d["min_index"]), int(d["max_index"]))


def _belief(d) -> MarginalBelief:
    return MarginalBelief.from_mapping(_message(d["message"]), d["probs"])


def scenario_from_dict(d: dict, name: str = "") -> Scenario:
    types = make_type_grid(int(d["gamma"]), int(d["m"]))
    quantities = make_quantity_grid(int(d["b"]))
    v = make_value_function(d["value_function"], quantities.b)
    families = []
    for fam in d.get("belief_families", []):
        members = {}
        for member in fam:
            p = _belief(member)
            members[p.message] = p
        families.append(members)
    s = Scenario(
        types=types,
        quantities=quantities,
        v=v,
        theta_p=_message(d["theta_p"]),
        W=int(d.get("weight_denominator", 2)),
        level_cap=int(d.get("level_cap", 12)),
        extra_families=tuple(families),
        belief=_belief(d["belief"]) if "belief" in d else None,
        name=name or d.get("name", ""),
    )
    problems = scenario_problems(s)
    if problems:
        raise ValueError("invalid scenario: " + "; ".join(problems))
    return s


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    with open(path) as fh:
        return scenario_from_dict(json.load(fh), name=path.stem)


EXAMPLE1 = {
    "name": "example1",
    "gamma": 100, "m": 5, "b": 99,
    "value_function": {"quadratic": {"a": "50", "c": "1/4"}},
    "theta_p": {"min_index": 1, "max_index": 4},
    "weight_denominator": 1,
    "level_cap": 3,
    # the printed aware-range marginal starts with 0.5; the ratios used in the
    # worked first-order conditions pin it to 0.05
    "belief": {"message": {"min_index": 1, "max_index": 4},
               "probs": {"1": "0.05", "2": "0.15", "3": "0.3", "4": "0.5"}},
    "belief_families": [[
        {"message": {"min_index": 1, "max_index": 4},
         "probs": {"1": "0.05", "2": "0.15", "3": "0.3", "4": "0.5"}},
        {"message": {"min_index": 1, "max_index": 5},
         "probs": {"4": "89/91", "5": "2/91"}},
    ]],
}

def _table_from_steps(steps) -> list[str]:
    values = [Fraction(0)]
    for d in steps:
        values.append(values[-1] + Fraction(d))
    return [str(x) for x in values]


# Marginal values fall steeply at both ends and slowly through the middle,
# so the three types' quantities sit far enough apart that every
# elimination step of the three-type high-cost argument shows up.
_HIGH_STEPS = (["9.5", "8.5", "7.5", "6.5", "5.5", "4.5", "3.5"]
               + [Fraction(299 - k, 100) for k in range(61)]
               + ["1.5", "0.7", "0.3", "0.1"])

THREE_TYPE_HIGH = {
    "name": "three-type-high",
    "gamma": 100, "m": 3, "b": len(_HIGH_STEPS),
    "value_function": {"table": _table_from_steps(_HIGH_STEPS)},
    "theta_p": {"min_index": 1, "max_index": 2},
    "weight_denominator": 3,
    "level_cap": 12,
    "belief": {"message": {"min_index": 1, "max_index": 2}, "probs": {"1": "1/2", "2": "1/2"}},
}

THREE_TYPE_LOW = {
    "name": "three-type-low",
    "gamma": 100, "m": 3, "b": 49,
    "value_function": {"quadratic": {"a": "50.3", "c": "1/2"}},
    "theta_p": {"min_index": 2, "max_index": 3},
    "weight_denominator": 3,
    "level_cap": 12,
    "belief": {"message": {"min_index": 2, "max_index": 3}, "probs": {"2": "1/2", "3": "1/2"}},
}

TARGETS = {
    "example1": EXAMPLE1,
    "three-type-high": THREE_TYPE_HIGH,
    "three-type-low": THREE_TYPE_LOW,
}


def target(name: str) -> Scenario:
    if name not in TARGETS:
        raise KeyError(f"unknown target {name!r}; choose from {sorted(TARGETS)}")
    return scenario_from_dict(TARGETS[name], name=name)


def random_value_spec(rng: random.Random, floor: Fraction, min_b: int) -> tuple[int, dict]:
    """A quadratic a*q - c*q^2 meeting the value-function assumptions.

    The marginal value at zero exceeds `floor`, so every virtual cost below
    it gets a positive quantity, and the last marginal value is below 1, so
    even the lowest type stays off the upper end of the grid.
    """
    while True:
        c = Fraction(1, rng.choice([2, 4, 6, 8, 10]))
        slope_end = Fraction(rng.randint(1, 12), 13)
        b = max(min_b, int((floor - slope_end) / (2 * c)) + 2 + rng.randint(0, 6))
        a = slope_end + c * (2 * b - 1)
        spec = {"quadratic": {"a": str(a), "c": str(c)}}
        if a - c > floor and validate_value_function(make_value_function(spec, b)).ok:
            return b, spec


def random_scenario_dict(rng: random.Random, side: str, m: int, W: int) -> dict:
    """A one-sided scenario with m types; side is "high" or "low"."""
    floor = Fraction(m + (m - 1) * W)  # largest virtual cost the weight grid can produce
    b, spec = random_value_spec(rng, floor, 2 * m)
    gamma = rng.randint(b + 1, 3 * b)
    aware = rng.randint(1, m - 1)
    if side == "high":
        theta_p = {"min_index": 1, "max_index": aware}
    elif side == "low":
        theta_p = {"min_index": m - aware + 1, "max_index": m}
    else:
        raise ValueError(f"side must be 'high' or 'low', not {side!r}")
    return {
        "gamma": gamma, "m": m, "b": b,
        "value_function": spec,
        "theta_p": theta_p,
        "weight_denominator": W,
        "level_cap": 12,
    }
