"""Command-line entry point: `screenlab <command> [options]`."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction

from . import __version__
from .beliefs import message_types
from .game import (
    EngineError,
    outcome_summary,
    quantity_comparison_violations,
    run_rationalizability,
    costly_type_disclosure_violations,
    hidden_type_silence_violations,
)
from .menus import (
    agent_payoff,
    brute_force_best_menu,
    expected_principal_payoff,
    optimal_menu,
    verify_constraints,
)
from .report import Artifacts, fmt, fmt_message, text_table
from .scenario import TARGETS, load_scenario, target
from .suites import SUITES, oracle_suite

OK, FAILED, BAD_INPUT = 0, 1, 2


def _say(text: str = "") -> None:
    sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))


def _scenario(args):
    if getattr(args, "target", None):
        s = target(args.target)
    elif args.scenario:
        s = load_scenario(args.scenario)
    else:
        raise ValueError("give --scenario <path> (or a target name)")
    changes = {}
    if args.weights is not None:
        changes["W"] = args.weights
    if args.levels is not None:
        changes["level_cap"] = args.levels
    return dataclasses.replace(s, **changes) if changes else s


# ---------------------------------------------------------------------------
# solve-menu


def menu_rows(sol, types):
    return [(r.type_index, str(types.theta(r.type_index)), sol.belief.p(r.type_index),
             " ".join(map(str, r.quantities)), r.contract.q, r.contract.t,
             agent_payoff([r.contract], types.theta(r.type_index)))
            for r in sol.rows]


MENU_HEADER = ("type", "theta", "prob", "quantity set", "q", "t", "own payoff")


def cmd_solve_menu(args) -> int:
    s = _scenario(args)
    if s.belief is None:
        raise ValueError("scenario has no 'belief' to design a menu for")
    sol = optimal_menu(s.belief, s.v, s.types)
    art = Artifacts(args.out, args.seed)
    rows = menu_rows(sol, s.types)
    art.csv("menu.csv", MENU_HEADER, rows)
    checks = verify_constraints(sol, s.types)
    crow = [(c.kind, c.type_index, "" if c.other is None else c.other, c.slack, c.status) for c in checks]
    art.csv("constraints.csv", ("constraint", "type", "against", "slack", "status"), crow)
    body = (f"scenario {s.name or '(unnamed)'}; belief on {fmt_message(s.belief.message)}\n\n"
            + text_table(MENU_HEADER, rows)
            + f"\nexpected principal payoff: {fmt(sol.principal_expected_payoff)}\n"
            + f"unique: {sol.unique}  robust: {sol.robust}\n")
    art.text("menu.txt", body)
    _say(body)
    violated = [c for c in checks if c.status == "violated"]
    for c in violated:
        _say(f"violated {c.kind} for type {c.type_index}: slack {fmt(c.slack)}")
    return FAILED if violated else OK


# ---------------------------------------------------------------------------
# oracle-check


def cmd_oracle_check(args) -> int:
    art = Artifacts(args.out, args.seed)
    if args.scenario or getattr(args, "target", None):
        s = _scenario(args)
        if s.belief is None:
            raise ValueError("scenario has no 'belief' to check")
        sol = optimal_menu(s.belief, s.v, s.types)
        try:
            best, menus = brute_force_best_menu(s.belief, s.v, s.types)
        except OverflowError as exc:
            _say(f"refusing: {exc}")
            return BAD_INPUT
        ours = expected_principal_payoff(sol.menu, s.belief, s.v, s.types)
        match = ours == best
        rows = [("foc", ours), ("oracle", best), ("optimal menus", len(menus))]
        body = text_table(("source", "value"), rows) + f"\nverdict: {'match' if match else 'MISMATCH'}\n"
        art.csv("oracle.csv", ("source", "value"), rows)
        art.text("oracle.txt", body)
        _say(body)
        return OK if match else FAILED

    res = oracle_suite(args.seed, n=args.count, fault=args.self_test)
    art.text("oracle.txt", _suite_body([res]))
    _say(_suite_body([res]))
    if args.self_test:
        _say("fault injection " + ("detected in every case" if res.ok else "MISSED"))
    return OK if res.ok else FAILED


# ---------------------------------------------------------------------------
# rationalize / reproduce


def _write_state(art: Artifacts, st) -> str:
    lat = st.lattice
    art.csv("trace.csv", ("level", "actor", "object", "reason"),
            [(r.level, r.actor, r.object, r.reason) for r in st.trace])
    level_rows = []
    for snap in st.history:
        for (j, tree), allowed in sorted(snap.agent.items()):
            level_rows.append((snap.level, j, fmt_message(tree), " ".join(fmt_message(x) for x in sorted(allowed))))
    art.csv("agent_levels.csv", ("level", "type", "tree", "allowed messages"), level_rows)
    prow = []
    if st.principal is not None:
        ids = {menu: i for i, menu in enumerate(st.principal.menus)}
        for msg in lat.messages:
            for e in st.principal.entries(msg):
                menu = " ".join(f"({c.q},{c.t})" for c in sorted(e.menu))
                prow.append((fmt_message(msg), fmt_message(e.support),
                             " ".join(str(x) for x in e.belief.restricted()), ids[e.menu], menu))
    art.csv("principal.csv", ("message", "support", "probabilities", "menu id", "menu"), prow)

    lines = [f"scenario {st.scenario.name or '(unnamed)'}: m={st.scenario.types.m} "
             f"gamma={st.scenario.types.gamma} b={st.scenario.v.b} aware={fmt_message(lat.theta_p)} "
             f"W={st.scenario.W} side={st.scenario.side}",
             f"levels run: {st.level}; fixed point: {'yes' if st.converged else 'no'}", ""]
    for snap in st.history:
        sup = "unrestricted" if snap.supports is None else "; ".join(
            f"{fmt_message(m)}: " + " ".join(fmt_message(x) for x in snap.supports[m]) for m in lat.messages)
        lines.append(f"level {snap.level} principal supports: {sup}")
    lines.append("")
    for r in st.trace:
        lines.append(f"L{r.level} {r.actor}: drop {r.object} ({r.reason})")
    lines.append("")
    for (j, tree), allowed in sorted(st.agent.items()):
        lines.append(f"type {j} in tree {fmt_message(tree)}: may send "
                     + ", ".join(fmt_message(x) for x in sorted(allowed)))
    return "\n".join(lines) + "\n"


def _outcome_table(st):
    rows = outcome_summary(st)
    header = ("type", "message", "menu id", "choice", "designed for", "agent payoff", "principal payoff", "bunching")
    data = [(r.type_index, fmt_message(r.message), r.menu_id,
             " ".join("outside" if c is None else f"({c.q},{c.t})" for c in r.contracts),
             " ".join(map(str, r.designed_for)) or "-", r.agent_payoff, r.principal_payoff, r.bunching)
            for r in rows]
    return header, data


def _verdicts(st) -> list[tuple[str, bool, str]]:
    out = []
    side = st.scenario.side
    if side == "high":
        bad = costly_type_disclosure_violations(st)
        out.append(("unaware costly types reveal their whole tree", not bad,
                    "; ".join(f"type {j} in {fmt_message(t)} may send {sorted(a)}" for j, t, a in bad)))
    if side == "low":
        bad = hidden_type_silence_violations(st)
        out.append(("every type sends the aware range; hidden types take its lowest contract", not bad,
                    "; ".join(bad)))
    if side in ("high", "low"):
        bad = quantity_comparison_violations(st)
        out.append(("quantities compare across messages as the supports predict", not bad, "; ".join(bad)))
    return out


def _rationalize(s, art: Artifacts):
    st = run_rationalizability(s)
    body = _write_state(art, st)
    verdicts = []
    if st.principal is not None:
        header, data = _outcome_table(st)
        art.csv("outcome.csv", header, data)
        body += "\noutcome in the full tree\n" + text_table(header, data)
        if st.converged:
            verdicts = _verdicts(st)
    for name, ok, detail in verdicts:
        body += f"\ncheck: {name}: {'pass' if ok else 'FAIL'}" + (f" ({detail})" if detail and not ok else "")
    art.text("summary.txt", body)
    return st, body, verdicts


def cmd_rationalize(args) -> int:
    s = _scenario(args)
    st, body, _ = _rationalize(s, Artifacts(args.out, args.seed))
    _say(body)
    if not st.converged:
        _say(f"no fixed point within {st.level} levels")
        return FAILED
    return OK


def _reproduce_example1(s, art: Artifacts) -> tuple[str, bool]:
    types = s.types
    theta1 = types.theta(1)
    sol = optimal_menu(s.belief, s.v, types)
    full = s.extra_families[0][s.theta_bar]
    sol_full = optimal_menu(full, s.v, types)
    stay = agent_payoff(sol.menu, theta1)
    move = agent_payoff(sol_full.menu, theta1)
    checks = [
        ("aware-range quantities", tuple(r.contract.q for r in sol.rows), (98, 95, 93, 90)),
        ("type-1 payoff without disclosure", stay, Fraction("278.98")),
        ("full-range quantities", tuple(r.contract.q for r in sol_full.rows), (92, 1)),
        ("type-1 payoff after disclosure", move, Fraction("277.92")),
    ]
    st = run_rationalizability(s, level_cap=3)
    kept = s.theta_p in st.agent[(1, s.theta_bar)]
    checks.append(("level 3 keeps the aware range for type 1 in the full tree", kept, True))
    rows = [(name, " ".join(map(str, got)) if isinstance(got, tuple) else got,
             " ".join(map(str, want)) if isinstance(want, tuple) else want,
             "pass" if got == want else "FAIL") for name, got, want in checks]
    art.csv("menu.csv", MENU_HEADER, menu_rows(sol, types))
    art.csv("menu_full.csv", MENU_HEADER, menu_rows(sol_full, types))
    art.csv("checks.csv", ("check", "got", "expected", "verdict"), rows)
    body = (text_table(MENU_HEADER, menu_rows(sol, types)) + "\n"
            + text_table(MENU_HEADER, menu_rows(sol_full, types)) + "\n"
            + text_table(("check", "got", "expected", "verdict"), rows))
    art.text("summary.txt", body + "\n" + _write_state(art, st))
    return body, all(r[-1] == "pass" for r in rows)


def _three_type_checks(s, st) -> list[tuple[str, bool]]:
    lat = st.lattice
    full = s.theta_bar
    out = [("fixed point reached", st.converged)]
    if not st.converged:
        return out
    if s.side == "high":
        out.append(("every type in the full tree sends the full message",
                    all(st.agent[(j, full)] == frozenset([full]) for j in message_types(full))))
        out.append(("full-message menus are designed for all three types",
                    all(e.support == full for e in st.principal.entries(full))))
    else:
        out.append(("every type sends the aware range in every tree",
                    all(a == frozenset([lat.theta_p]) for a in st.agent.values())))
        rows = [r for r in outcome_summary(st) if r.type_index == 1]
        out.append(("type 1 takes the contract designed for type 2",
                    bool(rows) and all(r.bunching and r.designed_for == (2,) for r in rows)))
    return out


def cmd_reproduce(args) -> int:
    s = _scenario(args)
    art = Artifacts(args.out, args.seed)
    if args.target == "example1":
        body, ok = _reproduce_example1(s, art)
        _say(body)
        return OK if ok else FAILED
    st, body, _ = _rationalize(s, art)
    checks = _three_type_checks(s, st)
    table = text_table(("check", "verdict"), [(n, "pass" if ok else "FAIL") for n, ok in checks])
    art.text("checks.txt", table)
    _say(body)
    _say(table)
    return OK if all(ok for _, ok in checks) else FAILED


# ---------------------------------------------------------------------------
# suite


def _suite_body(results) -> str:
    rows = [(r.name, r.cases, len(r.violations), "pass" if r.ok else "FAIL") for r in results]
    body = text_table(("suite", "cases", "violations", "verdict"), rows)
    for r in results:
        for v in r.violations[:20]:
            body += f"{r.name}: {v}\n"
        if len(r.violations) > 20:
            body += f"{r.name}: ... {len(r.violations) - 20} more\n"
    return body


def cmd_suite(args) -> int:
    names = args.only or list(SUITES)
    results = [SUITES[n](args.seed) for n in names]
    art = Artifacts(args.out, args.seed)
    summary = {
        "seed": args.seed,
        "suites": [{"name": r.name, "cases": r.cases, "passed": r.ok,
                    "violations": r.violations, "notes": r.notes} for r in results],
        "passed": all(r.ok for r in results),
    }
    if art.out is not None:
        (art.out / "suite.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    body = _suite_body(results)
    art.text("suite.txt", body)
    _say(body)
    for r in results:
        _say(f"{r.name}: {r.seconds:.2f}s")
    return OK if summary["passed"] else FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file")
    common.add_argument("--out", help="directory for CSV and text artifacts")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")
    common.add_argument("--weights", type=int, help="override the weight bound W of the belief grid")
    common.add_argument("--levels", type=int, help="override the level cap")

    parser = argparse.ArgumentParser(prog="screenlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"screenlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-menu", parents=[common], help="optimal menu for the scenario's belief")
    p.set_defaults(func=cmd_solve_menu)

    p = sub.add_parser("oracle-check", parents=[common], help="compare FOC menus with exhaustive search")
    p.add_argument("--count", type=int, default=50, help="random fixtures when no scenario is given")
    p.add_argument("--self-test", action="store_true", help="break the transfers and expect the oracle to notice")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("rationalize", parents=[common], help="run the elimination to its fixed point")
    p.set_defaults(func=cmd_rationalize)

    p = sub.add_parser("reproduce", parents=[common], help="run an embedded reproduction target")
    p.add_argument("target", choices=sorted(TARGETS))
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("suite", parents=[common], help="seeded property suites")
    p.add_argument("--only", nargs="+", choices=sorted(SUITES), help="run a subset")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, EngineError, ArithmeticError) as exc:
        _say(f"error: {exc}")
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
