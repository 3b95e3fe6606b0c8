"""Command-line front end.

Exit status: 0 ok, 1 type error, 2 parse or configuration error,
3 undecided effect inclusion, 4 a checked property failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .checker import Checker, TypeCheckError, UndecidedSubeffect
from .config import ConfigError, RunConfig, load_config
from .harness import FAIL, PRECONDITION, UNDECIDED, Harness, HarnessVerdict, TermGenerator
from .interpretations import COMPATIBLE, CONDITIONS, InterpKind, lifting_axiom_suite
from .monads import kleisli_law_suite
from .parser import ParseError, parse_program
from .semantics import Converged, NotIncreasing, approximant_chain, finitary_sem
from .trace import show_element, to_json, trace_lines
from .types import show_type

OK, TYPE_ERROR, INPUT_ERROR, UNDECIDED_EXIT, PROPERTY_FAILED = 0, 1, 2, 3, 4

# failures the lifting definitions are known to have
EXPECTED_FAILURES = {(InterpKind.NONDET_EX01, "direct image")}


class _Exit(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


class Output:
    def __init__(self, as_json: bool) -> None:
        self.as_json = as_json

    def text(self, line: str) -> None:
        if not self.as_json:
            print(line)

    def record(self, rec: dict, line: str | None = None) -> None:
        if self.as_json:
            print(json.dumps(rec, sort_keys=True))
        elif line is not None:
            print(line)


def _load(args) -> RunConfig:
    try:
        return load_config(args.config)
    except ConfigError as err:
        raise _Exit(INPUT_ERROR, f"config error: {err}") from None


def _program(args, cfg: RunConfig):
    path = Path(args.program)
    try:
        text = path.read_text()
    except OSError as err:
        raise _Exit(INPUT_ERROR, f"cannot read {path}: {err.strerror}") from None
    try:
        return parse_program(text, cfg.signatures)
    except ParseError as err:
        raise _Exit(INPUT_ERROR, f"{path}:{err}") from None


def _typecheck(prog, cfg: RunConfig, out: Output):
    try:
        return Checker(prog.signatures, cfg.budgets.inclusion).infer_expr({}, prog.main)
    except UndecidedSubeffect as err:
        out.record({"status": "undecided", "diagnostic": str(err)})
        raise _Exit(UNDECIDED_EXIT, str(err)) from None
    except TypeCheckError as err:
        out.record({"status": "type error", "diagnostic": str(err)})
        raise _Exit(TYPE_ERROR, f"type error: {err}") from None


# ---------------------------------------------------------------- commands


def cmd_check(args, out: Output) -> int:
    cfg = _load(args)
    prog = _program(args, cfg)
    te = _typecheck(prog, cfg, out)
    out.record({"status": "ok", "type": show_type(te.ty), "effect": te.eff.describe()}, str(te))
    return OK


def _budget(args, cfg: RunConfig) -> int:
    budget = cfg.budgets.steps if args.budget is None else args.budget
    if budget <= 0:
        raise _Exit(INPUT_ERROR, "budget must be positive")
    return budget


def cmd_run(args, out: Output) -> int:
    cfg = _load(args)
    prog = _program(args, cfg)
    if not args.unsafe:
        _typecheck(prog, cfg, out)
    budget = _budget(args, cfg)
    if args.trace:
        for line in trace_lines(prog.main, budget, cfg.tag, cfg.impls):
            out.text(line)
    r = finitary_sem(prog.main, budget, cfg.tag, cfg.impls)
    if isinstance(r, Converged):
        out.record({"status": "converged", "steps": r.steps, "result": to_json(r.result, cfg.tag)},
                   f"{show_element(r.result, cfg.tag)}    ({r.steps} steps)")
    else:
        out.record({"status": "diverged", "budget": budget}, f"diverged within {budget}")
    return OK


def cmd_approx(args, out: Output) -> int:
    cfg = _load(args)
    prog = _program(args, cfg)
    if not args.unsafe:
        _typecheck(prog, cfg, out)
    steps = cfg.budgets.approx if args.steps is None else args.steps
    try:
        chain = approximant_chain(prog.main, steps, cfg.tag, cfg.impls, check_order=not args.unsafe)
    except NotIncreasing as err:
        out.record({"status": "not increasing", "index": err.index}, str(err))
        return PROPERTY_FAILED
    for n, m in enumerate(chain.entries):
        out.record({"n": n, "approximant": to_json(m, cfg.tag)}, f"{n}: {show_element(m, cfg.tag)}")
    out.record({"status": "chain", "increasing": chain.increasing, "converged": chain.converged},
               f"increasing: {'yes' if chain.increasing else 'no'}, converged: {'yes' if chain.converged else 'no'}")
    return OK


def cmd_verify(args, out: Output) -> int:
    cfg = _load(args)
    prog = _program(args, cfg)
    _typecheck(prog, cfg, out)
    harness = Harness(cfg)
    budget = _budget(args, cfg)
    suites = {"progress", "sr", "run", "fin", "inf"} if args.suite == "all" else {args.suite}
    subjects = [(prog.main, None)]
    if args.random:
        gen = TermGenerator(args.seed, args.size, cfg)
        subjects += [(e, args.seed) for e, _ in (gen.generate() for _ in range(args.random))]
    verdicts: list[HarnessVerdict] = []
    if "run" in suites:
        v = harness.check_run_compat()
        out.record(v.to_json(), str(v))
        verdicts.append(v)
    for e, seed in subjects:
        batch: list[HarnessVerdict] = []
        if suites & {"progress", "sr"}:
            for v in harness.check_reduction(e, budget):
                if (v.property == "progress" and "progress" in suites) or (v.property == "step-sr" and "sr" in suites):
                    batch.append(v)
        if "fin" in suites:
            batch.append(harness.check_finitary_soundness(e, budget))
        if "inf" in suites:
            batch.append(harness.check_infinitary_soundness(e, cfg.budgets.approx))
        for v in batch:
            v.seed = seed
            # generated terms are only listed when something is wrong
            if args.json or seed is None or v.verdict != "pass":
                out.record(v.to_json(), str(v))
        verdicts += batch
    counts = {k: sum(v.verdict == k for v in verdicts) for k in ("pass", FAIL, UNDECIDED, PRECONDITION)}
    out.record({"summary": counts}, "summary: " + ", ".join(f"{k} {n}" for k, n in counts.items()))
    if counts[FAIL]:
        return PROPERTY_FAILED
    return UNDECIDED_EXIT if counts[UNDECIDED] else OK


def cmd_laws(args, out: Output) -> int:
    cfg = _load(args)
    if not 1 <= args.universe <= 4:
        raise _Exit(INPUT_ERROR, "universe size must be between 1 and 4")
    code = OK
    failures = kleisli_law_suite(cfg.tag, args.universe)
    for law, bad in failures.items():
        verdict = "pass" if not bad else "FAIL"
        out.record({"suite": "kleisli", "monad": cfg.monad, "law": law, "verdict": verdict.lower(),
                    "counterexample": repr(bad[0]) if bad else None},
                   f"kleisli {law:<14} {verdict}" + (f"  witness: {bad[0]!r}" if bad else ""))
        if bad:
            code = PROPERTY_FAILED
    universe = min(args.universe, 3)
    for kind in InterpKind:
        if not isinstance(cfg.tag, COMPATIBLE[kind]):
            continue
        report = lifting_axiom_suite(kind, universe)
        out.text(f"{kind.value} (universe <= {universe})")
        for name in CONDITIONS:
            c = report.conditions[name]
            expected = (kind, name) in EXPECTED_FAILURES
            if c.passed:
                verdict = "unexpected pass" if expected else "pass"
            else:
                verdict = "fail (expected)" if expected else "FAIL"
            if verdict in ("FAIL", "unexpected pass"):
                code = PROPERTY_FAILED
            witness = f"  witness: {c.counterexample}" if not c.passed else ""
            out.record({"suite": "lifting", "kind": kind.value, "condition": name, "checked": c.checked,
                        "verdict": verdict, "counterexample": None if c.passed else repr(c.counterexample)},
                       f"  {name:<14} checked {c.checked:>7}  {verdict}{witness}")
    return code


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="effekta", description="Type-and-effect checking and monadic execution.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, program: bool = True):
        if program:
            sp.add_argument("program", help="program file in the surface syntax")
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--json", action="store_true", help="machine-readable records, one per line")

    sp = sub.add_parser("check", help="infer type and effect")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("run", help="run to a result or the step budget")
    common(sp)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--trace", action="store_true", help="print every monadic configuration")
    sp.add_argument("--unsafe", action="store_true", help="skip the type check")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("approx", help="print the chain of approximants")
    common(sp)
    sp.add_argument("--steps", type=int)
    sp.add_argument("--unsafe", action="store_true", help="skip the type check and the order check")
    sp.set_defaults(func=cmd_approx)

    sp = sub.add_parser("verify", help="check soundness properties on the program and random terms")
    common(sp)
    sp.add_argument("--suite", choices=("progress", "sr", "run", "fin", "inf", "all"), default="all")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--random", type=int, default=0, metavar="N", help="also check N generated terms")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--size", type=int, default=12, help="size bound for generated terms")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("laws", help="check monad laws and lifting conditions")
    common(sp, program=False)
    sp.add_argument("--universe", type=int, default=3)
    sp.set_defaults(func=cmd_laws)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Output(args.json)
    try:
        return args.func(args, out)
    except _Exit as err:
        if not args.json:
            print(err, file=sys.stderr)
        return err.code


if __name__ == "__main__":
    sys.exit(main())
