"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines, or execute this
file directly for the lines alone.  Random cases whose run exceeds the step
budget are skipped and counted; only completed cases count towards a quota.
"""

import glob
import os
import random
import re
import sys
import time
from collections import Counter

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from progen import EXTREMES, ProgramGen, SrlGen, random_module, random_values  # noqa: E402
from yarel import int32  # noqa: E402
from yarel.analysis import AffineMap, extract_affine  # noqa: E402
from yarel.checker import check_unit, diagnose  # noqa: E402
from yarel.codegen import apply, compile, emit_source  # noqa: E402
from yarel.errors import ARITY_ERROR_KINDS, StepLimitExceeded  # noqa: E402
from yarel.evaluator import EvalLimits, Evaluator, run  # noqa: E402
from yarel.inverter import invert, invert_env, is_inv_free  # noqa: E402
from yarel.programs import path as program_path  # noqa: E402
from yarel.syntax import (  # noqa: E402
    Call, Inv, load_file, parse_module, pretty_print, subexprs, unit_of,
)

HERE = os.path.dirname(os.path.abspath(__file__))
STEP_BUDGET = EvalLimits(20_000)


def fib_pair(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    print(line)
    return line


def criterion_1():
    env = check_unit(load_file(program_path("Fibonacci")))
    start = time.perf_counter()
    bad = [n for n in range(11)
           if run(env, "fib", [n, 0, 1]) != (n, fib_pair(2 * n), fib_pair(2 * n + 1))]
    elapsed = time.perf_counter() - start
    return not bad and elapsed < 1.0, f"n=0..10, mismatches={bad}, {elapsed:.3f}s < 1s"


def criterion_2(target=10_000, seed=2024):
    rng = random.Random(seed)
    kinds, done, skipped, extremes, failures = Counter(), 0, 0, 0, 0
    start = time.perf_counter()
    while done < target:
        p = ProgramGen(rng).program()
        x = random_values(rng, p.arity)
        ev = Evaluator(p.env, STEP_BUDGET)
        try:
            y = ev(Call("main"), x)
            back = ev(Inv(Call("main")), y)
        except StepLimitExceeded:
            skipped += 1
            continue
        done += 1
        failures += back != x
        extremes += any(v in EXTREMES for v in x)
        for d in p.module.defs:
            kinds.update(type(s).__name__ for s in subexprs(d.body))
    elapsed = time.perf_counter() - start
    wanted = {"Id", "Inc", "Dec", "Neg", "Perm", "Seq", "Par", "It", "If", "Inv", "Call"}
    missing = wanted - set(kinds)
    ok = failures == 0 and not missing and elapsed < 60
    return ok, (f"{done} cases, {failures} failures, {extremes} with extremes, "
                f"{skipped} over budget skipped, missing constructors={sorted(missing)}, "
                f"{elapsed:.1f}s < 60s")


def criterion_3():
    env = check_unit(load_file(program_path("Arith")))
    full = invert_env(env)
    cases = [(int32.MAX, 5), (int32.MAX - 2, 7), (int32.MAX - 10, 100_000), (int32.MAX, 1)]
    wrapped, undone = 0, 0
    for x in cases:
        y = run(full, "sum", list(x))
        wrapped += y[0] != x[0] + abs(x[1])
        undone += run(full, "sum_inv", list(y)) == x
    ok = wrapped == len(cases) and undone == len(cases)
    return ok, f"sum(MAX, 5) = {run(full, 'sum', [int32.MAX, 5])}, {undone}/{len(cases)} undone"


def criterion_4(programs=1000, inputs=10, seed=7):
    rng = random.Random(seed)
    agree = disagree = skipped = inv_nodes = 0
    for _ in range(programs):
        p = ProgramGen(rng).program()
        full = invert_env(p.env)
        inverted = invert(p.body)
        inv_nodes += not is_inv_free(inverted)
        ev = Evaluator(full, STEP_BUDGET)
        for _ in range(inputs):
            y = random_values(rng, p.arity)
            try:
                ev.steps = 0
                a = ev(inverted, y)
                ev.steps = 0
                b = ev(Inv(p.body), y)
            except StepLimitExceeded:
                skipped += 1
                continue
            if a == b:
                agree += 1
            else:
                disagree += 1
    not_involutive = 0
    for _ in range(programs):
        e = ProgramGen(rng, max_helpers=0, use_inv=False).program().body
        not_involutive += invert(invert(e)) != e
    ok = disagree == 0 and inv_nodes == 0 and not_involutive == 0 and agree > 0
    return ok, (f"{programs} programs x {inputs} inputs: {agree} agree, {disagree} disagree, "
                f"{skipped} over budget; outputs with inv: {inv_nodes}; "
                f"involution failures: {not_involutive}/{programs}")


def criterion_5(target=10_000, seed=11):
    rng = random.Random(seed)
    done = mismatches = skipped = 0
    while done < target:
        p = ProgramGen(rng).program()
        oc = compile(p.env, "main")
        for _ in range(10):
            x = random_values(rng, p.arity)
            try:
                expected = Evaluator(p.env, STEP_BUDGET)(Call("main"), x)
            except StepLimitExceeded:
                skipped += 1
                continue
            done += 1
            mismatches += apply(oc, x, EvalLimits(10**7)) != expected
    return mismatches == 0, f"{done} pairs, {mismatches} mismatches, {skipped} over budget"


def criterion_6():
    env = check_unit(unit_of(parse_module("module M { dcl seqComp : int def seqComp := inc;dec }")))
    with open(os.path.join(HERE, "golden", "seqComp.java"), encoding="utf-8") as fh:
        golden = " ".join(fh.read().split())
    ok = " ".join(emit_source(env, "seqComp").split()) == golden
    return ok, "seqComp := inc;dec against stored golden, whitespace-normalized"


def criterion_7(count=500, seed=3):
    rng = random.Random(seed)
    dets, not_affine, arities = Counter(), 0, Counter()
    for _ in range(count):
        p = SrlGen(rng, max_arity=5).program()
        arities[p.arity] += 1
        a = extract_affine(Call("main"), p.env)
        if isinstance(a, AffineMap):
            dets[a.determinant] += 1
        else:
            not_affine += 1
    ok = not_affine == 0 and dets == Counter({1: count})
    return ok, (f"{count} programs, arities {dict(sorted(arities.items()))}, "
                f"determinants {dict(dets)}, not affine {not_affine}")


def criterion_8(count=1000, seed=5):
    rng = random.Random(seed)
    failures = sum(parse_module(pretty_print(m)) != m for m in (random_module(rng) for _ in range(count)))
    return failures == 0, f"{count} modules, {failures} failures"


def criterion_9():
    paths = sorted(glob.glob(os.path.join(HERE, "fixtures", "checker", "*.yarel")))
    covered, wrong = set(), []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            kind, line, col = re.match(r"/\* expect: (\w+) (\d+):(\d+) \*/", fh.readline()).groups()
        errors = diagnose(load_file(path))
        got = [(e.kind, tuple(e.loc)) for e in errors]
        if got == [(kind, (int(line), int(col)))]:
            covered.add(kind)
        else:
            wrong.append(os.path.basename(path))
    missing = ARITY_ERROR_KINDS - covered
    return not wrong and not missing, (f"{len(paths)} fixtures, kinds covered "
                                       f"{len(covered)}/{len(ARITY_ERROR_KINDS)}, wrong={wrong}")


CRITERIA = [
    (1, "Fibonacci golden suite", criterion_1),
    (2, "reversibility property suite", criterion_2),
    (3, "overflow reversibility", criterion_3),
    (4, "inverter differential suite", criterion_4),
    (5, "compiler differential suite", criterion_5),
    (6, "compiled seqComp golden", criterion_6),
    (7, "unit determinant on the loop fragment", criterion_7),
    (8, "parser round trip", criterion_8),
    (9, "checker negatives", criterion_9),
]


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print()
        report(number, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for number, title, check in CRITERIA:
        ok, detail = check()
        report(number, title, ok, detail)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
