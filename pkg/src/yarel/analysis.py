"""Affine summaries of loop-nest-free programs.

A program built from id/inc/dec, composition and un-nested iteration
computes ``x -> M x + c`` for an integer matrix ``M`` with determinant 1,
at least while every iteration counter it meets is non-negative.  This
module recovers ``M`` and ``c`` by probing the interpreter and then tries to
refute the summary on random points.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import int32
from .checker import Entry
from .errors import AnalysisError, OverflowRisk
from .evaluator import EvalLimits, Evaluator
from .syntax import Call, Dec, FunExpr, Id, If, Inc, Inv, It, Neg, Par, Perm, Seq

DEFAULT_RANGE = (0, 1 << 15)
DEFAULT_PROBES = 100

Matrix = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class FragmentReport:
    is_if_free: bool
    is_nest_free: bool
    is_srl_fragment: bool


@dataclass(frozen=True)
class AffineMap:
    matrix: Matrix
    offset: Tuple[int, ...]
    verified_on: int
    domain: Tuple[int, int]

    def __call__(self, x: Sequence[int]) -> Tuple[int, ...]:
        return tuple(sum(m * v for m, v in zip(row, x)) + c for row, c in zip(self.matrix, self.offset))

    @property
    def determinant(self) -> int:
        return determinant(self.matrix)


@dataclass(frozen=True)
class NotAffine:
    witness: Tuple[int, ...]
    expected: Tuple[int, ...]  # what the extracted map predicts
    actual: Tuple[int, ...]  # what the program computes


# (if_free, iteration depth, srl)
_Props = Tuple[bool, int, bool]


def _props(e: FunExpr, env: Mapping[str, Entry], memo: Dict[str, _Props]) -> _Props:
    if isinstance(e, (Id, Inc, Dec)):
        return True, 0, True
    if isinstance(e, (Neg, Perm)):
        return True, 0, False
    if isinstance(e, (Seq, Par)):
        a = _props(e.left, env, memo)
        b = _props(e.right, env, memo)
        return a[0] and b[0], max(a[1], b[1]), a[2] and b[2]
    if isinstance(e, It):
        f, depth, srl = _props(e.body, env, memo)
        return f, depth + 1, srl
    if isinstance(e, If):
        depth = max(_props(b, env, memo)[1] for b in (e.pos, e.zero, e.neg))
        return False, depth, False
    if isinstance(e, Inv):
        # inverting keeps each construct's kind (inc and dec swap)
        return _props(e.body, env, memo)
    if isinstance(e, Call):
        if e.name not in memo:
            memo[e.name] = _props(env[e.name].body, env, memo)
        return memo[e.name]
    raise TypeError(f"not a function expression: {e!r}")


def classify(e: FunExpr, env: Mapping[str, Entry]) -> FragmentReport:
    if_free, depth, srl = _props(e, env, {})
    return FragmentReport(if_free, depth <= 1, srl)


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [list(row) for row in m]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
        prev = pivot
    return sign * a[n - 1][n - 1]


def extract_affine(
    e: FunExpr,
    env: Mapping[str, Entry],
    probes: int = DEFAULT_PROBES,
    domain: Tuple[int, int] = DEFAULT_RANGE,
    seed: int = 0,
    limits: Optional[EvalLimits] = None,
):
    """Fit ``M x + c`` to ``e`` and check it on ``probes`` random points of ``domain``.

    Returns an :class:`AffineMap`, or a :class:`NotAffine` holding the first
    point where the program and the fitted map disagree.  Raises
    :class:`OverflowRisk` if any probe made a 32-bit value wrap, since the
    fit is done in exact arithmetic.
    """
    lo, hi = domain
    if lo > hi or not (int32.in_range(lo) and int32.in_range(hi)):
        raise AnalysisError(f"bad probe range [{lo}, {hi}]")
    if probes < 1:
        raise AnalysisError("need at least one probe")
    if not classify(e, env).is_if_free:
        raise AnalysisError("only programs without if[...] have an affine summary")

    ev = Evaluator(env, limits)
    n = ev.arity(e)

    def probe(x: Tuple[int, ...]) -> Tuple[int, ...]:
        ev.overflowed = False
        ev.steps = 0
        y = ev(e, x)
        if ev.overflowed:
            raise OverflowRisk(f"32-bit overflow while probing at {list(x)}; narrow the range")
        return y

    offset = probe((0,) * n)
    columns: List[Tuple[int, ...]] = []
    for j in range(n):
        unit = tuple(1 if i == j else 0 for i in range(n))
        columns.append(tuple(a - c for a, c in zip(probe(unit), offset)))
    matrix = tuple(tuple(col[i] for col in columns) for i in range(n))
    fitted = AffineMap(matrix, offset, probes, (lo, hi))

    rng = random.Random(seed)
    for _ in range(probes):
        x = tuple(rng.randint(lo, hi) for _ in range(n))
        actual = probe(x)
        expected = fitted(x)
        if actual != expected:
            return NotAffine(x, expected, actual)
    return fitted

