"""Big-step interpreter over tuples of 32-bit wrapping integers.

An expression runs either forwards or, under ``inv[...]``, backwards; the
backwards reading of every construct is applied on the fly rather than by
rewriting the tree first (that rewrite lives in :mod:`yarel.inverter`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from . import int32
from .checker import Entry, Env, _arity, check_unit
from .errors import ArityError, StepLimitExceeded, WrongArgCount
from .syntax import Call, Dec, FunExpr, Id, If, Inc, Inv, It, Neg, Par, Perm, ProgramUnit, Seq

ValueTuple = Tuple[int, ...]


@dataclass(frozen=True)
class EvalLimits:
    """Resource guard; a step is one primitive application or one loop round."""

    max_steps: int = 100_000_000

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


def apply_perm(indices: Sequence[int], t: Sequence[int]) -> ValueTuple:
    """Position j of the result holds position ``indices[j]`` of ``t`` (1-based)."""
    return tuple(t[i - 1] for i in indices)


def invert_perm(indices: Sequence[int]) -> Tuple[int, ...]:
    inverse = [0] * len(indices)
    for j, i in enumerate(indices, 1):
        inverse[i - 1] = j
    return tuple(inverse)


class Evaluator:
    """Reusable interpreter bound to one environment.

    ``steps`` accumulates across calls until the limit; ``overflowed`` records
    whether any primitive (or summarised loop) produced a value that had to
    wrap.  The analysis module relies on that flag.
    """

    def __init__(self, env: Mapping[str, Entry], limits: Optional[EvalLimits] = None):
        self.env = env
        self.max_steps = (limits or EvalLimits()).max_steps
        self.steps = 0
        self.overflowed = False
        self._arities: Dict[int, Tuple[FunExpr, int]] = {}
        self._shifts: Dict[Tuple[int, bool], Tuple[FunExpr, Optional[Tuple[ValueTuple, int]]]] = {}
        self._perms: Dict[Tuple[int, ...], Tuple[int, ...]] = {}

    def __call__(self, e: FunExpr, t: Sequence[int], inverse: bool = False) -> ValueTuple:
        return self._run(e, tuple(t), inverse)

    def arity(self, e: FunExpr) -> int:
        hit = self._arities.get(id(e))
        if hit is None or hit[0] is not e:
            def lookup(call: Call) -> int:
                if call.name not in self.env:
                    raise ArityError("UndefinedName", f"undefined function {call.name}", call.loc)
                return self.env[call.name].arity
            hit = (e, _arity(e, lookup, None))
            self._arities[id(e)] = hit
        return hit[1]

    def _tick(self, n: int) -> None:
        self.steps += n
        if self.steps > self.max_steps:
            raise StepLimitExceeded(f"exceeded {self.max_steps} steps")

    def _bump(self, x: int) -> int:
        if int32.MIN <= x <= int32.MAX:
            return x
        self.overflowed = True
        return int32.wrap(x)

    def _run(self, e: FunExpr, t: ValueTuple, inv: bool) -> ValueTuple:
        cls = type(e)
        if cls is Seq:
            if inv:
                return self._run(e.left, self._run(e.right, t, inv), inv)
            return self._run(e.right, self._run(e.left, t, inv), inv)
        if cls is Inc or cls is Dec:
            self._tick(1)
            step = 1 if (cls is Inc) != inv else -1
            return (self._bump(t[0] + step),)
        if cls is Par:
            k = self.arity(e.left)
            return self._run(e.left, t[:k], inv) + self._run(e.right, t[k:], inv)
        if cls is It:
            return self._iterate(e.body, t, inv)
        if cls is Call:
            return self._run(self.env[e.name].body, t, inv)
        if cls is Perm:
            self._tick(1)
            indices = e.indices
            if inv:
                indices = self._perms.get(indices) or self._perms.setdefault(indices, invert_perm(indices))
            return tuple([t[i - 1] for i in indices])
        if cls is Id:
            self._tick(1)
            return t
        if cls is Neg:
            self._tick(1)
            return (self._bump(-t[0]),)
        if cls is If:
            v = t[-1]
            branch = e.pos if v > 0 else e.zero if v == 0 else e.neg
            return self._run(branch, t[:-1], inv) + (v,)
        if cls is Inv:
            return self._run(e.body, t, not inv)
        raise TypeError(f"not a function expression: {e!r}")

    def _iterate(self, body: FunExpr, t: ValueTuple, inv: bool) -> ValueTuple:
        v = t[-1]
        x = t[:-1]
        n = abs(v)
        if n:
            summary = self._shift(body, inv)
            if summary is None:
                for _ in range(n):
                    self._tick(1)
                    x = self._run(body, x, inv)
            else:
                # body only translates its inputs: n rounds add n times the offset
                offsets, prims = summary
                self._tick(n * (prims + 1))
                x = tuple(self._bump(a + n * d) for a, d in zip(x, offsets))
        return x + (v,)

    def _shift(self, e: FunExpr, inv: bool) -> Optional[Tuple[ValueTuple, int]]:
        """Constant offset added by ``e`` plus its primitive count, or None.

        Only defined when ``e`` is built from id/inc/dec, identity
        permutations and the composition forms, i.e. when one run of ``e``
        adds the same vector to every input.
        """
        key = (id(e), inv)
        hit = self._shifts.get(key)
        if hit is not None and hit[0] is e:
            return hit[1]
        cls = type(e)
        result: Optional[Tuple[ValueTuple, int]] = None
        if cls is Id:
            result = ((0,), 1)
        elif cls is Inc or cls is Dec:
            result = ((1 if (cls is Inc) != inv else -1,), 1)
        elif cls is Perm:
            if list(e.indices) == list(range(1, len(e.indices) + 1)):
                result = ((0,) * len(e.indices), 1)
        elif cls is Seq or cls is Par:
            left = self._shift(e.left, inv)
            right = self._shift(e.right, inv) if left is not None else None
            if left is not None and right is not None:
                if cls is Seq:
                    offsets = tuple(a + b for a, b in zip(left[0], right[0]))
                else:
                    offsets = left[0] + right[0]
                result = (offsets, left[1] + right[1])
        elif cls is Inv:
            result = self._shift(e.body, not inv)
        elif cls is Call:
            result = self._shift(self.env[e.name].body, inv)
        self._shifts[key] = (e, result)
        return result


def evaluate(e: FunExpr, env: Mapping[str, Entry], t: Sequence[int],
             limits: Optional[EvalLimits] = None) -> ValueTuple:
    """Run ``e`` on ``t``.  ``e`` must already have passed the checker."""
    return Evaluator(env, limits)(e, t)


def run(p: Union[ProgramUnit, Env], fname: str, args: Sequence[int],
        limits: Optional[EvalLimits] = None) -> ValueTuple:
    """Check ``p`` (unless an :class:`Env` is passed) and run ``fname`` on ``args``."""
    env = p if isinstance(p, Env) else check_unit(p)
    if fname not in env:
        raise ArityError("UndefinedName", f"undefined function {fname}", name=fname)
    arity = env.arity(fname)
    if len(args) != arity:
        raise WrongArgCount(f"{fname} takes {arity} arguments, got {len(args)}")
    for a in args:
        if not int32.in_range(a):
            raise ValueError(f"argument {a} does not fit in {int32.WIDTH} bits")
    return evaluate(Call(fname), env, tuple(args), limits)
