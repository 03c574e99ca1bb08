"""Compilation to executable block trees and to Java class text.

Every block exposes ``arity`` and ``b(x)``, the behaviour on an integer
array, mirroring the ``RPP`` interface of the emitted Java: a sequential
block holds a left and right block and runs ``r.b(l.b(x))``.

Blocks are produced from ``inv``-free bodies only.  ``inv[...]`` is removed
beforehand by :func:`yarel.inverter.eliminate_inv`, which turns inverted
calls into calls to ``f_inv`` companions.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Sequence

from . import int32
from .checker import Entry, Env
from .errors import StepLimitExceeded
from .evaluator import EvalLimits
from .inverter import eliminate_inv, invert_env
from .syntax import Call, Dec, FunExpr, Id, If, Inc, Inv, It, Neg, Par, Perm, Seq


class _Meter:
    __slots__ = ("steps", "limit")

    def __init__(self, limit: int):
        self.steps = 0
        self.limit = limit

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.limit:
            raise StepLimitExceeded(f"exceeded {self.limit} steps")


class ObjectCode:
    """A compiled block.  Immutable once built; ``b`` is reentrant."""

    __slots__ = ("arity",)

    def b(self, x: List[int], meter: _Meter) -> List[int]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}/{self.arity}"


_PRIMS = {
    "id": lambda v: v,
    "inc": lambda v: int32.wrap(v + 1),
    "dec": lambda v: int32.wrap(v - 1),
    "neg": lambda v: int32.wrap(-v),
}


class Prim(ObjectCode):
    __slots__ = ("op", "_fn")

    def __init__(self, op: str):
        self.op = op
        self._fn = _PRIMS[op]
        self.arity = 1

    def b(self, x, meter):
        meter.tick()
        return [self._fn(x[0])]

    def __repr__(self):
        return f"Prim({self.op})"


class PermBlock(ObjectCode):
    __slots__ = ("indices",)

    def __init__(self, indices: Sequence[int]):
        self.indices = tuple(indices)
        if sorted(self.indices) != list(range(1, len(self.indices) + 1)):
            raise ValueError(f"not a permutation: {self.indices}")
        self.arity = len(self.indices)

    def b(self, x, meter):
        meter.tick()
        return [x[i - 1] for i in self.indices]


class SeqBlock(ObjectCode):
    __slots__ = ("l", "r")

    def __init__(self, l: ObjectCode, r: ObjectCode):
        if l.arity != r.arity:
            raise ValueError(f"arity mismatch {l.arity} vs {r.arity}")
        self.l, self.r = l, r
        self.arity = l.arity

    def b(self, x, meter):
        return self.r.b(self.l.b(x, meter), meter)

    def __repr__(self):
        return f"SeqBlock({self.l!r}, {self.r!r})"


class ParBlock(ObjectCode):
    __slots__ = ("l", "r")

    def __init__(self, l: ObjectCode, r: ObjectCode):
        self.l, self.r = l, r
        self.arity = l.arity + r.arity

    def b(self, x, meter):
        k = self.l.arity
        return self.l.b(x[:k], meter) + self.r.b(x[k:], meter)

    def __repr__(self):
        return f"ParBlock({self.l!r}, {self.r!r})"


class ItBlock(ObjectCode):
    __slots__ = ("body",)

    def __init__(self, body: ObjectCode):
        self.body = body
        self.arity = body.arity + 1

    def b(self, x, meter):
        k = self.body.arity
        y, v = x[:k], x[k]
        for _ in range(abs(v)):
            meter.tick()
            y = self.body.b(y, meter)
        return y + [v]

    def __repr__(self):
        return f"ItBlock({self.body!r})"


class IfBlock(ObjectCode):
    __slots__ = ("pos", "zero", "neg")

    def __init__(self, pos: ObjectCode, zero: ObjectCode, neg: ObjectCode):
        if not pos.arity == zero.arity == neg.arity:
            raise ValueError("branch arity mismatch")
        self.pos, self.zero, self.neg = pos, zero, neg
        self.arity = pos.arity + 1

    def b(self, x, meter):
        k = self.pos.arity
        v = x[k]
        chosen = self.pos if v > 0 else self.neg if v < 0 else self.zero
        return chosen.b(x[:k], meter) + [v]

    def __repr__(self):
        return f"IfBlock({self.pos!r}, {self.zero!r}, {self.neg!r})"


class CallBlock(ObjectCode):
    """Reference to the single shared block compiled for a named function."""

    __slots__ = ("name", "target")

    def __init__(self, name: str, target: ObjectCode):
        self.name, self.target = name, target
        self.arity = target.arity

    def b(self, x, meter):
        return self.target.b(x, meter)

    def __repr__(self):
        return f"CallBlock({self.name})"


class _Compiler:
    def __init__(self, env: Mapping[str, Entry]):
        self.env = env
        self.blocks: Dict[str, ObjectCode] = {}

    def entry(self, name: str) -> Entry:
        if name not in self.env:
            # an inverted call needs its companion
            self.env = invert_env(self.env if isinstance(self.env, Env) else Env(self.env))
        return self.env[name]

    def function(self, name: str) -> ObjectCode:
        block = self.blocks.get(name)
        if block is None:
            block = self.expr(eliminate_inv(self.entry(name).body))
            self.blocks[name] = block
        return block

    def expr(self, e: FunExpr) -> ObjectCode:
        if isinstance(e, Id):
            return Prim("id")
        if isinstance(e, Inc):
            return Prim("inc")
        if isinstance(e, Dec):
            return Prim("dec")
        if isinstance(e, Neg):
            return Prim("neg")
        if isinstance(e, Perm):
            return PermBlock(e.indices)
        if isinstance(e, Seq):
            return SeqBlock(self.expr(e.left), self.expr(e.right))
        if isinstance(e, Par):
            return ParBlock(self.expr(e.left), self.expr(e.right))
        if isinstance(e, It):
            return ItBlock(self.expr(e.body))
        if isinstance(e, If):
            return IfBlock(self.expr(e.pos), self.expr(e.zero), self.expr(e.neg))
        if isinstance(e, Call):
            return CallBlock(e.name, self.function(e.name))
        if isinstance(e, Inv):
            raise ValueError("inv[...] must be eliminated before compilation")
        raise TypeError(f"not a function expression: {e!r}")


def compile(env: Mapping[str, Entry], fname: str) -> ObjectCode:
    """Block tree for the body of ``fname``; called functions are shared blocks."""
    return _Compiler(env).function(fname)


def compile_expr(env: Mapping[str, Entry], e: FunExpr) -> ObjectCode:
    return _Compiler(env).expr(eliminate_inv(e))


def apply(oc: ObjectCode, t: Sequence[int], limits: Optional[EvalLimits] = None) -> tuple:
    if len(t) != oc.arity:
        raise ValueError(f"block of arity {oc.arity} applied to {len(t)} values")
    meter = _Meter((limits or EvalLimits()).max_steps)
    return tuple(oc.b(list(t), meter))


# ---------------------------------------------------------------------------
# Java text

_INDENT = "  "
_LEAF_NAMES = {Id: "id", Inc: "inc", Dec: "dec", Neg: "neg"}


def _leaf_class(e: FunExpr) -> Optional[str]:
    if isinstance(e, Call):
        return e.name
    return _LEAF_NAMES.get(type(e))


def _field(name: str, e: FunExpr, comment: Optional[str]) -> List[str]:
    """``private RPP <name> = new RPP() { ... };`` holding ``e``."""
    lines = [comment] if comment else []
    lines.append(f"private RPP {name} = new RPP() {{")
    body = _members(e)
    body[-1] += " };"
    lines.extend(_INDENT + ln for ln in body)
    return lines


def _members(e: FunExpr) -> List[str]:
    leaf = _leaf_class(e)
    if leaf is not None:
        return [
            f"private RPP f = new {leaf}();  // an instance of {leaf}",
            "private final int a = f.getA();",
            "public int[] b(int[] x) { return this.f.b(x); }",
            "public int getA() { return this.a; }",
        ]
    getter = "public int getA() { return this.a; }"
    if isinstance(e, Seq):
        return (
            _field("l", e.left, "// l(eft-hand side) of the sequential composition")
            + _field("r", e.right, "// r(ight-hand side) of the sequential composition")
            + [
                "private final int a = l.getA(); // Same arity of l or r",
                "public int[] b(int[] x) { // Seq. composition",
                _INDENT + "return this.r.b(this.l.b(x)); }",
                getter,
            ]
        )
    if isinstance(e, Par):
        return (
            _field("l", e.left, "// l(eft-hand side) of the parallel composition")
            + _field("r", e.right, "// r(ight-hand side) of the parallel composition")
            + [
                "private final int a = l.getA() + r.getA(); // Sum of the arities of l and r",
                "public int[] b(int[] x) { // Par. composition",
                _INDENT + "int[] y = new int[this.a];",
                _INDENT + "int[] yl = this.l.b(java.util.Arrays.copyOfRange(x, 0, this.l.getA()));",
                _INDENT + "int[] yr = this.r.b(java.util.Arrays.copyOfRange(x, this.l.getA(), this.a));",
                _INDENT + "System.arraycopy(yl, 0, y, 0, this.l.getA());",
                _INDENT + "System.arraycopy(yr, 0, y, this.l.getA(), this.r.getA());",
                _INDENT + "return y; }",
                getter,
            ]
        )
    if isinstance(e, It):
        return _field("f", e.body, "// f(unction) iterated by the iteration") + [
            "private final int a = f.getA() + 1; // One more for the counter",
            "public int[] b(int[] x) { // Iteration",
            _INDENT + "int v = x[this.f.getA()];",
            _INDENT + "int[] y = java.util.Arrays.copyOf(x, this.f.getA());",
            _INDENT + "for (long k = Math.abs((long) v); k > 0; k--) { y = this.f.b(y); }",
            _INDENT + "int[] z = java.util.Arrays.copyOf(y, this.a);",
            _INDENT + "z[this.f.getA()] = v;",
            _INDENT + "return z; }",
            getter,
        ]
    if isinstance(e, If):
        return (
            _field("g", e.pos, "// g(reater): runs when the selector is positive")
            + _field("z", e.zero, "// z(ero): runs when the selector is zero")
            + _field("s", e.neg, "// s(maller): runs when the selector is negative")
            + [
                "private final int a = g.getA() + 1; // One more for the selector",
                "public int[] b(int[] x) { // Selection",
                _INDENT + "int v = x[this.g.getA()];",
                _INDENT + "int[] y = java.util.Arrays.copyOf(x, this.g.getA());",
                _INDENT + "y = (v > 0) ? this.g.b(y) : (v == 0) ? this.z.b(y) : this.s.b(y);",
                _INDENT + "int[] w = java.util.Arrays.copyOf(y, this.a);",
                _INDENT + "w[this.g.getA()] = v;",
                _INDENT + "return w; }",
                getter,
            ]
        )
    if isinstance(e, Perm):
        spelled = ", ".join(map(str, e.indices))
        return [
            f"private final int[] p = {{ {spelled} }}; // Positions read, 1-based",
            f"private final int a = {len(e.indices)};",
            "public int[] b(int[] x) { // Permutation",
            _INDENT + "int[] y = new int[this.a];",
            _INDENT + "for (int j = 0; j < this.a; j++) { y[j] = x[this.p[j] - 1]; }",
            _INDENT + "return y; }",
            getter,
        ]
    raise ValueError(f"cannot emit {e!r}; eliminate inv[...] first")


def _class_text(name: str, e: FunExpr) -> str:
    lines = [f"public class {name} implements RPP {{", f"{_INDENT}public {name}() {{ }} // Constructor"]
    body = _members(e)
    body[-1] += " }"
    lines.extend(_INDENT + ln for ln in body)
    return "\n".join(lines) + "\n"


def emit_source(env: Mapping[str, Entry], fname: str) -> str:
    """Java class text for ``fname``, following the ``RPP`` field pattern."""
    if fname not in env:
        env = invert_env(env if isinstance(env, Env) else Env(env))
    return _class_text(fname, eliminate_inv(env[fname].body))


_RUNTIME = {
    "RPP": "public interface RPP {\n  public int[] b(int[] x);\n  public int getA(); }\n",
    "id": "x[0]",
    "inc": "x[0] + 1",
    "dec": "x[0] - 1",
    "neg": "-x[0]",
}


def emit_runtime() -> Dict[str, str]:
    """The ``RPP`` interface and the primitive classes, by file name."""
    files = {"RPP.java": _RUNTIME["RPP"]}
    for prim in ("id", "inc", "dec", "neg"):
        files[f"{prim}.java"] = (
            f"public class {prim} implements RPP {{\n"
            f"  public {prim}() {{ }} // Constructor\n"
            "  private final int a = 1;\n"
            f"  public int[] b(int[] x) {{ return new int[] {{ {_RUNTIME[prim]} }}; }} // int arithmetic wraps\n"
            "  public int getA() { return this.a; } }\n"
        )
    return files


def emit_all(env: Mapping[str, Entry], with_inverses: bool = True) -> Dict[str, str]:
    """One ``<name>.java`` per function (and per companion inverse), plus the runtime."""
    full = invert_env(env if isinstance(env, Env) else Env(env)) if with_inverses else env
    files = emit_runtime()
    for name in full:
        files[f"{name}.java"] = _class_text(name, eliminate_inv(full[name].body))
    return files
