"""Static checks: declaration/definition pairing, arities, and recursion.

Names are flat: a module sees its own definitions plus those of the modules
it imports directly, and a function name may be defined only once per
program unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Tuple

from .errors import ArityError, CheckFailed, Loc
from .syntax import (
    Call, Dcl, Dec, Def, FunExpr, Id, If, Inc, Inv, It, Neg, Par, Perm,
    ProgramUnit, Seq, calls_in,
)


@dataclass(frozen=True)
class Entry:
    arity: int
    body: FunExpr
    origin: str


class Env(Mapping[str, Entry]):
    """Immutable map from function name to its declared arity and body."""

    def __init__(self, entries: Mapping[str, Entry] = ()):
        self._entries: Dict[str, Entry] = dict(entries)

    def __getitem__(self, name: str) -> Entry:
        return self._entries[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}:{v.arity}" for k, v in self._entries.items())
        return f"Env({{{inner}}})"

    def arity(self, name: str) -> int:
        return self._entries[name].arity

    def body(self, name: str) -> FunExpr:
        return self._entries[name].body

    def extended(self, extra: Mapping[str, Entry]) -> "Env":
        merged = dict(self._entries)
        merged.update(extra)
        return Env(merged)


ArityLookup = Callable[[Call], int]


def _arity(e: FunExpr, lookup: ArityLookup, path: Optional[str]) -> int:
    if isinstance(e, (Id, Inc, Dec, Neg)):
        return 1
    if isinstance(e, Perm):
        n = len(e.indices)
        if sorted(e.indices) != list(range(1, n + 1)):
            seen, bad = set(), None
            for i in e.indices:
                if i in seen or i > n:
                    bad = i
                    break
                seen.add(i)
            why = "repeated" if bad in seen else "out-of-range"
            raise ArityError(
                "BadPermutation",
                f"/{' '.join(map(str, e.indices))}/ is not a permutation of 1..{n} ({why} index {bad})",
                e.loc, path, indices=e.indices, index=bad)
        return n
    if isinstance(e, Seq):
        a = _arity(e.left, lookup, path)
        b = _arity(e.right, lookup, path)
        if a != b:
            raise ArityError("SeqMismatch", f"sequential composition of arity {a} with arity {b}",
                             e.loc, path, left=a, right=b)
        return a
    if isinstance(e, Par):
        return _arity(e.left, lookup, path) + _arity(e.right, lookup, path)
    if isinstance(e, It):
        return _arity(e.body, lookup, path) + 1
    if isinstance(e, If):
        arities = tuple(_arity(b, lookup, path) for b in (e.pos, e.zero, e.neg))
        if len(set(arities)) != 1:
            raise ArityError("BranchMismatch",
                             "selection branches have arities " + ", ".join(map(str, arities)),
                             e.loc, path, arities=arities)
        return arities[0] + 1
    if isinstance(e, Inv):
        return _arity(e.body, lookup, path)
    if isinstance(e, Call):
        return lookup(e)
    raise TypeError(f"not a function expression: {e!r}")


def arity_of(e: FunExpr, env: Mapping[str, Entry], path: Optional[str] = None) -> int:
    """Arity of ``e``; raises :class:`ArityError` if ``e`` is ill-formed."""

    def lookup(call: Call) -> int:
        if call.name not in env:
            raise ArityError("UndefinedName", f"undefined function {call.name}", call.loc, path,
                             name=call.name)
        return env[call.name].arity

    return _arity(e, lookup, path)


def _sort_key(err: ArityError) -> Tuple[str, int, int]:
    loc = err.loc or Loc(0, 0)
    return (err.path or "", loc.line, loc.col)


def _cycles(graph: Dict[str, List[str]]) -> List[List[str]]:
    """Strongly connected components that contain a cycle (Tarjan)."""
    index: Dict[str, int] = {}
    low: Dict[str, int] = {}
    stack: List[str] = []
    on_stack = set()
    found: List[List[str]] = []

    def strong(v: str) -> None:
        index[v] = low[v] = len(index)
        stack.append(v)
        on_stack.add(v)
        for w in graph[v]:
            if w not in index:
                strong(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            if len(comp) > 1 or v in graph[v]:
                found.append(comp)

    for v in graph:
        if v not in index:
            strong(v)
    return found


def _diagnose(p: ProgramUnit, check_bodies: bool) -> Tuple[Env, List[ArityError]]:
    errors: List[ArityError] = []
    decls: Dict[str, Tuple[Dcl, str]] = {}
    defs: Dict[str, Tuple[Def, str]] = {}
    paths = {name: m.path for name, m in p.modules.items()}

    for mname, m in p.modules.items():
        for item in m.items:
            if isinstance(item, Dcl):
                table, what = decls, "declared"
            elif isinstance(item, Def):
                table, what = defs, "defined"
            else:
                continue
            if item.name in table:
                prev, prev_mod = table[item.name]
                errors.append(ArityError(
                    "DuplicateName",
                    f"{item.name} is already {what} at {paths[prev_mod] or prev_mod}:{prev.loc}",
                    item.loc, m.path, name=item.name))
            else:
                table[item.name] = (item, mname)

    for name, (dcl, mod) in decls.items():
        if name not in defs or defs[name][1] != mod:
            errors.append(ArityError("MissingDef", f"{name} is declared but not defined in {mod}",
                                     dcl.loc, paths[mod], name=name))
    for name, (d, mod) in defs.items():
        if name not in decls or decls[name][1] != mod:
            errors.append(ArityError("MissingDecl", f"{name} is defined but not declared in {mod}",
                                     d.loc, paths[mod], name=name))

    paired = {name: (d, mod) for name, (d, mod) in defs.items()
              if name in decls and decls[name][1] == mod}

    if check_bodies:
        for name, (d, mod) in paired.items():
            visible = set(p.visible_modules(mod))
            path = paths[mod]

            def lookup(call: Call, visible=visible, path=path) -> int:
                hit = decls.get(call.name)
                if hit is None or hit[1] not in visible:
                    raise ArityError("UndefinedName", f"undefined function {call.name}",
                                     call.loc, path, name=call.name)
                return hit[0].arity

            try:
                actual = _arity(d.body, lookup, path)
            except ArityError as exc:
                errors.append(exc)
                continue
            declared = decls[name][0].arity
            if actual != declared:
                errors.append(ArityError(
                    "DeclBodyMismatch",
                    f"{name} is declared with arity {declared} but its body has arity {actual}",
                    d.loc, path, name=name, declared=declared, actual=actual))

    graph = {name: [c for c in calls_in(d.body) if c in paired] for name, (d, _) in paired.items()}
    order = list(paired)
    for comp in _cycles(graph):
        comp.sort(key=order.index)
        d, mod = paired[comp[0]]
        errors.append(ArityError("RecursiveCall", "recursive definition: " + " -> ".join(comp + comp[:1]),
                                 d.loc, paths[mod], cycle=tuple(comp)))

    env = Env({name: Entry(decls[name][0].arity, d.body, mod) for name, (d, mod) in paired.items()})
    errors.sort(key=_sort_key)
    return env, errors


def build_env(p: ProgramUnit) -> Env:
    """Pair declarations with definitions and reject duplicates and recursion."""
    env, errors = _diagnose(p, check_bodies=False)
    if errors:
        raise CheckFailed(errors)
    return env


def diagnose(p: ProgramUnit) -> List[ArityError]:
    """Every static error in ``p``, sorted by location (at most one per body)."""
    return _diagnose(p, check_bodies=True)[1]


def check_unit(p: ProgramUnit) -> Env:
    env, errors = _diagnose(p, check_bodies=True)
    if errors:
        raise CheckFailed(errors)
    return env
