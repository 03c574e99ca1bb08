"""Source-to-source inversion.

``invert(e)`` is an ``inv``-free expression computing the inverse of ``e``.
Calls are inverted by name: the inverse of ``f`` is the companion ``f_inv``
(and the inverse of ``f_inv`` is ``f`` again), so every definition needs a
companion, which :func:`invert_module` and :func:`invert_env` generate.
"""

from __future__ import annotations

from typing import Dict, List, Set

from .checker import Entry, Env
from .errors import NameCollision
from .evaluator import invert_perm
from .syntax import (
    Call, Dcl, Dec, Def, FunExpr, Id, If, Inc, Inv, It, Module, Neg, Par, Perm,
    ProgramUnit, Seq, subexprs,
)

SUFFIX = "_inv"


def inverse_name(name: str) -> str:
    if name.endswith(SUFFIX) and len(name) > len(SUFFIX):
        return name[: -len(SUFFIX)]
    return name + SUFFIX


def invert(e: FunExpr) -> FunExpr:
    if isinstance(e, Inc):
        return Dec(e.loc)
    if isinstance(e, Dec):
        return Inc(e.loc)
    if isinstance(e, (Id, Neg)):
        return e
    if isinstance(e, Perm):
        return Perm(invert_perm(e.indices), e.loc)
    if isinstance(e, Seq):
        return Seq(invert(e.right), invert(e.left), e.loc)
    if isinstance(e, Par):
        return Par(invert(e.left), invert(e.right), e.loc)
    if isinstance(e, It):
        return It(invert(e.body), e.loc)
    if isinstance(e, If):
        return If(invert(e.pos), invert(e.zero), invert(e.neg), e.loc)
    if isinstance(e, Inv):
        return eliminate_inv(e.body)
    if isinstance(e, Call):
        return Call(inverse_name(e.name), e.loc)
    raise TypeError(f"not a function expression: {e!r}")


def eliminate_inv(e: FunExpr) -> FunExpr:
    """Same function as ``e``, with every ``inv[...]`` rewritten away."""
    if isinstance(e, Inv):
        return invert(e.body)
    if isinstance(e, Seq):
        return Seq(eliminate_inv(e.left), eliminate_inv(e.right), e.loc)
    if isinstance(e, Par):
        return Par(eliminate_inv(e.left), eliminate_inv(e.right), e.loc)
    if isinstance(e, It):
        return It(eliminate_inv(e.body), e.loc)
    if isinstance(e, If):
        return If(eliminate_inv(e.pos), eliminate_inv(e.zero), eliminate_inv(e.neg), e.loc)
    return e


def is_inv_free(e: FunExpr) -> bool:
    return not any(isinstance(node, Inv) for node in subexprs(e))


def _companions(defs: Dict[str, FunExpr]) -> Dict[str, FunExpr]:
    """Bodies of the missing companions of ``defs``.

    A companion that already exists is accepted only when it is exactly the
    generated one; otherwise its name collides.
    """
    handled: Set[str] = set()
    out: Dict[str, FunExpr] = {}
    for name, body in defs.items():
        if name in handled:
            continue
        partner = inverse_name(name)
        inverse = invert(body)
        if partner in defs:
            if defs[partner] != inverse:
                raise NameCollision(f"{partner} already exists and is not the inverse of {name}")
            handled.add(partner)
            continue
        out[partner] = inverse
    return out


def invert_module(m: Module) -> Module:
    """Append a ``dcl``/``def`` pair ``f_inv`` for every definition ``f``.

    Running it again on its own output changes nothing.
    """
    dcls = {d.name: d for d in m.dcls}
    defs = {d.name: d.body for d in m.defs}
    for name in dcls:
        partner = inverse_name(name)
        if partner in dcls and partner not in defs:
            raise NameCollision(f"{partner} is already declared in {m.name}", dcls[partner].loc, m.path)
    try:
        extra = _companions(defs)
    except NameCollision as exc:
        raise NameCollision(exc.message, m.loc, m.path) from None
    items: List = list(m.items)
    for partner, body in extra.items():
        if partner in dcls:
            raise NameCollision(f"{partner} is already declared in {m.name}", dcls[partner].loc, m.path)
        items.append(Dcl(partner, dcls[inverse_name(partner)].arity))
        items.append(Def(partner, body))
    return Module(m.name, tuple(items), path=m.path, loc=m.loc)


def invert_unit(p: ProgramUnit) -> ProgramUnit:
    return ProgramUnit({name: invert_module(m) for name, m in p.modules.items()}, p.entry)


def invert_env(env: Env) -> Env:
    """``env`` plus a companion entry for every function lacking one."""
    extra = _companions({name: entry.body for name, entry in env.items()})
    return env.extended({
        partner: Entry(env.arity(inverse_name(partner)), body, env[inverse_name(partner)].origin)
        for partner, body in extra.items()
    })
