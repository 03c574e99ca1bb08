import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from progen import ProgramGen, random_values
from yarel.checker import arity_of, check_unit
from yarel.errors import NameCollision, StepLimitExceeded
from yarel.evaluator import EvalLimits, Evaluator, run
from yarel.inverter import (
    eliminate_inv, invert, invert_env, invert_module, inverse_name, is_inv_free,
)
from yarel.syntax import (
    Call, Dec, Inc, Inv, It, Module, Perm, Seq, parse_expr, parse_module,
    pretty_print, unit_of,
)
from yarel.programs import path as program_path


class TestRewrite:
    def test_seq(self):
        assert invert(Seq(Inc(), Dec())) == Seq(Inc(), Dec())

    def test_perm(self):
        assert invert(Perm((2, 3, 1))) == Perm((3, 1, 2))

    def test_it(self):
        assert invert(It(Inc())) == It(Dec())

    def test_inv(self):
        assert invert(Inv(Inc())) == Inc()

    def test_every_form(self):
        e = parse_expr("if[inc, neg | id, /2 1/]; it[dec; f]; inv[g | inv[h]]")
        assert invert(e) == parse_expr("(g | h_inv); (it[f_inv; inc]; if[dec, neg | id, /2 1/])")

    def test_companion_names(self):
        assert inverse_name("fib") == "fib_inv"
        assert inverse_name("fib_inv") == "fib"
        assert invert(Call("fib_inv")) == Call("fib")

    def test_eliminate_keeps_forward_meaning(self):
        assert eliminate_inv(parse_expr("inc; inv[inc | neg]")) == parse_expr("inc; (dec | neg)")


class TestModule:
    def test_fibonacci_module(self):
        m = parse_module(open(program_path("Fibonacci")).read())
        out = invert_module(m)
        names = [d.name for d in out.defs]
        assert names == ["coreFib", "fib", "coreFib_inv", "fib_inv"]
        env = check_unit(unit_of(out))
        assert env.arity("coreFib_inv") == 2 and env.arity("fib_inv") == 3
        assert run(env, "fib_inv", [3, 8, 13]) == (3, 0, 1)

    def test_empty(self):
        assert invert_module(Module("E")) == Module("E")

    def test_collision(self):
        m = parse_module("module M { dcl fib : int def fib := inc dcl fib_inv : int def fib_inv := id }")
        with pytest.raises(NameCollision):
            invert_module(m)

    def test_collision_with_bare_declaration(self):
        m = parse_module("module M { dcl fib : int def fib := inc dcl fib_inv : int }")
        with pytest.raises(NameCollision):
            invert_module(m)

    def test_idempotent_and_deterministic(self, fib_source):
        m = parse_module(fib_source)
        once = invert_module(m)
        assert invert_module(once) == once
        assert pretty_print(invert_module(m)) == pretty_print(once)

    def test_existing_true_inverse_accepted(self):
        m = parse_module("module M { dcl f : int def f := inc dcl f_inv : int def f_inv := dec }")
        assert invert_module(m) == m

    def test_cross_module_companions(self):
        a = parse_module("module A { import B dcl f : int, int def f := inv[g]; g }")
        b = parse_module("module B { dcl g : int, int def g := it[inc] }")
        a2, b2 = invert_module(a), invert_module(b)
        env = check_unit(unit_of(a2, b2))
        assert run(env, "f_inv", run(env, "f", [4, 2])) == (4, 2)


# -- properties ----------------------------------------------------------------

LIMIT = EvalLimits(40_000)


@st.composite
def programs(draw, **kw):
    return ProgramGen(draw(st.randoms(use_true_random=False)), **kw).program()


@settings(max_examples=300, deadline=None)
@given(programs(), st.randoms(use_true_random=False))
def test_sound_and_agrees_with_semantic_inverse(p, rng):
    env2 = invert_env(p.env)
    e = p.body
    inv_e = invert(e)
    ev = Evaluator(env2, LIMIT)
    x = random_values(rng, p.arity)
    try:
        y = ev(e, x)
        assert ev(inv_e, y) == x
        assert ev(inv_e, x) == ev(Inv(e), x)
    except StepLimitExceeded:
        assume(False)


@settings(max_examples=300, deadline=None)
@given(programs())
def test_output_shape(p):
    e = invert(p.body)
    assert is_inv_free(e)
    assert arity_of(e, invert_env(p.env)) == p.arity


@settings(max_examples=300, deadline=None)
@given(programs(max_helpers=0, use_inv=False))
def test_involution_without_calls(p):
    assert invert(invert(p.body)) == p.body


def test_invert_env_companions_checked():
    rng = random.Random(3)
    for _ in range(100):
        p = ProgramGen(rng).program()
        m2 = invert_module(p.module)
        env = check_unit(unit_of(m2))
        assert set(env) == set(invert_env(p.env))
