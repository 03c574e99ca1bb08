import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import env_of
from progen import SrlGen
from yarel.analysis import AffineMap, NotAffine, classify, determinant, extract_affine
from yarel.errors import AnalysisError, OverflowRisk
from yarel.evaluator import Evaluator
from yarel.syntax import Call, parse_expr


def leibniz(m):
    """Determinant as a sum over permutations."""
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1 if inversions % 2 else 1
        for i in range(n):
            term *= m[i][perm[i]]
        total += term
    return total


class TestDeterminant:
    @pytest.mark.parametrize("m,det", [
        ([], 1),
        ([[5]], 5),
        ([[1, 2], [3, 4]], -2),
        ([[0, 1], [1, 0]], -1),
        ([[2, 0, 0], [0, 3, 0], [0, 0, 4]], 24),
        ([[0, 0, 1], [0, 1, 0], [1, 0, 0]], -1),
        ([[1, 2, 3], [4, 5, 6], [7, 8, 9]], 0),
    ])
    def test_examples(self, m, det):
        assert determinant(m) == det

    @settings(max_examples=300)
    @given(st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=n, max_size=n)))
    def test_matches_permutation_expansion(self, m):
        assert determinant(m) == leibniz(m)

    @settings(max_examples=100)
    @given(st.permutations(range(5)))
    def test_permutation_sign(self, perm):
        m = [[1 if j == perm[i] else 0 for j in range(5)] for i in range(5)]
        assert determinant(m) == leibniz(m) in (1, -1)

    def test_not_square(self):
        with pytest.raises(ValueError):
            determinant([[1, 2]])


class TestClassify:
    @pytest.mark.parametrize("src,flags", [
        ("inc; dec", (True, True, True)),
        ("it[inc]", (True, True, True)),
        ("it[it[inc] | id]", (True, False, True)),
        ("it[neg]", (True, True, False)),
        ("/2 1/", (True, True, False)),
        ("if[inc, id, dec] | id", (False, True, False)),
        ("inv[it[dec]]", (True, True, True)),
    ])
    def test_examples(self, src, flags):
        r = classify(parse_expr(src), {})
        assert (r.is_if_free, r.is_nest_free, r.is_srl_fragment) == flags

    def test_follows_calls(self, fib_env):
        r = classify(Call("fib"), fib_env)
        assert r.is_if_free and not r.is_nest_free and not r.is_srl_fragment


class TestExtract:
    def test_sum(self, arith_env):
        a = extract_affine(Call("sum"), arith_env)
        assert a.matrix == ((1, 1), (0, 1))
        assert a.offset == (0, 0)
        assert a.determinant == 1

    def test_neg(self):
        a = extract_affine(parse_expr("neg"), {})
        assert a.matrix == ((-1,),) and a.offset == (0,) and a.determinant == -1

    def test_offset(self):
        a = extract_affine(parse_expr("(inc; inc) | dec"), {})
        assert a.matrix == ((1, 0), (0, 1)) and a.offset == (2, -1)

    def test_flip_not_affine(self, arith_env):
        r = extract_affine(Call("flip"), arith_env, domain=(-50, 50), seed=1)
        assert isinstance(r, NotAffine)
        ev = Evaluator(arith_env)
        assert ev(Call("flip"), r.witness) == r.actual != r.expected

    def test_negative_counter_not_affine(self, arith_env):
        assert isinstance(extract_affine(Call("sum"), arith_env, domain=(-100, 100)), NotAffine)

    def test_rejects_if(self):
        with pytest.raises(AnalysisError):
            extract_affine(parse_expr("if[inc, id, dec]"), {})

    def test_bad_range(self):
        with pytest.raises(AnalysisError):
            extract_affine(parse_expr("inc"), {}, domain=(5, 1))
        with pytest.raises(AnalysisError):
            extract_affine(parse_expr("inc"), {}, probes=0)

    def test_overflow(self):
        with pytest.raises(OverflowRisk):
            extract_affine(parse_expr("inc"), {}, domain=(2**31 - 2, 2**31 - 1))

    def test_nested_loop_program(self):
        # a + n*b is bilinear, so unit-vector probes fit a wrong map
        env = env_of("module M { dcl mul : int, int, int, int def mul := it[it[inc] | id] }")
        r = extract_affine(Call("mul"), env, domain=(0, 50))
        assert isinstance(r, NotAffine)
        a, b, _, n = r.witness
        assert r.actual[0] == a + n * b

    def test_seeded(self, arith_env):
        a = extract_affine(Call("sum"), arith_env, seed=7)
        b = extract_affine(Call("sum"), arith_env, seed=7)
        assert a == b and a.verified_on == 100

    def test_thousand_points(self):
        env = env_of("module M { dcl t : int, int, int def t := it[inc | inc]; /1 2 3/ }")
        a = extract_affine(Call("t"), env)
        rng = random.Random(0)
        ev = Evaluator(env)
        for _ in range(1000):
            x = tuple(rng.randint(0, 1 << 15) for _ in range(3))
            assert ev(Call("t"), x) == a(x)


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_srl_programs_have_unit_determinant(rng):
    p = SrlGen(rng).program()
    a = extract_affine(Call("main"), p.env)
    assert isinstance(a, AffineMap)
    assert a.determinant == 1
