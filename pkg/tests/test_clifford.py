import itertools

import pytest
from hypothesis import given, strategies as st

from mfk.algebra import IMAG, Ring, Scalar
from mfk.clifford import (
    CliffordElement, QuadraticSpace, SpinorModule, clifford_square_check, isotropic_reduce_class_check,
    koszul_factorisation, pfaffian_line, polar, quadratic_value, spinor_action, spinor_factorisation,
)
from mfk.mfcore import validate

K0 = Ring([])


def one_word(space, gens):
    return CliffordElement.word(space, K0, gens)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_generator_anticommutators(n):
    sp = QuadraticSpace(n)
    for g, h in itertools.product(range(2 * n), repeat=2):
        anti = one_word(sp, (g, h)) + one_word(sp, (h, g))
        want = CliffordElement(sp, K0, {(): K0.const(sp.pairing(g, h))})
        assert anti == want


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_vector_squares_to_quadratic_value(v):
    sp = QuadraticSpace(2)
    c = CliffordElement.vector(sp, K0, v)
    assert c * c == CliffordElement(sp, K0, {(): K0.const(quadratic_value(sp, v))})


@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_polar_is_anticommutator(v, w):
    sp = QuadraticSpace(2)
    a, b = CliffordElement.vector(sp, K0, v), CliffordElement.vector(sp, K0, w)
    assert a * b + b * a == CliffordElement(sp, K0, {(): K0.const(polar(sp, v, w))})


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)), max_size=3))
def test_clifford_associativity(words):
    sp = QuadraticSpace(2)
    els = [one_word(sp, w) for w in words] + [one_word(sp, (0, 2))] * (3 - len(words))
    a, b, c = els[:3]
    assert (a * b) * c == a * (b * c)


def test_spinor_module_dims():
    for n in range(4):
        assert SpinorModule(QuadraticSpace(n)).graded_dims == (2 ** max(n - 1, 0), 2 ** (n - 1) if n else 0)


def test_spinor_action_squares_to_quadratic_value():
    sp = QuadraticSpace(2)
    v = [Scalar(1), Scalar(2), Scalar(-1), Scalar(3)]
    q = quadratic_value(sp, v)
    for I in SpinorModule(sp).basis:
        once = spinor_action(sp, v, {I: Scalar(1)})
        twice = {}
        for J, c in once.items():
            for L, d in spinor_action(sp, v, {J: c}).items():
                twice[L] = twice.get(L, Scalar(0)) + d
        twice = {k: c for k, c in twice.items() if c}
        assert twice == ({I: q} if q else {})


@pytest.mark.parametrize("n", [1, 2, 3])
def test_spinor_factorisation_potential_and_phase(n):
    ring = Ring([f"s{k}" for k in range(2 * n)])
    s = list(ring.gens())
    sp = QuadraticSpace(n)
    F = spinor_factorisation(sp, s, 1, ring)
    assert validate(F) and F.potential == quadratic_value(sp, s)
    G = spinor_factorisation(sp, s, IMAG, ring)
    assert validate(G) and G.potential == -quadratic_value(sp, s)


def test_koszul_potential_is_pairing():
    R = Ring(["x", "y", "a", "b"])
    x, y, a, b = R.gens()
    K = koszul_factorisation(R, [x, y], [a, b])
    assert K.potential == a * x + b * y and validate(K)
    K0_ = koszul_factorisation(R, [x, y])
    assert K0_.potential.is_zero() and (K0_.rank_plus, K0_.rank_minus) == (2, 2)


def test_koszul_rank_one_is_multiplication():
    R = Ring(["x"])
    K = koszul_factorisation(R, [R.var("x")])
    assert (K.rank_plus, K.rank_minus) == (1, 1)
    assert K.d_plus.is_zero() or K.d_minus.is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_clifford_square(n):
    rep = clifford_square_check(n)
    assert rep.ok, str(rep)


def test_clifford_square_range():
    with pytest.raises(ValueError):
        clifford_square_check(4)


def test_pfaffian_line_of_coordinate_lagrangians():
    sp = QuadraticSpace(2)
    lam = [[1, 0, 0, 0], [0, 1, 0, 0]]
    dual = [[0, 0, 1, 0], [0, 0, 0, 1]]
    L1 = pfaffian_line(sp, lam)
    assert L1.generator == {(): Scalar(1)} and L1.parity == 1
    L2 = pfaffian_line(sp, dual)
    assert set(L2.generator) == {(0, 1)} and L2.parity == 1
    mixed = pfaffian_line(sp, [[1, 0, 0, 0], [0, 0, 0, 1]])
    assert mixed.parity == -1


def test_pfaffian_line_rejects_non_isotropic():
    sp = QuadraticSpace(1)
    with pytest.raises(ValueError):
        pfaffian_line(sp, [[1, 1]])


def test_pfaffian_line_annihilated():
    sp = QuadraticSpace(2)
    basis = [[1, 0, 0, -1], [0, 1, 1, 0]]
    line = pfaffian_line(sp, basis)
    for v in basis:
        out = {}
        for I, c in line.generator.items():
            for J, d in spinor_action(sp, [Scalar.of(a) for a in v], {I: c}).items():
                out[J] = out.get(J, Scalar(0)) + d
        assert not any(out.values())


@pytest.mark.parametrize("weights,K", [((1,), [0]), ((1, 2), [0]), ((1, 2), [1]), ((1, -1, 3), [0, 2])])
def test_isotropic_reduction_class(weights, K):
    ok, lhs, rhs = isotropic_reduce_class_check(QuadraticSpace(len(weights), weights), K)
    assert ok, f"{lhs} != {rhs}"
