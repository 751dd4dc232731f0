import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from mfk.acceptance import koszul_oracle
from mfk.algebra import Ideal, Ring
from mfk.clifford import QuadraticSpace, SpinorModule, koszul_factorisation
from mfk.kclass import (
    CutoutModel, KClass, NormalFormData, UnsupportedSupport, W, check_basis_weights, euler_T,
    infer_basis_weights, lagrangian_class, localisation_check, periodic_cohomology, poly_weight, shift_weights,
    spinor_weights, sqrt_euler_T, sqrt_euler_square_sign, stabilise, tensor_weights, virtual_structure_sheaf,
)
from mfk.mfcore import Factorisation, direct_sum, shift, split_extension, tensor, totalise, unit_factorisation

PT = Ring([])
A1 = Ring(["x"])
x = A1.var("x")
weights = st.lists(st.integers(-4, 4).filter(bool), max_size=4)


# ---------------------------------------------------------------- classes

def test_canonical_strings():
    assert str(KClass.laurent({0: 1, -2: -1})) == "1 * w^(0) - 1 * w^(-2)"
    assert str(KClass.zero()) == "0"
    assert str(-KClass.monomial(3)) == "-1 * w^(3)"
    assert str(KClass.one() / KClass.laurent({0: 1, -2: -1})) == "(1 * w^(2)) / (1 * w^(2) - 1 * w^(0))"


def test_class_arithmetic():
    a = KClass.laurent({1: 1, -1: -1})
    assert a * a == KClass.laurent({2: 1, 0: -2, -2: 1})
    assert (a / a) == KClass.one()
    assert a ** 0 == KClass.one()
    assert a.rank() == 0 and KClass.monomial(4, 3).rank() == 3
    assert (a - a).is_zero()


def test_euler_class_examples():
    assert euler_T([1]) == KClass.laurent({0: 1, -2: -1})
    assert euler_T([]) == KClass.one()
    assert euler_T([1, -1]) == KClass.laurent({0: 1, -2: -1}) * KClass.laurent({0: 1, 2: -1})
    with pytest.raises(ValueError):
        euler_T([0])


@given(st.integers(-5, 5))
def test_sqrt_euler_single_weight(a):
    assert sqrt_euler_T([a]) == KClass(W ** a - W ** -a)


def test_sqrt_euler_square_sign_example():
    lhs = sqrt_euler_T([1]) ** 2
    assert lhs == -euler_T([1, -1])
    assert sqrt_euler_square_sign([1]) == -1


@given(weights, weights)
def test_multiplicativity(a, b):
    assert euler_T(a + b) == euler_T(a) * euler_T(b)
    assert sqrt_euler_T(a + b) == sqrt_euler_T(a) * sqrt_euler_T(b)


@given(weights)
def test_square_relation_sign_is_parity_of_rank(a):
    assert sqrt_euler_square_sign(a) == (-1) ** len(a)


@given(weights)
def test_sqrt_euler_is_signed_spinor_character(a):
    plus, minus = spinor_weights(a)
    char = sum((W ** (2 * w) for w in plus), sympy.Integer(0)) - sum((W ** (2 * w) for w in minus), sympy.Integer(0))
    assert KClass(char) * KClass.monomial(sum(a)) == sqrt_euler_T(a)


@given(weights, weights)
def test_weight_bookkeeping(a, b):
    fa, fb = spinor_weights(a), spinor_weights(b)
    assert sorted(tensor_weights(fa, fb)[0]) == sorted(spinor_weights(a + b)[0])
    assert shift_weights(shift_weights(fa)) == fa


# ---------------------------------------------------------------- weights

def test_poly_weight_and_inference():
    R = Ring(["x", "y"])
    wt = {"x": 1, "y": -2}
    assert poly_weight(R.parse("x^2*y"), wt) == 0
    with pytest.raises(ValueError):
        poly_weight(R.parse("x + y"), wt)
    F = Factorisation.from_rows(R, "x^2*y", [["x^2"]], [["y"]])
    bw = infer_basis_weights(F, wt)
    assert bw == ((Fraction(0),), (Fraction(-2),))
    assert check_basis_weights(F, wt, *bw)
    assert not check_basis_weights(F, wt, (0,), (0,))


def test_inference_rejects_non_equivariant():
    R = Ring(["x", "y"])
    F = Factorisation.from_rows(R, "0", [["x", "y"]], [["y"], ["-x"]])
    with pytest.raises(ValueError):
        infer_basis_weights(F, {"x": 1, "y": 1})


# ---------------------------------------------------------------- cohomology

def test_cohomology_of_koszul_x():
    c = periodic_cohomology(koszul_factorisation(A1, [x]), {"x": 1})
    assert c.h_plus == KClass.one() and c.h_minus.is_zero() and c.euler == KClass.one()


def test_cohomology_of_koszul_x_squared():
    c = periodic_cohomology(koszul_factorisation(A1, [x ** 2]), {"x": 1})
    assert c.dims == (2, 0)
    assert c.h_plus == KClass.laurent({0: 1, 2: 1})


def test_cohomology_over_relations():
    F = Factorisation.from_rows(A1, "0", [["x"]], [["0"]], relations=Ideal(A1, [x ** 2]))
    c = periodic_cohomology(F, {"x": 1})
    assert c.dims == (1, 1)
    assert c.h_plus == KClass.monomial(2) and c.h_minus == KClass.monomial(-2)


def test_contractible_has_no_cohomology():
    F = Factorisation.from_rows(A1, "0", [["1"]], [["0"]])
    assert periodic_cohomology(F).dims == (0, 0)


def test_infinite_support_is_unsupported():
    with pytest.raises(UnsupportedSupport):
        periodic_cohomology(unit_factorisation(A1), {"x": 1}, cap=500)
    with pytest.raises(ValueError):
        periodic_cohomology(Factorisation.from_rows(A1, "x^2", [["x"]], [["x"]]))


@settings(max_examples=12)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 2), st.integers(1, 2))
def test_cohomology_matches_dense_oracle(a, b, wx, wy):
    R = Ring(["x", "y"])
    K = koszul_factorisation(R, [R.var("x") ** a, R.var("y") ** b])
    wt = {"x": wx, "y": wy}
    got = periodic_cohomology(K, wt)
    xs, ys = sympy.symbols("x y")
    assert got.euler == koszul_oracle(["x", "y"], [wx, wy], [xs ** a, ys ** b])


# ---------------------------------------------------------------- Lagrangian classes

def m_x(weight=-2):
    return CutoutModel.build([], ["x"], "0", ["x", "0"], {"x": weight})


def test_cutout_validation():
    with pytest.raises(ValueError):
        CutoutModel.build([], ["x"], "0", ["x", "x"], {"x": 1})
    with pytest.raises(ValueError):
        CutoutModel.build([], ["x", "y"], "0", ["x + y", "0"], {"x": 1, "y": 2})
    M = m_x()
    assert M.rank == 1 and M.extra_vars == ("x",) and M.lam_weights == (Fraction(2),)


def test_trivial_model_gives_one():
    M = CutoutModel.build([], [], "0", [])
    assert lagrangian_class(M, unit_factorisation(PT)) == KClass.one()
    assert virtual_structure_sheaf(M) == KClass.one()


@pytest.mark.parametrize("k,weight", [(1, -2), (1, -1), (2, -1), (3, -1), (2, 1)])
def test_lagrangian_class_matches_koszul_oracle(k, weight):
    M = CutoutModel.build([], ["x"], "0", [f"x^{k}", "0"], {"x": weight})
    L = lagrangian_class(M, unit_factorisation(PT))
    xs = sympy.Symbol("x")
    oracle = koszul_oracle(["x"], [weight], [xs ** k]) * KClass.monomial(M.half_twist())
    assert L == oracle == virtual_structure_sheaf(M)


def test_known_values():
    assert lagrangian_class(m_x(), unit_factorisation(PT)) == KClass.one()
    M2 = CutoutModel.build([], ["x"], "0", ["x^2", "0"], {"x": -1})
    assert lagrangian_class(M2, unit_factorisation(PT)) == KClass.laurent({1: 1, -1: 1})
    M3 = CutoutModel.build([], ["x"], "0", ["x^3", "0"], {"x": -1})
    assert lagrangian_class(M3, unit_factorisation(PT)) == KClass.laurent({2: 1, 0: 1, -2: 1})


def test_two_variable_model():
    M = CutoutModel.build([], ["x", "y"], "0", ["x^2", "y^2", "0", "0"], {"x": -1, "y": -1})
    assert lagrangian_class(M, unit_factorisation(PT)) == KClass.laurent({2: 1, 0: 2, -2: 1})


def test_additivity_and_shift():
    M = CutoutModel.build([], ["x"], "0", ["x^2", "0"], {"x": -1})
    O = unit_factorisation(PT)
    base = lagrangian_class(M, O)
    assert lagrangian_class(M, direct_sum(O, O)) == base + base
    assert lagrangian_class(M, shift(O)) == -base


def test_contractible_and_totalised_objects_vanish():
    M = m_x()
    C = Factorisation.from_rows(PT, "0", [["1"]], [["0"]])
    assert lagrangian_class(M, C).is_zero()
    S = split_extension(unit_factorisation(PT), unit_factorisation(PT))
    assert lagrangian_class(M, totalise(S)).is_zero()


@pytest.mark.parametrize("c", [0, 1, -2])
def test_stabilisation_invariance(c):
    M = CutoutModel.build([], ["x"], "0", ["x^2", "0"], {"x": -1})
    O = unit_factorisation(PT)
    assert lagrangian_class(stabilise(M, "k", c), O) == lagrangian_class(M, O)


def test_lagrangian_with_nontrivial_potential():
    M = CutoutModel.build(["x", "y"], [], "x*y", ["x", "y"], {"x": 1, "y": -1})
    F = Factorisation.from_rows(M.base, "x*y", [["x"]], [["y"]])
    assert lagrangian_class(M, F) == KClass.monomial(-1)


def test_noncompact_lagrangian_is_unsupported():
    # the zero section cuts out the whole line
    M = CutoutModel.build([], ["x"], "0", ["0", "0"], {"x": -1}, lam_weights=[1])
    with pytest.raises(UnsupportedSupport):
        lagrangian_class(M, unit_factorisation(PT))


# ---------------------------------------------------------------- localisation

def test_normal_form_data():
    M = CutoutModel.build(["x", "y"], [], "x*y", ["x", "y"], {"x": 1, "y": -1})
    N = NormalFormData.from_model(M)
    assert N.check()


def test_localisation_on_xy():
    M = CutoutModel.build(["x", "y"], [], "x*y", ["x", "y"], {"x": 1, "y": -1})
    F = Factorisation.from_rows(M.base, "x*y", [["x"]], [["y"]])
    rep = localisation_check(M, F)
    assert rep.ok, str(rep)


@pytest.mark.parametrize("k,wx,wy", [(1, -1, -1), (2, -1, -2), (3, -2, -1), (1, -3, -2)])
def test_localisation_on_weighted_cutouts(k, wx, wy):
    M = CutoutModel.build([], ["x", "y"], "0", [f"x^{k}", "y", "0", "0"], {"x": wx, "y": wy})
    rep = localisation_check(M, unit_factorisation(M.base))
    assert rep.ok, str(rep)
