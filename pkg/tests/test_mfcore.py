import pytest
from hypothesis import given, strategies as st

from mfk.algebra import Ideal, Matrix, Ring
from mfk.clifford import koszul_factorisation
from mfk.mfcore import (
    FactMorphism, Factorisation, Homotopy, compose, cone, contractible_off, differential, direct_sum, shift,
    split_extension, tensor, totalise, unit_factorisation, validate,
)

R = Ring(["x", "y", "u", "v"])
x, y, u, v = R.gens()


def xy():
    return Factorisation.from_rows(R, "x*y", [["x"]], [["y"]])


def test_valid_and_invalid():
    assert validate(xy())
    bad = Factorisation.from_rows(R, "x*y + 1", [["x"]], [["y"]])
    rep = validate(bad)
    assert not rep and "remainder" in str(rep)


def test_validation_respects_relations():
    rel = Ideal(R, [x - y])
    F = Factorisation.from_rows(R, "x^2", [["x"]], [["y"]], relations=rel)
    assert validate(F)
    assert not validate(F.with_relations(None))


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        Factorisation(R, x, Matrix(R, [[x, y]], 2), Matrix(R, [[y, x]], 2))


def test_unit_and_shift():
    O = unit_factorisation(R)
    assert (O.rank_plus, O.rank_minus) == (1, 0) and validate(O)
    F = xy()
    S = shift(F)
    assert S.d_plus == -F.d_minus and validate(S)
    assert shift(S).same_matrices(F)


def test_direct_sum_and_tensor_potentials():
    F, G = xy(), Factorisation.from_rows(R, "u*v", [["u"]], [["v"]])
    assert validate(direct_sum(F, F))
    T = tensor(F, G)
    assert T.potential == x * y + u * v
    assert (T.rank_plus, T.rank_minus) == (2, 2) and validate(T)


def test_tensor_sign_convention():
    F, G = xy(), Factorisation.from_rows(R, "u*v", [["u"]], [["v"]])
    T = tensor(F, G)
    # d+ : F+G+ (+) F-G- -> F-G+ (+) F+G-
    assert T.d_plus == Matrix(R, [[x, -v], [u, y]], 2)
    assert T.d_minus == Matrix(R, [[y, v], [-u, x]], 2)


def test_tensor_with_unit_is_identity():
    F = xy()
    T = tensor(F, unit_factorisation(R))
    assert T.same_matrices(F)


@given(st.integers(1, 3), st.integers(1, 3))
def test_koszul_tensor_ranks(a, b):
    T = tensor(koszul_factorisation(R, [x ** a]), koszul_factorisation(R, [y ** b]))
    assert validate(T) and T.potential.is_zero()
    assert (T.rank_plus, T.rank_minus) == (2, 2)


def test_morphism_calculus():
    F = xy()
    idF = FactMorphism.identity(F)
    assert idF.is_closed()
    assert compose(idF, idF).equals(idF)
    odd = FactMorphism(F, F, 1, Matrix(R, [[R.one()]], 1), Matrix(R, [[R.zero()]], 1))
    D = differential(odd)
    assert D.parity == 0 and D.plus[0, 0] == y and D.minus[0, 0] == y
    assert not odd.is_closed()
    with pytest.raises(ValueError):
        idF + odd


def test_cone_of_identity_is_contractible():
    F = xy()
    C = cone(FactMorphism.identity(F))
    assert validate(C)
    res = contractible_off(C, 1, degree_bound=0, power_bound=0)
    assert res and res.power == 0 and res.homotopy.verify()


def test_contractible_away_from_variable():
    # (x, y) is killed by inverting x
    F = xy()
    res = contractible_off(F, x, degree_bound=1, power_bound=2)
    assert res and res.power == 1
    H = res.homotopy
    assert H.verify() and H.scale == x
    # but not by inverting u
    assert not contractible_off(F, u, degree_bound=1, power_bound=1)


def test_homotopy_verify_rejects_wrong_scale():
    F = xy()
    assert Homotopy(F, Matrix(R, [[R.one()]], 1), Matrix(R, [[R.zero()]], 1), y).verify()
    assert not Homotopy(F, Matrix(R, [[R.one()]], 1), Matrix(R, [[R.zero()]], 1), x).verify()
    assert Homotopy(F, Matrix(R, [[R.zero()]], 1), Matrix(R, [[R.one()]], 1), x).verify()


def test_split_extension_totalises_to_valid_factorisation():
    F = xy()
    phi = FactMorphism(F, F, 1, Matrix(R, [[R.one()]], 1), Matrix(R, [[-R.one()]], 1))
    if not phi.is_closed():
        phi = FactMorphism.zero(F, F, 1)
    S = split_extension(F, F, phi)
    assert S.check() == []
    assert validate(S.middle)
    tot = totalise(S)
    assert validate(tot)
    assert contractible_off(tot, 1, degree_bound=1, power_bound=0)


def test_split_extension_rejects_open_glue():
    F = xy()
    bad = FactMorphism(F, F, 1, Matrix(R, [[u]], 1), Matrix(R, [[R.zero()]], 1))
    with pytest.raises(ValueError):
        split_extension(F, F, bad)
