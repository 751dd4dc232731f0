import pytest
from hypothesis import given, strategies as st

from mfk.algebra import Ideal, Ring
from mfk.deform import central_fibre, lift_potential, rees_presentation, simplify_quotient

B = Ring(["x", "y"])
x, y = B.gens()


def test_rees_of_coordinate_ideal():
    R = rees_presentation(Ideal(B, [x, y]))
    assert R.cone_vars == ("X", "Y")
    assert R.check() == []
    lam, X, Y = R.ring.var("lam"), R.ring.var("X"), R.ring.var("Y")
    rx, ry = R.ring.var("x"), R.ring.var("y")
    assert R.J.same_as(Ideal(R.ring, [lam * X - rx, lam * Y - ry]))
    C = central_fibre(R)
    assert C.ideal.same_as(Ideal(C.ring, [C.ring.var("x"), C.ring.var("y")]))


def test_rees_saturation_adds_koszul_relation():
    # generators x*y and x: lam T1 - x y and lam T2 - x force T1 - y T2 after saturation
    R = rees_presentation(Ideal(B, [x * y, x]))
    assert R.cone_vars == ("T1", "X")
    assert R.J.groebner().contains(R.ring.parse("T1 - y*X"))
    assert R.check() == []


def test_cone_of_nonreduced_ideal():
    R = rees_presentation(Ideal(B, [x ** 2]))
    C = central_fibre(R)
    assert C.ideal.groebner().contains(C.ring.parse("x^2"))
    assert not C.ideal.groebner().contains(C.ring.parse("x"))


def test_explicit_generators_and_names():
    I = Ideal(B, [x])
    R = rees_presentation(I, generators=[x, B.zero()], cone_names=["S", "Z"])
    assert R.cone_vars == ("S", "Z")
    C = central_fibre(R)
    assert C.ideal.groebner().contains(C.ring.var("Z"))
    with pytest.raises(ValueError):
        rees_presentation(I, generators=[y])
    with pytest.raises(ValueError):
        rees_presentation(Ideal(B, [B.one()]))


def test_lift_potential():
    R = rees_presentation(Ideal(B, [x, y]))
    L = lift_potential(x * y + y ** 2, R)
    assert L.q == R.cone_ring.parse("X*Y + Y^2")
    with pytest.raises(ValueError):
        lift_potential(x, R)


@given(st.integers(0, 3), st.integers(0, 3), st.integers(-3, 3))
def test_lifted_square_membership(a, b, c):
    f = x ** (a + 2) * y ** b + c * x * y ** (b + 1)
    R = rees_presentation(Ideal(B, [x, y]))
    L = lift_potential(f, R)
    lam = R.lam
    assert R.J.groebner().contains(lam * lam * R.ring.embed(L.q) - R.ring.embed(f))


def test_simplify_quotient_eliminates_graph_variables():
    S = Ring(["a", "b", "c"])
    I = Ideal(S, [S.parse("a - b^2"), S.parse("c - a*b")])
    ring, ideal, images = simplify_quotient(S, I, ["a", "c"])
    assert ring.names == ("b",)
    assert ideal.is_zero()
    assert images["c"] == ring.parse("b^3")
