import pytest

from mfk.algebra import Ideal, Matrix, Ring
from mfk.clifford import koszul_factorisation
from mfk.deform import rees_presentation
from mfk.mfcore import Factorisation, FactMorphism, Homotopy, unit_factorisation, validate
from mfk.specialise import (
    GrassChart, UnsupportedPushforward, all_charts, covers, graph_closure, shift_check, smooth_cover_check,
    sp_contract, sp_laws_check, sp_morphism, sp_object, tautological_factorisation,
)

B = Ring(["x", "y"])
x, y = B.gens()
R = rees_presentation(Ideal(B, [x, y]))


def fact(pot, p, m):
    return Factorisation.from_rows(B, pot, [[p]], [[m]])


def test_chart_enumeration():
    charts = all_charts(1, 1)
    assert charts[0] == GrassChart.generic(1, 1)
    assert len(charts) == 4 and len(set(charts)) == 4
    assert len(all_charts(2, 1)) == 3 * 3


def test_specialisation_of_xy():
    sp = sp_object(fact("x*y", "x", "y"), R)
    assert str(sp) == "fact over Q(i)[X,Y] pot X*Y dplus [[X]] dminus [[Y]]"
    assert sp.closure.chart == GrassChart.generic(1, 1)


def test_specialisation_of_structure_sheaf():
    sp = sp_object(unit_factorisation(B), R)
    assert str(sp) == str(unit_factorisation(Ring(["X", "Y"])))


def test_specialisation_is_homogeneous_leading_part():
    # x + x^2 has leading form X on the cone
    F = fact("x*y + x^2*y", "x + x^2", "y")
    sp = sp_object(F, R)
    assert validate(sp.fact)
    assert sp.fact.d_plus[0, 0] == sp.fact.ring.parse("X")


def test_chart_miss_and_contraction():
    F = fact("x*y", "x*y", "1")
    assert graph_closure(F, GrassChart.generic(1, 1), R).chart_miss
    sp = sp_object(F, R)
    assert sp.closure.chart == GrassChart((0,), (0,))
    h = Homotopy(F, Matrix(B, [[B.one()]], 1), Matrix(B, [[B.zero()]], 1))
    con = sp_contract(F, h, sp.closure)
    assert con.beta_vanish and con.frame.verify() and con.xi.verify() and con.central.verify()


@pytest.mark.parametrize("pm", [("x", "y"), ("x*y", "1"), ("x^2", "y"), ("y", "x")])
def test_closure_identities_on_every_chart(pm):
    p, m = pm
    F = Factorisation.from_rows(B, f"{p}*{m}" if m != "1" else p, [[p]], [[m]])
    for chart in all_charts(1, 1):
        gc = graph_closure(F, chart, R)
        if not gc.chart_miss:
            assert gc.closure_identities_check() == []
            assert validate(tautological_factorisation(gc))
            assert validate(tautological_factorisation(gc, central=True))


def test_covering_detection():
    F = fact("x*y", "x", "y")
    assert covers(F, R, [GrassChart.generic(1, 1)])
    assert covers(F, R, all_charts(1, 1))


def test_koszul_needs_several_charts_or_is_covered():
    K = koszul_factorisation(B, [x, y])
    try:
        sp = sp_object(K, R)
    except UnsupportedPushforward:
        return
    assert validate(sp.fact)


def test_shift_compatibility():
    F = fact("x*y", "x", "y")
    for chart in all_charts(1, 1):
        if not graph_closure(F, chart, R).chart_miss:
            assert shift_check(F, R, chart)


def test_sp_of_morphism_preserves_tautological_subspaces():
    F, G = fact("x*y", "x", "y"), fact("x*y", "2*x", "1/2*y")
    a = FactMorphism(F, G, 0, Matrix(B, [[B.one()]], 1), Matrix(B, [[B.const(2)]], 1))
    assert a.is_closed()
    g1 = graph_closure(F, GrassChart.generic(1, 1), R, "F")
    g2 = graph_closure(G, GrassChart.generic(1, 1), R, "G")
    fp, out = sp_morphism(a, g1, g2)
    assert out.vanishing and out.xi.is_closed()


def test_functor_laws_on_open_morphisms():
    F, G, H = fact("x*y", "x", "y"), fact("x*y", "y", "x"), fact("x*y", "-x", "-y")
    a = FactMorphism(F, G, 1, Matrix(B, [[x + y]], 1), Matrix(B, [[B.one()]], 1))
    a2 = FactMorphism(G, H, 0, Matrix(B, [[y]], 1), Matrix(B, [[x - 1]], 1))
    rep = sp_laws_check(F, G, H, a, a2, R)
    assert rep.ok, str(rep)


@pytest.mark.parametrize("k", [1, 2])
def test_smooth_cover_compatibility(k):
    rep = smooth_cover_check(fact("x*y", "x", "y"), Ideal(B, [x, y]), k)
    assert rep.ok, rep.checks
