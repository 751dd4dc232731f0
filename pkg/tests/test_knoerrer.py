import os

import pytest

from mfk.algebra import Ring
from mfk.clifford import koszul_factorisation
from mfk.kclass import CutoutModel, KClass, knoerrer_comparison_check, lagrangian_class, virtual_structure_sheaf
from mfk.knoerrer import SplitBundleData, knoerrer_apply, kvir, kvir_weights, psi_transport_check
from mfk.mfcore import Factorisation, shift, unit_factorisation, validate

PT = Ring([])
B = Ring(["x", "y"])


def test_bundle_coordinates():
    Q = SplitBundleData(B, 2, weights=(1, -1))
    assert Q.total_ring.names == ("x", "y", "u1", "u2", "v1", "v2")
    assert Q.form() == Q.total_ring.parse("u1*v1 + u2*v2")
    with pytest.raises(ValueError):
        SplitBundleData(B, 1, u_names=("x",))
    with pytest.raises(ValueError):
        SplitBundleData(B, 0)


def test_kvir_rank_one():
    Q = SplitBundleData(PT, 1)
    K = kvir(Q)
    R = Q.total_ring
    assert K.d_plus[0, 0] == R.var("v1") and K.d_minus[0, 0] == R.var("u1")
    assert K.potential == Q.form()


@pytest.mark.parametrize("m", [1, 2, 3])
def test_kvir_is_valid_and_weighted(m):
    Q = SplitBundleData(PT, m, weights=tuple(range(1, m + 1)))
    K = kvir(Q)
    assert validate(K) and (K.rank_plus, K.rank_minus) == (2 ** (m - 1), 2 ** (m - 1))
    plus, minus = kvir_weights(Q)
    assert len(plus) == K.rank_plus and len(minus) == K.rank_minus


@pytest.mark.parametrize("m", [1, 2])
def test_periodicity_image(m):
    F = Factorisation.from_rows(B, "x*y", [["x"]], [["y"]])
    Q = SplitBundleData(B, m)
    G = knoerrer_apply(F, Q)
    assert validate(G)
    R = Q.total_ring
    assert G.potential == R.parse("x*y") + Q.form()
    assert (G.rank_plus, G.rank_minus) == (2 ** m, 2 ** m)


def test_periodicity_rejects_foreign_ring():
    with pytest.raises(ValueError):
        knoerrer_apply(unit_factorisation(B), SplitBundleData(Ring(["z"]), 1))


FACTS = [
    lambda: Factorisation.from_rows(B, "x*y", [["x"]], [["y"]]),
    lambda: Factorisation.from_rows(B, "x^2*y", [["x^2"]], [["y"]]),
    lambda: unit_factorisation(B),
    lambda: koszul_factorisation(B, [B.var("x"), B.var("y")], [B.var("y"), B.zero()]),
]


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("k", range(len(FACTS)))
def test_graph_transport(m, k):
    rep = psi_transport_check(FACTS[k](), SplitBundleData(B, m))
    assert rep.ok, str(rep)


def test_transport_reports_distinct_deltas():
    rep = psi_transport_check(FACTS[0](), SplitBundleData(B, 1))
    assert not rep.deltas_identical
    assert "deltas identical: False" in str(rep)


def test_transport_range():
    with pytest.raises(ValueError):
        psi_transport_check(FACTS[0](), SplitBundleData(B, 3))


MODELS = [
    lambda: CutoutModel.build([], [], "0", []),
    lambda: CutoutModel.build([], ["x"], "0", ["x", "0"], {"x": -2}),
    lambda: CutoutModel.build([], ["x"], "0", ["x^2", "0"], {"x": -1}),
]


@pytest.mark.parametrize("b", [0, 1, 3])
@pytest.mark.parametrize("k", range(len(MODELS)))
def test_comparison_over_a_point(k, b):
    rep = knoerrer_comparison_check(MODELS[k](), SplitBundleData(PT, 1, weights=(b,)), unit_factorisation(PT))
    assert rep.ok, str(rep)


def test_comparison_on_contractible():
    C = Factorisation.from_rows(PT, "0", [["1"]], [["0"]])
    rep = knoerrer_comparison_check(MODELS[1](), SplitBundleData(PT, 1, weights=(1,)), C)
    assert rep.ok and rep.lhs.is_zero()


def test_clifford_factorisation_goes_to_virtual_structure_sheaf():
    Q = SplitBundleData(PT, 1, weights=(1,))
    M = CutoutModel.build(["u1", "v1"], [], "u1*v1", ["u1", "v1"], {"u1": -1, "v1": 1})
    K = shift(kvir(Q, M.base))
    plus, minus = kvir_weights(Q)
    assert lagrangian_class(M, K, (minus, plus)) == virtual_structure_sheaf(MODELS[0]()) == KClass.one()


@pytest.mark.skipif(not os.environ.get("MFK_SLOW"), reason="several minutes; set MFK_SLOW=1")
def test_comparison_with_potential():
    M = CutoutModel.build(["x", "y"], [], "x*y", ["x", "y"], {"x": 1, "y": -1})
    F = Factorisation.from_rows(M.base, "x*y", [["x"]], [["y"]])
    rep = knoerrer_comparison_check(M, SplitBundleData(M.base, 1, weights=(1,)), F)
    assert rep.ok, str(rep)
