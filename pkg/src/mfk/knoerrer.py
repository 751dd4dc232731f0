"""Periodicity along a split quadratic bundle ``Q = Lambda_Q (+) Lambda_Q*``.

``phi^* F (x) K^vir[m]`` takes factorisations of ``f`` on ``U`` to
factorisations of ``f + sum u_i v_i`` on ``tot Q = U x A^{2m}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import Ideal, Matrix, Poly, Ring
from .clifford import QuadraticSpace, spinor_factorisation
from .mfcore import Factorisation, shift, tensor, validate

__all__ = [
    "SplitBundleData", "kvir", "kvir_weights", "knoerrer_apply", "psi_transport_check",
    "PsiReport", "structure_blocks",
]


@dataclass(frozen=True, eq=False)
class SplitBundleData:
    """Coordinates ``u`` on ``Lambda_Q`` and ``v`` on ``Lambda_Q*`` over a base ring.

    ``weights[i]`` is the vector weight of the i-th basis vector of
    ``Lambda_Q``, so ``u_i`` has function weight ``-weights[i]``.
    """

    base: Ring
    m: int
    u_names: tuple = ()
    v_names: tuple = ()
    weights: tuple = ()

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need m >= 1")
        u = tuple(self.u_names) or tuple(f"u{i + 1}" for i in range(self.m))
        v = tuple(self.v_names) or tuple(f"v{i + 1}" for i in range(self.m))
        if len(u) != self.m or len(v) != self.m:
            raise ValueError("one u and one v coordinate per isotropic direction")
        if set(u + v) & set(self.base.names) or len(set(u + v)) != 2 * self.m:
            raise ValueError("bundle coordinates must be fresh and distinct")
        object.__setattr__(self, "u_names", u)
        object.__setattr__(self, "v_names", v)
        w = tuple(Fraction(a) for a in self.weights) if self.weights else (Fraction(0),) * self.m
        if len(w) != self.m:
            raise ValueError("one weight per isotropic direction")
        object.__setattr__(self, "weights", w)

    @property
    def total_ring(self) -> Ring:
        return Ring(list(self.base.names) + list(self.u_names) + list(self.v_names))

    def form(self, ring: Ring | None = None) -> Poly:
        ring = ring or self.total_ring
        return sum((ring.var(a) * ring.var(b) for a, b in zip(self.u_names, self.v_names)), ring.zero())

    def zero_section(self, ring: Ring | None = None) -> Ideal:
        ring = ring or self.total_ring
        return Ideal(ring, [ring.var(x) for x in self.u_names + self.v_names])


def kvir(Q: SplitBundleData, ring: Ring | None = None) -> Factorisation:
    """Clifford multiplication by the tautological section ``(u, v)``."""
    ring = ring or Q.total_ring
    tau = [ring.var(x) for x in Q.u_names + Q.v_names]
    return spinor_factorisation(QuadraticSpace(Q.m), tau, 1, ring)


def kvir_weights(Q: SplitBundleData):
    """Basis weights of ``K^vir``, including the ``sqrt(det Lambda_Q)`` half-twist."""
    from .kclass import spinor_weights
    half = sum(Q.weights, Fraction(0)) / 2
    plus, minus = spinor_weights(Q.weights)
    return tuple(x + half for x in plus), tuple(x + half for x in minus)


def knoerrer_apply(F: Factorisation, Q: SplitBundleData) -> Factorisation:
    """``phi^* F (x) K^vir[m]``, a factorisation of ``f + q_Q``."""
    if F.ring != Q.base:
        raise ValueError("F and Q must share the base ring")
    ring = Q.total_ring
    K = kvir(Q, ring)
    for _ in range(Q.m):
        K = shift(K)
    out = tensor(F.to_ring(ring), K)
    if not validate(out):
        raise AssertionError("periodicity image fails validation")
    return out


# --------------------------------------------------------------------------
# Graph transport


def structure_blocks(F: Factorisation, K: Factorisation):
    """``(delta_plus, delta_minus)`` of ``F (x) K`` as 2x2 grids of blocks.

    ``delta_plus`` maps ``F+K+ (+) F-K-`` to ``F-K+ (+) F+K-``; ``delta_minus``
    goes back.
    """
    ring = F.ring
    iF_p, iF_m = Matrix.identity(ring, F.rank_plus), Matrix.identity(ring, F.rank_minus)
    iK_p, iK_m = Matrix.identity(ring, K.rank_plus), Matrix.identity(ring, K.rank_minus)
    dp = [[F.d_plus.kron(iK_p), -(iF_m.kron(K.d_minus))], [iF_p.kron(K.d_plus), F.d_minus.kron(iK_m)]]
    dm = [[F.d_minus.kron(iK_p), iF_p.kron(K.d_minus)], [-(iF_m.kron(K.d_plus)), F.d_plus.kron(iK_m)]]
    return dp, dm


@dataclass
class PsiReport:
    graph_plus: bool
    graph_minus: bool
    inverse_plus: bool
    inverse_minus: bool
    tensor_matches: bool
    delta_plus: Matrix
    delta_minus: Matrix

    @property
    def deltas_identical(self) -> bool:
        return self.delta_plus.shape == self.delta_minus.shape and self.delta_plus == self.delta_minus

    @property
    def ok(self) -> bool:
        return all((self.graph_plus, self.graph_minus, self.inverse_plus, self.inverse_minus, self.tensor_matches))

    def __bool__(self):
        return self.ok

    def __str__(self):
        flags = (f"graph+ {self.graph_plus}, graph- {self.graph_minus}, "
                 f"inverse+ {self.inverse_plus}, inverse- {self.inverse_minus}, tensor {self.tensor_matches}")
        return f"psi transport: {'pass' if self.ok else 'FAIL'} ({flags}; deltas identical: {self.deltas_identical})"


def _grid(ring: Ring, blocks, row_sizes, col_sizes) -> Matrix:
    return Matrix.block(ring, [[blocks.get((r, c), Matrix.zero(ring, rs, cs)) for c, cs in enumerate(col_sizes)]
                               for r, rs in enumerate(row_sizes)])


def psi_transport_check(F: Factorisation, Q: SplitBundleData, degree_bound: int = 2) -> PsiReport:
    """Verify the two graph transports onto the structure maps of ``phi^* F (x) K^vir[m]``.

    Each ``Psi`` is a block permutation plus a nilpotent part with ``1/lam``
    entries.  The graph identity is checked after clearing ``lam``:
    ``(lam Psi) G_src = lam G_tgt``.  Invertibility is checked over
    ``lam mu = 1``.  Targets are ordered ``F+K+, F-K-, F-K+, F+K-``.
    ``degree_bound`` caps the degree of the inverse's entries.
    """
    if Q.m not in (1, 2):
        raise ValueError("transport is checked for m = 1 or 2")
    tot = Q.total_ring
    ring = Ring(["lam", "mu"] + list(tot.names))
    lam, mu = ring.var("lam"), ring.var("mu")
    Fp = F.to_ring(tot).to_ring(ring)
    K = kvir(Q, tot)
    for _ in range(Q.m):
        K = shift(K)
    K = K.to_ring(ring)
    dp, dm = structure_blocks(Fp, K)
    rp, rm, kp, km = F.rank_plus, F.rank_minus, K.rank_plus, K.rank_minus
    pp, mp, pm, mm = rp * kp, rm * kp, rp * km, rm * km
    I = Matrix.identity
    tgt = (pp, mm, mp, pm)
    rel = Ideal(ring, [lam * mu - 1]).groebner()
    Dp, Dm = Matrix.block(ring, dp), Matrix.block(ring, dm)

    cases = {
        # Gamma_{d+/lam} (x) K+  and  Gamma_{d-/lam} (x) K-, sources F+K+, F-K+, F+K-, F-K-
        "+": ((pp, mp, pm, mm),
              {(0, 0): I(ring, pp).scale(lam), (1, 0): Fp.d_plus.kron(I(ring, kp)),
               (2, 1): Fp.d_minus.kron(I(ring, km)), (3, 1): I(ring, mm).scale(lam)},
              (pp, mm),
              Matrix.block(ring, [[I(ring, pp + mm).scale(lam)], [Dp]]),
              {(0, 0), (1, 3), (2, 1), (3, 2)},
              {(2, 3): dp[0][1], (3, 0): dp[1][0]}),
        # Gamma_{d-/lam} (x) K+  and  Gamma_{d+/lam} (x) K-, sources F+K-, F-K-, F+K+, F-K+
        "-": ((pm, mm, pp, mp),
              {(0, 1): I(ring, pm).scale(lam), (1, 1): Fp.d_plus.kron(I(ring, km)),
               (2, 0): Fp.d_minus.kron(I(ring, kp)), (3, 0): I(ring, mp).scale(lam)},
              (mp, pm),
              Matrix.block(ring, [[Dm], [I(ring, mp + pm).scale(lam)]]),
              {(0, 2), (1, 1), (2, 3), (3, 0)},
              {(0, 0): dm[0][1], (1, 3): dm[1][0]}),
    }
    out = {}
    for which, (src, gblocks, gcols, g_tgt, perm, nil) in cases.items():
        g_src = _grid(ring, gblocks, src, gcols)
        P = _grid(ring, {k: I(ring, tgt[k[0]]) for k in perm}, tgt, src)
        lam_psi = P.scale(lam) + _grid(ring, nil, tgt, src)
        graph_ok = (lam_psi @ g_src) == g_tgt.scale(lam)
        N = _grid(ring, {k: v.scale(mu) for k, v in nil.items()}, tgt, src)
        psi = P + N
        # N P^T N = 0: the nilpotent part writes where it never reads
        inv = P.transpose() - P.transpose() @ N @ P.transpose()
        inv_ok = max((x.total_degree() for _, _, x in inv.entries() if x.terms), default=0) <= degree_bound + 1
        for prod, n in ((psi @ inv, sum(tgt)), (inv @ psi, sum(src))):
            inv_ok = inv_ok and all(rel.contains(x) for _, _, x in (prod - I(ring, n)).entries())
        out[which] = (graph_ok, inv_ok)

    T = tensor(Fp, K)
    tensor_ok = T.d_plus == Dp and T.d_minus == Dm
    return PsiReport(out["+"][0], out["-"][0], out["+"][1], out["-"][1], tensor_ok, Dp, Dm)
