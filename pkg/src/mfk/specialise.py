"""Specialisation of matrix factorisations to the normal cone.

Both frames of a factorisation ``F`` are ``F+ (+) F-``.  Over ``lam != 0`` the
even frame contains the graph ``xi+`` spanned by the columns of
``[[lam*Id], [d+]]`` and the odd frame contains ``xi-`` spanned by
``[[d-], [lam*Id]]``.  A chart picks row subsets ``S+`` and ``S-``; in it the
subspaces are the column spans of matrices ``Xi+`` and ``Xi-`` with identity
rows in ``S`` and chart variables elsewhere.  The closure ideal ``M`` is the
saturation of the chart equations together with the Rees ideal.

The frames carry structure maps ``Phi+ = diag(q, 1)`` and ``Phi- = diag(1, q)``
where ``q`` lifts ``f / lam^2``; they restrict to the tautological
factorisation ``xi`` whose matrices in chart bases are read off the ``S`` rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .algebra import Ideal, Matrix, Poly, Ring, eliminate, membership_certificate, saturate, substitute
from .deform import LAMBDA, ReesPresentation, lift_potential, rees_presentation, simplify_quotient
from .mfcore import (
    Factorisation, FactMorphism, Homotopy, compose, differential, matrix_nf, shift, validate,
)

__all__ = [
    "GrassChart", "GraphClosure", "SpecialisedFact", "ChartMiss", "UnsupportedPushforward",
    "all_charts", "graph_closure", "tautological_factorisation", "sp_object", "covers",
    "sp_morphism", "SpMorphism", "sp_laws_check", "LawsReport", "sp_contract", "smooth_cover_check",
    "FibreProduct", "fibre_product", "shift_check", "SpContraction", "CoverReport",
]


class ChartMiss(RuntimeError):
    """The closure's central fibre does not meet the chosen chart."""


class UnsupportedPushforward(RuntimeError):
    """The map from the closure to the cone is not a closed immersion in the chart."""


@dataclass(frozen=True)
class GrassChart:
    s_plus: tuple[int, ...]
    s_minus: tuple[int, ...]

    @classmethod
    def generic(cls, rank_plus: int, rank_minus: int) -> "GrassChart":
        return cls(tuple(range(rank_plus)), tuple(range(rank_plus, rank_plus + rank_minus)))

    def swapped(self, rank_plus: int, rank_minus: int) -> "GrassChart":
        """The same chart after exchanging the roles of F+ and F- (for F[1])."""
        def move(i):
            return i + rank_minus if i < rank_plus else i - rank_plus
        return GrassChart(tuple(sorted(move(i) for i in self.s_minus)), tuple(sorted(move(i) for i in self.s_plus)))

    def __str__(self):
        return f"chart(S+={list(self.s_plus)}, S-={list(self.s_minus)})"


def all_charts(rank_plus: int, rank_minus: int) -> list[GrassChart]:
    """Every column-selection chart, the generic one first."""
    n = rank_plus + rank_minus
    gen = GrassChart.generic(rank_plus, rank_minus)
    out = [gen]
    for sp in itertools.combinations(range(n), rank_plus):
        for sm in itertools.combinations(range(n), rank_minus):
            c = GrassChart(sp, sm)
            if c != gen:
                out.append(c)
    return out


def _chart_matrix(ring: Ring, nrows: int, rows: tuple, names: list[list[str]]) -> Matrix:
    """Identity on ``rows``, chart variables on the complement."""
    k = len(rows)
    comp = [r for r in range(nrows) if r not in rows]
    out = []
    for r in range(nrows):
        if r in rows:
            out.append([ring.one() if rows.index(r) == j else ring.zero() for j in range(k)])
        else:
            out.append([ring.var(names[comp.index(r)][j]) for j in range(k)])
    return Matrix(ring, out, k)


def _frame_maps(ring: Ring, q: Poly, rp: int, rm: int):
    z = Matrix.zero
    phi_plus = Matrix.block(ring, [[Matrix.identity(ring, rp, q), z(ring, rp, rm)], [z(ring, rm, rp), Matrix.identity(ring, rm)]])
    phi_minus = Matrix.block(ring, [[Matrix.identity(ring, rp), z(ring, rp, rm)], [z(ring, rm, rp), Matrix.identity(ring, rm, q)]])
    return phi_plus, phi_minus


@dataclass(frozen=True, eq=False)
class GraphClosure:
    fact: Factorisation
    rees: ReesPresentation
    chart: GrassChart
    tag: str
    ring: Ring  # lam, chart vars, cone vars, base vars
    chart_vars: tuple[str, ...]
    ideal: Ideal  # M
    saturator: Poly  # lam * det g+ * det g-
    central_ring: Ring
    central_ideal: Ideal
    xi_plus: Matrix
    xi_minus: Matrix
    q: Poly

    @property
    def chart_miss(self) -> bool:
        return self.central_ideal.is_unit()

    @property
    def frame_factorisation(self) -> Factorisation:
        rp, rm = self.fact.rank_plus, self.fact.rank_minus
        pp, pm = _frame_maps(self.ring, self.q, rp, rm)
        return Factorisation(self.ring, self.q, pp, pm, self.ideal)

    def structure_maps(self) -> tuple[Matrix, Matrix]:
        """Matrices of ``xi+ -> xi-`` and ``xi- -> xi+`` in chart bases."""
        fr = self.frame_factorisation
        p_tilde = (fr.d_plus @ self.xi_plus).submatrix(self.chart.s_minus, range(self.fact.rank_plus))
        n_tilde = (fr.d_minus @ self.xi_minus).submatrix(self.chart.s_plus, range(self.fact.rank_minus))
        return p_tilde, n_tilde

    def closure_identities_check(self) -> list[str]:
        """Structure maps preserve the subspaces and compose to ``q`` (modulo M)."""
        errs = []
        fr = self.frame_factorisation
        P, N = self.structure_maps()
        if not matrix_nf(fr.d_plus @ self.xi_plus - self.xi_minus @ P, self.ideal).is_zero():
            errs.append("Phi+ does not map xi+ into xi-")
        if not matrix_nf(fr.d_minus @ self.xi_minus - self.xi_plus @ N, self.ideal).is_zero():
            errs.append("Phi- does not map xi- into xi+")
        rp, rm = self.fact.rank_plus, self.fact.rank_minus
        if not matrix_nf(N @ P - Matrix.identity(self.ring, rp, self.q), self.ideal).is_zero():
            errs.append("N P != q Id")
        if not matrix_nf(P @ N - Matrix.identity(self.ring, rm, self.q), self.ideal).is_zero():
            errs.append("P N != q Id")
        return errs

    def at_zero(self, M: Matrix) -> Matrix:
        """Restrict a matrix over the closure ring to ``lam = 0``."""
        zero = {LAMBDA: self.central_ring.zero()}
        return M.map(lambda p: substitute(p, zero, self.central_ring), self.central_ring)


def _chart_names(tag: str, letter: str, nrows: int, ncols: int) -> list[list[str]]:
    return [[f"{tag}{letter}{i + 1}_{j + 1}" for j in range(ncols)] for i in range(nrows)]


def graph_closure(F: Factorisation, chart: GrassChart, R: ReesPresentation, tag: str = "") -> GraphClosure:
    """Closure of the graph pair of ``(d+/lam, d-/lam)`` in one chart."""
    if F.relations is not None and not F.relations.is_zero():
        raise ValueError("specialisation needs a factorisation over a polynomial ring")
    rp, rm = F.rank_plus, F.rank_minus
    n = rp + rm
    if len(chart.s_plus) != rp or len(chart.s_minus) != rm:
        raise ValueError(f"{chart} does not fit ranks ({rp}, {rm})")
    lifted = lift_potential(F.potential, R)
    pnames = _chart_names(tag, "P", rm, rp)
    nnames = _chart_names(tag, "N", rp, rm)
    chart_vars = tuple(x for row in pnames + nnames for x in row)
    ring = Ring([LAMBDA, *chart_vars, *R.cone_vars, *R.base_ring.names])
    lam = ring.var(LAMBDA)
    dp = F.to_ring(ring).d_plus
    dm = F.to_ring(ring).d_minus
    g_plus = Matrix.block(ring, [[Matrix.identity(ring, rp, lam)], [dp]])
    g_minus = Matrix.block(ring, [[dm], [Matrix.identity(ring, rm, lam)]])
    xi_plus = _chart_matrix(ring, n, chart.s_plus, pnames)
    xi_minus = _chart_matrix(ring, n, chart.s_minus, nnames)
    eqs = []
    sat = lam
    for xi, g, rows in ((xi_plus, g_plus, chart.s_plus), (xi_minus, g_minus, chart.s_minus)):
        minor = g.submatrix(rows, range(g.ncols))
        sat = sat * minor.det()
        eqs.extend(x for _, _, x in (xi @ minor - g).entries() if x.terms)
    J = R.J.to_ring(ring)
    if sat.is_zero():
        M = Ideal(ring, [ring.one()])
    else:
        M = saturate(J + eqs, sat)
    central = eliminate(M + [lam], [LAMBDA])
    return GraphClosure(F, R, chart, tag, ring, chart_vars, M, sat, central.ring, central,
                        xi_plus, xi_minus, ring.embed(lifted.q))


def tautological_factorisation(GC: GraphClosure, central: bool = False) -> Factorisation:
    """``xi`` with structure maps from the frames; over the closure or its central fibre."""
    P, N = GC.structure_maps()
    F = Factorisation(GC.ring, GC.q, P, N, GC.ideal)
    if not central:
        return F
    cr = GC.central_ring
    zero = {LAMBDA: cr.zero()}
    return Factorisation(cr, substitute(GC.q, zero, cr), GC.at_zero(P), GC.at_zero(N), GC.central_ideal)


def covers(F: Factorisation, R: ReesPresentation, charts: list[GrassChart], closures: dict | None = None) -> bool:
    """Whether the listed charts cover the central fibre of the closure.

    For every chart of the atlas, the minors selecting the listed charts must
    have no common zero on that chart's central fibre.
    """
    rp, rm = F.rank_plus, F.rank_minus
    for other in all_charts(rp, rm):
        gc = closures[other] if closures is not None and other in closures else graph_closure(F, other, R)
        if closures is not None:
            closures[other] = gc
        if gc.chart_miss:
            continue
        dets = []
        for c in charts:
            d = gc.xi_plus.submatrix(c.s_plus, range(rp)).det() * gc.xi_minus.submatrix(c.s_minus, range(rm)).det()
            dets.append(gc.central_ring.embed(d))
        if not (gc.central_ideal + dets).is_unit():
            return False
    return True


@dataclass(frozen=True, eq=False)
class SpecialisedFact:
    fact: Factorisation  # over the (simplified) cone ring, relations = ideal of C_F
    closure: GraphClosure
    images: dict  # closure-ring variables -> polynomials in fact.ring (at lam = 0)
    kind: str = "immersion"

    def __str__(self):
        return str(self.fact)


def _default_chart(F: Factorisation, R: ReesPresentation) -> GraphClosure:
    for chart in all_charts(F.rank_plus, F.rank_minus):
        gc = graph_closure(F, chart, R)
        if not gc.chart_miss:
            return gc
    raise ChartMiss("no chart meets the central fibre")


def sp_object(F: Factorisation, R: ReesPresentation, charts: list[GrassChart] | None = None) -> SpecialisedFact:
    """The specialisation ``rho_* xi`` when one chart covers and ``rho`` is an immersion."""
    if charts is None:
        chosen = None
        seen: dict = {}
        for chart in all_charts(F.rank_plus, F.rank_minus):
            gc = seen.setdefault(chart, graph_closure(F, chart, R)) if chart not in seen else seen[chart]
            if not gc.chart_miss and covers(F, R, [chart], seen):
                chosen = gc
                break
        if chosen is None:
            raise UnsupportedPushforward("no single chart covers the central fibre")
    else:
        if not covers(F, R, charts):
            raise ValueError("the listed charts do not cover the central fibre")
        live = [graph_closure(F, c, R) for c in charts]
        live = [g for g in live if not g.chart_miss]
        if len(live) != 1:
            raise UnsupportedPushforward("gluing several charts is not supported at desk scale")
        chosen = live[0]
    gc = chosen
    cr = gc.central_ring
    ring1, ideal1, img1 = simplify_quotient(cr, gc.central_ideal, list(gc.chart_vars))
    if any(v in ring1 for v in gc.chart_vars):
        raise UnsupportedPushforward("the closure does not embed in the cone in this chart")
    # present the cone itself as simply as possible, then push the closure ideal along
    from .deform import central_fibre
    cone = central_fibre(R)
    base_vars = list(R.base_ring.names)
    ring2, cone_ideal, img2 = simplify_quotient(cone.ring, cone.ideal, base_vars)
    to_cone = {v: img2[v] for v in cone.ring.names}

    def push(p: Poly) -> Poly:
        if p.ring == cr:
            p = substitute(p, {v: img1[v] for v in cr.names}, ring1)
        return substitute(p, {v: to_cone[v] for v in ring1.names}, ring2)

    rel = Ideal(ring2, [push(g) for g in ideal1.generators] + list(cone_ideal.generators))
    rel = Ideal(ring2, rel.groebner().basis)
    xi = tautological_factorisation(gc, central=True)
    out = Factorisation(ring2, push(xi.potential), xi.d_plus.map(push, ring2), xi.d_minus.map(push, ring2),
                        rel if not rel.is_zero() else None)
    rep = validate(out)
    if not rep:
        raise AssertionError(f"specialised factorisation fails validation: {rep}")
    images = {v: push(cr.var(v)) for v in cr.names}
    return SpecialisedFact(out, gc, images)


def shift_check(F: Factorisation, R: ReesPresentation, chart: GrassChart) -> bool:
    """The closure of ``F[1]`` in the swapped chart is the closure of ``F`` with P and N exchanged."""
    rp, rm = F.rank_plus, F.rank_minus
    gc = graph_closure(F, chart, R)
    gs = graph_closure(shift(F), chart.swapped(rp, rm), R, tag="S")
    # F[1] orders its frame as F- (+) F+ and negates d; move its rows back to
    # F's order and absorb the sign by negating the F+ rows
    back = [rp + i for i in range(rm)] + list(range(rp))
    sign = [-1 if r < rp else 1 for r in range(rp + rm)]
    rename = {}
    sw = gs.chart
    for mine, theirs, rows, mine_rows in ((gs.xi_plus, gc.xi_minus, chart.s_minus, sw.s_plus),
                                          (gs.xi_minus, gc.xi_plus, chart.s_plus, sw.s_minus)):
        # sorting the swapped chart may permute the basis columns
        perm = [rows.index(back[k]) for k in mine_rows]
        for r in range(mine.nrows):
            for j in range(mine.ncols):
                a = mine.rows[back.index(r)][j]
                b = gc.ring.embed(theirs.rows[r][perm[j]]) * (sign[r] * sign[rows[perm[j]]])
                if len(a.terms) == 1 and a.total_degree() == 1 and a.variables() <= set(gs.chart_vars):
                    rename[next(iter(a.variables()))] = b
                elif gc.ring.embed(a) != b:
                    return False
    moved = Ideal(gc.ring, [substitute(g, rename, gc.ring) for g in gs.ideal.generators])
    return moved.same_as(gc.ideal)


# --------------------------------------------------------------------------
# Morphisms


@dataclass(frozen=True, eq=False)
class FibreProduct:
    """A common ring and closure ideal for several graph closures."""

    ring: Ring
    ideal: Ideal
    closures: tuple
    aux: dict  # name -> numerator polynomial (lam * name = numerator)

    def frame(self, gc: GraphClosure) -> Factorisation:
        rp, rm = gc.fact.rank_plus, gc.fact.rank_minus
        q = self.ring.embed(gc.q)
        pp, pm = _frame_maps(self.ring, q, rp, rm)
        return Factorisation(self.ring, q, pp, pm, self.ideal)

    def xi(self, gc: GraphClosure) -> Factorisation:
        P, N = gc.structure_maps()
        return Factorisation(self.ring, self.ring.embed(gc.q), P.to_ring(self.ring), N.to_ring(self.ring), self.ideal)

    def xi_frames(self, gc: GraphClosure) -> tuple[Matrix, Matrix]:
        return gc.xi_plus.to_ring(self.ring), gc.xi_minus.to_ring(self.ring)


def _divided(num: Poly, R: ReesPresentation, ring: Ring, aux: dict, aux_rel: list, stem: str) -> Poly:
    """A polynomial equal to ``num / lam`` on the closure."""
    if not num.terms:
        return ring.zero()
    live = [k for k, g in enumerate(R.generators) if g.terms]
    cert = membership_certificate(num, Ideal(R.base_ring, [R.generators[k] for k in live]))
    if cert is not None:
        acc = ring.zero()
        for c, t in zip(cert.cofactors, [R.cone_vars[k] for k in live]):
            if c.terms:
                acc = acc + ring.embed(c) * ring.var(t)
        return acc
    name = f"{stem}{len(aux) + 1}"
    aux[name] = num
    return ring.var(name)


def fibre_product(closures: list[GraphClosure], morphisms: list[FactMorphism] = (),
                  ends: list[tuple[int, int]] | None = None) -> tuple[FibreProduct, list]:
    """Joint closure ring for the given closures and the frame matrices of morphisms.

    Returns the fibre product and, per morphism, its frame morphism between
    the frame factorisations of its source and target closures.  ``ends``
    gives (source, target) positions in ``closures``; by default they are
    found by factorisation identity.
    """
    tags = [gc.tag for gc in closures]
    if len(set(tags)) != len(tags):
        raise ValueError("closures need distinct tags")
    R = closures[0].rees
    # collect divided entries first so that aux names are known
    pending = []
    aux_names: list[str] = []
    plan = []
    placeholder = Ring([LAMBDA, *R.cone_vars, *R.base_ring.names])
    aux: dict = {}
    for k, a in enumerate(morphisms):
        D = differential(a)
        entries = {}
        for blk, M in (("plus", D.plus), ("minus", D.minus)):
            for i, j, x in M.entries():
                entries[(blk, i, j)] = _divided(x, R, placeholder, aux, [], "aux")
        plan.append((a, D, entries))
    chart_vars = [v for gc in closures for v in gc.chart_vars]
    ring = Ring([LAMBDA, *chart_vars, *aux.keys(), *R.cone_vars, *R.base_ring.names])
    lam = ring.var(LAMBDA)
    gens = []
    sat = lam
    for gc in closures:
        gens.extend(ring.embed(g) for g in gc.ideal.generators)
        sat = sat * ring.embed(gc.saturator)
    gens.extend(lam * ring.var(name) - ring.embed(num) for name, num in aux.items())
    ideal = saturate(Ideal(ring, gens), sat) if (aux or len(closures) > 1) else Ideal(ring, gens)
    fp = FibreProduct(ring, ideal, tuple(closures), aux)
    frames = []
    for k, (a, D, entries) in enumerate(plan):
        if ends is not None:
            src, tgt = closures[ends[k][0]], closures[ends[k][1]]
        else:
            src = next(gc for gc in closures if gc.fact is a.source)
            tgt = next(gc for gc in closures if gc.fact is a.target)
        frames.append(_frame_morphism(fp, a, D, entries, src, tgt))
    return fp, frames


def _frame_morphism(fp: FibreProduct, a: FactMorphism, D: FactMorphism, entries: dict,
                    src: GraphClosure, tgt: GraphClosure) -> FactMorphism:
    ring = fp.ring
    F, G = a.source, a.target
    z = Matrix.zero

    def div(blk, M):
        return Matrix(ring, [[ring.embed(entries[(blk, i, j)]) for j in range(M.ncols)] for i in range(M.nrows)], M.ncols)

    ap, am = a.plus.to_ring(ring), a.minus.to_ring(ring)
    Dp, Dm = div("plus", D.plus), div("minus", D.minus)
    if a.parity == 0:
        even = Matrix.block(ring, [[ap, z(ring, G.rank_plus, F.rank_minus)], [Dp, am]])
        odd = Matrix.block(ring, [[ap, Dm], [z(ring, G.rank_minus, F.rank_plus), am]])
    else:
        even = Matrix.block(ring, [[Dp, -am], [ap, z(ring, G.rank_minus, F.rank_minus)]])
        odd = Matrix.block(ring, [[z(ring, G.rank_plus, F.rank_plus), am], [-ap, Dm]])
    return FactMorphism(fp.frame(src), fp.frame(tgt), a.parity, even, odd)


@dataclass(frozen=True, eq=False)
class SpMorphism:
    frame: FactMorphism  # between frame factorisations
    xi: FactMorphism  # between tautological factorisations
    vanishing: bool  # the frame map carries xi into xi


def _restrict(fp: FibreProduct, frame: FactMorphism, src: GraphClosure, tgt: GraphClosure) -> SpMorphism:
    sxp, sxm = fp.xi_frames(src)
    txp, txm = fp.xi_frames(tgt)
    F, G = src.fact, tgt.fact
    if frame.parity == 0:
        plus_img, minus_img = frame.plus @ sxp, frame.minus @ sxm
        plus = plus_img.submatrix(tgt.chart.s_plus, range(F.rank_plus))
        minus = minus_img.submatrix(tgt.chart.s_minus, range(F.rank_minus))
        ok = (matrix_nf(plus_img - txp @ plus, fp.ideal).is_zero()
              and matrix_nf(minus_img - txm @ minus, fp.ideal).is_zero())
    else:
        plus_img, minus_img = frame.plus @ sxp, frame.minus @ sxm
        plus = plus_img.submatrix(tgt.chart.s_minus, range(F.rank_plus))
        minus = minus_img.submatrix(tgt.chart.s_plus, range(F.rank_minus))
        ok = (matrix_nf(plus_img - txm @ plus, fp.ideal).is_zero()
              and matrix_nf(minus_img - txp @ minus, fp.ideal).is_zero())
    xi = FactMorphism(fp.xi(src), fp.xi(tgt), frame.parity, plus, minus)
    return SpMorphism(frame, xi, ok)


def sp_morphism(a: FactMorphism, GC1: GraphClosure, GC2: GraphClosure) -> tuple[FibreProduct, SpMorphism]:
    """Frame and tautological matrices of ``sp(a)`` over the fibre-product closure."""
    closures = [GC1] if GC1 is GC2 else [GC1, GC2]
    fp, frames = fibre_product(closures, [a])
    out = _restrict(fp, frames[0], GC1, GC2)
    if not out.vanishing:
        raise AssertionError("specialised morphism does not preserve the tautological subspaces")
    return fp, out


@dataclass(frozen=True)
class LawsReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.checks)

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "\n".join(f"  {name}: {'ok' if ok else 'FAIL'}" for name, ok in self.checks)


def sp_laws_check(F: Factorisation, G: Factorisation, H: Factorisation, a: FactMorphism, a2: FactMorphism,
                  R: ReesPresentation, charts: tuple | None = None) -> LawsReport:
    """Identity, composition and differential laws of ``sp`` as exact identities."""
    facts = [F, G, H]
    if charts is None:
        gcs = []
        for tag, X in zip("FGH", facts):
            base = _default_chart(X, R)
            gcs.append(graph_closure(X, base.chart, R, tag))
    else:
        gcs = [graph_closure(X, c, R, tag) for tag, X, c in zip("FGH", facts, charts)]
    comp = compose(a2, a)
    idF = FactMorphism.identity(F)
    Da, Da2 = differential(a), differential(a2)
    morphs = [a, a2, comp, idF, Da, Da2]
    ends = [(0, 1), (1, 2), (0, 2), (0, 0), (0, 1), (1, 2)]
    fp, frames = fibre_product(gcs, morphs, ends)
    fa, fa2, fcomp, fid, fDa, fDa2 = frames
    sp = [_restrict(fp, fr, gcs[i], gcs[j]) for fr, (i, j) in zip(frames, ends)]
    checks = []
    checks.append(("xi preserved by all specialised maps", all(s.vanishing for s in sp)))
    checks.append(("frame sp(id) = id", fid.equals(FactMorphism.identity(fp.frame(gcs[0])), fp.ideal)))
    checks.append(("sp(id) = id", sp[3].xi.equals(FactMorphism.identity(fp.xi(gcs[0])), fp.ideal)))
    checks.append(("frame sp(a2 o a) = sp(a2) o sp(a)", compose(fa2, fa).equals(fcomp, fp.ideal)))
    checks.append(("sp(a2 o a) = sp(a2) o sp(a)", compose(sp[1].xi, sp[0].xi).equals(sp[2].xi, fp.ideal)))
    # sp(D a) carries one more power of 1/lam than D sp(a); lam is a
    # nonzerodivisor modulo the saturated ideal, so compare after clearing it
    lam = fp.ring.var(LAMBDA)
    for name, f, fD, s_, sD in (("a", fa, fDa, sp[0], sp[4]), ("a2", fa2, fDa2, sp[1], sp[5])):
        checks.append((f"frame sp(D {name}) = lam D sp({name})", differential(f).scale(lam).equals(fD, fp.ideal)))
        checks.append((f"sp(D {name}) = lam D sp({name})", differential(s_.xi).scale(lam).equals(sD.xi, fp.ideal)))
    return LawsReport(tuple(checks))


# --------------------------------------------------------------------------
# Contractions


@dataclass(frozen=True, eq=False)
class SpContraction:
    frame: Homotopy
    xi: Homotopy
    central: Homotopy
    beta_vanish: bool


def sp_contract(F: Factorisation, h: Homotopy, GC: GraphClosure) -> SpContraction:
    """Transport a contraction of ``F`` to ``xi`` through the frame homotopy.

    On frames ``h~+ = [[1, -lam h-], [lam h+, 0]]`` and
    ``h~- = [[0, lam h-], [-lam h+, 1]]``.
    """
    if not h.verify() or (h.scale is not None and h.scale != 1):
        raise ValueError("need a verified contraction with scale 1")
    ring = GC.ring
    lam = ring.var(LAMBDA)
    rp, rm = F.rank_plus, F.rank_minus
    hp = h.h_plus.to_ring(ring).scale(lam)
    hm = h.h_minus.to_ring(ring).scale(lam)
    I, z = Matrix.identity, Matrix.zero
    ht_plus = Matrix.block(ring, [[I(ring, rp), -hm], [hp, z(ring, rm, rm)]])
    ht_minus = Matrix.block(ring, [[z(ring, rp, rp), hm], [-hp, I(ring, rm)]])
    frame = Homotopy(GC.frame_factorisation, ht_plus, ht_minus)
    if not frame.verify():
        raise AssertionError("frame homotopy fails")
    img_p, img_m = ht_plus @ GC.xi_plus, ht_minus @ GC.xi_minus
    xp = img_p.submatrix(GC.chart.s_minus, range(rp))
    xm = img_m.submatrix(GC.chart.s_plus, range(rm))
    beta = (matrix_nf(img_p - GC.xi_minus @ xp, GC.ideal).is_zero()
            and matrix_nf(img_m - GC.xi_plus @ xm, GC.ideal).is_zero())
    if not beta:
        raise AssertionError("contraction does not preserve the tautological subspaces")
    xi = tautological_factorisation(GC)
    hx = Homotopy(xi, xp, xm)
    if not hx.verify():
        raise AssertionError("restricted homotopy fails on xi")
    xi0 = tautological_factorisation(GC, central=True)
    h0 = Homotopy(xi0, GC.at_zero(xp), GC.at_zero(xm))
    if not h0.verify():
        raise AssertionError("restricted homotopy fails on the central fibre")
    return SpContraction(frame, hx, h0, beta)


# --------------------------------------------------------------------------
# Smooth covers


@dataclass(frozen=True)
class CoverReport:
    k: int
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.checks)

    def __bool__(self):
        return self.ok


def smooth_cover_check(F: Factorisation, I: Ideal, k: int) -> CoverReport:
    """Compare specialisation over ``Y`` and over ``Y x A^k`` by base change."""
    base = F.ring
    extra = [base.fresh(f"z{j + 1}") for j in range(k)]
    big = base.extend(extra)
    R = rees_presentation(I)
    R2 = rees_presentation(I.to_ring(big))
    checks = []
    checks.append(("Rees ideal is the base change",
                   R2.J.same_as(R.J.to_ring(R2.ring))))
    from .deform import central_fibre
    c1, c2 = central_fibre(R), central_fibre(R2)
    checks.append(("cone is the base change", c2.ideal.same_as(c1.ideal.to_ring(c2.ring))))
    Fb = F.to_ring(big)
    gc1 = _default_chart(F, R)
    gc2 = graph_closure(Fb, gc1.chart, R2)
    checks.append(("closure is the base change", gc2.ideal.same_as(gc1.ideal.to_ring(gc2.ring))))
    checks.append(("central fibre is the base change",
                   gc2.central_ideal.same_as(gc1.central_ideal.to_ring(gc2.central_ring))))
    P1, N1 = gc1.structure_maps()
    P2, N2 = gc2.structure_maps()
    checks.append(("tautological factorisations correspond", P1.to_ring(gc2.ring) == P2 and N1.to_ring(gc2.ring) == N2))
    s1, s2 = sp_object(F, R), sp_object(Fb, R2)
    pulled = s1.fact.to_ring(s2.fact.ring)
    same_rel = (pulled.relations is None and s2.fact.relations is None) or (
        pulled.relations is not None and s2.fact.relations is not None and pulled.relations.same_as(s2.fact.relations))
    checks.append(("specialisations agree", pulled.same_matrices(s2.fact) and same_rel))
    return CoverReport(k, tuple(checks))
