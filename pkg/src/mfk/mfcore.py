"""Z/2-graded matrix factorisations, their morphisms and homotopy certificates.

Conventions
-----------
A factorisation of ``f`` is a pair of free modules ``F+``, ``F-`` with
``d_plus: F+ -> F-`` and ``d_minus: F- -> F+`` such that both composites are
``f * Id``.  Matrices act on column vectors, so ``d_plus`` has shape
``(rank_minus, rank_plus)``.

A morphism stores two blocks named by their *source*: ``plus`` starts at
``F+`` and ``minus`` starts at ``F-``.  For an even morphism they land in
``G+`` and ``G-``; for an odd one in ``G-`` and ``G+``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .algebra import (
    ZERO, Ideal, Matrix, Poly, Ring, linear_solve,
)

__all__ = [
    "Factorisation", "FactMorphism", "Homotopy", "SESWitness", "ValidationReport",
    "validate", "shift", "cone", "totalise", "tensor", "direct_sum", "differential",
    "compose", "solve_homotopy", "contractible_off", "Contractibility",
    "unit_factorisation", "split_extension", "matrix_nf",
]


def matrix_nf(M: Matrix, relations: Ideal | None) -> Matrix:
    """Entrywise normal form modulo ``relations`` (identity when None)."""
    if relations is None or relations.is_zero():
        return M
    gb = relations.groebner()
    return M.map(gb.normal_form)


def _equal_mod(A: Matrix, B: Matrix, relations: Ideal | None) -> bool:
    return matrix_nf(A - B, relations).is_zero()


def _merge_relations(ring: Ring, *rels: Ideal | None) -> Ideal | None:
    gens = []
    for r in rels:
        if r is not None:
            gens.extend(ring.embed(g) for g in r.generators)
    return Ideal(ring, gens) if gens else None


@dataclass(frozen=True, eq=False)
class Factorisation:
    ring: Ring
    potential: Poly
    d_plus: Matrix
    d_minus: Matrix
    relations: Ideal | None = None

    def __post_init__(self):
        if self.d_plus.shape != (self.d_minus.ncols, self.d_minus.nrows):
            raise ValueError(f"incompatible structure maps {self.d_plus.shape} and {self.d_minus.shape}")
        if self.d_plus.ring != self.ring or self.d_minus.ring != self.ring or self.potential.ring != self.ring:
            raise ValueError("structure maps must live in the factorisation's ring")

    @classmethod
    def from_rows(cls, ring: Ring, potential, d_plus, d_minus, relations: Ideal | None = None,
                  rank_plus: int | None = None, rank_minus: int | None = None) -> "Factorisation":
        """Build from nested lists of polynomials or strings."""
        rp = rank_plus if rank_plus is not None else (len(d_plus[0]) if d_plus else len(d_minus))
        rm = rank_minus if rank_minus is not None else len(d_plus)
        return cls(ring, ring.coerce(potential), Matrix(ring, d_plus, rp), Matrix(ring, d_minus, rm), relations)

    @property
    def rank_plus(self) -> int:
        return self.d_plus.ncols

    @property
    def rank_minus(self) -> int:
        return self.d_plus.nrows

    @property
    def ring_id(self):
        return self.ring.names

    def to_ring(self, ring: Ring) -> "Factorisation":
        rel = self.relations.to_ring(ring) if self.relations is not None else None
        return Factorisation(ring, ring.embed(self.potential), self.d_plus.to_ring(ring), self.d_minus.to_ring(ring), rel)

    def with_relations(self, relations: Ideal | None) -> "Factorisation":
        return Factorisation(self.ring, self.potential, self.d_plus, self.d_minus, relations)

    def identity(self) -> "FactMorphism":
        return FactMorphism.identity(self)

    def same_matrices(self, other: "Factorisation") -> bool:
        return (self.ring == other.ring and self.d_plus == other.d_plus and self.d_minus == other.d_minus
                and self.potential == other.potential)

    def __str__(self):
        out = f"fact over {self.ring} pot {self.potential} dplus {self.d_plus} dminus {self.d_minus}"
        if self.relations is not None and not self.relations.is_zero():
            out += " mod " + str(Ideal(self.ring, self.relations.groebner().basis))
        return out


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failures: tuple = ()

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "valid"
        return "invalid: " + "; ".join(f"{name}[{i},{j}] remainder {r}" for name, i, j, r in self.failures)


def validate(F: Factorisation) -> ValidationReport:
    """Check ``d_minus d_plus = f`` and ``d_plus d_minus = f`` modulo relations."""
    fails = []
    for name, prod, n in (
        ("d_minus*d_plus", F.d_minus @ F.d_plus, F.rank_plus),
        ("d_plus*d_minus", F.d_plus @ F.d_minus, F.rank_minus),
    ):
        diff = matrix_nf(prod - Matrix.identity(F.ring, n, F.potential), F.relations)
        fails.extend((name, i, j, x) for i, j, x in diff.entries() if x.terms)
    return ValidationReport(not fails, tuple(fails))


def unit_factorisation(ring: Ring, relations: Ideal | None = None) -> Factorisation:
    """The structure sheaf: ranks (1, 0), zero potential."""
    return Factorisation(ring, ring.zero(), Matrix.zero(ring, 0, 1), Matrix.zero(ring, 1, 0), relations)


@dataclass(frozen=True, eq=False)
class FactMorphism:
    source: Factorisation
    target: Factorisation
    parity: int
    plus: Matrix
    minus: Matrix

    def __post_init__(self):
        s, t = self.source, self.target
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        if self.parity == 0:
            want = ((t.rank_plus, s.rank_plus), (t.rank_minus, s.rank_minus))
        else:
            want = ((t.rank_minus, s.rank_plus), (t.rank_plus, s.rank_minus))
        if (self.plus.shape, self.minus.shape) != want:
            raise ValueError(f"block shapes {self.plus.shape}, {self.minus.shape} do not match {want}")

    @property
    def ring(self) -> Ring:
        return self.source.ring

    @property
    def relations(self) -> Ideal | None:
        return _merge_relations(self.ring, self.source.relations, self.target.relations)

    @classmethod
    def identity(cls, F: Factorisation) -> "FactMorphism":
        return cls(F, F, 0, Matrix.identity(F.ring, F.rank_plus), Matrix.identity(F.ring, F.rank_minus))

    @classmethod
    def zero(cls, F: Factorisation, G: Factorisation, parity: int = 0) -> "FactMorphism":
        r = F.ring
        if parity == 0:
            return cls(F, G, 0, Matrix.zero(r, G.rank_plus, F.rank_plus), Matrix.zero(r, G.rank_minus, F.rank_minus))
        return cls(F, G, 1, Matrix.zero(r, G.rank_minus, F.rank_plus), Matrix.zero(r, G.rank_plus, F.rank_minus))

    def __add__(self, other: "FactMorphism") -> "FactMorphism":
        if other.parity != self.parity:
            raise ValueError("cannot add morphisms of different parity")
        return FactMorphism(self.source, self.target, self.parity, self.plus + other.plus, self.minus + other.minus)

    def __sub__(self, other: "FactMorphism") -> "FactMorphism":
        return self + other.scale(-1)

    def scale(self, p) -> "FactMorphism":
        return FactMorphism(self.source, self.target, self.parity, self.plus.scale(p), self.minus.scale(p))

    def is_zero(self, relations: Ideal | None = None) -> bool:
        rel = relations if relations is not None else self.relations
        return matrix_nf(self.plus, rel).is_zero() and matrix_nf(self.minus, rel).is_zero()

    def equals(self, other: "FactMorphism", relations: Ideal | None = None) -> bool:
        return self.parity == other.parity and (self - other).is_zero(relations)

    def is_closed(self) -> bool:
        return differential(self).is_zero()

    def __str__(self):
        kind = "odd" if self.parity else "even"
        return f"{kind} morphism plus {self.plus} minus {self.minus}"


def differential(a: FactMorphism) -> FactMorphism:
    """``D(a) = d o a - (-1)^|a| a o d``."""
    F, G = a.source, a.target
    if F.potential != G.potential and not _equal_mod(
            Matrix.identity(F.ring, 1, F.potential), Matrix.identity(F.ring, 1, G.potential), a.relations):
        raise ValueError("differential needs source and target of equal potential")
    if a.parity == 0:
        plus = G.d_plus @ a.plus - a.minus @ F.d_plus
        minus = G.d_minus @ a.minus - a.plus @ F.d_minus
    else:
        plus = G.d_minus @ a.plus + a.minus @ F.d_plus
        minus = G.d_plus @ a.minus + a.plus @ F.d_minus
    return FactMorphism(F, G, 1 - a.parity, plus, minus)


def compose(a2: FactMorphism, a1: FactMorphism) -> FactMorphism:
    """``a2 o a1`` (first a1, then a2)."""
    if a1.target.ring != a2.source.ring or (a1.target.rank_plus, a1.target.rank_minus) != (
            a2.source.rank_plus, a2.source.rank_minus):
        raise ValueError("morphisms are not composable")
    if a1.parity == 0:
        plus, minus = a2.plus @ a1.plus, a2.minus @ a1.minus
    else:
        plus, minus = a2.minus @ a1.plus, a2.plus @ a1.minus
    return FactMorphism(a1.source, a2.target, (a1.parity + a2.parity) % 2, plus, minus)


@dataclass(frozen=True, eq=False)
class Homotopy:
    """Odd endomorphism ``h`` with ``[d, h] = scale * Id``."""

    subject: Factorisation
    h_plus: Matrix
    h_minus: Matrix
    scale: Poly | None = None

    @property
    def morphism(self) -> FactMorphism:
        return FactMorphism(self.subject, self.subject, 1, self.h_plus, self.h_minus)

    def verify(self) -> bool:
        F = self.subject
        s = self.scale if self.scale is not None else F.ring.one()
        D = differential(self.morphism)
        return (_equal_mod(D.plus, Matrix.identity(F.ring, F.rank_plus, s), F.relations)
                and _equal_mod(D.minus, Matrix.identity(F.ring, F.rank_minus, s), F.relations))

    def __str__(self):
        return f"homotopy h_plus {self.h_plus} h_minus {self.h_minus} scale {self.scale or 1}"


def shift(F: Factorisation) -> Factorisation:
    """``F[1] = (F-, F+, -d_minus, -d_plus)``."""
    return Factorisation(F.ring, F.potential, -F.d_minus, -F.d_plus, F.relations)


def direct_sum(F: Factorisation, G: Factorisation) -> Factorisation:
    r = F.ring
    z = Matrix.zero
    dp = Matrix.block(r, [[F.d_plus, z(r, F.rank_minus, G.rank_plus)], [z(r, G.rank_minus, F.rank_plus), G.d_plus]])
    dm = Matrix.block(r, [[F.d_minus, z(r, F.rank_plus, G.rank_minus)], [z(r, G.rank_plus, F.rank_minus), G.d_minus]])
    return Factorisation(r, F.potential, dp, dm, _merge_relations(r, F.relations, G.relations))


def cone(a: FactMorphism) -> Factorisation:
    """Mapping cone of a closed even ``a: F1 -> F2``.

    ``Cone+ = F2+ (+) F1-`` and ``Cone- = F2- (+) F1+`` with
    ``d+ = [[d2+, a-], [0, -d1-]]`` and ``d- = [[d2-, a+], [0, -d1+]]``.
    """
    if a.parity != 0:
        raise ValueError("cone needs an even morphism")
    if not differential(a).is_zero():
        raise ValueError("cone needs a closed morphism")
    F1, F2, r = a.source, a.target, a.ring
    z = Matrix.zero
    dp = Matrix.block(r, [[F2.d_plus, a.minus], [z(r, F1.rank_plus, F2.rank_plus), -F1.d_minus]])
    dm = Matrix.block(r, [[F2.d_minus, a.plus], [z(r, F1.rank_minus, F2.rank_minus), -F1.d_plus]])
    return Factorisation(r, F2.potential, dp, dm, a.relations)


@dataclass(frozen=True, eq=False)
class SESWitness:
    """``0 -> first -a-> middle -b-> last -> 0`` with split inclusion and projection."""

    first: Factorisation
    middle: Factorisation
    last: Factorisation
    inclusion: FactMorphism
    projection: FactMorphism

    def check(self) -> list[str]:
        errs = []
        a, b = self.inclusion, self.projection
        if a.parity or b.parity:
            errs.append("maps must be even")
        if not a.is_closed():
            errs.append("inclusion not closed")
        if not b.is_closed():
            errs.append("projection not closed")
        if not compose(b, a).is_zero():
            errs.append("projection o inclusion != 0")
        for name, f, m, l in (("plus", self.first.rank_plus, self.middle.rank_plus, self.last.rank_plus),
                              ("minus", self.first.rank_minus, self.middle.rank_minus, self.last.rank_minus)):
            if f + l != m:
                errs.append(f"{name} ranks do not add")
        return errs


def split_extension(first: Factorisation, last: Factorisation, phi: FactMorphism | None = None) -> SESWitness:
    """The extension of ``last`` by ``first`` glued by a closed odd ``phi: last -> first``.

    The middle term has ``d+ = [[d1+, phi+], [0, d3+]]`` and likewise for ``d-``.
    """
    r = first.ring
    if phi is None:
        phi = FactMorphism.zero(last, first, 1)
    if phi.parity != 1 or not phi.is_closed():
        raise ValueError("the extension block must be a closed odd morphism")
    z = Matrix.zero
    dp = Matrix.block(r, [[first.d_plus, phi.plus], [z(r, last.rank_minus, first.rank_plus), last.d_plus]])
    dm = Matrix.block(r, [[first.d_minus, phi.minus], [z(r, last.rank_plus, first.rank_minus), last.d_minus]])
    middle = Factorisation(r, first.potential, dp, dm, _merge_relations(r, first.relations, last.relations))
    inc = FactMorphism(first, middle, 0,
                       Matrix.block(r, [[Matrix.identity(r, first.rank_plus)], [z(r, last.rank_plus, first.rank_plus)]]),
                       Matrix.block(r, [[Matrix.identity(r, first.rank_minus)], [z(r, last.rank_minus, first.rank_minus)]]))
    proj = FactMorphism(middle, last, 0,
                        Matrix.block(r, [[z(r, last.rank_plus, first.rank_plus), Matrix.identity(r, last.rank_plus)]]),
                        Matrix.block(r, [[z(r, last.rank_minus, first.rank_minus), Matrix.identity(r, last.rank_minus)]]))
    return SESWitness(first, middle, last, inc, proj)


def totalise(S: SESWitness) -> Factorisation:
    """``Cone((b, 0): Cone(a) -> F3)``."""
    errs = S.check()
    if errs:
        raise ValueError("invalid short exact sequence: " + ", ".join(errs))
    X = cone(S.inclusion)
    b, r = S.projection, S.middle.ring
    z = Matrix.zero
    beta = FactMorphism(
        X, S.last, 0,
        Matrix.block(r, [[b.plus, z(r, S.last.rank_plus, S.first.rank_minus)]]),
        Matrix.block(r, [[b.minus, z(r, S.last.rank_minus, S.first.rank_plus)]]),
    )
    return cone(beta)


def tensor(F: Factorisation, G: Factorisation) -> Factorisation:
    """Tensor product with Koszul signs on the right factor.

    ``(F(x)G)+ = F+G+ (+) F-G-`` and ``(F(x)G)- = F-G+ (+) F+G-``; the right
    differential acts with sign ``(-1)^|left|``.
    """
    if F.ring != G.ring:
        raise ValueError(f"ring mismatch: {F.ring} vs {G.ring}")
    r = F.ring
    I = Matrix.identity
    dfp, dfm, dgp, dgm = F.d_plus, F.d_minus, G.d_plus, G.d_minus
    # rows (F-G+, F+G-), cols (F+G+, F-G-)
    dp = Matrix.block(r, [
        [dfp.kron(I(r, G.rank_plus)), -I(r, F.rank_minus).kron(dgm)],
        [I(r, F.rank_plus).kron(dgp), dfm.kron(I(r, G.rank_minus))],
    ])
    # rows (F+G+, F-G-), cols (F-G+, F+G-)
    dm = Matrix.block(r, [
        [dfm.kron(I(r, G.rank_plus)), I(r, F.rank_plus).kron(dgm)],
        [-I(r, F.rank_minus).kron(dgp), dfp.kron(I(r, G.rank_minus))],
    ])
    return Factorisation(r, F.potential + G.potential, dp, dm, _merge_relations(r, F.relations, G.relations))


def _monomials(nvars: int, bound: int):
    for d in range(bound + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            yield tuple(e)


def solve_homotopy(F: Factorisation, rhs: FactMorphism, degree_bound: int) -> FactMorphism | None:
    """An odd ``h`` with ``D(h) = rhs`` and entries of degree at most ``degree_bound``.

    The search is a finite linear system over Q(i); ``None`` means no solution
    exists within the bound.
    """
    if rhs.parity != 0:
        raise ValueError("right-hand side must be even")
    if not differential(rhs).is_zero():
        raise ValueError("right-hand side must be closed")
    ring, rel = F.ring, F.relations
    gb = rel.groebner() if rel is not None and not rel.is_zero() else None
    nf = gb.normal_form if gb is not None else (lambda p: p)
    rp, rm = F.rank_plus, F.rank_minus
    monos = []
    seen = set()
    for e in _monomials(ring.nvars, degree_bound):
        m = nf(ring.monomial(e))
        if m.terms and (gb is None or m == ring.monomial(e)):
            if e not in seen:
                seen.add(e)
                monos.append(e)
    unknowns = [("p", i, j, e) for i in range(rm) for j in range(rp) for e in monos]
    unknowns += [("m", i, j, e) for i in range(rp) for j in range(rm) for e in monos]
    if not unknowns:
        return FactMorphism.zero(F, F, 1) if rhs.is_zero() else None
    # D(h).plus = d- h+ + h- d+ ; D(h).minus = d+ h- + h+ d-
    eq_index: dict = {}
    rows: list[dict] = []

    def row_for(key):
        k = eq_index.get(key)
        if k is None:
            k = eq_index[key] = len(rows)
            rows.append({})
        return rows[k]

    dP, dM = F.d_plus, F.d_minus
    for col, (blk, i, j, e) in enumerate(unknowns):
        mono = ring.monomial(e)
        contribs = []
        if blk == "p":  # entry (i, j) of h+: F+_j -> F-_i
            for a in range(rp):  # plus block row a, column j: d-[a][i] * m
                contribs.append((("P", a, j), dM[a, i] * mono))
            for b in range(rm):  # minus block row i, column b: m * d-[j][b]
                contribs.append((("M", i, b), mono * dM[j, b]))
        else:  # entry (i, j) of h-: F-_j -> F+_i
            for a in range(rm):
                contribs.append((("M", a, j), dP[a, i] * mono))
            for b in range(rp):
                contribs.append((("P", i, b), mono * dP[j, b]))
        for pos, val in contribs:
            val = nf(val)
            for ex, c in val.terms.items():
                row = row_for(pos + (ex,))
                row[col] = row.get(col, 0) + c
    rhs_vals: dict = {}
    for tag, M in (("P", rhs.plus), ("M", rhs.minus)):
        for a, b, x in M.entries():
            for ex, c in nf(x).terms.items():
                key = (tag, a, b, ex)
                row_for(key)
                rhs_vals[key] = c
    rhs_list = [ZERO] * len(rows)
    for key, c in rhs_vals.items():
        rhs_list[eq_index[key]] = c
    rows = [{k: v for k, v in r.items() if v} for r in rows]
    sol = linear_solve(rows, rhs_list, len(unknowns))
    if sol is None:
        return None
    hp = [[ring.zero()] * rp for _ in range(rm)]
    hm = [[ring.zero()] * rm for _ in range(rp)]
    for (blk, i, j, e), c in zip(unknowns, sol):
        if c:
            tgt = hp if blk == "p" else hm
            tgt[i][j] = tgt[i][j] + ring.monomial(e, c)
    h = FactMorphism(F, F, 1, Matrix(ring, hp, rp), Matrix(ring, hm, rm))
    if not differential(h).equals(rhs, rel):
        raise AssertionError("homotopy solution failed verification")
    return h


@dataclass(frozen=True)
class Contractibility:
    status: str  # "yes" or "unknown"
    homotopy: Homotopy | None = None
    power: int | None = None

    def __bool__(self):
        return self.status == "yes"


def contractible_off(F: Factorisation, u, degree_bound: int, power_bound: int) -> Contractibility:
    """Search ``h`` with ``[d, h] = u^N Id`` for ``N <= power_bound``."""
    u = F.ring.coerce(u)
    for N in range(power_bound + 1):
        s = u ** N
        rhs = FactMorphism.identity(F).scale(s)
        h = solve_homotopy(F, rhs, degree_bound)
        if h is not None:
            H = Homotopy(F, h.plus, h.minus, s)
            if not H.verify():
                raise AssertionError("homotopy failed verification")
            return Contractibility("yes", H, N)
    return Contractibility("unknown")
