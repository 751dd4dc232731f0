"""Built-in acceptance suite: thirteen end-to-end criteria with fixed seeds.

Each ``criterion_*`` function returns a :class:`CriterionResult`.  The suite is
shared by ``mfk selftest`` and the test-suite.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import sympy

from .algebra import (
    GREVLEX, Ideal, Poly, Ring, buchberger, membership_certificate, saturate,
)
from .clifford import (
    QuadraticSpace, SpinorModule, clifford_square_check, clifford_words, koszul_factorisation,
    pfaffian_line, spinor_factorisation,
)
from .deform import rees_presentation
from .kclass import (
    CutoutModel, KClass, W, lagrangian_class, localisation_check, knoerrer_comparison_check,
    stabilise, virtual_structure_sheaf,
)
from .knoerrer import SplitBundleData, kvir, kvir_weights
from .mfcore import FactMorphism, Factorisation, Homotopy, shift, tensor, unit_factorisation, validate
from .specialise import (
    GrassChart, all_charts, graph_closure, smooth_cover_check, sp_contract, sp_laws_check, sp_object,
)

__all__ = ["CriterionResult", "CRITERIA", "run_all", "run_one", "DEFAULT_SEED", "random_factorisation", "koszul_oracle"]

DEFAULT_SEED = 20240601


@dataclass
class CriterionResult:
    number: int
    title: str
    ok: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} [{self.number:2d}] {self.title}: {self.detail} ({self.seconds:.1f}s)"


# --------------------------------------------------------------------------
# Random inputs


def _random_poly(ring: Ring, rng: random.Random, degree: int, density: float = 0.5) -> Poly:
    out = ring.zero()
    n = ring.nvars
    for d in range(degree + 1):
        for e in itertools.product(range(d + 1), repeat=n):
            if sum(e) == d and rng.random() < density:
                out = out + ring.monomial(e, rng.randint(-3, 3))
    return out


def random_factorisation(rng: random.Random) -> Factorisation:
    """A Koszul or spinor factorisation with ranks <= 3, degree <= 2, <= 3 variables."""
    ring = Ring(["x", "y", "z"][: rng.randint(1, 3)])
    kind = rng.choice(["koszul1", "koszul2", "spinor1", "spinor2"])
    r = 1 if kind.endswith("1") else 2
    s = [_random_poly(ring, rng, rng.randint(1, 2)) for _ in range(r)]
    t = [_random_poly(ring, rng, rng.randint(0, 1)) for _ in range(r)]
    if kind.startswith("koszul"):
        return koszul_factorisation(ring, s, t)
    return spinor_factorisation(QuadraticSpace(r), s + t, rng.choice([1, "I"]), ring)


# --------------------------------------------------------------------------
# Independent Koszul-homology oracle (dense linear algebra, no Gröbner bases)


def koszul_oracle(names, weights, section, max_degree: int = 12) -> KClass:
    """Torus character of the Koszul homology of a homogeneous section.

    ``section`` is a list of sympy expressions in ``names``.  Each graded
    piece of the Koszul complex is a finite matrix; homology is computed
    degree by degree and must vanish above ``max_degree - 2``.
    """
    xs = sympy.symbols(list(names))
    wts = [Fraction(w) for w in weights]
    polys = [sympy.Poly(s, *xs) for s in section]
    degs = [p.total_degree() for p in polys]
    r = len(polys)
    subsets = {k: list(itertools.combinations(range(r), k)) for k in range(r + 1)}

    def monos(d):
        return [e for e in itertools.product(range(d + 1), repeat=len(xs)) if sum(e) == d]

    def shift_of(S):
        return sum(degs[i] for i in S)

    def basis(k, d):
        # elements e_S * m with |S| = k and deg m + shift(S) = d
        out = []
        for S in subsets[k]:
            md = d - shift_of(S)
            if md >= 0:
                out.extend((S, m) for m in monos(md))
        return out

    def boundary(k, d):
        src, tgt = basis(k, d), basis(k - 1, d)
        index = {b: i for i, b in enumerate(tgt)}
        M = sympy.zeros(len(tgt), len(src))
        for j, (S, m) in enumerate(src):
            for pos, i in enumerate(S):
                T = S[:pos] + S[pos + 1:]
                sign = (-1) ** pos
                for mono, c in polys[i].terms():
                    mm = tuple(a + b for a, b in zip(m, mono))
                    M[index[(T, mm)], j] += sign * c
        return M

    def weight(S, m):
        return sum((wts[a] * k for a, k in zip(range(len(xs)), m)), Fraction(0))

    terms: dict[int, int] = {}
    for d in range(max_degree + 1):
        for k in range(r + 1):
            here = basis(k, d)
            if not here:
                continue
            # split by torus weight so ranks are taken weight by weight
            groups: dict = {}
            for idx, (S, m) in enumerate(here):
                wt = weight(S, m) + sum((_section_weight(polys[i], wts) for i in S), Fraction(0))
                groups.setdefault(wt, []).append(idx)
            out = boundary(k, d) if k > 0 else sympy.zeros(0, len(here))
            inc = boundary(k + 1, d) if k < r else sympy.zeros(len(here), 0)
            for wt, cols in groups.items():
                sub_out = out[:, cols] if out.shape[0] else sympy.zeros(0, len(cols))
                rows_in = inc[cols, :] if inc.shape[1] else sympy.zeros(len(cols), 0)
                dim = len(cols) - (sub_out.rank() if sub_out.shape[0] else 0) - (rows_in.rank() if rows_in.shape[1] else 0)
                if dim:
                    if d > max_degree - 2:
                        raise ValueError("Koszul homology does not vanish in high degree")
                    e = int(2 * wt)
                    terms[e] = terms.get(e, 0) + (-1) ** k * dim
    return KClass.laurent(terms)


def _section_weight(p: sympy.Poly, wts) -> Fraction:
    e = p.monoms()[0]
    return sum((w * k for w, k in zip(wts, e)), Fraction(0))


# --------------------------------------------------------------------------
# Criteria


def criterion_1(seed: int = DEFAULT_SEED) -> CriterionResult:
    rng = random.Random(seed)
    bad = 0
    built = [random_factorisation(rng) for _ in range(200)]
    for F in built:
        if not validate(F) or F.rank_plus > 3 or F.rank_minus > 3:
            bad += 1
    sums = 0
    for F, G in zip(built[::2], built[1::2]):
        if F.ring != G.ring or F.rank_plus * G.rank_plus > 2:
            continue
        T = tensor(F, G)
        if T.potential != F.potential + G.potential or not validate(T):
            bad += 1
        sums += 1
    return CriterionResult(1, "factorisation axioms", bad == 0 and sums > 0,
                           f"200 random factorisations, {sums} tensor pairs, {bad} failures")


def _xy():
    B = Ring(["x", "y"])
    return B, Ideal(B, [B.var("x"), B.var("y")])


def criterion_2(seed: int = DEFAULT_SEED) -> CriterionResult:
    B, I = _xy()
    R = rees_presentation(I)
    F = Factorisation.from_rows(B, "x*y", [["x"]], [["y"]])
    got = str(sp_object(F, R))
    want = "fact over Q(i)[X,Y] pot X*Y dplus [[X]] dminus [[Y]]"
    unit = str(sp_object(unit_factorisation(B), R))
    unit_want = str(unit_factorisation(Ring(["X", "Y"])))
    ok = got == want and unit == unit_want
    return CriterionResult(2, "sp worked example", ok, f"sp = {got}; sp(O_Y) = {unit}")


def criterion_3(seed: int = DEFAULT_SEED) -> CriterionResult:
    B, I = _xy()
    R = rees_presentation(I)
    F = Factorisation.from_rows(B, "x*y", [["x*y"]], [["1"]])
    generic = graph_closure(F, GrassChart.generic(1, 1), R)
    flipped = GrassChart((0,), (0,))
    spf = sp_object(F, R)
    h = Homotopy(F, _matrix(B, [["1"]]), _matrix(B, [["0"]]))
    contraction = sp_contract(F, h, spf.closure)
    ok = generic.chart_miss and spf.closure.chart == flipped and contraction.beta_vanish and contraction.central.verify()
    return CriterionResult(3, "sp chart miss", ok,
                           f"generic chart miss {generic.chart_miss}; used {spf.closure.chart}; contraction verified")


def _matrix(ring, rows):
    from .algebra import Matrix
    return Matrix(ring, [[ring.parse(x) for x in r] for r in rows], len(rows[0]) if rows else 0)


def criterion_4(seed: int = DEFAULT_SEED, instances: int = 20) -> CriterionResult:
    rng = random.Random(seed)
    B, I = _xy()
    R = rees_presentation(I)
    facts = [Factorisation.from_rows(B, "x*y", [[p]], [[m]]) for p, m in (("x", "y"), ("y", "x"), ("-x", "-y"), ("2*x", "1/2*y"))]
    passed = 0
    for _ in range(instances):
        F, G, H = (rng.choice(facts) for _ in range(3))
        a = _random_morphism(F, G, rng)
        a2 = _random_morphism(G, H, rng)
        if sp_laws_check(F, G, H, a, a2, R):
            passed += 1
    return CriterionResult(4, "sp functor laws", passed == instances, f"{passed}/{instances} instances")


def _random_morphism(F, G, rng):
    ring = F.ring
    parity = rng.randint(0, 1)
    if parity == 0:
        p = [[_random_poly(ring, rng, 1)]]
        m = [[_random_poly(ring, rng, 1)]] if rng.random() < 0.5 else p
    else:
        p = [[_random_poly(ring, rng, 1)]]
        m = [[_random_poly(ring, rng, 1)]]
    from .algebra import Matrix
    return FactMorphism(F, G, parity, Matrix(ring, p, 1), Matrix(ring, m, 1))


def criterion_5(seed: int = DEFAULT_SEED) -> CriterionResult:
    B, I = _xy()
    R = rees_presentation(I)
    facts = [
        Factorisation.from_rows(B, "x*y", [["x"]], [["y"]]),
        Factorisation.from_rows(B, "x*y", [["x*y"]], [["1"]]),
        Factorisation.from_rows(B, "x^2*y", [["x^2"]], [["y"]]),
        koszul_factorisation(B, [B.var("x"), B.var("y")], [B.var("y"), B.zero()]),
        unit_factorisation(B),
    ]
    closures, errors = 0, []
    for F in facts:
        for chart in all_charts(F.rank_plus, F.rank_minus):
            gc = graph_closure(F, chart, R)
            if gc.chart_miss:
                continue
            closures += 1
            errors += gc.closure_identities_check()
    return CriterionResult(5, "NP = PN = q Id on closures", not errors and closures > 0,
                           f"{closures} closures, {len(errors)} failures")


def criterion_6(seed: int = DEFAULT_SEED) -> CriterionResult:
    reps = [clifford_square_check(n) for n in (1, 2)]
    return CriterionResult(6, "Clifford square", all(reps), ", ".join(f"n={r.n}: {'ok' if r else 'fail'}" for r in reps))


def criterion_7(seed: int = DEFAULT_SEED) -> CriterionResult:
    rng = random.Random(seed)
    ok = True
    for n in (1, 2, 3):
        S = SpinorModule(QuadraticSpace(n))
        ok &= len(S.basis) == 2 ** n and len(S.even_basis) == len(S.odd_basis) == 2 ** (n - 1)
        ok &= len(clifford_words(n)) == 4 ** n
    lines = 0
    for k in range(50):
        n = 1 + k % 3
        A = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                A[i][j] = rng.randint(-3, 3)
                A[j][i] = -A[i][j]
        # rows x -> (x, A x) with a random invertible change of basis
        vecs = [[1 if c == i else 0 for c in range(n)] + [A[c][i] for c in range(n)] for i in range(n)]
        mix = _random_unimodular(n, rng)
        vecs = [[sum(mix[i][j] * vecs[j][c] for j in range(n)) for c in range(2 * n)] for i in range(n)]
        try:
            pfaffian_line(QuadraticSpace(n), vecs)
            lines += 1
        except AssertionError:
            pass
    ok &= lines == 50
    return CriterionResult(7, "graded dimensions", ok, f"dims 2^n / 4^n for n <= 3; {lines}/50 Pfaffian lines")


def _random_unimodular(n, rng):
    M = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            c = rng.randint(-2, 2)
            M[i] = [a + c * b for a, b in zip(M[i], M[j])]
    return M


def _models():
    return [
        CutoutModel.build([], [], "0", []),
        CutoutModel.build([], ["x"], "0", ["x", "0"], {"x": -2}),
        CutoutModel.build([], ["x"], "0", ["x^2", "0"], {"x": -1}),
    ]


def criterion_8(seed: int = DEFAULT_SEED) -> CriterionResult:
    U = Ring([])
    reports = []
    for M in _models():
        for b in (0, 1, 3):
            reports.append(knoerrer_comparison_check(M, SplitBundleData(U, 1, weights=(b,)), unit_factorisation(U)))
    # the image of 1 on (A^2, uv) against the directly computed virtual structure sheaf
    Q = SplitBundleData(U, 1, weights=(1,))
    M2 = CutoutModel.build(["u1", "v1"], [], "u1*v1", ["u1", "v1"], {"u1": -1, "v1": 1})
    K = shift(kvir(Q, M2.base))
    direct = lagrangian_class(M2, K, (kvir_weights(Q)[1], kvir_weights(Q)[0]))
    ovir = virtual_structure_sheaf(_models()[0])
    ok = all(reports) and direct == ovir
    return CriterionResult(8, "Knoerrer comparison", ok,
                           f"{sum(map(bool, reports))}/{len(reports)} comparisons; L(K[1]) = {direct}, O^vir = {ovir}")


def criterion_9(seed: int = DEFAULT_SEED) -> CriterionResult:
    U = Ring([])
    x = sympy.Symbol("x")
    details, ok = [], True
    for M, sec in zip(_models()[1:], (x, x ** 2)):
        L = lagrangian_class(M, unit_factorisation(U))
        V = virtual_structure_sheaf(M)
        oracle = koszul_oracle(["x"], [M.var_weights["x"]], [sec]) * KClass.monomial(M.half_twist())
        ok &= L == V == oracle
        details.append(f"{L}")
    return CriterionResult(9, "virtual structure sheaf", ok, "; ".join(details))


def criterion_10(seed: int = DEFAULT_SEED) -> CriterionResult:
    U = Ring([])
    count, ok = 0, True
    for M in _models()[1:]:
        base = lagrangian_class(M, unit_factorisation(U))
        for c in (0, 1, -2):
            ok &= lagrangian_class(stabilise(M, "k", c), unit_factorisation(U)) == base
            count += 1
    return CriterionResult(10, "normal-form independence", ok and count >= 5, f"{count} stabilised instances")


def criterion_11(seed: int = DEFAULT_SEED) -> CriterionResult:
    rng = random.Random(seed)
    M = CutoutModel.build(["x", "y"], [], "x*y", ["x", "y"], {"x": 1, "y": -1})
    F = Factorisation.from_rows(M.base, "x*y", [["x"]], [["y"]])
    reports = [localisation_check(M, F)]
    for _ in range(2):
        k = rng.randint(1, 3)
        wts = {"x": -rng.choice([1, 2, 3]), "y": -rng.choice([1, 2])}
        sec = [f"x^{k}", "y", "0", "0"]
        Mr = CutoutModel.build([], ["x", "y"], "0", sec, wts)
        reports.append(localisation_check(Mr, unit_factorisation(Mr.base)))
    ok = all(reports)
    return CriterionResult(11, "localisation", ok, "; ".join(f"{r.lhs}" for r in reports))


def criterion_12(seed: int = DEFAULT_SEED) -> CriterionResult:
    B, I = _xy()
    F = Factorisation.from_rows(B, "x*y", [["x"]], [["y"]])
    reps = [smooth_cover_check(F, I, k) for k in (1, 2)]
    return CriterionResult(12, "smooth-cover compatibility", all(reps), ", ".join(f"k={r.k}: {'ok' if r else 'fail'}" for r in reps))


def criterion_13(seed: int = DEFAULT_SEED, instances: int = 500) -> CriterionResult:
    rng = random.Random(seed)
    bad = 0
    for k in range(instances):
        ring = Ring(["x", "y", "z"][: 2 + k % 2])
        gens = [_random_poly(ring, rng, rng.randint(1, 2), 0.4) for _ in range(rng.randint(1, 3))]
        gens = [g for g in gens if g.terms] or [ring.var("x")]
        I = Ideal(ring, gens)
        shuffled = Ideal(ring, list(reversed(gens)) + [gens[0] * ring.var("y")])
        g1, g2 = buchberger(I), buchberger(shuffled)
        if g1.basis != g2.basis:
            bad += 1
        if k % 5 == 0:
            u = ring.var(rng.choice(ring.names))
            s1 = saturate(I, u)
            if not saturate(s1, u).same_as(s1):
                bad += 1
        coeffs = [_random_poly(ring, rng, 1, 0.5) for _ in gens]
        target = sum((c * g for c, g in zip(coeffs, gens)), ring.zero())
        cert = membership_certificate(target, I)
        if cert is None or cert.expand() != target:
            bad += 1
    return CriterionResult(13, "Groebner engine", bad == 0, f"{instances} instances, {bad} failures")


CRITERIA: list[Callable[..., CriterionResult]] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
    criterion_8, criterion_9, criterion_10, criterion_11, criterion_12, criterion_13,
]


def run_one(fn, seed: int = DEFAULT_SEED) -> CriterionResult:
    start = time.perf_counter()
    try:
        res = fn(seed)
    except Exception as exc:  # a crash is a failure of that criterion
        number = CRITERIA.index(fn) + 1
        res = CriterionResult(number, fn.__name__, False, f"error: {type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - start
    return res


def run_all(seed: int = DEFAULT_SEED) -> list[CriterionResult]:
    return [run_one(fn, seed) for fn in CRITERIA]
