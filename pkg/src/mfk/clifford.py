"""Split Clifford algebras, spinor modules and Clifford/Koszul factorisations.

The quadratic space has basis ``lam_1..lam_n`` (an isotropic subspace) and
``lam*_1..lam*_n`` (its dual), with quadratic function ``Q(a, alpha) = alpha(a)``.
Generators are indexed ``0..n-1`` for ``lam`` and ``n..2n-1`` for ``lam*``.
The algebra relation is ``v*v = Q(v)``, so ``lam_i lam*_j + lam*_j lam_i = delta_ij``.

Spinors are exterior monomials in ``lam*`` (sorted index tuples): ``lam*`` acts
by wedge and ``lam`` by contraction.  A section is a list of ``2n`` coefficients,
the ``lam`` components followed by the ``lam*`` components.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .algebra import IMAG, ONE, ZERO, Matrix, Poly, Ring, Scalar, nullspace, rank
from .mfcore import Factorisation, validate

__all__ = [
    "QuadraticSpace", "CliffordElement", "SpinorModule", "clifford_mul", "spinor_action",
    "spinor_factorisation", "koszul_factorisation", "clifford_square_check",
    "pfaffian_line", "isotropic_reduce_class_check", "quadratic_value", "polar",
    "CliffordSquareReport", "PfaffianLine",
]


@dataclass(frozen=True)
class QuadraticSpace:
    n: int
    weights: tuple[int, ...] | None = None  # torus weights of lam_1..lam_n

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("half-rank must be nonnegative")
        if self.weights is not None and len(self.weights) != self.n:
            raise ValueError("one weight per isotropic basis vector")

    @property
    def rank(self) -> int:
        return 2 * self.n

    def labels(self) -> list[str]:
        return [f"lam{i + 1}" for i in range(self.n)] + [f"lam{i + 1}*" for i in range(self.n)]

    def pairing(self, g: int, h: int) -> int:
        """Anticommutator of two basis generators."""
        return 1 if abs(g - h) == self.n else 0


def quadratic_value(space: QuadraticSpace, v: Sequence):
    n = space.n
    return sum((v[i] * v[n + i] for i in range(n)), start=_zero_like(v))


def polar(space: QuadraticSpace, v: Sequence, w: Sequence):
    """``Q(v + w) - Q(v) - Q(w)``, the anticommutator of ``v`` and ``w``."""
    n = space.n
    return sum((v[i] * w[n + i] + w[i] * v[n + i] for i in range(n)), start=_zero_like(v))


def _zero_like(v):
    for x in v:
        if isinstance(x, Poly):
            return x.ring.zero()
    return ZERO


# --------------------------------------------------------------------------
# Clifford algebra on words


@lru_cache(maxsize=None)
def _normal_order(n: int, seq: tuple) -> tuple:
    """Expand a product of generators into sorted words: ((word, coeff), ...)."""
    for i in range(len(seq) - 1):
        a, b = seq[i], seq[i + 1]
        if a == b:
            return ()  # basis generators are isotropic
        if a > b:
            out: dict = {}
            swapped = seq[:i] + (b, a) + seq[i + 2:]
            for w, c in _normal_order(n, swapped):
                out[w] = out.get(w, 0) - c
            if abs(a - b) == n:
                for w, c in _normal_order(n, seq[:i] + seq[i + 2:]):
                    out[w] = out.get(w, 0) + c
            return tuple((w, c) for w, c in sorted(out.items()) if c)
    return ((seq, 1),)


def _word_product(n: int, w1: tuple, w2: tuple) -> tuple:
    return _normal_order(n, w1 + w2)


class CliffordElement:
    """A linear combination of sorted words with coefficients in a ring."""

    __slots__ = ("space", "ring", "coeffs")

    def __init__(self, space: QuadraticSpace, ring: Ring, coeffs: dict):
        self.space = space
        self.ring = ring
        self.coeffs = {w: c for w, c in coeffs.items() if c.terms}

    @classmethod
    def word(cls, space: QuadraticSpace, ring: Ring, gens: Sequence[int], coeff=1) -> "CliffordElement":
        out: dict = {}
        for w, c in _normal_order(space.n, tuple(gens)):
            out[w] = out.get(w, ring.zero()) + ring.const(c) * ring.coerce(coeff)
        return cls(space, ring, out)

    @classmethod
    def vector(cls, space: QuadraticSpace, ring: Ring, v: Sequence) -> "CliffordElement":
        return cls(space, ring, {(g,): ring.coerce(c) for g, c in enumerate(v)})

    def __mul__(self, other: "CliffordElement") -> "CliffordElement":
        if other.space != self.space:
            raise ValueError("Clifford elements from different spaces")
        out: dict = {}
        n = self.space.n
        for w1, c1 in self.coeffs.items():
            for w2, c2 in other.coeffs.items():
                prod = c1 * c2
                for w, s in _word_product(n, w1, w2):
                    out[w] = out.get(w, self.ring.zero()) + prod * s
        return CliffordElement(self.space, self.ring, out)

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, self.ring.zero()) + c
        return CliffordElement(self.space, self.ring, out)

    def scale(self, p) -> "CliffordElement":
        p = self.ring.coerce(p)
        return CliffordElement(self.space, self.ring, {w: c * p for w, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def transpose(self) -> "CliffordElement":
        """The anti-automorphism reversing words."""
        out: dict = {}
        for w, c in self.coeffs.items():
            for w2, s in _normal_order(self.space.n, tuple(reversed(w))):
                out[w2] = out.get(w2, self.ring.zero()) + c * s
        return CliffordElement(self.space, self.ring, out)

    def parity(self) -> int | None:
        ps = {len(w) % 2 for w in self.coeffs}
        return ps.pop() if len(ps) == 1 else None

    def __eq__(self, other):
        return isinstance(other, CliffordElement) and self.space == other.space and self.coeffs == other.coeffs

    def __str__(self):
        if not self.coeffs:
            return "0"
        labels = self.space.labels()
        parts = []
        for w in sorted(self.coeffs, key=lambda w: (len(w), w)):
            word = ".".join(labels[g] for g in w) or "1"
            parts.append(f"({self.coeffs[w]})*{word}")
        return " + ".join(parts)


def clifford_mul(c1: CliffordElement, c2: CliffordElement) -> CliffordElement:
    return c1 * c2


def clifford_words(n: int) -> list[tuple]:
    """All sorted words, even ones first, each block ordered by (length, word)."""
    words = [w for k in range(2 * n + 1) for w in itertools.combinations(range(2 * n), k)]
    return sorted(words, key=lambda w: (len(w) % 2, len(w), w))


# --------------------------------------------------------------------------
# Spinor module


@dataclass(frozen=True)
class SpinorModule:
    """``Lambda^* Lambda^dual`` with basis of sorted index subsets."""

    space: QuadraticSpace

    @property
    def even_basis(self) -> list[tuple]:
        return [I for I in self.basis if len(I) % 2 == 0]

    @property
    def odd_basis(self) -> list[tuple]:
        return [I for I in self.basis if len(I) % 2 == 1]

    @property
    def basis(self) -> list[tuple]:
        n = self.space.n
        return [I for k in range(n + 1) for I in itertools.combinations(range(n), k)]

    @property
    def graded_dims(self) -> tuple[int, int]:
        return len(self.even_basis), len(self.odd_basis)


def _generator_action(n: int, g: int, I: tuple):
    """Action of generator ``g`` on the spinor basis element ``I``: (J, sign) or None."""
    if g >= n:  # wedge with lam*_j on the left
        j = g - n
        if j in I:
            return None
        sign = -1 if sum(1 for i in I if i < j) % 2 else 1
        return tuple(sorted(I + (j,))), sign
    j = g
    if j not in I:
        return None
    sign = -1 if sum(1 for i in I if i < j) % 2 else 1
    return tuple(i for i in I if i != j), sign


def spinor_action(space: QuadraticSpace, v: Sequence, m: dict) -> dict:
    """Clifford multiplication of a vector on a spinor ``{subset: coefficient}``."""
    out: dict = {}
    for I, c in m.items():
        for g, coeff in enumerate(v):
            if not coeff:
                continue
            r = _generator_action(space.n, g, I)
            if r is None:
                continue
            J, s = r
            val = coeff * c * s
            out[J] = out[J] + val if J in out else val
    return {J: c for J, c in out.items() if c}


def _action_blocks(n: int, ring: Ring, v: Sequence[Poly]):
    """Matrices of ``v`` acting S+ -> S- and S- -> S+."""
    mod = SpinorModule(QuadraticSpace(n))
    ev, od = mod.even_basis, mod.odd_basis
    pos_e = {I: k for k, I in enumerate(ev)}
    pos_o = {I: k for k, I in enumerate(od)}
    to_odd = [[ring.zero()] * len(ev) for _ in od]
    to_even = [[ring.zero()] * len(od) for _ in ev]
    for src, pos_src, dst, pos_dst, mat in ((ev, pos_e, od, pos_o, to_odd), (od, pos_o, ev, pos_e, to_even)):
        for I in src:
            for g, coeff in enumerate(v):
                if not coeff.terms:
                    continue
                r = _generator_action(n, g, I)
                if r is None:
                    continue
                J, s = r
                mat[pos_dst[J]][pos_src[I]] = mat[pos_dst[J]][pos_src[I]] + coeff * s
    return Matrix(ring, to_odd, len(ev)), Matrix(ring, to_even, len(od))


def spinor_factorisation(space: QuadraticSpace, s: Sequence, phase=1, ring: Ring | None = None) -> Factorisation:
    """Clifford multiplication by ``phase * s`` on the spinor module.

    Its potential is ``phase^2 * Q(s)``; ``phase = I`` gives ``-Q(s)``.
    """
    if len(s) != space.rank:
        raise ValueError(f"section needs {space.rank} components")
    if ring is None:
        ring = next(x.ring for x in s if isinstance(x, Poly))
    s = [ring.coerce(x) for x in s]
    ph = Scalar.of(phase) if not isinstance(phase, str) else ring.parse(phase).constant_coeff()
    dp, dm = _action_blocks(space.n, ring, s)
    pot = ring.coerce(quadratic_value(space, s)) * ring.const(ph * ph)
    return Factorisation(ring, pot, dp.scale(ring.const(ph)), dm.scale(ring.const(ph)))


def koszul_factorisation(ring: Ring, s: Sequence, sigma: Sequence | None = None) -> Factorisation:
    """``Lambda^even W* <-> Lambda^odd W*`` with differential ``iota_s + sigma^``.

    The potential is ``sigma(s)``.
    """
    r = len(s)
    sigma = [ring.zero()] * r if sigma is None else list(sigma)
    if len(sigma) != r:
        raise ValueError("section and cosection ranks differ")
    vec = [ring.coerce(x) for x in s] + [ring.coerce(x) for x in sigma]
    return spinor_factorisation(QuadraticSpace(r), vec, 1, ring)


# --------------------------------------------------------------------------
# Clifford square


@dataclass(frozen=True)
class CliffordSquareReport:
    n: int
    ok: bool
    checks: tuple

    def __bool__(self):
        return self.ok

    def __str__(self):
        lines = [f"clifford-square n={self.n}: {'pass' if self.ok else 'fail'}"]
        lines += [f"  {name}: {'ok' if ok else 'FAIL'}{'' if not msg else ' (' + msg + ')'}" for name, ok, msg in self.checks]
        return "\n".join(lines)


def section_ring(n: int) -> Ring:
    return Ring([f"s{k + 1}" for k in range(2 * n)])


def clifford_square_check(n: int) -> CliffordSquareReport:
    """Verify ``(S, I*s) (x) (S, s)`` is isomorphic to ``(Cl, iota_s)`` shifted by n.

    The isomorphism sends ``a (x) b`` to ``chi * (b lam_top) (a lam_top lam*_top)^t``,
    with ``chi`` a fourth root of unity depending on the parities of ``a`` and ``b``.
    """
    if n < 1 or n > 3:
        raise ValueError("desk scale supports 1 <= n <= 3")
    space = QuadraticSpace(n)
    ring = section_ring(n)
    s = list(ring.gens())
    checks = []
    left = spinor_factorisation(space, s, IMAG, ring)
    right = spinor_factorisation(space, s, 1, ring)
    from .mfcore import tensor
    T = tensor(left, right)
    checks.append(("tensor potential is zero", T.potential.is_zero() and bool(validate(T)), ""))

    words = clifford_words(n)
    widx = {w: k for k, w in enumerate(words)}
    N = len(words)
    # D(c) = s c - (-1)^|c| c s  and  iota_s on words
    svec = CliffordElement.vector(space, ring, s)
    D = [[ring.zero()] * N for _ in range(N)]
    K = [[ring.zero()] * N for _ in range(N)]
    for col, w in enumerate(words):
        c = CliffordElement(space, ring, {w: ring.one()})
        sign = -1 if len(w) % 2 == 0 else 1
        img = svec * c + (c * svec).scale(sign)
        for w2, x in img.coeffs.items():
            D[widx[w2]][col] = x
        for p, g in enumerate(w):
            pair = s[g + n] if g < n else s[g - n]
            if pair.terms:
                rest = w[:p] + w[p + 1:]
                K[widx[rest]][col] = K[widx[rest]][col] + pair * (-1 if p % 2 else 1)
    checks.append(("D equals interior product by s on words", D == K, ""))

    mod = SpinorModule(space)
    ev, od = mod.even_basis, mod.odd_basis
    lam_top = tuple(range(n))
    dual_top = tuple(range(n, 2 * n))
    im_n = IMAG * (-1 if n % 2 else 1)
    chi = {(0, 0): ONE, (0, 1): ONE, (1, 0): im_n, (1, 1): -im_n}

    def spinor_word(I):
        return tuple(n + i for i in I)

    # T basis order: T+ = (S+ x S+, S- x S-), T- = (S- x S+, S+ x S-)
    t_plus = [(a, b) for a in ev for b in ev] + [(a, b) for a in od for b in od]
    t_minus = [(a, b) for a in od for b in ev] + [(a, b) for a in ev for b in od]
    qring = Ring([])
    cols = []
    for a, b in t_plus + t_minus:
        B = CliffordElement.word(space, qring, spinor_word(b) + lam_top)
        A = CliffordElement.word(space, qring, spinor_word(a) + lam_top + dual_top)
        img = (B * A.transpose()).scale(qring.const(chi[(len(a) % 2, len(b) % 2)]))
        cols.append({widx[w]: c.constant_coeff() for w, c in img.coeffs.items()})
    phi_rows = [dict() for _ in range(N)]
    for j, col in enumerate(cols):
        for i, c in col.items():
            phi_rows[i][j] = c
    full = rank(phi_rows, N) == N
    checks.append(("isomorphism has full rank", full, f"rank over {N} columns"))
    # parity shift: T+ lands in words of parity n
    shift_ok = all(len(words[i]) % 2 == n % 2 for j in range(len(t_plus)) for i in cols[j])
    shift_ok &= all(len(words[i]) % 2 != n % 2 for j in range(len(t_plus), N) for i in cols[j])
    checks.append(("parity shift by n", shift_ok, ""))

    # intertwining: Phi o d_T = iota_s o Phi, entrywise
    half = len(t_plus)
    dT = [[ring.zero()] * N for _ in range(N)]
    for i, j, x in T.d_plus.entries():
        dT[half + i][j] = x
    for i, j, x in T.d_minus.entries():
        dT[i][half + j] = x
    Phi = Matrix(ring, [[ring.const(phi_rows[i].get(j, ZERO)) for j in range(N)] for i in range(N)], N)
    lhs = Phi @ Matrix(ring, dT, N)
    rhs = Matrix(ring, K, N) @ Phi
    bad = [(i, j) for i, j, x in (lhs - rhs).entries() if x.terms]
    checks.append(("transported differential equals iota_s", not bad, f"{len(bad)} mismatched entries" if bad else ""))
    return CliffordSquareReport(n, all(ok for _, ok, _ in checks), tuple(checks))


# --------------------------------------------------------------------------
# Pfaffian lines


@dataclass(frozen=True)
class PfaffianLine:
    generator: dict  # subset -> Scalar
    parity: int  # +1 even, -1 odd

    def __str__(self):
        terms = " + ".join(f"({c})*{'^'.join(f'lam{i + 1}*' for i in I) or '1'}" for I, c in sorted(self.generator.items()))
        return f"{terms} [{'even' if self.parity == 1 else 'odd'}]"


def _scalar_action_matrix(space: QuadraticSpace, v: Sequence[Scalar]) -> list[list[Scalar]]:
    basis = SpinorModule(space).basis
    pos = {I: k for k, I in enumerate(basis)}
    M = [[ZERO] * len(basis) for _ in basis]
    for I in basis:
        for J, c in spinor_action(space, [Scalar.of(x) for x in v], {I: ONE}).items():
            M[pos[J]][pos[I]] = c
    return M


def _matmul(A, B):
    return [[sum((a * b for a, b in zip(row, col)), start=ZERO) for col in zip(*B)] for row in A]


def pfaffian_line(space: QuadraticSpace, isotropic_basis: Sequence[Sequence]) -> PfaffianLine:
    """The annihilator line of a maximal isotropic subspace inside the spinors."""
    n = space.n
    vecs = [[Scalar.of(x) for x in v] for v in isotropic_basis]
    if len(vecs) != n or any(len(v) != 2 * n for v in vecs):
        raise ValueError(f"need {n} vectors of length {2 * n}")
    for i, v in enumerate(vecs):
        if quadratic_value(space, v):
            raise ValueError(f"vector {i} is not isotropic")
        for j in range(i):
            if polar(space, v, vecs[j]):
                raise ValueError(f"vectors {j} and {i} are not orthogonal")
    if rank([dict(enumerate(v)) for v in vecs], 2 * n) != n:
        raise ValueError("vectors are linearly dependent")
    # dual completion: polar(v_j, w_i) = delta_ij
    polar_rows = []
    for v in vecs:
        polar_rows.append({k: v[k + n] if k < n else v[k - n] for k in range(2 * n) if (v[k + n] if k < n else v[k - n])})
    from .algebra import linear_solve
    duals = []
    for i in range(n):
        w = linear_solve(polar_rows, [ONE if j == i else ZERO for j in range(n)], 2 * n)
        if w is None:
            raise ValueError("no dual completion")
        duals.append(w)
    dim = 2 ** n
    P = [[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)]
    for v, w in zip(vecs, duals):
        P = _matmul(P, _matmul(_scalar_action_matrix(space, v), _scalar_action_matrix(space, w)))
    stacked = []
    for v in vecs:
        M = _scalar_action_matrix(space, v)
        stacked.extend({j: x for j, x in enumerate(row) if x} for row in M)
    kernel = nullspace(stacked, dim)
    if len(kernel) != 1:
        raise AssertionError(f"annihilator has dimension {len(kernel)}")
    image_rank = rank([{j: x for j, x in enumerate(row) if x} for row in P], dim)
    if image_rank != 1:
        raise AssertionError(f"projector image has rank {image_rank}")
    col = next(j for j in range(dim) if any(P[i][j] for i in range(dim)))
    gen = [P[i][col] for i in range(dim)]
    # the image must be the annihilator line
    k = kernel[0]
    pivot = next(i for i in range(dim) if gen[i])
    ratio = k[pivot] / gen[pivot]
    if any(k[i] != gen[i] * ratio for i in range(dim)):
        raise AssertionError("projector image differs from annihilator")
    basis = SpinorModule(space).basis
    lead = gen[pivot].inverse()
    out = {basis[i]: gen[i] * lead for i in range(dim) if gen[i]}
    parities = {len(I) % 2 for I in out}
    if len(parities) != 1:
        raise AssertionError("Pfaffian line is not homogeneous")
    return PfaffianLine(out, -1 if parities.pop() else 1)


def isotropic_reduce_class_check(space: QuadraticSpace, K: Sequence[int]):
    """Compare characters of ``S_E`` and ``S_{K^perp/K} * e(K) * sqrt(det K)``.

    ``K`` lists indices of isotropic basis vectors ``lam_i`` (split position).
    Returns ``(ok, lhs, rhs)`` with the two sides as K-classes.
    """
    from .kclass import KClass
    if space.weights is None:
        raise ValueError("isotropic reduction check needs torus weights")
    K = sorted(set(K))
    if any(k < 0 or k >= space.n for k in K):
        raise ValueError("K must be spanned by isotropic basis vectors lam_i")
    a = space.weights

    def spinor_character(indices):
        # spinor basis over lam*_i (weight -a_i) for the given indices, signed by parity
        terms = {}
        for r in range(len(indices) + 1):
            for I in itertools.combinations(indices, r):
                e = -2 * sum(a[i] for i in I)
                terms[e] = terms.get(e, 0) + (-1) ** r
        return KClass.laurent(terms)

    rest = [i for i in range(space.n) if i not in K]
    lhs = spinor_character(list(range(space.n))) * KClass.monomial(sum(a))
    reduced = spinor_character(rest) * KClass.monomial(sum(a[i] for i in rest))
    euler_K = spinor_character(K)  # Lambda^* K^dual has the same signed character
    rhs = reduced * euler_K * KClass.monomial(sum(a[i] for i in K))
    return lhs == rhs, lhs, rhs
