"""Equivariant K-classes of finite-length 2-periodic cohomology.

A class is a rational function in ``w = t^(1/2)``.  Torus weights are kept in
``t``-units as :class:`~fractions.Fraction` so that half-twists by square
roots of determinants stay exact; a weight ``c`` contributes ``w^(2c)``.

Weight conventions
------------------
* a coordinate function carries the weight of its character;
* a basis vector ``e`` of a free module and a coefficient ``p`` combine to the
  weight ``wt(p) + wt(e)``, so ``d e_j = sum d_ij e'_i`` is equivariant when
  ``wt(d_ij) + wt(e'_i) = wt(e_j)``;
* the isotropic basis vector ``lam_i`` of ``E = Lambda (+) Lambda*`` has
  vector weight ``a_i`` and the section component along it has function
  weight ``-a_i``;
* the Euler class of a line of vector weight ``b`` is ``1 - t^(-b)``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import sympy

from .algebra import IMAG, Ideal, Matrix, Poly, Ring, module_groebner, module_kernel
from .clifford import QuadraticSpace, SpinorModule, quadratic_value, spinor_factorisation
from .deform import central_fibre, rees_presentation, simplify_quotient
from .mfcore import Factorisation, shift, tensor, unit_factorisation, validate

__all__ = [
    "KClass", "W", "euler_T", "sqrt_euler_T", "periodic_cohomology", "Cohomology",
    "UnsupportedSupport", "infer_basis_weights", "check_basis_weights", "poly_weight",
    "CutoutModel", "NormalFormData", "lagrangian_class", "virtual_structure_sheaf",
    "knoerrer_comparison_check", "localisation_check", "ComparisonReport",
    "tensor_weights", "shift_weights", "spinor_weights", "sum_weights", "stabilise",
    "sqrt_euler_square_sign",
]

W = sympy.Symbol("w")


class UnsupportedSupport(RuntimeError):
    """Cohomology is not finite-dimensional (or exceeds the enumeration cap)."""


# --------------------------------------------------------------------------
# K-classes


class KClass:
    """A rational function in ``w`` together with a support label."""

    __slots__ = ("value", "support")

    def __init__(self, value=0, support: str = ""):
        self.value = sympy.cancel(sympy.sympify(value))
        self.support = support

    @classmethod
    def laurent(cls, terms: Mapping[int, int], support: str = "") -> "KClass":
        """``sum c_k w^k`` from ``{k: c_k}``."""
        return cls(sum((sympy.Integer(c) * W ** int(k) for k, c in terms.items()), sympy.Integer(0)), support)

    @classmethod
    def monomial(cls, k: int, coeff: int = 1, support: str = "") -> "KClass":
        return cls(sympy.Integer(coeff) * W ** int(k), support)

    @classmethod
    def zero(cls) -> "KClass":
        return cls(0)

    @classmethod
    def one(cls) -> "KClass":
        return cls(1)

    def _join(self, other) -> tuple:
        if not isinstance(other, KClass):
            other = KClass(other)
        tag = self.support if self.support == other.support or not other.support else (
            other.support if not self.support else f"{self.support}|{other.support}")
        return other, tag

    def __add__(self, other):
        other, tag = self._join(other)
        return KClass(self.value + other.value, tag)

    __radd__ = __add__

    def __neg__(self):
        return KClass(-self.value, self.support)

    def __sub__(self, other):
        other, tag = self._join(other)
        return KClass(self.value - other.value, tag)

    def __rsub__(self, other):
        return KClass(other) - self

    def __mul__(self, other):
        other, tag = self._join(other)
        return KClass(self.value * other.value, tag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other, tag = self._join(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero class")
        return KClass(self.value / other.value, tag)

    def __pow__(self, k: int):
        return KClass(self.value ** k, self.support)

    def is_zero(self) -> bool:
        return self.value == 0

    def __eq__(self, other):
        if not isinstance(other, KClass):
            other = KClass(other)
        return sympy.cancel(self.value - other.value) == 0

    def __hash__(self):
        return hash(str(self))

    def rank(self):
        """Non-equivariant value (``w = 1``)."""
        return sympy.cancel(self.value).subs(W, 1)

    def laurent_terms(self) -> dict[int, int] | None:
        """``{exponent: coefficient}`` when the class is a Laurent polynomial."""
        num, den = sympy.fraction(sympy.cancel(self.value))
        den_p = sympy.Poly(den, W)
        if len(den_p.terms()) != 1:
            return None
        (dexp,), dc = den_p.terms()[0]
        out = {}
        for (e,), c in sympy.Poly(num, W).terms():
            out[e - dexp] = sympy.Rational(c) / dc
        return out

    def __str__(self):
        terms = self.laurent_terms()
        if terms is not None:
            return _terms_str(terms)
        num, den = sympy.fraction(sympy.cancel(self.value))
        lead = sympy.Poly(den, W).LC()
        num, den = sympy.expand(num / lead), sympy.expand(den / lead)
        top = {e: c for (e,), c in sympy.Poly(num, W).terms()}
        bot = {e: c for (e,), c in sympy.Poly(den, W).terms()}
        return f"({_terms_str(top)}) / ({_terms_str(bot)})"

    def __repr__(self):
        return f"KClass({self})"


def _terms_str(terms: Mapping[int, object]) -> str:
    items = [(e, c) for e, c in sorted(terms.items(), reverse=True) if c != 0]
    if not items:
        return "0"
    out = ""
    for k, (e, c) in enumerate(items):
        neg = c < 0
        mag = -c if neg else c
        piece = f"{mag} * w^({e})"
        if k == 0:
            out = ("-" if neg else "") + piece
        else:
            out += (" - " if neg else " + ") + piece
    return out


def _wexp(weight) -> int:
    """Exponent of ``w`` for a ``t``-weight."""
    e = 2 * Fraction(weight)
    if e.denominator != 1:
        raise ValueError(f"weight {weight} is not a half-integer")
    return int(e)


def euler_T(weights: Sequence) -> KClass:
    """``prod (1 - w^(-2 b))`` over vector weights ``b``."""
    out = KClass.one()
    for b in weights:
        if Fraction(b) == 0:
            raise ValueError("Euler class of a weight-zero line is not invertible")
        out = out * KClass.laurent({0: 1, -_wexp(b): -1})
    return out


def sqrt_euler_T(lam_weights: Sequence) -> KClass:
    """Character of the spinor module of ``Lambda (+) Lambda*`` times ``sqrt(det Lambda)``.

    Equals ``prod (w^a - w^(-a))`` over the weights ``a`` of ``Lambda``.
    """
    out = KClass.one()
    for a in lam_weights:
        r = sympy.Rational(Fraction(a).numerator, Fraction(a).denominator)
        out = out * KClass(W ** r - W ** -r)
    return out


def sqrt_euler_square_sign(lam_weights: Sequence) -> int:
    """The sign ``e`` with ``sqrt_euler_T(a)^2 = e * euler_T(a (+) -a)``; it is ``(-1)^rank``."""
    a = [Fraction(x) for x in lam_weights]
    lhs = sqrt_euler_T(a) ** 2
    rhs = euler_T(a + [-x for x in a])
    for e in (1, -1):
        if lhs == rhs * e:
            return e
    raise AssertionError("square relation fails")


def sum_weights(fw, gw):
    return tuple(fw[0]) + tuple(gw[0]), tuple(fw[1]) + tuple(gw[1])


# --------------------------------------------------------------------------
# Weights


def poly_weight(p: Poly, var_weights: Mapping[str, Fraction]):
    """The weight of a homogeneous nonzero polynomial (ValueError otherwise)."""
    ws = {sum((Fraction(var_weights.get(n, 0)) * k for n, k in zip(p.ring.names, e)), Fraction(0)) for e in p.terms}
    if len(ws) != 1:
        raise ValueError(f"{p} is not torus-homogeneous")
    return ws.pop()


def _constraints(F: Factorisation):
    """Edges ``(src, dst, entry)`` meaning ``wt(dst) = wt(src) - wt(entry)``."""
    for i, j, x in F.d_plus.entries():
        if x.terms:
            yield ("+", j), ("-", i), x
    for i, j, x in F.d_minus.entries():
        if x.terms:
            yield ("-", j), ("+", i), x


def _reduced(F: Factorisation, x: Poly) -> Poly:
    if F.relations is None or F.relations.is_zero():
        return x
    return F.relations.groebner().normal_form(x)


def infer_basis_weights(F: Factorisation, var_weights: Mapping[str, Fraction], anchor=Fraction(0)):
    """Basis weights making ``F`` equivariant, each connected block anchored at ``anchor``."""
    adj: dict = {}
    for s, t, x in _constraints(F):
        x = _reduced(F, x)
        if not x.terms:
            continue
        c = poly_weight(x, var_weights)
        adj.setdefault(s, []).append((t, -c))
        adj.setdefault(t, []).append((s, c))
    nodes = [("+", i) for i in range(F.rank_plus)] + [("-", i) for i in range(F.rank_minus)]
    wt: dict = {}
    for start in nodes:
        if start in wt:
            continue
        wt[start] = Fraction(anchor)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v, delta in adj.get(u, ()):
                val = wt[u] + delta
                if v in wt:
                    if wt[v] != val:
                        raise ValueError("factorisation is not torus-equivariant")
                else:
                    wt[v] = val
                    queue.append(v)
    return (tuple(wt[("+", i)] for i in range(F.rank_plus)), tuple(wt[("-", i)] for i in range(F.rank_minus)))


def check_basis_weights(F: Factorisation, var_weights, plus: Sequence, minus: Sequence) -> bool:
    wt = {("+", i): Fraction(w) for i, w in enumerate(plus)}
    wt.update({("-", i): Fraction(w) for i, w in enumerate(minus)})
    for s, t, x in _constraints(F):
        x = _reduced(F, x)
        if x.terms and (wt[s] - wt[t]) != poly_weight(x, var_weights):
            return False
    return True


def tensor_weights(fw, gw):
    (fp, fm), (gp, gm) = fw, gw
    plus = tuple(a + b for a in fp for b in gp) + tuple(a + b for a in fm for b in gm)
    minus = tuple(a + b for a in fm for b in gp) + tuple(a + b for a in fp for b in gm)
    return plus, minus


def shift_weights(fw):
    return fw[1], fw[0]


def spinor_weights(lam_weights: Sequence):
    """Spinor basis ``lam*_I`` has weight ``-sum_{i in I} a_i``."""
    mod = SpinorModule(QuadraticSpace(len(lam_weights)))
    a = [Fraction(x) for x in lam_weights]
    return (tuple(-sum((a[i] for i in I), Fraction(0)) for I in mod.even_basis),
            tuple(-sum((a[i] for i in I), Fraction(0)) for I in mod.odd_basis))


# --------------------------------------------------------------------------
# Cohomology


@dataclass(frozen=True)
class Cohomology:
    h_plus: KClass
    h_minus: KClass
    dims: tuple[int, int]

    @property
    def euler(self) -> KClass:
        return self.h_plus - self.h_minus


def _standard_excess(zgb, bgb, rank: int, nvars: int, cap: int):
    """Monomials ``(component, exponent)`` in ``LM(Z)`` but outside ``LM(B)``."""
    blead = [bgb.lead_ideal(c) for c in range(rank)]

    def in_b(c, e):
        return any(all(x >= y for x, y in zip(e, g)) for g in blead[c])

    seen = set()
    queue = deque()
    for c, e in zgb.leads:
        if not in_b(c, e) and (c, e) not in seen:
            seen.add((c, e))
            queue.append((c, e))
    while queue:
        c, e = queue.popleft()
        for k in range(nvars):
            e2 = e[:k] + (e[k] + 1,) + e[k + 1:]
            if (c, e2) not in seen and not in_b(c, e2):
                seen.add((c, e2))
                if len(seen) > cap:
                    raise UnsupportedSupport("cohomology is not of finite length within the enumeration cap")
                queue.append((c, e2))
    return seen


def _homology_character(F: Factorisation, out_map: Matrix, in_map: Matrix, basis_w, var_w, cap: int):
    ring = F.ring
    n = out_map.ncols
    if n == 0:
        return KClass.zero(), 0
    rel = F.relations if F.relations is not None and not F.relations.is_zero() else None
    zgens = module_kernel(out_map, rel)
    bgens = [[in_map.rows[i][j] for i in range(n)] for j in range(in_map.ncols)]
    if rel is not None:
        for g in rel.generators:
            bgens.extend([g if k == i else ring.zero() for k in range(n)] for i in range(n))
    zgb = module_groebner(ring, n, zgens)
    bgb = module_groebner(ring, n, bgens)
    excess = _standard_excess(zgb, bgb, n, ring.nvars, cap)
    vw = [Fraction(var_w.get(v, 0)) for v in ring.names]
    terms: dict = {}
    for c, e in excess:
        wt = Fraction(basis_w[c]) + sum((a * k for a, k in zip(vw, e)), Fraction(0))
        k = _wexp(wt)
        terms[k] = terms.get(k, 0) + 1
    return KClass.laurent(terms), len(excess)


def periodic_cohomology(F: Factorisation, var_weights: Mapping | None = None, basis_weights=None,
                        support: str = "", cap: int = 20000) -> Cohomology:
    """Torus characters of ``ker d+ / im d-`` and ``ker d- / im d+`` for a factorisation of zero."""
    var_weights = dict(var_weights or {})
    rel = F.relations
    if F.potential.terms and (rel is None or not rel.groebner().contains(F.potential)):
        raise ValueError("cohomology needs a factorisation of zero")
    if basis_weights is None:
        basis_weights = infer_basis_weights(F, var_weights)
    elif not check_basis_weights(F, var_weights, *basis_weights):
        raise ValueError("basis weights do not make the factorisation equivariant")
    hp, dp = _homology_character(F, F.d_plus, F.d_minus, basis_weights[0], var_weights, cap)
    hm, dm = _homology_character(F, F.d_minus, F.d_plus, basis_weights[1], var_weights, cap)
    hp.support = hm.support = support
    return Cohomology(hp, hm, (dp, dm))


# --------------------------------------------------------------------------
# Cutout models


def _as_fraction_map(d) -> dict:
    return {k: Fraction(v) for k, v in (d or {}).items()}


@dataclass(frozen=True, eq=False)
class CutoutModel:
    """``V = U x A^k`` with a section ``s`` of ``E = Lambda (+) Lambda*`` and ``q(s, s) = p^* f``.

    ``section`` lists the ``Lambda`` components then the ``Lambda*`` components.
    """

    base: Ring
    ring: Ring
    potential: Poly
    section: tuple
    var_weights: dict = field(default_factory=dict)
    lam_weights: tuple = ()

    def __post_init__(self):
        if any(n not in self.ring for n in self.base.names):
            raise ValueError("V must contain the coordinates of U")
        if len(self.section) % 2:
            raise ValueError("the bundle must have even rank")
        object.__setattr__(self, "section", tuple(self.ring.coerce(x) for x in self.section))
        object.__setattr__(self, "potential", self.base.coerce(self.potential))
        object.__setattr__(self, "var_weights", _as_fraction_map(self.var_weights))
        r = len(self.section) // 2
        lw = tuple(Fraction(a) for a in self.lam_weights) if self.lam_weights else self._derive_lam_weights(r)
        if len(lw) != r:
            raise ValueError("one weight per isotropic basis vector")
        object.__setattr__(self, "lam_weights", lw)
        if quadratic_value(QuadraticSpace(r), list(self.section)) != self.ring.embed(self.potential):
            raise ValueError("q(s, s) differs from the pulled-back potential")
        if self.potential.terms and poly_weight(self.potential, self.var_weights) != 0:
            raise ValueError("potential is not torus-invariant")
        for k, comp in enumerate(self.section):
            if comp.terms and poly_weight(comp, self.var_weights) != self.section_weights[k]:
                raise ValueError(f"section component {k + 1} has the wrong weight")

    def _derive_lam_weights(self, r: int):
        out = []
        for i in range(r):
            lo, hi = self.section[i], self.section[r + i]
            if lo.terms:
                out.append(-poly_weight(lo, self.var_weights))
            elif hi.terms:
                out.append(poly_weight(hi, self.var_weights))
            else:
                out.append(Fraction(0))
        return tuple(out)

    @classmethod
    def build(cls, base_vars: Sequence[str], extra_vars: Sequence[str], potential: str, section: Sequence[str],
              var_weights: Mapping | None = None, lam_weights: Sequence | None = None) -> "CutoutModel":
        base = Ring(base_vars)
        ring = Ring(list(base_vars) + list(extra_vars))
        return cls(base, ring, base.parse(potential) if isinstance(potential, str) else potential,
                   tuple(ring.parse(s) if isinstance(s, str) else s for s in section),
                   dict(var_weights or {}), tuple(lam_weights or ()))

    @property
    def rank(self) -> int:
        return len(self.section) // 2

    @property
    def extra_vars(self) -> tuple[str, ...]:
        return tuple(n for n in self.ring.names if n not in self.base)

    @property
    def section_weights(self) -> tuple:
        a = self.lam_weights
        return tuple(-x for x in a) + tuple(a)

    @property
    def zero_locus(self) -> Ideal:
        return Ideal(self.ring, self.section)

    def half_twist(self) -> int:
        """``w``-exponent of ``sqrt(det T*_V) * sqrt(det Lambda)``."""
        tv = sum((self.var_weights.get(n, Fraction(0)) for n in self.ring.names), Fraction(0))
        return _wexp((tv + sum(self.lam_weights, Fraction(0))) / 2)

    def fixed(self) -> "CutoutModel":
        """The torus-fixed model: moving coordinates and moving bundle directions dropped."""
        moving = [n for n in self.ring.names if self.var_weights.get(n, 0) != 0]
        keep_b = [n for n in self.base.names if n not in moving]
        keep_v = [n for n in self.ring.names if n not in moving]
        b2, v2 = Ring(keep_b), Ring(keep_v)
        kill_v = {n: v2.zero() for n in moving}
        kill_b = {n: b2.zero() for n in moving if n in self.base}
        from .algebra import substitute
        f2 = substitute(self.potential, kill_b, b2) if kill_b else b2.embed(self.potential)
        r = self.rank
        fixed_dirs = [i for i in range(r) if self.lam_weights[i] == 0]
        sec = [substitute(self.section[i], kill_v, v2) for i in fixed_dirs]
        sec += [substitute(self.section[r + i], kill_v, v2) for i in fixed_dirs]
        return CutoutModel(b2, v2, f2, tuple(sec), {n: self.var_weights.get(n, 0) for n in keep_v},
                           tuple(self.lam_weights[i] for i in fixed_dirs))


@dataclass(frozen=True, eq=False)
class NormalFormData:
    """``{T -> E -> T*}`` on ``L`` with ``T = T_{V/U}``: weights and the map ``a = ds``."""

    tangent_weights: tuple  # vector weights of the V/U tangent directions
    lam_weights: tuple
    a: Matrix  # 2r x k Jacobian of s along the V/U directions
    gram: Matrix  # matrix of the quadratic form on E
    ideal: Ideal  # ideal of L in V

    @classmethod
    def from_model(cls, M: CutoutModel) -> "NormalFormData":
        ring, r, extra = M.ring, M.rank, M.extra_vars
        a = Matrix(ring, [[_derivative(s, v) for v in extra] for s in M.section], len(extra))
        half = ring.const(Fraction(1, 2))
        g = [[ring.zero()] * (2 * r) for _ in range(2 * r)]
        for i in range(r):
            g[i][r + i] = g[r + i][i] = half
        return cls(tuple(-M.var_weights.get(v, Fraction(0)) for v in extra), M.lam_weights, a,
                   Matrix(ring, g, 2 * r), M.zero_locus)

    def check(self) -> bool:
        """``a* a`` is symmetric and vanishes on ``L``."""
        comp = self.a.transpose() @ self.gram @ self.a
        if comp != comp.transpose():
            return False
        gb = self.ideal.groebner()
        return all(gb.contains(x) for _, _, x in comp.entries())

    def moving_tangent(self) -> list:
        return [b for b in self.tangent_weights if b != 0]

    def moving_lam(self) -> list:
        return [a for a in self.lam_weights if a != 0]

    def sqrt_euler_moving(self) -> KClass:
        """``e(T^mov) sqrt(det T^mov) / sqrt(e)(E^mov)``."""
        tm = self.moving_tangent()
        det = KClass.monomial(_wexp(sum((Fraction(b) for b in tm), Fraction(0)) / 2))
        return euler_T(tm) * det / sqrt_euler_T(self.moving_lam())


def _derivative(p: Poly, name: str) -> Poly:
    k = p.ring.index(name)
    terms = {}
    for e, c in p.terms.items():
        if e[k]:
            e2 = e[:k] + (e[k] - 1,) + e[k + 1:]
            terms[e2] = c * e[k]
    return Poly(p.ring, terms)


# --------------------------------------------------------------------------
# Lagrangian classes


def _cone_names(M: CutoutModel) -> list[str]:
    taken = set(M.ring.names)
    out = []
    for k in range(len(M.section)):
        name = f"T{k + 1}"
        while name in taken:
            name += "_"
        out.append(name)
    return out


def _svir_class(fact: Factorisation, fact_w, cone_vars, M: CutoutModel, var_w, support: str) -> KClass:
    """Cohomology of ``fact (x) S^vir`` on the cone, with both half-twists."""
    ring = fact.ring
    T = [ring.var(t) for t in cone_vars]
    svir = spinor_factorisation(QuadraticSpace(M.rank), T, IMAG, ring)
    svir = svir.with_relations(fact.relations)
    X = tensor(fact, svir)
    xw = tensor_weights(fact_w, spinor_weights(M.lam_weights))
    H = periodic_cohomology(X, var_w, xw, support)
    return H.euler * KClass.monomial(M.half_twist())


def lagrangian_class(M: CutoutModel, F: Factorisation, basis_weights=None) -> KClass:
    """``S^vir_E (x) sp(sqrt(det T*_V) (x) p^* F)`` pushed to a K-class."""
    from .specialise import sp_object
    if F.ring != M.base:
        raise ValueError("F must live on the base of the cutout model")
    if not validate(F):
        raise ValueError("F is not a valid factorisation")
    var_w = dict(M.var_weights)
    fw = basis_weights if basis_weights is not None else infer_basis_weights(F, var_w)
    if not check_basis_weights(F, var_w, *fw):
        raise ValueError("basis weights do not make F equivariant")
    pF = F.to_ring(M.ring)
    names = _cone_names(M)
    R = rees_presentation(M.zero_locus, M.section, names)
    sp = sp_object(pF, R)
    chart = sp.closure.chart
    frame_w = tuple(fw[0]) + tuple(fw[1])
    spw = (tuple(frame_w[r] for r in chart.s_plus), tuple(frame_w[r] for r in chart.s_minus))
    for name, w in zip(names, M.section_weights):
        var_w[name] = w
    if not check_basis_weights(sp.fact, var_w, *spw):
        raise AssertionError("specialised factorisation lost equivariance")
    return _svir_class(sp.fact, spw, names, M, var_w, "L")


def virtual_structure_sheaf(M: CutoutModel) -> KClass:
    """The twisted Clifford factorisation on the cone ``C_{L/V}``, computed directly."""
    if M.potential.terms:
        raise ValueError("needs a cutout of the zero potential")
    names = _cone_names(M)
    R = rees_presentation(M.zero_locus, M.section, names)
    cone = central_fibre(R)
    ring, ideal, _ = simplify_quotient(cone.ring, cone.ideal, list(M.ring.names))
    O = unit_factorisation(ring, ideal if not ideal.is_zero() else None)
    var_w = dict(M.var_weights)
    for name, w in zip(names, M.section_weights):
        var_w[name] = w
    return _svir_class(O, ((Fraction(0),), ()), names, M, var_w, "L")


def stabilise(M: CutoutModel, name: str = "k", weight=0) -> CutoutModel:
    """Add a summand ``{K -> K (+) K* -> K*}``: a new coordinate ``k`` cut out by ``lam_K``."""
    ring = M.ring.extend([name])
    k = ring.var(name)
    r = M.rank
    lo = [ring.embed(x) for x in M.section[:r]] + [k]
    hi = [ring.embed(x) for x in M.section[r:]] + [ring.zero()]
    vw = dict(M.var_weights)
    vw[name] = Fraction(weight)
    return CutoutModel(M.base, ring, M.potential, tuple(lo + hi), vw, tuple(M.lam_weights) + (-Fraction(weight),))


# --------------------------------------------------------------------------
# Comparison checks


@dataclass(frozen=True)
class ComparisonReport:
    name: str
    lhs: KClass
    rhs: KClass

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs

    def __bool__(self):
        return self.ok

    def __str__(self):
        return f"{self.name}: {'pass' if self.ok else 'FAIL'}\n  lhs = {self.lhs}\n  rhs = {self.rhs}"


def knoerrer_comparison_check(M: CutoutModel, Q, F: Factorisation, basis_weights=None) -> ComparisonReport:
    """``L(M, F)`` against ``L(M', phi^* F (x) K^vir[m])`` on the cutout over ``tot Q``."""
    from .knoerrer import kvir, kvir_weights
    m = Q.m
    u, v = list(Q.u_names), list(Q.v_names)
    clash = set(u + v) & set(M.ring.names)
    if clash:
        raise ValueError(f"bundle coordinates {sorted(clash)} clash with the model")
    base2 = Ring(list(M.base.names) + u + v)
    ring2 = Ring(list(M.base.names) + u + v + list(M.extra_vars))
    r = M.rank
    U = [ring2.var(x) for x in u]
    V = [ring2.var(x) for x in v]
    sec = [ring2.embed(x) for x in M.section[:r]] + U + [ring2.embed(x) for x in M.section[r:]] + V
    qq = sum((base2.var(a) * base2.var(b) for a, b in zip(u, v)), base2.zero())
    vw = dict(M.var_weights)
    for x, a in zip(u, Q.weights):
        vw[x] = -Fraction(a)
    for x, a in zip(v, Q.weights):
        vw[x] = Fraction(a)
    M2 = CutoutModel(base2, ring2, base2.embed(M.potential) + qq, tuple(sec), vw,
                     tuple(M.lam_weights) + tuple(Fraction(a) for a in Q.weights))
    fw = basis_weights if basis_weights is not None else infer_basis_weights(F, M.var_weights)
    K = kvir(Q, base2)
    kw = kvir_weights(Q)
    for _ in range(m):
        K, kw = shift(K), shift_weights(kw)
    F2 = tensor(F.to_ring(base2), K)
    lhs = lagrangian_class(M, F, fw)
    rhs = lagrangian_class(M2, F2, tensor_weights(fw, kw))
    return ComparisonReport(f"knoerrer m={m}", lhs, rhs)


def localisation_check(M: CutoutModel, F: Factorisation, N: NormalFormData | None = None,
                       basis_weights=None) -> ComparisonReport:
    """``L(M, F)`` against the fixed-locus class divided by the moving Euler classes."""
    if N is None:
        N = NormalFormData.from_model(M)
    if not N.check():
        raise ValueError("normal form data is inconsistent")
    fw = basis_weights if basis_weights is not None else infer_basis_weights(F, M.var_weights)
    lhs = lagrangian_class(M, F, fw)
    MT = M.fixed()
    from .algebra import substitute
    kill = {n: MT.base.zero() for n in M.base.names if n not in MT.base}
    FT = Factorisation(MT.base, MT.potential,
                       F.d_plus.map(lambda p: substitute(p, kill, MT.base), MT.base),
                       F.d_minus.map(lambda p: substitute(p, kill, MT.base), MT.base))
    fixed_class = lagrangian_class(MT, FT, fw)
    normal = [-M.var_weights.get(n, Fraction(0)) for n in M.base.names if n not in MT.base]
    rhs = fixed_class / (euler_T(normal) * N.sqrt_euler_moving())
    return ComparisonReport("localisation", lhs, rhs)
