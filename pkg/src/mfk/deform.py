"""Affine deformation to the normal cone via extended Rees presentations.

For ``I = (g_1, ..., g_k)`` in ``Q(i)[x]`` the deformation is cut out in
``Q(i)[lam, T, x]`` by ``J = (lam*T_i - g_i) : lam^oo``.  Its fibre over
``lam = 0`` is the normal cone of ``Z(I)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import (
    GREVLEX, Certificate, Ideal, Poly, Ring, eliminate, saturate,
    square_membership_certificate, substitute,
)

__all__ = [
    "ReesPresentation", "ConePresentation", "LiftedPotential",
    "rees_presentation", "central_fibre", "lift_potential", "simplify_quotient",
]

LAMBDA = "lam"


@dataclass(frozen=True, eq=False)
class ReesPresentation:
    base_ring: Ring
    ideal: Ideal  # I in the base ring
    cone_vars: tuple[str, ...]
    ring: Ring  # lam, cone vars, base vars
    J: Ideal
    generators: tuple = ()  # one per cone variable; zero entries allowed

    def __post_init__(self):
        if not self.generators:
            object.__setattr__(self, "generators", tuple(self.ideal.generators))

    @property
    def lam(self) -> Poly:
        return self.ring.var(LAMBDA)

    @property
    def cone_ring(self) -> Ring:
        return Ring(self.cone_vars + self.base_ring.names)

    def check(self) -> list[str]:
        """Verify saturation and the lam = 1 fibre."""
        errs = []
        if not saturate(self.J, self.lam).same_as(self.J):
            errs.append("J is not lam-saturated")
        at_one = self.J + [self.lam - 1]
        if not eliminate(at_one, (LAMBDA,) + self.cone_vars).is_zero():
            errs.append("lam = 1 fibre is not the base")
        return errs


@dataclass(frozen=True, eq=False)
class ConePresentation:
    ring: Ring  # cone vars then base vars
    ideal: Ideal

    def __str__(self):
        return f"cone in {self.ring} cut out by {Ideal(self.ring, self.ideal.groebner().basis)}"


@dataclass(frozen=True, eq=False)
class LiftedPotential:
    q: Poly  # in the cone ring
    certificate: Certificate
    on_cone: Poly  # normal form of q modulo the cone ideal


def _cone_names(base: Ring, gens) -> list[str]:
    taken = set(base.names)
    names = []
    for k, g in enumerate(gens):
        stem = None
        if len(g.terms) == 1 and g.total_degree() == 1 and next(iter(g.terms.values())) == 1:
            v = next(iter(g.variables()))
            stem = v.upper() if v.upper() != v else f"{v}T"
        if stem is None or stem in taken or not stem.isidentifier() or stem == "I":
            stem = f"T{k + 1}"
        while stem in taken:
            stem += "_"
        taken.add(stem)
        names.append(stem)
    return names


def rees_presentation(I: Ideal, generators=None, cone_names=None) -> ReesPresentation:
    """The saturated Rees ideal of the deformation to the normal cone of ``Z(I)``.

    ``generators`` may list the components of a section, zeros included; each
    gets its own cone coordinate (named by ``cone_names`` when given).
    """
    base = I.ring
    gens = list(I.generators) if generators is None else [base.coerce(g) for g in generators]
    if generators is not None and not Ideal(base, gens).same_as(I):
        raise ValueError("generators do not generate the ideal")
    if I.is_unit():
        raise ValueError("the ideal must be proper")
    if LAMBDA in base:
        raise ValueError(f"base ring may not use the variable name {LAMBDA!r}")
    cone = list(cone_names) if cone_names is not None else _cone_names(base, gens)
    if len(cone) != len(gens) or set(cone) & set(base.names):
        raise ValueError("need one fresh cone name per generator")
    ring = Ring([LAMBDA] + cone + list(base.names))
    lam = ring.var(LAMBDA)
    pre = Ideal(ring, [lam * ring.var(t) - ring.embed(g) for t, g in zip(cone, gens)])
    J = saturate(pre, lam)
    return ReesPresentation(base, I, tuple(cone), ring, J, tuple(gens))


def central_fibre(R: ReesPresentation) -> ConePresentation:
    """``(J + (lam))`` intersected with ``Q(i)[T, x]``."""
    IC = eliminate(R.J + [R.lam], [LAMBDA])
    return ConePresentation(IC.ring, IC)


def lift_potential(f: Poly, R: ReesPresentation) -> LiftedPotential:
    """``q = sum c_ij T_i T_j`` with ``lam^2 q = f`` modulo ``J``."""
    f = R.base_ring.coerce(f)
    live = [k for k, g in enumerate(R.generators) if g.terms]
    cert = square_membership_certificate(f, Ideal(R.base_ring, [R.generators[k] for k in live]))
    if cert is None:
        raise ValueError(f"{f} does not lie in the square of {R.ideal}")
    cr = R.cone_ring
    T = [cr.var(R.cone_vars[k]) for k in live]
    q = cr.zero()
    for i, row in enumerate(cert.cofactors):
        for j, c in enumerate(row):
            if c.terms:
                q = q + cr.embed(c) * T[i] * T[j]
    lam = R.lam
    if not R.J.groebner().contains(lam * lam * R.ring.embed(q) - R.ring.embed(f)):
        raise AssertionError("lifted potential fails lam^2 q = f modulo J")
    cone = central_fibre(R)
    return LiftedPotential(q, cert, cone.ideal.groebner().normal_form(q))


def simplify_quotient(ring: Ring, ideal: Ideal, eliminable: list[str]):
    """Remove variables that the ideal expresses polynomially in the others.

    Returns ``(new_ring, new_ideal, images)`` where ``images`` maps every old
    variable to a polynomial in ``new_ring``; the quotient rings are isomorphic.
    """
    images: dict[str, Poly] = {}
    cur_ring, cur = ring, ideal
    progress = True
    while progress:
        progress = False
        gb = cur.groebner(GREVLEX)
        for v in eliminable:
            if v not in cur_ring:
                continue
            for g in gb.basis:
                hits = [(e, c) for e, c in g.terms.items() if e[cur_ring.index(v)]]
                if len(hits) != 1:
                    continue
                e, c = hits[0]
                if sum(e) != 1:
                    continue
                rest = g - cur_ring.monomial(e, c)
                value = rest * (-c.inverse())
                new_ring = Ring([n for n in cur_ring.names if n != v])
                value = new_ring.embed(value)
                step = {v: value}
                images = {k: substitute(p, step, new_ring) for k, p in images.items()}
                images[v] = value
                cur = Ideal(new_ring, [substitute(h, step, new_ring) for h in gb.basis if h != g])
                cur_ring = new_ring
                progress = True
                break
            if progress:
                break
    for n in ring.names:
        if n not in images:
            images[n] = cur_ring.var(n)
    return cur_ring, Ideal(cur_ring, cur.groebner().basis), images
