"""Exact polynomial arithmetic over the Gaussian rationals and a Gröbner engine.

Polynomials are sparse maps from exponent tuples to :class:`Scalar`.  The
Gröbner routines work on plain dictionaries internally and wrap results back
into :class:`Poly` objects.  Module Gröbner bases are supported by prefixing
exponent vectors with one-hot component coordinates (see ``n_comp``).
"""

from __future__ import annotations

import ast
import contextlib
import contextvars
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

__all__ = [
    "Scalar", "Ring", "Poly", "TermOrder", "LEX", "GREVLEX", "block_order",
    "Matrix", "Ideal", "GroebnerBasis", "Certificate", "ResourceBudgetExceeded",
    "budget_scope", "reduce", "buchberger", "saturate", "eliminate",
    "membership_certificate", "square_membership_certificate", "substitute",
    "linear_solve", "nullspace", "rank", "ModuleBasis", "module_groebner", "module_kernel",
]

_Q0 = mpq(0)
_Q1 = mpq(1)


# --------------------------------------------------------------------------
# Scalars


class Scalar:
    """An element ``re + im*i`` of the Gaussian rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _to_mpq(re)
        self.im = _to_mpq(im)

    @staticmethod
    def of(value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, complex):
            raise TypeError("floating point complex values are not exact")
        return Scalar(value)

    def __add__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar.of(other)
        return _mk(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar.of(other)
        return _mk(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return Scalar.of(other) - self

    def __neg__(self):
        return _mk(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar.of(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not d:
            return _mk(a * c, b * c) if b else _mk(a * c, _Q0)
        if not b:
            return _mk(a * c, a * d)
        return _mk(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDivisionError("inverse of zero scalar")
            return _mk(1 / a, _Q0)
        n = a * a + b * b
        return _mk(a / n, -b / n)

    def __truediv__(self, other):
        return self * Scalar.of(other).inverse()

    def __rtruediv__(self, other):
        return Scalar.of(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return _mk(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or type(other) is type(_Q0):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash(self.re) if not self.im else hash((self.re, self.im))

    def is_rational(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return _scalar_str(self)


def _to_mpq(v):
    if type(v) is type(_Q0):
        return v
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    if isinstance(v, float):
        raise TypeError("floating point values are not exact")
    return mpq(v)


def _mk(re, im) -> Scalar:
    s = object.__new__(Scalar)
    s.re = re
    s.im = im
    return s


ZERO = _mk(_Q0, _Q0)
ONE = _mk(_Q1, _Q0)
IMAG = _mk(_Q0, _Q1)


def _rat_str(q) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _scalar_str(s: Scalar) -> str:
    if not s.im:
        return _rat_str(s.re)
    if s.im == 1:
        im = "I"
    elif s.im == -1:
        im = "-I"
    else:
        im = f"{_rat_str(s.im)}*I"
    if not s.re:
        return im
    sign = "" if im.startswith("-") else "+"
    return f"({_rat_str(s.re)}{sign}{im})"


# --------------------------------------------------------------------------
# Term orders


@dataclass(frozen=True)
class TermOrder:
    """A monomial order: ``lex``, ``grevlex`` or ``block`` elimination.

    ``block`` compares the first ``front`` variables by grevlex, breaking ties
    by grevlex on the remaining variables.
    """

    kind: str
    front: int = 0

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown term order {self.kind!r}")

    @property
    def key(self):
        return _order_key(self.kind, self.front)

    def __str__(self):
        return f"block({self.front})" if self.kind == "block" else self.kind


@lru_cache(maxsize=None)
def _order_key(kind: str, front: int):
    if kind == "lex":
        return _lex_key
    if kind == "grevlex":
        return _grevlex_key

    def key(e, k=front):
        a, b = e[:k], e[k:]
        return (sum(a), tuple(-x for x in reversed(a)), sum(b), tuple(-x for x in reversed(b)))

    return key


def _lex_key(e):
    return e


def _grevlex_key(e):
    return (sum(e), tuple(-x for x in reversed(e)))


LEX = TermOrder("lex")
GREVLEX = TermOrder("grevlex")


def block_order(front: int) -> TermOrder:
    return TermOrder("block", front)


# --------------------------------------------------------------------------
# Rings and polynomials


class Ring:
    """A polynomial ring ``Q(i)[names]``.  Rings compare by variable names."""

    __slots__ = ("names", "_index", "_zero_exp")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for n in names:
            if not n.isidentifier() or n == "I":
                raise ValueError(f"invalid variable name {n!r}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}
        self._zero_exp = (0,) * len(names)

    @property
    def ring_id(self) -> tuple[str, ...]:
        return self.names

    @property
    def nvars(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Ring({list(self.names)})"

    def __str__(self):
        return "Q(i)[" + ",".join(self.names) + "]"

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {self._zero_exp: ONE})

    def const(self, c) -> "Poly":
        c = Scalar.of(c)
        return Poly(self, {self._zero_exp: c} if c else {})

    def var(self, name: str) -> "Poly":
        e = [0] * len(self.names)
        e[self._index[name]] = 1
        return Poly(self, {tuple(e): ONE})

    def gens(self) -> tuple["Poly", ...]:
        return tuple(self.var(n) for n in self.names)

    def monomial(self, exp: Sequence[int], coeff=ONE) -> "Poly":
        c = Scalar.of(coeff)
        return Poly(self, {tuple(exp): c} if c else {})

    def extend(self, names: Iterable[str], front: bool = False) -> "Ring":
        new = [n for n in names if n not in self._index]
        return Ring(new + list(self.names) if front else list(self.names) + new)

    def fresh(self, stem: str) -> str:
        name, k = stem, 0
        while name in self._index:
            k += 1
            name = f"{stem}{k}"
        return name

    def coerce(self, value) -> "Poly":
        if isinstance(value, Poly):
            return value if value.ring == self else self.embed(value)
        if isinstance(value, str):
            return self.parse(value)
        return self.const(value)

    def embed(self, p: "Poly") -> "Poly":
        """Map ``p`` into this ring by variable name."""
        if p.ring == self:
            return p
        idx = [self._index.get(n) for n in p.ring.names]
        n = len(self.names)
        out = {}
        for e, c in p.terms.items():
            ne = [0] * n
            for pos, (i, k) in enumerate(zip(idx, e)):
                if k:
                    if i is None:
                        raise ValueError(f"variable {p.ring.names[pos]} of {p.ring} not in {self}")
                    ne[i] = k
            out[tuple(ne)] = c
        return Poly(self, out)

    def parse(self, text: str) -> "Poly":
        """Parse an expression using ``+ - * / ^ **``, parentheses and ``I``."""
        try:
            tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ValueError(f"cannot parse polynomial {text!r}: {exc.msg}") from None
        return _eval_ast(tree.body, self, text)


def _eval_ast(node, ring: Ring, text: str) -> "Poly":
    if isinstance(node, ast.BinOp):
        left = _eval_ast(node.left, ring, text)
        right = _eval_ast(node.right, ring, text)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if not right.is_constant() or right.is_zero():
                raise ValueError(f"division by a non-constant in {text!r}")
            return left * right.constant_coeff().inverse()
        if isinstance(node.op, ast.Pow):
            if not right.is_constant() or not right.constant_coeff().is_rational():
                raise ValueError(f"non-integer exponent in {text!r}")
            k = right.constant_coeff().re
            if k.denominator != 1 or k < 0:
                raise ValueError(f"non-integer exponent in {text!r}")
            return left ** int(k)
    elif isinstance(node, ast.UnaryOp):
        val = _eval_ast(node.operand, ring, text)
        if isinstance(node.op, ast.USub):
            return -val
        if isinstance(node.op, ast.UAdd):
            return val
    elif isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return ring.const(node.value)
    elif isinstance(node, ast.Name):
        if node.id == "I":
            return ring.const(IMAG)
        if node.id not in ring:
            raise ValueError(f"unknown variable {node.id!r} in {text!r} for ring {ring}")
        return ring.var(node.id)
    raise ValueError(f"unsupported syntax in polynomial {text!r}")


_add_exp = operator.add


def _eadd(a, b):
    return tuple(map(_add_exp, a, b))


def _esub(a, b):
    return tuple(map(operator.sub, a, b))


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _elcm(a, b):
    return tuple(map(max, a, b))


class Poly:
    """A polynomial: a ring together with a map exponent tuple -> Scalar."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping):
        self.ring = ring
        self.terms = terms

    # construction helpers
    def _new(self, terms) -> "Poly":
        return Poly(self.ring, terms)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    @property
    def ring_id(self):
        return self.ring.names

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring._zero_exp in self.terms)

    def constant_coeff(self) -> Scalar:
        return self.terms.get(self.ring._zero_exp, ZERO)

    def coeff(self, exp) -> Scalar:
        return self.terms.get(tuple(exp), ZERO)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            for n, k in zip(self.ring.names, e):
                if k:
                    used.add(n)
        return used

    def leading(self, order: TermOrder = GREVLEX):
        """Leading (exponent, coefficient) pair."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=order.key)
        return e, self.terms[e]

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Scalar.of(other)
            if not c:
                return self._new({})
            return self._new({e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple(map(_add_exp, e1, e2))
                v = get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return self._new({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out, base = self.ring.one(), self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def scale(self, c) -> "Poly":
        return self * Scalar.of(c)

    def monic(self, order: TermOrder = GREVLEX) -> "Poly":
        if not self.terms:
            return self
        return self * self.leading(order)[1].inverse()

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction, Scalar)):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.names, frozenset(self.terms.items())))

    def sorted_terms(self, order: TermOrder = GREVLEX):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(self.ring.names, e) if k)
            if not mono:
                t = _scalar_str(c)
            elif c == 1:
                t = mono
            elif c == -1:
                t = "-" + mono
            else:
                t = f"{_scalar_str(c)}*{mono}"
            if parts:
                parts.append(t if t.startswith("-") else "+" + t)
            else:
                parts.append(t)
        return "".join(parts)

    def __repr__(self):
        return f"Poly({self})"


# --------------------------------------------------------------------------
# Matrices of polynomials


class Matrix:
    """An immutable matrix of polynomials with explicit shape (rows may be 0)."""

    __slots__ = ("ring", "nrows", "ncols", "rows")

    def __init__(self, ring: Ring, rows: Sequence[Sequence], ncols: int | None = None):
        self.ring = ring
        self.rows = tuple(tuple(ring.coerce(x) for x in r) for r in rows)
        self.nrows = len(self.rows)
        if ncols is None:
            if not self.rows:
                raise ValueError("ncols required for a matrix without rows")
            ncols = len(self.rows[0])
        self.ncols = ncols
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix rows")

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @classmethod
    def zero(cls, ring: Ring, nrows: int, ncols: int) -> "Matrix":
        z = ring.zero()
        return cls(ring, [[z] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, ring: Ring, n: int, scale=None) -> "Matrix":
        d = ring.one() if scale is None else ring.coerce(scale)
        z = ring.zero()
        return cls(ring, [[d if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def block(cls, ring: Ring, grid: Sequence[Sequence["Matrix"]]) -> "Matrix":
        """Assemble a block matrix; every block row must share heights."""
        rows = []
        ncols = sum(b.ncols for b in grid[0]) if grid else 0
        for brow in grid:
            h = brow[0].nrows
            if any(b.nrows != h for b in brow) or sum(b.ncols for b in brow) != ncols:
                raise ValueError("inconsistent block shapes")
            for i in range(h):
                rows.append([x for b in brow for x in b.rows[i]])
        return cls(ring, rows, ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        for i, r in enumerate(self.rows):
            for j, x in enumerate(r):
                yield i, j, x

    def map(self, fn, ring: Ring | None = None) -> "Matrix":
        """Apply ``fn`` entrywise; ``ring`` names the target ring when it changes."""
        return Matrix(ring or self.ring, [[fn(x) for x in r] for r in self.rows], self.ncols)

    def to_ring(self, ring: Ring) -> "Matrix":
        return Matrix(ring, [[ring.embed(x) for x in r] for r in self.rows], self.ncols)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other, same_shape=True)
        return Matrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other, same_shape=True)
        return Matrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> "Matrix":
        return self.map(lambda x: -x)

    def scale(self, p) -> "Matrix":
        p = self.ring.coerce(p)
        return self.map(lambda x: x * p)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        z = self.ring.zero()
        cols = list(zip(*other.rows)) if other.nrows else [() for _ in range(other.ncols)]
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = z
                for a, b in zip(r, c):
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Matrix(self.ring, out, other.ncols)

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, [list(c) for c in zip(*self.rows)] if self.nrows else [[] for _ in range(self.ncols)], self.nrows)

    def kron(self, other: "Matrix") -> "Matrix":
        self._check(other)
        rows = []
        for r in self.rows:
            for s in other.rows:
                rows.append([a * b for a in r for b in s])
        return Matrix(self.ring, rows, self.ncols * other.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.ring, [[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def is_zero(self) -> bool:
        return all(not x.terms for r in self.rows for x in r)

    def det(self) -> Poly:
        """Determinant by cofactor expansion (small matrices only)."""
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        return _det(self.rows, self.ring)

    def _check(self, other, same_shape=False):
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        if same_shape and self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.ring == other.ring and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.ring, self.shape, self.rows))

    def __str__(self):
        if not self.nrows:
            return f"[](0x{self.ncols})"
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "]"

    __repr__ = __str__


def _det(rows, ring: Ring) -> Poly:
    n = len(rows)
    if n == 0:
        return ring.one()
    if n == 1:
        return rows[0][0]
    acc = ring.zero()
    for j, a in enumerate(rows[0]):
        if a.terms:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            term = a * _det(minor, ring)
            acc = acc - term if j % 2 else acc + term
    return acc


# --------------------------------------------------------------------------
# Budgets


class ResourceBudgetExceeded(RuntimeError):
    """Raised when a Gröbner computation exceeds its operation budget."""


@dataclass(frozen=True)
class Budget:
    max_pairs: int = 200_000
    max_degree: int = 200


_BUDGET: contextvars.ContextVar[Budget] = contextvars.ContextVar("mfk_budget", default=Budget())


@contextlib.contextmanager
def budget_scope(max_pairs: int | None = None, max_degree: int | None = None):
    """Temporarily tighten or relax the Gröbner budget for the current context."""
    cur = _BUDGET.get()
    token = _BUDGET.set(Budget(max_pairs or cur.max_pairs, max_degree or cur.max_degree))
    try:
        yield
    finally:
        _BUDGET.reset(token)


# --------------------------------------------------------------------------
# Gröbner core on dictionaries


def _normal_form(p: dict, reducers, key, quotients=None, full=True) -> dict:
    """Reduce ``p`` by monic ``reducers`` [(lead, terms)], recording quotients."""
    p = dict(p)
    rem = {}
    while p:
        m = max(p, key=key)
        c = p[m]
        for i, (le, g) in enumerate(reducers):
            if _divides(le, m):
                q = tuple(map(operator.sub, m, le))
                for e, gc in g.items():
                    ne = tuple(map(_add_exp, e, q))
                    v = p.get(ne)
                    v = -(c * gc) if v is None else v - c * gc
                    if v:
                        p[ne] = v
                    else:
                        p.pop(ne, None)
                if quotients is not None:
                    qd = quotients.setdefault(i, {})
                    v = qd.get(q, ZERO) + c
                    if v:
                        qd[q] = v
                    else:
                        qd.pop(q, None)
                break
        else:
            if not full:
                rem.update(p)
                return rem
            rem[m] = c
            del p[m]
    return rem


def _dmul_term(p: dict, exp, c) -> dict:
    return {tuple(map(_add_exp, e, exp)): v * c for e, v in p.items()}


def _dadd(a: dict, b: dict, sign=ONE) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        v = c * sign if v is None else v + c * sign
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _dmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(map(_add_exp, e1, e2))
            v = out.get(e)
            out[e] = c1 * c2 if v is None else v + c1 * c2
    return {e: c for e, c in out.items() if c}


def _comb(quot: dict, reps: list, nout: int) -> list:
    """Sum over i of quot[i] * reps[i] (each rep a list of dicts)."""
    out = [dict() for _ in range(nout)]
    for i, q in quot.items():
        for k in range(nout):
            if reps[i][k]:
                out[k] = _dadd(out[k], _dmul(q, reps[i][k]))
    return out


def _groebner(gens: list[dict], key, nvars: int, n_comp: int = 0, track: bool = False):
    """Reduced Gröbner basis of dictionaries.

    Returns ``(basis, reps)`` with basis a list of monic dicts sorted by
    decreasing lead; ``reps[k]`` expresses ``basis[k]`` over ``gens`` when
    ``track`` is set.
    """
    budget = _BUDGET.get()
    ngen = len(gens)
    polys: list[dict] = []
    leads: list[tuple] = []
    sugar: list[int] = []
    reps: list[list] = []
    active: list[int] = []
    pairs: list[tuple[int, int]] = []

    def deg(e):
        return sum(e[n_comp:]) if n_comp else sum(e)

    def comp(e):
        for i in range(n_comp):
            if e[i]:
                return i
        return -1

    def add(h: dict, s: int, rep):
        le = max(h, key=key)
        lc = h[le]
        if lc != ONE:
            inv = lc.inverse()
            h = {e: c * inv for e, c in h.items()}
            if rep is not None:
                rep = [{e: c * inv for e, c in r.items()} for r in rep]
        idx = len(polys)
        polys.append(h)
        leads.append(le)
        sugar.append(s)
        reps.append(rep)
        _update(idx)

    def coprime(i, j):
        a, b = leads[i], leads[j]
        return all(not (x and y) for x, y in zip(a, b))

    def _update(h):
        lh = leads[h]
        cand = []
        for g in active:
            if n_comp and comp(leads[g]) != comp(lh):
                continue
            cand.append((g, _elcm(leads[g], lh)))
        kept = []
        for idx, (g, l) in enumerate(cand):
            if coprime(g, h):
                kept.append((g, l))
                continue
            redundant = False
            for jdx, (g2, l2) in enumerate(cand):
                if jdx != idx and _divides(l2, l) and (l2 != l or jdx < idx):
                    redundant = True
                    break
            if not redundant:
                kept.append((g, l))
        new_pairs = [(g, h) for g, l in kept if not coprime(g, h)]
        old = []
        for (a, b) in pairs:
            l = _elcm(leads[a], leads[b])
            if _divides(lh, l) and _elcm(leads[a], lh) != l and _elcm(leads[b], lh) != l:
                continue
            old.append((a, b))
        pairs[:] = old + new_pairs
        active[:] = [g for g in active if not _divides(lh, leads[g])] + [h]

    start = []
    for k, g in enumerate(gens):
        if g:
            rep = None
            if track:
                rep = [dict() for _ in range(ngen)]
                rep[k] = {(0,) * nvars: ONE}
            start.append((g, rep))
    # feed generators in increasing order so that small elements reduce large ones
    start.sort(key=lambda t: key(max(t[0], key=key)))
    for g, rep in start:
        reducers = [(leads[i], polys[i]) for i in active]
        quot = {} if track else None
        h = _normal_form(g, reducers, key, quot)
        if h:
            if track:
                rep = [_dadd(r, x, -ONE) for r, x in zip(rep, _comb(quot, [reps[i] for i in active], ngen))]
            add(h, max(deg(e) for e in h), rep)

    processed = 0
    while pairs:
        best = None
        best_k = None
        for t, (a, b) in enumerate(pairs):
            l = _elcm(leads[a], leads[b])
            s = max(sugar[a] + deg(l) - deg(leads[a]), sugar[b] + deg(l) - deg(leads[b]))
            k = (s, key(l))
            if best_k is None or k < best_k:
                best, best_k = t, k
        a, b = pairs.pop(best)
        processed += 1
        if processed > budget.max_pairs:
            raise ResourceBudgetExceeded(f"Gröbner pair budget {budget.max_pairs} exceeded")
        l = _elcm(leads[a], leads[b])
        if deg(l) > budget.max_degree:
            raise ResourceBudgetExceeded(f"Gröbner degree budget {budget.max_degree} exceeded")
        ma = tuple(map(operator.sub, l, leads[a]))
        mb = tuple(map(operator.sub, l, leads[b]))
        sp = _dadd(_dmul_term(polys[a], ma, ONE), _dmul_term(polys[b], mb, ONE), -ONE)
        if not sp:
            continue
        reducers = [(leads[i], polys[i]) for i in active]
        quot = {} if track else None
        h = _normal_form(sp, reducers, key, quot)
        if h:
            rep = None
            if track:
                sa = [_dmul_term(r, ma, ONE) if r else {} for r in reps[a]]
                sb = [_dmul_term(r, mb, ONE) if r else {} for r in reps[b]]
                rep = [_dadd(x, y, -ONE) for x, y in zip(sa, sb)]
                sub = _comb(quot, [reps[i] for i in active], ngen)
                rep = [_dadd(x, y, -ONE) for x, y in zip(rep, sub)]
            add(h, best_k[0], rep)

    # inter-reduction
    final = sorted(active, key=lambda i: key(leads[i]), reverse=True)
    basis, out_reps = [], []
    for pos, i in enumerate(final):
        others = [(leads[j], polys[j]) for j in final if j != i]
        quot = {} if track else None
        tail = dict(polys[i])
        lc = tail.pop(leads[i])
        red = _normal_form(tail, others, key, quot)
        red[leads[i]] = lc
        basis.append(red)
        if track:
            sub = _comb(quot, [reps[j] for j in final if j != i], ngen)
            out_reps.append([_dadd(x, y, -ONE) for x, y in zip(reps[i], sub)])
    return basis, (out_reps if track else None)


# --------------------------------------------------------------------------
# Ideals and Gröbner bases


class Ideal:
    """An ideal of a polynomial ring given by generators."""

    __slots__ = ("ring", "generators", "_gb")

    def __init__(self, ring: Ring, generators: Iterable = ()):
        self.ring = ring
        self.generators = tuple(g for g in (ring.coerce(x) for x in generators) if g.terms)
        self._gb: dict = {}

    @property
    def ring_id(self):
        return self.ring.names

    def groebner(self, order: TermOrder = GREVLEX) -> "GroebnerBasis":
        gb = self._gb.get(order)
        if gb is None:
            gb = buchberger(self, order)
            self._gb[order] = gb
        return gb

    def __contains__(self, f) -> bool:
        return self.groebner().contains(f)

    def is_unit(self) -> bool:
        return self.groebner().is_unit()

    def is_zero(self) -> bool:
        return not self.generators

    def contains_ideal(self, other: "Ideal") -> bool:
        gb = self.groebner()
        return all(gb.contains(g) for g in other.generators)

    def same_as(self, other: "Ideal") -> bool:
        return self.ring == other.ring and self.groebner().basis == other.groebner().basis

    def __add__(self, other) -> "Ideal":
        if isinstance(other, Ideal):
            other = [self.ring.embed(g) for g in other.generators]
        return Ideal(self.ring, list(self.generators) + [self.ring.coerce(g) for g in other])

    def to_ring(self, ring: Ring) -> "Ideal":
        return Ideal(ring, [ring.embed(g) for g in self.generators])

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"

    def __repr__(self):
        return f"Ideal({self.ring}, {self})"


@dataclass(frozen=True, eq=False)
class GroebnerBasis:
    """A reduced Gröbner basis; ``cofactors[k]`` writes basis[k] over source."""

    order: TermOrder
    basis: tuple
    source: Ideal
    cofactors: tuple | None = field(default=None, repr=False)

    @property
    def ring(self) -> Ring:
        return self.source.ring

    def _reducers(self):
        cache = self.__dict__.get("_red")
        if cache is None:
            key = self.order.key
            cache = [(max(g.terms, key=key), g.terms) for g in self.basis]
            object.__setattr__(self, "_red", cache)
        return cache

    def normal_form(self, p: Poly) -> Poly:
        p = self.ring.coerce(p)
        if not p.terms or not self.basis:
            return p
        return Poly(self.ring, _normal_form(p.terms, self._reducers(), self.order.key))

    def contains(self, p) -> bool:
        return not self.normal_form(p).terms

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.basis)

    def leading_monomials(self) -> list[tuple]:
        return [le for le, _ in self._reducers()]

    def __eq__(self, other):
        return isinstance(other, GroebnerBasis) and self.order == other.order and self.basis == other.basis

    def __hash__(self):
        return hash((self.order, self.basis))

    def __str__(self):
        return "{" + ", ".join(str(g) for g in self.basis) + "}"


@dataclass(frozen=True)
class Certificate:
    """``target = sum cofactors[k] * generators[k]`` or, for a square,
    ``target = sum cofactors[i][j] * generators[i] * generators[j]``."""

    cofactors: tuple
    target: Poly
    generators: tuple
    quadratic: bool = False

    def expand(self) -> Poly:
        ring = self.target.ring
        acc = ring.zero()
        if self.quadratic:
            for i, gi in enumerate(self.generators):
                for j, gj in enumerate(self.generators):
                    c = self.cofactors[i][j]
                    if c.terms:
                        acc = acc + c * gi * gj
        else:
            for c, g in zip(self.cofactors, self.generators):
                if c.terms:
                    acc = acc + c * g
        return acc

    def verify(self) -> bool:
        return self.expand() == self.target


def reduce(p: Poly, G: GroebnerBasis) -> tuple[Poly, list[Poly]]:
    """Divide ``p`` by the basis, returning (remainder, cofactors on G.basis)."""
    if p.ring != G.ring:
        raise ValueError(f"ring mismatch: {p.ring} vs {G.ring}")
    quot: dict = {}
    rem = _normal_form(p.terms, G._reducers(), G.order.key, quot) if G.basis else dict(p.terms)
    cof = [Poly(p.ring, quot.get(k, {})) for k in range(len(G.basis))]
    return Poly(p.ring, rem), cof


def buchberger(I: Ideal, order: TermOrder = GREVLEX, track: bool = False) -> GroebnerBasis:
    """Reduced Gröbner basis by Buchberger's algorithm with the sugar strategy."""
    ring = I.ring
    basis, reps = _groebner([g.terms for g in I.generators], order.key, ring.nvars, track=track)
    polys = tuple(Poly(ring, b) for b in basis)
    cof = None
    if track:
        cof = tuple(tuple(Poly(ring, r) for r in rep) for rep in reps)
    return GroebnerBasis(order, polys, I, cof)


def substitute(p: Poly, assignment: Mapping[str, Poly], target: Ring | None = None) -> Poly:
    """Ring homomorphism sending variables to images (unlisted ones to themselves)."""
    if target is None:
        imgs = [v for v in assignment.values() if isinstance(v, Poly)]
        target = imgs[0].ring if imgs else p.ring
    for name in assignment:
        if name not in p.ring:
            raise ValueError(f"{name!r} is not a variable of {p.ring}")
    images = []
    for n in p.ring.names:
        if n in assignment:
            images.append(target.coerce(assignment[n]))
        else:
            if n not in target:
                raise ValueError(f"variable {n!r} has no image in {target}")
            images.append(target.var(n))
    powers: list[dict] = [dict() for _ in images]

    def power(i, k):
        cache = powers[i]
        if k not in cache:
            cache[k] = images[i] ** k
        return cache[k]

    acc = target.zero()
    for e, c in p.terms.items():
        t = target.const(c)
        for i, k in enumerate(e):
            if k:
                t = t * power(i, k)
        acc = acc + t
    return acc


# --------------------------------------------------------------------------
# Submodules of free modules


def _pot_key(ncomp: int):
    """Position over term: lower component index first, then grevlex."""
    def key(e):
        return (e[:ncomp], _grevlex_key(e[ncomp:]))
    return key


def _to_module_dict(vec: Sequence[Poly], ncomp: int) -> dict:
    out = {}
    for k, p in enumerate(vec):
        hot = tuple(1 if i == k else 0 for i in range(ncomp))
        for e, c in p.terms.items():
            out[hot + e] = c
    return out


def _from_module_dict(d: dict, ring: Ring, ncomp: int) -> list[Poly]:
    parts: list[dict] = [dict() for _ in range(ncomp)]
    for e, c in d.items():
        parts[e[:ncomp].index(1)][e[ncomp:]] = c
    return [Poly(ring, t) for t in parts]


@dataclass(frozen=True, eq=False)
class ModuleBasis:
    """Reduced Gröbner basis of a submodule of ``ring^rank`` (position over term)."""

    ring: Ring
    rank: int
    basis: tuple  # tuple of vectors (lists of Poly)
    leads: tuple  # (component, exponent) of each basis vector

    def lead_ideal(self, component: int) -> list[tuple]:
        return [e for c, e in self.leads if c == component]

    def normal_form(self, vec: Sequence[Poly]) -> list[Poly]:
        key = _pot_key(self.rank)
        reducers = [(max(d, key=key), d) for d in (_to_module_dict(b, self.rank) for b in self.basis)]
        red = _normal_form(_to_module_dict(vec, self.rank), reducers, key)
        return _from_module_dict(red, self.ring, self.rank)

    def contains(self, vec: Sequence[Poly]) -> bool:
        return all(not p.terms for p in self.normal_form(vec))


def module_groebner(ring: Ring, rank: int, vectors: Iterable[Sequence[Poly]]) -> ModuleBasis:
    """Gröbner basis of the submodule generated by ``vectors``."""
    key = _pot_key(rank)
    gens = [_to_module_dict([ring.coerce(p) for p in v], rank) for v in vectors]
    basis, _ = _groebner([g for g in gens if g], key, rank + ring.nvars, n_comp=rank)
    vecs, leads = [], []
    for b in basis:
        le = max(b, key=key)
        vecs.append(_from_module_dict(b, ring, rank))
        leads.append((le[:rank].index(1), le[rank:]))
    return ModuleBasis(ring, rank, tuple(vecs), tuple(leads))


def module_kernel(M: "Matrix", relations: Ideal | None = None) -> list[list[Poly]]:
    """Generators of ``{v : M v in relations * ring^m}`` for an ``m x n`` matrix."""
    ring, (m, n) = M.ring, M.shape
    rels = list(relations.generators) if relations is not None else []
    # columns (M e_j, e_j) and (g e_i, 0) in ring^(m + n), image part first
    vectors = []
    for j in range(n):
        vectors.append([M.rows[i][j] for i in range(m)] + [ring.one() if k == j else ring.zero() for k in range(n)])
    for g in rels:
        for i in range(m):
            vectors.append([g if k == i else ring.zero() for k in range(m)] + [ring.zero()] * n)
    gb = module_groebner(ring, m + n, vectors)
    return [v[m:] for v, (c, _) in zip(gb.basis, gb.leads) if c >= m]


def _rename_ring(ring: Ring, front: Sequence[str], prefix: str = ""):
    order = list(front) + [n for n in ring.names if n not in front]
    return Ring(order)


def eliminate(I: Ideal, drop_vars: Iterable[str]) -> Ideal:
    """The intersection of ``I`` with the subring on the remaining variables."""
    drop = [n for n in I.ring.names if n in set(drop_vars)]
    missing = set(drop_vars) - set(I.ring.names)
    if missing:
        raise ValueError(f"unknown variables {sorted(missing)}")
    keep = [n for n in I.ring.names if n not in drop]
    big = Ring(drop + keep)
    sub = Ring(keep)
    if not drop:
        return Ideal(sub, [sub.embed(g) for g in I.generators])
    gens = [big.embed(g) for g in I.generators]
    basis, _ = _groebner([g.terms for g in gens], block_order(len(drop)).key, big.nvars)
    k = len(drop)
    kept = [Poly(sub, {e[k:]: c for e, c in b.items()}) for b in basis if all(not any(e[:k]) for e in b)]
    out = Ideal(sub, kept)
    out._gb[GREVLEX] = GroebnerBasis(GREVLEX, tuple(sorted(kept, key=lambda g: _grevlex_key(max(g.terms, key=_grevlex_key)), reverse=True)), out)
    return out


def saturate(I: Ideal, u: Poly) -> Ideal:
    """``I : u^oo`` computed by adjoining ``1 - t*u`` and eliminating ``t``."""
    u = I.ring.coerce(u)
    if not u.terms:
        raise ValueError("cannot saturate by zero")
    if u.is_constant():
        return Ideal(I.ring, I.groebner().basis)
    t = I.ring.fresh("_sat")
    big = I.ring.extend([t], front=True)
    gens = [big.embed(g) for g in I.generators] + [big.one() - big.var(t) * big.embed(u)]
    return eliminate(Ideal(big, gens), [t])


def membership_certificate(f: Poly, I: Ideal) -> Certificate | None:
    """Cofactors writing ``f`` over the generators of ``I``, or None."""
    f = I.ring.coerce(f)
    gens = I.generators
    if not f.terms:
        return Certificate(tuple(I.ring.zero() for _ in gens), f, gens)
    gb = I._gb.get(("track", GREVLEX))
    if gb is None:
        gb = buchberger(I, GREVLEX, track=True)
        I._gb[("track", GREVLEX)] = gb
    rem, quot = reduce(f, gb)
    if rem.terms:
        return None
    cof = []
    for k in range(len(gens)):
        acc = I.ring.zero()
        for q, rep in zip(quot, gb.cofactors):
            if q.terms and rep[k].terms:
                acc = acc + q * rep[k]
        cof.append(acc)
    cert = Certificate(tuple(cof), f, gens)
    if not cert.verify():
        raise AssertionError("membership certificate failed to re-expand")
    return cert


def square_membership_certificate(f: Poly, I: Ideal) -> Certificate | None:
    """A symmetric matrix ``c`` with ``f = sum c_ij g_i g_j``, or None if f is not in I^2.

    A constant-coefficient quadratic form is preferred when one exists, so that
    ``q(s, s)`` yields the Gram matrix of ``q``.
    """
    f = I.ring.coerce(f)
    gens = I.generators
    n = len(gens)
    ring = I.ring
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    products = [gens[i] * gens[j] for i, j in pairs]
    coeffs = _constant_combination(f, products)
    if coeffs is not None:
        sym = _symmetrise(ring, n, pairs, [ring.const(c) for c in coeffs])
    else:
        cert = membership_certificate(f, Ideal(ring, products)) if products else None
        if cert is None:
            return None
        # Ideal() drops zero products, so map back by position
        nz = [k for k, p in enumerate(products) if p.terms]
        full = [ring.zero()] * len(products)
        for k, c in zip(nz, cert.cofactors):
            full[k] = c
        sym = _symmetrise(ring, n, pairs, full)
    out = Certificate(sym, f, gens, quadratic=True)
    if not out.verify():
        raise AssertionError("square certificate failed to re-expand")
    return out


def _symmetrise(ring, n, pairs, values):
    half = Scalar(mpq(1, 2))
    c = [[ring.zero()] * n for _ in range(n)]
    for (i, j), v in zip(pairs, values):
        if i == j:
            c[i][i] = v
        else:
            c[i][j] = v * half
            c[j][i] = v * half
    return tuple(tuple(r) for r in c)


def _constant_combination(f: Poly, polys: Sequence[Poly]):
    """Scalars a_k with f = sum a_k polys[k], or None."""
    monos = sorted({e for p in list(polys) + [f] for e in p.terms})
    index = {e: r for r, e in enumerate(monos)}
    rows = [dict() for _ in monos]
    for k, p in enumerate(polys):
        for e, c in p.terms.items():
            rows[index[e]][k] = c
    rhs = [f.terms.get(e, ZERO) for e in monos]
    return linear_solve(rows, rhs, len(polys))


# --------------------------------------------------------------------------
# Exact linear algebra over Q(i) on sparse rows (dict column -> Scalar)


def _echelon(rows: list[dict], ncols: int, rhs: list | None = None):
    """Gauss-Jordan elimination; returns (pivot rows, pivot columns, rhs, ok)."""
    rows = [{k: v for k, v in r.items() if v} for r in rows]
    rhs = list(rhs) if rhs is not None else None
    piv_rows: list[dict] = []
    piv_cols: list[int] = []
    piv_rhs: list = []
    for idx, r in enumerate(rows):
        b = rhs[idx] if rhs is not None else None
        for pr, pc, pb in zip(piv_rows, piv_cols, piv_rhs):
            c = r.get(pc)
            if c:
                for k, v in pr.items():
                    nv = r.get(k, ZERO) - c * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
                if b is not None:
                    b = b - c * pb
        if not r:
            if b is not None and b:
                return None
            continue
        pc = min(r)
        inv = r[pc].inverse()
        r = {k: v * inv for k, v in r.items()}
        if b is not None:
            b = b * inv
        # back-substitute into earlier pivots
        for t, pr in enumerate(piv_rows):
            c = pr.get(pc)
            if c:
                for k, v in r.items():
                    nv = pr.get(k, ZERO) - c * v
                    if nv:
                        pr[k] = nv
                    else:
                        pr.pop(k, None)
                if b is not None:
                    piv_rhs[t] = piv_rhs[t] - c * b
        piv_rows.append(r)
        piv_cols.append(pc)
        piv_rhs.append(b)
    return piv_rows, piv_cols, piv_rhs


def linear_solve(rows: list[dict], rhs: list, ncols: int):
    """A particular solution of the sparse system, or None if inconsistent."""
    res = _echelon(rows, ncols, rhs)
    if res is None:
        return None
    _, cols, vals = res
    x = [ZERO] * ncols
    for c, v in zip(cols, vals):
        x[c] = v
    return x


def nullspace(rows: list[dict], ncols: int) -> list[list[Scalar]]:
    """A basis of the kernel of the sparse matrix."""
    prow, pcol, _ = _echelon(rows, ncols, None)
    pivots = set(pcol)
    out = []
    for free in range(ncols):
        if free in pivots:
            continue
        v = [ZERO] * ncols
        v[free] = ONE
        for r, c in zip(prow, pcol):
            val = r.get(free)
            if val:
                v[c] = -val
        out.append(v)
    return out


def rank(rows: list[dict], ncols: int) -> int:
    return len(_echelon(rows, ncols, None)[0])
