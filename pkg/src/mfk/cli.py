"""Batch front-end: a line-oriented DSL for rings, factorisations and cutout models.

Grammar, one statement per line (``#`` starts a comment)::

    ring R = vars x y | weights 1 -1
    poly f in R = x*y
    ideal I in R = x, y
    fact F over R pot f = dplus [[x]] dminus [[y]]
    fact O over R = unit
    cutout M over R = extra x | pot 0 | section x, 0 | weights -2
    normal N = M
    bundle Q over R = m 1 | weights 2
    cmd sp F I

Commands: validate, sp, cohomology, lagrangian, vss, localise, clifford-square,
knoerrer, knoerrer-compare, psi, contractible, random-validate.
"""

from __future__ import annotations

import argparse
import random
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Ideal, Matrix, Poly, ResourceBudgetExceeded, Ring, budget_scope
from .clifford import clifford_square_check
from .deform import rees_presentation
from .kclass import (
    CutoutModel, NormalFormData, UnsupportedSupport, infer_basis_weights, knoerrer_comparison_check,
    lagrangian_class, localisation_check, periodic_cohomology, virtual_structure_sheaf,
)
from .knoerrer import SplitBundleData, knoerrer_apply, psi_transport_check
from .mfcore import Factorisation, contractible_off, unit_factorisation, validate
from .specialise import ChartMiss, UnsupportedPushforward, sp_object

__all__ = ["DSLError", "Session", "Statement", "parse", "format_session", "run", "Block", "main"]

NAME = r"[A-Za-z_][A-Za-z0-9_]*"


class DSLError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line, self.column, self.message = line, column, message


@dataclass
class Statement:
    kind: str
    name: str
    line: int
    fields: dict
    text: str  # canonical rendering


@dataclass
class Session:
    statements: list = field(default_factory=list)
    bindings: dict = field(default_factory=dict)

    @property
    def commands(self) -> list:
        return [s for s in self.statements if s.kind == "cmd"]


@dataclass
class Block:
    echo: str
    status: str  # pass / fail / unsupported / unknown
    payload: list

    def render(self) -> str:
        return "\n".join([f"> {self.echo}", f"status: {self.status}", *self.payload])


# --------------------------------------------------------------------------
# Parsing


def _col(raw: str, token: str) -> int:
    k = raw.find(token)
    return k + 1 if k >= 0 else 1


def _weights(text: str, lineno: int, raw: str) -> list[Fraction]:
    try:
        return [Fraction(t) for t in text.split()]
    except ValueError:
        raise DSLError(lineno, _col(raw, text), f"bad weight list {text.strip()!r}") from None


def _split_options(body: str) -> dict:
    out = {}
    for part in body.split("|"):
        part = part.strip()
        if not part:
            continue
        key, _, rest = part.partition(" ")
        out[key] = rest.strip()
    return out


def _parse_matrix(text: str, ring: Ring, lineno: int, raw: str) -> Matrix:
    text = text.strip()
    m = re.fullmatch(r"\[\]\((\d+)x(\d+)\)", text)
    if m:
        if int(m.group(1)) != 0:
            raise DSLError(lineno, _col(raw, text), "explicit shapes are only for empty matrices")
        return Matrix(ring, [], int(m.group(2)))
    if not (text.startswith("[") and text.endswith("]")):
        raise DSLError(lineno, _col(raw, text), f"expected a matrix, got {text!r}")
    inner = text[1:-1].strip()
    rows = re.findall(r"\[([^\[\]]*)\]", inner)
    if re.sub(r"\[[^\[\]]*\]", "", inner).replace(",", "").strip():
        raise DSLError(lineno, _col(raw, text), "malformed matrix")
    parsed = []
    for r in rows:
        entries = [e for e in (x.strip() for x in r.split(",")) if e] if r.strip() else []
        try:
            parsed.append([ring.parse(e) for e in entries])
        except ValueError as exc:
            raise DSLError(lineno, _col(raw, r), str(exc)) from None
    widths = {len(r) for r in parsed}
    if len(widths) > 1:
        raise DSLError(lineno, _col(raw, text), "ragged matrix")
    return Matrix(ring, parsed, widths.pop() if widths else 0)


class _Parser:
    def __init__(self):
        self.session = Session()

    def need(self, name: str, kind: str | tuple, lineno: int, raw: str):
        kinds = (kind,) if isinstance(kind, str) else kind
        st = self.session.bindings.get(name)
        if st is None:
            raise DSLError(lineno, _col(raw, name), f"undefined name {name!r}")
        if st.kind not in kinds:
            raise DSLError(lineno, _col(raw, name), f"{name!r} is a {st.kind}, expected {' or '.join(kinds)}")
        return st

    def poly(self, text: str, ring: Ring, lineno: int, raw: str) -> Poly:
        text = text.strip()
        st = self.session.bindings.get(text)
        if st is not None and st.kind == "poly":
            if st.fields["ring"] != ring:
                raise DSLError(lineno, _col(raw, text), f"{text!r} lives in another ring")
            return st.fields["value"]
        try:
            return ring.parse(text)
        except ValueError as exc:
            raise DSLError(lineno, _col(raw, text), str(exc)) from None

    def define(self, st: Statement, raw: str):
        if st.name in self.session.bindings:
            raise DSLError(st.line, _col(raw, st.name), f"duplicate name {st.name!r}")
        self.session.bindings[st.name] = st
        self.session.statements.append(st)

    def statement(self, lineno: int, raw: str):
        line = raw.split("#", 1)[0].strip()
        if not line:
            return
        head = line.split(None, 1)[0]
        handler = getattr(self, f"_{head}", None)
        if handler is None:
            raise DSLError(lineno, _col(raw, head), f"unknown statement {head!r}")
        handler(lineno, raw, line)

    def _match(self, pattern: str, line: str, lineno: int, raw: str, what: str):
        m = re.fullmatch(pattern, line)
        if not m:
            raise DSLError(lineno, 1, f"malformed {what} statement")
        return m

    def _ring(self, lineno, raw, line):
        m = self._match(rf"ring\s+({NAME})\s*=\s*(.*)", line, lineno, raw, "ring")
        opts = _split_options(m.group(2))
        if "vars" not in opts and not m.group(2).strip().startswith("vars"):
            raise DSLError(lineno, _col(raw, m.group(2)), "ring needs 'vars'")
        names = opts.get("vars", "").split()
        for n in names:
            if not re.fullmatch(NAME, n) or n == "I":
                raise DSLError(lineno, _col(raw, n), f"bad variable name {n!r}")
        try:
            ring = Ring(names)
        except ValueError as exc:
            raise DSLError(lineno, _col(raw, "vars"), str(exc)) from None
        weights = _weights(opts["weights"], lineno, raw) if "weights" in opts else []
        if weights and len(weights) != len(names):
            raise DSLError(lineno, _col(raw, "weights"), "one weight per variable")
        wmap = dict(zip(names, weights))
        text = f"ring {m.group(1)} = vars {' '.join(names)}".rstrip()
        if weights:
            text += " | weights " + " ".join(str(w) for w in weights)
        self.define(Statement("ring", m.group(1), lineno, {"ring": ring, "weights": wmap}, text), raw)

    def _poly(self, lineno, raw, line):
        m = self._match(rf"poly\s+({NAME})\s+in\s+({NAME})\s*=\s*(.+)", line, lineno, raw, "poly")
        ring = self.need(m.group(2), "ring", lineno, raw).fields["ring"]
        p = self.poly(m.group(3), ring, lineno, raw)
        self.define(Statement("poly", m.group(1), lineno, {"ring": ring, "value": p},
                              f"poly {m.group(1)} in {m.group(2)} = {p}"), raw)

    def _ideal(self, lineno, raw, line):
        m = self._match(rf"ideal\s+({NAME})\s+in\s+({NAME})\s*=\s*(.+)", line, lineno, raw, "ideal")
        ring = self.need(m.group(2), "ring", lineno, raw).fields["ring"]
        gens = [self.poly(g, ring, lineno, raw) for g in m.group(3).split(",")]
        self.define(Statement("ideal", m.group(1), lineno, {"ring": ring, "value": Ideal(ring, gens)},
                              f"ideal {m.group(1)} in {m.group(2)} = {', '.join(map(str, gens))}"), raw)

    def _fact(self, lineno, raw, line):
        m = re.fullmatch(rf"fact\s+({NAME})\s+over\s+({NAME})\s*=\s*unit", line)
        if m:
            rst = self.need(m.group(2), "ring", lineno, raw)
            F = unit_factorisation(rst.fields["ring"])
            self.define(Statement("fact", m.group(1), lineno, {"ring_name": m.group(2), "value": F},
                                  f"fact {m.group(1)} over {m.group(2)} = unit"), raw)
            return
        m = self._match(rf"fact\s+({NAME})\s+over\s+({NAME})\s+pot\s+(.+?)\s*=\s*dplus\s+(.+?)\s+dminus\s+(.+)",
                        line, lineno, raw, "fact")
        ring = self.need(m.group(2), "ring", lineno, raw).fields["ring"]
        pot = self.poly(m.group(3), ring, lineno, raw)
        dp = _parse_matrix(m.group(4), ring, lineno, raw)
        dm = _parse_matrix(m.group(5), ring, lineno, raw)
        try:
            F = Factorisation(ring, pot, dp, dm)
        except ValueError as exc:
            raise DSLError(lineno, _col(raw, "dplus"), str(exc)) from None
        self.define(Statement("fact", m.group(1), lineno, {"ring_name": m.group(2), "value": F},
                              f"fact {m.group(1)} over {m.group(2)} pot {pot} = dplus {dp} dminus {dm}"), raw)

    def _cutout(self, lineno, raw, line):
        m = self._match(rf"cutout\s+({NAME})\s+over\s+({NAME})\s*=\s*(.+)", line, lineno, raw, "cutout")
        rst = self.need(m.group(2), "ring", lineno, raw)
        base = rst.fields["ring"]
        opts = _split_options(m.group(3))
        for key in opts:
            if key not in ("extra", "pot", "section", "weights", "lam"):
                raise DSLError(lineno, _col(raw, key), f"unknown cutout field {key!r}")
        extra = opts.get("extra", "").split()
        if "section" not in opts:
            raise DSLError(lineno, _col(raw, m.group(3)), "cutout needs a section")
        ring = Ring(list(base.names) + extra)
        pot = self.poly(opts.get("pot", "0"), base, lineno, raw)
        sec = [self.poly(s, ring, lineno, raw) for s in opts["section"].split(",")] if opts["section"].strip() else []
        weights = _weights(opts["weights"], lineno, raw) if "weights" in opts else []
        if weights and len(weights) != len(extra):
            raise DSLError(lineno, _col(raw, "weights"), "one weight per extra coordinate")
        vw = dict(rst.fields["weights"])
        vw.update(zip(extra, weights))
        lam = _weights(opts["lam"], lineno, raw) if "lam" in opts else []
        try:
            model = CutoutModel(base, ring, pot, tuple(sec), vw, tuple(lam))
        except ValueError as exc:
            raise DSLError(lineno, _col(raw, "section"), str(exc)) from None
        parts = [f"extra {' '.join(extra)}".rstrip(), f"pot {pot}", f"section {', '.join(map(str, sec))}".rstrip()]
        if weights:
            parts.append("weights " + " ".join(map(str, weights)))
        if lam:
            parts.append("lam " + " ".join(map(str, lam)))
        self.define(Statement("cutout", m.group(1), lineno, {"value": model},
                              f"cutout {m.group(1)} over {m.group(2)} = {' | '.join(parts)}"), raw)

    def _normal(self, lineno, raw, line):
        m = self._match(rf"normal\s+({NAME})\s*=\s*({NAME})", line, lineno, raw, "normal")
        model = self.need(m.group(2), "cutout", lineno, raw).fields["value"]
        N = NormalFormData.from_model(model)
        self.define(Statement("normal", m.group(1), lineno, {"value": N, "model": m.group(2)},
                              f"normal {m.group(1)} = {m.group(2)}"), raw)

    def _bundle(self, lineno, raw, line):
        m = self._match(rf"bundle\s+({NAME})\s+over\s+({NAME})\s*=\s*(.+)", line, lineno, raw, "bundle")
        base = self.need(m.group(2), "ring", lineno, raw).fields["ring"]
        opts = _split_options(m.group(3))
        try:
            rank = int(opts.get("m", ""))
        except ValueError:
            raise DSLError(lineno, _col(raw, m.group(3)), "bundle needs 'm <int>'") from None
        weights = _weights(opts["weights"], lineno, raw) if "weights" in opts else []
        try:
            Q = SplitBundleData(base, rank, weights=tuple(weights))
        except ValueError as exc:
            raise DSLError(lineno, _col(raw, m.group(3)), str(exc)) from None
        text = f"bundle {m.group(1)} over {m.group(2)} = m {rank}"
        if weights:
            text += " | weights " + " ".join(map(str, weights))
        self.define(Statement("bundle", m.group(1), lineno, {"value": Q}, text), raw)

    _ARITY = {
        "validate": (("fact",),),
        "sp": (("fact",), ("fact", "ideal")),
        "cohomology": (("fact",),),
        "lagrangian": (("cutout", "fact"),),
        "vss": (("cutout",),),
        "localise": (("cutout", "normal", "fact"),),
        "clifford-square": ((),),
        "knoerrer": (("fact", "bundle"),),
        "knoerrer-compare": (("cutout", "bundle", "fact"),),
        "psi": (("fact", "bundle"),),
        "contractible": (("fact", "poly"),),
        "random-validate": ((),),
    }

    def _cmd(self, lineno, raw, line):
        parts = line.split()
        if len(parts) < 2:
            raise DSLError(lineno, 1, "cmd needs a command name")
        op = parts[1]
        if op not in self._ARITY:
            raise DSLError(lineno, _col(raw, op), f"unknown command {op!r}")
        args = [p for p in parts[2:] if "=" not in p]
        kw = {}
        for p in parts[2:]:
            if "=" in p:
                k, _, v = p.partition("=")
                if not v.lstrip("-").isdigit():
                    raise DSLError(lineno, _col(raw, p), f"option {k!r} needs an integer")
                kw[k] = int(v)
        shapes = [s for s in self._ARITY[op] if len(s) == len(args)]
        if not shapes:
            want = " or ".join(str(len(s)) for s in self._ARITY[op])
            raise DSLError(lineno, _col(raw, op), f"{op} takes {want} arguments, got {len(args)}")
        for a, kind in zip(args, shapes[0]):
            self.need(a, kind, lineno, raw)
        if op == "clifford-square" and kw.get("n") not in (1, 2, 3):
            raise DSLError(lineno, _col(raw, op), "clifford-square needs n=1, 2 or 3")
        text = " ".join(["cmd", op, *args, *(f"{k}={v}" for k, v in kw.items())])
        st = Statement("cmd", op, lineno, {"args": args, "kw": kw}, text)
        self.session.statements.append(st)


def parse(source: str) -> Session:
    p = _Parser()
    for lineno, raw in enumerate(source.splitlines(), start=1):
        p.statement(lineno, raw)
    return p.session


def format_session(session: Session) -> str:
    return "\n".join(s.text for s in session.statements) + "\n"


# --------------------------------------------------------------------------
# Execution


@dataclass
class Options:
    seed: int = 0
    degree_bound: int = 2
    budget: int | None = None


def _val(session: Session, name: str):
    return session.bindings[name].fields["value"]


def _default_ideal(F: Factorisation) -> Ideal:
    return Ideal(F.ring, list(F.ring.gens()))


def _execute(session: Session, st: Statement, opts: Options) -> Block:
    op, args, kw = st.name, st.fields["args"], st.fields["kw"]
    v = [_val(session, a) for a in args]
    if op == "validate":
        rep = validate(v[0])
        return Block(st.text, "pass" if rep else "fail", [str(rep)])
    if op == "sp":
        ideal = v[1] if len(v) > 1 else _default_ideal(v[0])
        sp = sp_object(v[0], rees_presentation(ideal))
        return Block(st.text, "pass", [f"sp = {sp}", f"chart = {sp.closure.chart}"])
    if op == "cohomology":
        F = v[0]
        weights = session.bindings[session.bindings[args[0]].fields["ring_name"]].fields["weights"]
        H = periodic_cohomology(F, weights)
        return Block(st.text, "pass", [f"h+ = {H.h_plus}", f"h- = {H.h_minus}", f"chi = {H.euler}"])
    if op == "lagrangian":
        return Block(st.text, "pass", [f"kclass = {lagrangian_class(v[0], v[1])}"])
    if op == "vss":
        return Block(st.text, "pass", [f"kclass = {virtual_structure_sheaf(v[0])}"])
    if op == "localise":
        rep = localisation_check(v[0], v[2], v[1])
        return Block(st.text, "pass" if rep else "fail", [f"lhs = {rep.lhs}", f"rhs = {rep.rhs}"])
    if op == "clifford-square":
        rep = clifford_square_check(kw["n"])
        return Block(st.text, "pass" if rep else "fail", str(rep).splitlines()[1:])
    if op == "knoerrer":
        G = knoerrer_apply(v[0], v[1])
        return Block(st.text, "pass", [f"image = {G}"])
    if op == "knoerrer-compare":
        rep = knoerrer_comparison_check(v[0], v[1], v[2])
        return Block(st.text, "pass" if rep else "fail", [f"lhs = {rep.lhs}", f"rhs = {rep.rhs}"])
    if op == "psi":
        rep = psi_transport_check(v[0], v[1], kw.get("degree", opts.degree_bound))
        return Block(st.text, "pass" if rep else "fail", [str(rep)])
    if op == "contractible":
        F, u = v
        if u.ring != F.ring:
            raise ValueError("the function must live in the ring of the factorisation")
        rep = contractible_off(F, u, kw.get("degree", opts.degree_bound), kw.get("power", 2))
        return Block(st.text, "pass" if rep else "fail", [f"contractible = {'yes' if rep else 'no'}"])
    if op == "random-validate":
        from .acceptance import random_factorisation
        rng = random.Random(opts.seed)
        count = kw.get("count", 20)
        bad = sum(1 for _ in range(count) if not validate(random_factorisation(rng)))
        return Block(st.text, "pass" if bad == 0 else "fail", [f"seed = {opts.seed}", f"checked = {count}", f"failures = {bad}"])
    raise AssertionError(op)


def _run_command(session: Session, st: Statement, opts: Options) -> Block:
    try:
        with budget_scope(max_pairs=opts.budget):
            return _execute(session, st, opts)
    except ResourceBudgetExceeded as exc:
        return Block(st.text, "unknown", [f"budget exhausted: {exc}"])
    except (UnsupportedSupport, UnsupportedPushforward, ChartMiss) as exc:
        return Block(st.text, "unsupported", [f"reason = {exc}"])
    except (ValueError, AssertionError, ZeroDivisionError) as exc:
        return Block(st.text, "fail", [f"error = {exc}"])
    except Exception as exc:  # keep going; one broken command must not hide the rest
        return Block(st.text, "fail", [f"internal error = {type(exc).__name__}: {exc}"])


def _worker(source: str, index: int, opts: Options) -> str:
    session = parse(source)
    return _run_command(session, session.commands[index], opts).render()


def run(session: Session, opts: Options | None = None, source: str | None = None, parallel: bool = False) -> list[str]:
    """Run all commands in input order and return the rendered blocks."""
    opts = opts or Options()
    cmds = session.commands
    if parallel and source is not None and len(cmds) > 1:
        with ProcessPoolExecutor() as pool:
            return list(pool.map(_worker, [source] * len(cmds), range(len(cmds)), [opts] * len(cmds)))
    return [_run_command(session, st, opts).render() for st in cmds]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="mfk", description="Exact matrix factorisation computations.")
    sub = ap.add_subparsers(dest="action", required=True)
    r = sub.add_parser("run", help="run a DSL file")
    r.add_argument("file")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--degree-bound", type=int, default=2)
    r.add_argument("--budget", type=int, default=None, help="maximum critical pairs per Groebner computation")
    r.add_argument("--parallel", action="store_true")
    f = sub.add_parser("format", help="print a DSL file in canonical form")
    f.add_argument("file")
    s = sub.add_parser("selftest", help="run the built-in acceptance suite")
    s.add_argument("--seed", type=int, default=None)
    args = ap.parse_args(argv)

    if args.action == "selftest":
        from .acceptance import DEFAULT_SEED, run_all
        results = run_all(DEFAULT_SEED if args.seed is None else args.seed)
        for res in results:
            print(res.line())
        return 0 if all(r.ok for r in results) else 1

    try:
        with open(args.file, encoding="utf-8") as fh:
            source = fh.read()
        session = parse(source)
    except DSLError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mfk: {exc}", file=sys.stderr)
        return 2
    if args.action == "format":
        sys.stdout.write(format_session(session))
        return 0
    opts = Options(args.seed, args.degree_bound, args.budget)
    blocks = run(session, opts, source, args.parallel)
    print("\n\n".join(blocks))
    return 1 if any("\nstatus: fail" in b for b in blocks) else 0


if __name__ == "__main__":
    sys.exit(main())
