"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from quadhom.algcore import Poly, Ring
from quadhom.orthogroup import act, random_word
from quadhom.quadric import Flavor, QuadricPoint, base_point

# criterion number -> (passed, detail), filled by test_acceptance
ACCEPTANCE: dict = {}

QXY = Ring.parse("Q[x,y]")
F7XY = Ring.parse("GF(7)[x,y]")


def random_poly(R: Ring, rng: random.Random, degree: int = 2, terms: int = 3, coeff: int = 3) -> Poly:
    p = R.zero()
    for _ in range(rng.randint(1, terms)):
        e = [0] * R.nvars
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(R.nvars)] += 1
        p = p + R.monomial(tuple(e), rng.randint(-coeff, coeff))
    return p


def random_point(R: Ring, n: int, flavor: Flavor, rng: random.Random, degree: int = 2) -> QuadricPoint:
    """Random x, y, z with the residual put on y_n, x_n a nonzero constant."""
    xs = [random_poly(R, rng, degree) for _ in range(n - 1)]
    ys = [random_poly(R, rng, degree) for _ in range(n - 1)]
    z = random_poly(R, rng, degree)
    c = R.const(rng.choice([1, 2, -1, 3]))
    acc = sum((a * b for a, b in zip(xs, ys)), R.zero())
    rhs = (1 - z * z) if flavor is Flavor.QPRIME else (z - z * z)
    yn = (rhs - acc) / c.constant_value()
    return QuadricPoint(R, n, flavor, tuple(xs) + (c,) + tuple(ys) + (yn,) + (z,))


def acted_point(R: Ring, n: int, flavor: Flavor, rng: random.Random, length: int = 3) -> QuadricPoint:
    w = random_word(R, n, length, rng)
    return act(base_point(R, n, flavor), w)


# ---------------------------------------------------------------------------
# degree-bounded linear algebra membership oracle


def monomials(nvars: int, max_degree: int):
    return [e for e in product(range(max_degree + 1), repeat=nvars) if sum(e) <= max_degree]


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [r[:] for r in rows]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c] / pr[c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        rank += 1
    return rank


def bounded_member(p: Poly, gens, bound: int) -> bool:
    """Is ``p`` a combination of ``m * g`` with ``deg(m * g) <= bound``?  Pure linear algebra."""
    R = p.ring
    cols = []
    for g in gens:
        if g.is_zero():
            continue
        for e in monomials(R.nvars, bound - g.total_degree()):
            cols.append(g.mul_term(e, 1))
    support = sorted({e for c in cols for e in c.terms} | set(p.terms))
    idx = {e: i for i, e in enumerate(support)}

    def vec(q):
        v = [Fraction(0)] * len(support)
        for e, c in q.terms.items():
            v[idx[e]] = Fraction(c)
        return v

    if not cols:
        return p.is_zero()
    base = [vec(c) for c in cols]
    return _rank(base) == _rank(base + [vec(p)])


# ---------------------------------------------------------------------------
# random session scripts (as syntax trees)


def fuzz_expr(rng: random.Random, names, depth: int = 3):
    from quadhom.shell.parser import BinOp, Name, Neg, Num, Pow
    if depth == 0 or rng.random() < 0.3:
        return Num(rng.randint(0, 9)) if rng.random() < 0.5 else Name(rng.choice(names))
    k = rng.randrange(4)
    if k == 0:
        return Neg(fuzz_expr(rng, names, depth - 1))
    if k == 1:
        return Pow(fuzz_expr(rng, names, depth - 1), rng.randint(0, 4))
    return BinOp(rng.choice("+-*/"), fuzz_expr(rng, names, depth - 1), fuzz_expr(rng, names, depth - 1))


def fuzz_script(rng: random.Random, length: int = 6):
    from quadhom.shell.parser import (Arg, Command, HypExpr, IdealExpr, Let, ListExpr, QPointExpr,
                                      RingDecl, Script, TransExpr, TupleExpr, WordExpr)
    names = ["x", "y"]
    field = rng.choice(["Q", "GF(7)", "GF(11)"])
    order = rng.choice([None, "lex", "grevlex", "block(1)"])
    stmts = [RingDecl(field, ("x", "y"), order)]
    for k in range(length):
        e = lambda d=2: fuzz_expr(rng, names, d)  # noqa: E731
        kind = rng.randrange(6)
        if kind == 0:
            val = e()
        elif kind == 1:
            val = IdealExpr(tuple(e() for _ in range(rng.randint(1, 3))))
        elif kind == 2:
            val = QPointExpr(2, rng.choice(["Q", "Qprime"]), tuple(e(1) for _ in range(5)))
        elif kind == 3:
            facs = []
            for _ in range(rng.randint(0, 3)):
                if rng.random() < 0.5:
                    facs.append(TransExpr(rng.choice(["e1", "f2"]), rng.choice(["g", "e2"]), e(1)))
                else:
                    facs.append(HypExpr(1, 2, e(1)))
            val = WordExpr(tuple(facs))
        elif kind == 4:
            val = rng.choice([TupleExpr((e(1), e(1))), ListExpr(tuple(e(1) for _ in range(rng.randint(0, 3))))])
        else:
            args = tuple(Arg(key, e(1)) for key in rng.sample(["p", "I", "f", "mu", "T"], rng.randint(0, 3)))
            stmts.append(Command(rng.choice(["gb", "member", "split-verify", "homotopy-verify"]), args))
            continue
        stmts.append(Let(f"v{k}", val))
    return Script(tuple(stmts))


# ---------------------------------------------------------------------------
# certificate tampering


def flip_digit(cert: dict, path: list) -> dict:
    """Deep copy of ``cert`` with one digit changed in the string at ``path``."""
    import copy
    import re
    out = copy.deepcopy(cert)
    node = out
    for k in path[:-1]:
        node = node[k]
    s = node[path[-1]]
    m = re.search(r"\d", s)
    if m is None:
        node[path[-1]] = s + " + 1"
    else:
        d = m.group()
        node[path[-1]] = s[:m.start()] + str((int(d) + 1) % 10) + s[m.end():]
    return out
