"""Groebner bases with cofactor tracking and the ideal operations built on them.

Every basis element remembers how it was built from the ideal's generators,
so reducing a polynomial to zero yields an explicit membership certificate
as a byproduct.  The engine is plain Buchberger: normal selection strategy,
the product criterion and the chain criterion.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .algcore import AlgebraError, MonomialOrder, Poly, Ring, RingMismatch, poly_sum

INFINITE_HEIGHT = math.inf  # height of the unit ideal; passes every ">= n" check


class GroebnerCancelled(RuntimeError):
    """Raised when the caller's cancellation token fires mid-computation."""


class NotInIdeal(AlgebraError):
    def __init__(self, element: Poly, remainder: Poly):
        super().__init__(f"{element} is not in the ideal (normal form {remainder})")
        self.element = element
        self.remainder = remainder


class NotComaximal(AlgebraError):
    def __init__(self, i: int, j: int, remainder: Poly):
        super().__init__(f"moduli {i} and {j} are not comaximal: 1 reduces to {remainder}")
        self.pair = (i, j)
        self.remainder = remainder


@dataclass(frozen=True)
class MembershipCertificate:
    """``element == sum(c * g for c, g in zip(cofactors, gens))``."""

    element: Poly
    gens: tuple[Poly, ...]
    cofactors: tuple[Poly, ...]

    def expand(self) -> Poly:
        return poly_sum((c * g for c, g in zip(self.cofactors, self.gens)), self.element.ring)

    def verify(self) -> bool:
        return len(self.cofactors) == len(self.gens) and self.expand() == self.element


@dataclass(frozen=True)
class BezoutCertificate:
    """``1 == u + v`` with ``u`` in the first ideal and ``v`` in the second."""

    u: MembershipCertificate
    v: MembershipCertificate

    def verify(self) -> bool:
        one = self.u.element.ring.one()
        return self.u.verify() and self.v.verify() and self.u.element + self.v.element == one


# ---------------------------------------------------------------------------
# engine


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _divide(p: Poly, basis: Sequence[Poly], order: MonomialOrder, track: bool):
    """Full multivariate division of ``p`` by ``basis`` (monic leading terms).

    Returns ``(quotients, remainder)`` with ``p = sum(q_i b_i) + remainder``;
    quotients are term dicts (empty when not tracking).
    """
    ring = p.ring
    f = ring.field
    norm = f.normalize
    key = order.key
    kcache: dict = {}

    def k(e):
        v = kcache.get(e)
        if v is None:
            v = kcache[e] = key(e)
        return v

    leads = [b.lead(order) for b in basis]
    work = dict(p.terms)
    rem: dict = {}
    quots = [dict() for _ in basis] if track else []
    while work:
        e = max(work, key=k)
        c = work[e]
        for idx, (le, lc) in enumerate(leads):
            if _divides(le, e):
                d = _sub(e, le)
                m = f.div(c, lc) if lc != 1 else c
                if track:
                    quots[idx][d] = norm(quots[idx].get(d, 0) + m)
                for e2, c2 in basis[idx].terms.items():
                    t = tuple(a + b for a, b in zip(e2, d))
                    s = norm(work.get(t, 0) - m * c2)
                    if s:
                        work[t] = s
                    else:
                        work.pop(t, None)
                break
        else:
            rem[e] = c
            del work[e]
    return quots, Poly(ring, rem)


def _apply_quotients(ring: Ring, cof, quots, basis_cofs):
    """``cof - sum(q_i * basis_cofs[i])`` on cofactor vectors."""
    out = list(cof)
    for q, bc in zip(quots, basis_cofs):
        if not q:
            continue
        qp = Poly(ring, {e: c for e, c in q.items() if c})
        if qp.is_zero():
            continue
        for j, c in enumerate(bc):
            if c:
                out[j] = out[j] - qp * c
    return out


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis of ``gens`` together with cofactor rows.

    ``basis[k] == sum(cofactors[k][j] * gens[j])`` for every ``k`` when
    ``tracked``; untracked bases carry an empty ``cofactors``.
    """

    ring: Ring
    order: MonomialOrder
    gens: tuple[Poly, ...]
    basis: tuple[Poly, ...]
    cofactors: tuple[tuple[Poly, ...], ...]

    @property
    def tracked(self) -> bool:
        return len(self.cofactors) == len(self.basis)

    def is_unit(self) -> bool:
        return any(b.is_constant() and not b.is_zero() for b in self.basis)

    def leading_exponents(self) -> list:
        return [b.lead(self.order)[0] for b in self.basis]

    def reduce(self, p: Poly) -> tuple[Poly, MembershipCertificate | None]:
        """Normal form of ``p`` and a certificate for ``p - remainder``."""
        if p.ring != self.ring:
            raise RingMismatch(f"{p.ring} vs {self.ring}")
        quots, rem = _divide(p, self.basis, self.order, self.tracked)
        if not self.tracked:
            return rem, None
        zero = self.ring.zero()
        cof = _apply_quotients(self.ring, [zero] * len(self.gens), quots, self.cofactors)
        cert = MembershipCertificate(p - rem, self.gens, tuple(-c for c in cof))
        return rem, cert


def buchberger(gens: Sequence[Poly], order: MonomialOrder, ring: Ring, *,
               track: bool = True, cancel: Callable[[], bool] | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of ``gens`` w.r.t. ``order``.

    ``cancel`` is polled between S-polynomial reductions.
    """
    gens = tuple(gens)
    m = len(gens)
    zero = ring.zero()
    f = ring.field

    def unit_row(j, c):
        row = [zero] * m
        row[j] = ring.const(c) if f.p == 0 else Poly(ring, {(0,) * ring.nvars: c})
        return row

    G: list[Poly] = []
    C: list[list[Poly]] = []
    for j, g in enumerate(gens):
        if g.is_zero():
            continue
        _, lc = g.lead(order)
        inv = f.inv(lc)
        G.append(g.scale(inv))
        C.append(unit_row(j, inv) if track else [])

    pairs: set[tuple[int, int]] = {(i, j) for i in range(len(G)) for j in range(i + 1, len(G))}
    key = order.key

    def pair_key(pr):
        i, j = pr
        return (key(_lcm(G[i].lead(order)[0], G[j].lead(order)[0])), pr)

    while pairs:
        if any(g.is_constant() for g in G):
            break
        if cancel is not None and cancel():
            raise GroebnerCancelled("groebner computation cancelled")
        pr = min(pairs, key=lambda p: (pair_key(p)[0], p))
        pairs.discard(pr)
        i, j = pr
        ei = G[i].lead(order)[0]
        ej = G[j].lead(order)[0]
        l = _lcm(ei, ej)
        if all(a == 0 or b == 0 for a, b in zip(ei, ej)):
            continue  # product criterion
        chain = False
        for kk in range(len(G)):
            if kk in (i, j):
                continue
            if (min(i, kk), max(i, kk)) in pairs or (min(j, kk), max(j, kk)) in pairs:
                continue
            if _divides(G[kk].lead(order)[0], l):
                chain = True
                break
        if chain:
            continue
        mi, mj = _sub(l, ei), _sub(l, ej)
        s = G[i].mul_term(mi, 1) - G[j].mul_term(mj, 1)
        quots, h = _divide(s, G, order, track)
        if h.is_zero():
            continue
        _, lc = h.lead(order)
        inv = f.inv(lc)
        h = h.scale(inv)
        if track:
            one = f.convert(1)
            cof = [C[i][t].mul_term(mi, one) - C[j][t].mul_term(mj, one) for t in range(m)]
            cof = _apply_quotients(ring, cof, quots, C)
            C.append([c.scale(inv) for c in cof])
        else:
            C.append([])
        G.append(h)
        new = len(G) - 1
        pairs.update((t, new) for t in range(new))

    # a unit shortcut: the basis is {1}
    for idx, g in enumerate(G):
        if g.is_constant():
            return GroebnerBasis(ring, order, gens, (ring.one(),),
                                 (tuple(C[idx]),) if track else ())

    # minimal basis: drop elements whose leading term is divisible by another's
    keep = []
    for idx, g in enumerate(G):
        e = g.lead(order)[0]
        redundant = False
        for jdx, h in enumerate(G):
            if jdx == idx:
                continue
            e2 = h.lead(order)[0]
            if _divides(e2, e) and (e2 != e or jdx < idx):
                redundant = True
                break
        if not redundant:
            keep.append(idx)
    B = [G[i] for i in keep]
    BC = [C[i] for i in keep]
    # interreduce tails
    for idx in range(len(B)):
        others = B[:idx] + B[idx + 1:]
        ocof = BC[:idx] + BC[idx + 1:]
        quots, r = _divide(B[idx], others, order, track)
        if track:
            BC[idx] = _apply_quotients(ring, BC[idx], quots, ocof)
        B[idx] = r
    order_idx = sorted(range(len(B)), key=lambda t: key(B[t].lead(order)[0]))
    basis = tuple(B[t] for t in order_idx)
    cofs = tuple(tuple(BC[t]) for t in order_idx) if track else ()
    return GroebnerBasis(ring, order, gens, basis, cofs)


# ---------------------------------------------------------------------------
# ideals


class Ideal:
    """An ideal given by generators, with Groebner bases cached per order."""

    def __init__(self, ring: Ring, gens: Iterable[Poly] = ()):
        gs = []
        for g in gens:
            if not isinstance(g, Poly):
                g = ring.const(g)
            if g.ring != ring:
                raise RingMismatch(f"generator {g} lives in {g.ring}, expected {ring}")
            if not g.is_zero():
                gs.append(g)
        self.ring = ring
        self.gens: tuple[Poly, ...] = tuple(gs)
        self._gb: dict = {}

    def __repr__(self):
        return f"Ideal({', '.join(map(str, self.gens))})"

    def __len__(self):
        return len(self.gens)

    def groebner_basis(self, order: MonomialOrder | None = None, *, track: bool = True,
                       cancel: Callable[[], bool] | None = None) -> GroebnerBasis:
        order = order or self.ring.order
        hit = self._gb.get((order, True)) or (None if track else self._gb.get((order, False)))
        if hit is None:
            hit = buchberger(self.gens, order, self.ring, track=track, cancel=cancel)
            self._gb[(order, track)] = hit
        return hit

    def is_unit(self) -> bool:
        return self.groebner_basis(track=False).is_unit()

    def is_zero(self) -> bool:
        return not self.gens

    def __add__(self, other: "Ideal") -> "Ideal":
        _same(self, other)
        return Ideal(self.ring, self.gens + other.gens)

    def __mul__(self, other: "Ideal") -> "Ideal":
        _same(self, other)
        return Ideal(self.ring, [a * b for a in self.gens for b in other.gens])

    def square(self) -> "Ideal":
        g = self.gens
        return Ideal(self.ring, [g[i] * g[j] for i in range(len(g)) for j in range(i, len(g))])

    def contains(self, other: "Ideal") -> bool:
        """``other`` is a subset of ``self``."""
        return all(member(g, self) for g in other.gens)

    def equals(self, other: "Ideal") -> bool:
        return self.contains(other) and other.contains(self)

    def change_ring(self, target: Ring) -> "Ideal":
        return Ideal(target, [g.change_ring(target) for g in self.gens])


def _same(I: Ideal, J: Ideal):
    if I.ring != J.ring:
        raise RingMismatch(f"{I.ring} vs {J.ring}")


def groebner(I: Ideal, order: MonomialOrder | str | None = None, *,
             cancel: Callable[[], bool] | None = None) -> list[Poly]:
    if isinstance(order, str):
        order = MonomialOrder.parse(order)
    return list(I.groebner_basis(order, cancel=cancel).basis)


def reduce(p: Poly, I: Ideal) -> tuple[Poly, MembershipCertificate]:
    """Normal form of ``p`` modulo ``I`` and a certificate for ``p - remainder``."""
    if p.ring != I.ring:
        raise RingMismatch(f"{p.ring} vs {I.ring}")
    return I.groebner_basis().reduce(p)


def member(p: Poly, I: Ideal) -> bool:
    if p.ring != I.ring:
        raise RingMismatch(f"{p.ring} vs {I.ring}")
    if p.is_zero():
        return True
    rem, _ = I.groebner_basis(track=False).reduce(p)
    return rem.is_zero()


def certify_member(p: Poly, I: Ideal) -> MembershipCertificate:
    """Certificate that ``p`` lies in ``I``; raises :class:`NotInIdeal` otherwise."""
    if p.is_zero():
        return MembershipCertificate(p, I.gens, tuple(I.ring.zero() for _ in I.gens))
    rem, cert = reduce(p, I)
    if not rem.is_zero():
        raise NotInIdeal(p, rem)
    return cert


def certify_contains(I: Ideal, J: Ideal) -> list[MembershipCertificate]:
    """Certificates that every generator of ``J`` lies in ``I``."""
    return [certify_member(g, I) for g in J.gens]


def _eliminate(gens: Sequence[Poly], ring: Ring, extra: str) -> list[Poly]:
    """Basis elements free of ``extra`` for an ideal in ``ring`` (``extra`` first)."""
    order = MonomialOrder("block", (1,))
    gb = buchberger(gens, order, ring, track=False)
    return [b for b in gb.basis if b.free_of(extra)]


def intersect(I: Ideal, J: Ideal) -> Ideal:
    """``I`` ∩ ``J`` by eliminating ``t`` from ``t*I + (1-t)*J``."""
    _same(I, J)
    R = I.ring
    t = R.fresh_var("t")
    S = Ring(R.field, (t,) + R.vars, R.order)
    tv = S.var(t)
    gens = [tv * g.change_ring(S) for g in I.gens] + [(1 - tv) * g.change_ring(S) for g in J.gens]
    return Ideal(R, [b.change_ring(R) for b in _eliminate(gens, S, t)])


def saturate(I: Ideal, f: Poly) -> Ideal:
    """``I : f^∞`` by eliminating ``w`` from ``I + (1 - w*f)``."""
    if f.is_zero():
        raise ValueError("cannot saturate by zero")
    R = I.ring
    if f.is_constant():
        return Ideal(R, I.gens)
    w = R.fresh_var("w")
    S = Ring(R.field, (w,) + R.vars, R.order)
    wv = S.var(w)
    gens = [g.change_ring(S) for g in I.gens] + [1 - wv * f.change_ring(S)]
    return Ideal(R, [b.change_ring(R) for b in _eliminate(gens, S, w)])


def dimension(I: Ideal) -> int:
    """Krull dimension of ``R/I`` (``-1`` for the unit ideal).

    Largest set of variables containing no leading monomial's support.
    """
    R = I.ring
    gb = I.groebner_basis(track=False)
    if gb.is_unit():
        return -1
    supports = [frozenset(i for i, a in enumerate(e) if a) for e in gb.leading_exponents()]
    n = R.nvars
    for size in range(n, -1, -1):
        for S in itertools.combinations(range(n), size):
            s = frozenset(S)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def height(I: Ideal):
    """Height of ``I``; :data:`INFINITE_HEIGHT` for the unit ideal."""
    d = dimension(I)
    if d < 0:
        return INFINITE_HEIGHT
    return I.ring.nvars - d


def comaximal(I: Ideal, J: Ideal) -> BezoutCertificate:
    """Bézout data ``1 = u + v`` with ``u`` in ``I`` and ``v`` in ``J``."""
    _same(I, J)
    R = I.ring
    S = Ideal(R, I.gens + J.gens)
    rem, cert = reduce(R.one(), S)
    if not rem.is_zero():
        raise NotComaximal(0, 1, rem)
    k = len(I.gens)
    # gens of the sum may have been pruned; realign cofactors by position
    cu, cv = cert.cofactors[:k], cert.cofactors[k:]
    u = poly_sum((c * g for c, g in zip(cu, I.gens)), R)
    v = poly_sum((c * g for c, g in zip(cv, J.gens)), R)
    return BezoutCertificate(MembershipCertificate(u, I.gens, tuple(cu)),
                             MembershipCertificate(v, J.gens, tuple(cv)))


@dataclass(frozen=True)
class CRTLift:
    value: Poly
    certificates: tuple[MembershipCertificate, ...]  # value - v_i in I_i
    bezout: tuple[tuple[int, int, BezoutCertificate], ...]


def crt_lift(targets: Sequence[tuple[Poly, Ideal]]) -> CRTLift:
    """Polynomial congruent to each ``value_i`` modulo ``modulus_i``.

    The moduli must be pairwise comaximal.
    """
    if not targets:
        raise ValueError("crt_lift needs at least one target")
    R = targets[0][1].ring
    k = len(targets)
    bez: dict = {}
    for i in range(k):
        for j in range(i + 1, k):
            try:
                bez[(i, j)] = comaximal(targets[i][1], targets[j][1])
            except NotComaximal as exc:
                raise NotComaximal(i, j, exc.remainder) from None
    value = R.zero()
    for i, (v, _) in enumerate(targets):
        e = R.one()
        for j in range(k):
            if j == i:
                continue
            # the part of 1 lying in I_j is 1 mod I_i and 0 mod I_j
            b = bez[(min(i, j), max(i, j))]
            e = e * (b.v.element if i < j else b.u.element)
        value = value + v * e
    certs = tuple(certify_member(value - v, I) for v, I in targets)
    return CRTLift(value, certs, tuple((i, j, b) for (i, j), b in sorted(bez.items())))
