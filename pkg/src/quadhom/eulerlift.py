"""From ideals with chosen generators of J/J^2 to points of Q_2n, and back.

``nakayama_lift`` produces the idempotent-mod-J element by the determinant
trick; ``theta_point`` turns a local orientation ``J = (a) + J^2`` into the
point ``(a, b, s)`` with ``s - s^2 = sum a_i b_i``; ``moving_step`` is the
explicit homotopy that makes the associated ideal have large height, and
``find_moving_mu`` searches (seeded, capped) for a good ``mu``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .algcore import AlgebraError, Poly, determinant, dot
from .homotopy import HomotopyWitness
from .idealkit import (Ideal, MembershipCertificate, NotInIdeal, certify_member, height, member,
                       reduce)
from .quadric import Flavor, QuadricPoint, associated_ideal


class OrientationError(AlgebraError):
    def __init__(self, generator: Poly, message: str):
        super().__init__(message)
        self.generator = generator


class NakayamaError(AlgebraError):
    pass


class MovingSearchExhausted(AlgebraError):
    def __init__(self, trials: int, best_height, best_mu):
        super().__init__(f"no mu found in {trials} trials (best height {best_height}); "
                         "this is not a refutation, the search is incomplete")
        self.trials = trials
        self.best_height = best_height
        self.best_mu = best_mu


@dataclass(frozen=True)
class LocalOrientation:
    """``J = (a_1, ..., a_n) + J^2``, certified at construction."""

    J: Ideal
    a: tuple[Poly, ...]
    certificates: tuple[MembershipCertificate, ...] = field(repr=False, default=())
    height: object = None

    @classmethod
    def build(cls, J: Ideal, a: Sequence[Poly]) -> "LocalOrientation":
        a = tuple(a)
        for ai in a:
            if not member(ai, J):
                raise OrientationError(ai, f"{ai} is not in J")
        target = Ideal(J.ring, a + J.square().gens)
        certs = []
        for g in J.gens:
            try:
                certs.append(certify_member(g, target))
            except NotInIdeal:
                raise OrientationError(g, f"generator {g} of J does not lie in (a) + J^2") from None
        return cls(J, a, tuple(certs), height(J))

    @property
    def n(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class NakayamaLift:
    """``s`` in ``K`` with ``I = (s) + J`` and ``s - s^2`` in ``J``."""

    s: Poly
    I: Ideal
    J: Ideal
    K: Ideal
    s_in_K: MembershipCertificate
    I_in_sJ: tuple[MembershipCertificate, ...]  # each gen of I in (s) + J
    idempotent: MembershipCertificate  # s - s^2 in J

    def verify(self) -> bool:
        ok = self.s_in_K.verify() and self.idempotent.verify()
        ok = ok and self.s_in_K.element == self.s and self.idempotent.element == self.s - self.s * self.s
        return ok and all(c.verify() for c in self.I_in_sJ)


def _idempotent_mod(I: Ideal, J: Ideal) -> Poly:
    """``e`` in ``I`` with ``(1 - e) I`` inside ``J``, given ``I = J + I^2``."""
    R = I.ring
    a = I.gens
    m = len(a)
    sq_pairs = [(i, j) for i in range(m) for j in range(i, m)]
    target = Ideal(R, [a[i] * a[j] for i, j in sq_pairs] + list(J.gens))
    C = [[R.zero()] * m for _ in range(m)]
    for i, ai in enumerate(a):
        if member(ai, J):
            continue
        try:
            cert = certify_member(ai, target)
        except NotInIdeal:
            raise NakayamaError(f"generator {ai} of I is not in J + I^2") from None
        # a_i = sum h_{jk} a_j a_k + (J part); read c_{ij} = sum_k h_{jk} a_k
        for (p, q), h in zip(sq_pairs, cert.cofactors[:len(sq_pairs)]):
            if not h.is_zero():
                C[i][p] = C[i][p] + h * a[q]
    M = [[(R.one() if r == c else R.zero()) - C[r][c] for c in range(m)] for r in range(m)]
    e = 1 - determinant(M, R)
    if J.gens:
        e, _ = reduce(e, J)
    return e


def nakayama_lift(I: Ideal, J: Ideal, K: Ideal) -> NakayamaLift:
    """Element ``s`` of ``K`` generating ``I`` modulo ``J`` with ``s - s^2`` in ``J``.

    Requires ``I = J + K`` and ``K`` inside ``I^2``.
    """
    R = I.ring
    JK = J + K
    try:
        for g in I.gens:
            certify_member(g, JK)
        for g in JK.gens:
            certify_member(g, I)
    except NotInIdeal as exc:
        raise NakayamaError(f"I != J + K: {exc}") from None
    I2 = I.square()
    for g in K.gens:
        if not member(g, I2):
            raise NakayamaError(f"K is not inside I^2: {g} fails")
    e = _idempotent_mod(I, J)
    # pull e back along K -> I/J
    cert = certify_member(e, Ideal(R, J.gens + K.gens)) if not e.is_zero() else None
    if cert is None:
        s = R.zero()
    else:
        tail = cert.cofactors[len(J.gens):]
        s = dot(tail, K.gens, R)
    s_in_K = certify_member(s, K)
    sJ = Ideal(R, (s,) + J.gens)
    covers = tuple(certify_member(g, sJ) for g in I.gens)
    idem = certify_member(s - s * s, J)
    lift = NakayamaLift(s, I, J, K, s_in_K, covers, idem)
    if not lift.verify():
        raise NakayamaError("internal: lift failed its own verification")
    return lift


@dataclass(frozen=True)
class ThetaPoint:
    point: QuadricPoint
    orientation: LocalOrientation
    s: Poly
    b: tuple[Poly, ...]
    s_in_J2: MembershipCertificate
    J_in_as: tuple[MembershipCertificate, ...]
    as_in_J: tuple[MembershipCertificate, ...]

    @property
    def height_ok(self) -> bool:
        return self.orientation.height >= self.orientation.n

    def verify(self) -> bool:
        a, s, R = self.orientation.a, self.s, self.s.ring
        ok = self.s_in_J2.verify() and self.s_in_J2.element == s
        ok = ok and all(c.verify() for c in self.J_in_as + self.as_in_J)
        return ok and dot(a, self.b, R) == s - s * s


def theta_point(o: LocalOrientation) -> ThetaPoint:
    """The point ``(a, b, s)`` of Q_2n attached to ``J = (a) + J^2``."""
    J = o.J
    R = J.ring
    A = Ideal(R, o.a)
    J2 = J.square()
    lift = nakayama_lift(J, A, J2)
    s = lift.s
    cert = certify_member(s - s * s, A)
    # cofactors line up with the pruned generators of A; realign to o.a
    b = []
    it = iter(cert.cofactors)
    for ai in o.a:
        b.append(R.zero() if ai.is_zero() else next(it))
    point = QuadricPoint(R, o.n, Flavor.Q, tuple(o.a) + tuple(b) + (s,))
    AS = Ideal(R, tuple(o.a) + (s,))
    tp = ThetaPoint(point, o, s, tuple(b), certify_member(s, J2),
                    tuple(certify_member(g, AS) for g in J.gens),
                    tuple(certify_member(g, J) for g in AS.gens))
    return tp


@dataclass(frozen=True)
class HeightReport:
    height: object
    threshold: int

    @property
    def ok(self) -> bool:
        return self.height >= self.threshold


@dataclass(frozen=True)
class MovingStep:
    v: QuadricPoint
    mu: tuple[Poly, ...]
    witness: HomotopyWitness
    moved: QuadricPoint
    K: Ideal
    report: HeightReport
    identity_defect: Poly  # expansion of the proof identity; zero when it holds


def moving_step(v: QuadricPoint, mu: Sequence[Poly], param: str | None = None) -> MovingStep:
    """Homotopy ``(a + X mu (1-s)^2, (1 - X mu.b) b, s + X mu.b (1-s))``."""
    if v.flavor is not Flavor.Q:
        raise ValueError("moving_step expects a point of Q")
    mu = tuple(v.ring(m) if not isinstance(m, Poly) else m for m in mu)
    if len(mu) != v.n:
        raise ValueError(f"mu has length {len(mu)}, expected {v.n}")
    R = v.ring
    param = param or R.fresh_var("X")
    S = R.extend([param])
    X = S.var(param)
    a = [c.change_ring(S) for c in v.x]
    b = [c.change_ring(S) for c in v.y]
    s = v.z.change_ring(S)
    m = [c.change_ring(S) for c in mu]
    mb = dot(m, b, S)
    one_s = 1 - s
    A = [ai + X * mi * one_s * one_s for ai, mi in zip(a, m)]
    B = [(1 - X * mb) * bi for bi in b]
    Z = s + X * mb * one_s
    Ab = dot(A, b, S)
    w = 1 - X * mb
    identity_defect = Ab * w - (one_s * w - one_s * one_s * w * w)
    H = HomotopyWitness(QuadricPoint(S, v.n, Flavor.Q, tuple(A) + tuple(B) + (Z,)), param)
    moved = H.at(1)
    K = associated_ideal(moved)
    return MovingStep(v, mu, H, moved, K, HeightReport(height(K), v.n),
                      identity_defect.change_ring(S))


def default_pool(ring) -> list[Poly]:
    return [ring.const(c) for c in (0, 1, -1)] + list(ring.gens())


@dataclass(frozen=True)
class MovingSearch:
    step: MovingStep
    trial: int
    seed: int


def find_moving_mu(v: QuadricPoint, trials: int = 200, pool: Sequence[Poly] | None = None,
                   seed: int = 0) -> MovingSearch:
    """First ``mu`` (``mu = 0`` then seeded draws from ``pool``) with ``height(K) >= n``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    R = v.ring
    pool = list(pool) if pool is not None else default_pool(R)
    rng = random.Random(seed)
    best = (-1, None)
    zero = tuple(R.zero() for _ in range(v.n))
    for t in range(trials):
        mu = zero if t == 0 else tuple(rng.choice(pool) for _ in range(v.n))
        step = moving_step(v, mu)
        if step.report.ok:
            return MovingSearch(step, t + 1, seed)
        if step.report.height > best[0]:
            best = (step.report.height, mu)
    raise MovingSearchExhausted(trials, best[0], best[1])
