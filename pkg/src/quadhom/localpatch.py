"""Localization, Laurent reversal, splitting and gluing, and the monic inversion pipeline.

Everything stays inside polynomial rings: an element of ``A_s`` is a pair
``(num, s^k)``, a localized matrix is ``N / s^k`` with a polynomial ``N``,
and ``A[T, T^-1]_f`` is read as ``A[Y]_{Y f*}`` with ``Y = 1/T``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .algcore import AlgebraError, Poly, Ring, RingMismatch
from .homotopy import (HomotopyChain, HomotopyWitness, concatenate, elementary_homotopy,
                       path_to_one, verify_chain)
from .idealkit import BezoutCertificate, Ideal, MembershipCertificate, certify_member, comaximal, member
from .orthogroup import (OrthWord, generator_pq, identity, matmul, pq_matrix, vecmat)
from .quadric import Flavor, QuadricPoint, base_point, beta


class NotMonic(AlgebraError):
    def __init__(self, f: Poly, var: str):
        super().__init__(f"{f} is not monic in {var} (leading coefficient {f.leading_coeff_in(var)})")
        self.f = f


class GluingDisagreement(AlgebraError):
    def __init__(self, defect: Poly):
        super().__init__(f"local pieces disagree: defect {defect}")
        self.defect = defect


class LiftSearchExhausted(AlgebraError):
    def __init__(self, trials: int):
        super().__init__(f"no generator lift found in {trials} trials; the search is incomplete")
        self.trials = trials


class PreconditionFailed(AlgebraError):
    def __init__(self, message: str, defect: Poly):
        super().__init__(f"{message}: defect {defect}")
        self.defect = defect


# ---------------------------------------------------------------------------
# localized elements and matrices


@dataclass(frozen=True, eq=False)
class LocalizedElement:
    """``num / base^k`` in ``A_base``; ``A`` is a polynomial ring over a field."""

    num: Poly
    base: Poly
    k: int = 1

    def __post_init__(self):
        if self.base.is_zero():
            raise ZeroDivisionError("cannot localize at zero")
        if self.k < 0:
            raise ValueError("exponent must be nonnegative")
        if self.num.ring != self.base.ring:
            raise RingMismatch("numerator and base in different rings")

    @classmethod
    def of(cls, x, base: Poly) -> "LocalizedElement":
        if isinstance(x, LocalizedElement):
            if x.base != base:
                raise RingMismatch(f"element localized at {x.base}, expected {base}")
            return x
        return cls(base.ring(x), base, 0)

    @property
    def ring(self) -> Ring:
        return self.num.ring

    def __str__(self):
        if self.k == 0:
            return str(self.num)
        den = f"({self.base})" if len(self.base.terms) > 1 else str(self.base)
        if self.k > 1:
            den += f"^{self.k}"
        return f"({self.num})/{den}"

    def __repr__(self):
        return f"LocalizedElement({self})"

    def __eq__(self, other):
        if isinstance(other, Poly):
            other = LocalizedElement(other, self.base, 0)
        if not isinstance(other, LocalizedElement):
            return NotImplemented
        return self.num * other.base ** other.k == other.num * self.base ** self.k

    def __hash__(self):
        # equal elements may carry different bases
        return hash(self.ring)

    def _align(self, other):
        other = LocalizedElement.of(other, self.base)
        k = max(self.k, other.k)
        a = self.num * self.base ** (k - self.k)
        b = other.num * self.base ** (k - other.k)
        return a, b, k

    def __add__(self, other):
        a, b, k = self._align(other)
        return LocalizedElement(a + b, self.base, k)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, k = self._align(other)
        return LocalizedElement(a - b, self.base, k)

    def __neg__(self):
        return LocalizedElement(-self.num, self.base, self.k)

    def __mul__(self, other):
        other = LocalizedElement.of(other, self.base)
        return LocalizedElement(self.num * other.num, self.base, self.k + other.k)

    __rmul__ = __mul__

    def scale_by(self, t: Poly) -> "LocalizedElement":
        return LocalizedElement(t * self.num, self.base, self.k)

    def relocalize(self, factor: Poly) -> "LocalizedElement":
        """The same element read in ``A_{base * factor}``."""
        return LocalizedElement(self.num * factor ** self.k, self.base * factor, self.k)

    def change_ring(self, target: Ring) -> "LocalizedElement":
        return LocalizedElement(self.num.change_ring(target), self.base.change_ring(target), self.k)

    def subs(self, bindings, target: Ring | None = None):
        """Specialize; collapses to a polynomial when the base becomes a unit."""
        num = self.num.subs(bindings, target)
        base = self.base.subs(bindings, num.ring)
        if base.is_zero():
            raise ZeroDivisionError(f"specialization sends the denominator {self.base} to zero")
        if base.is_constant():
            return num / base.constant_value() ** self.k if self.k else num
        return LocalizedElement(num, base, self.k)

    def to_poly(self) -> Poly:
        """Exact polynomial value; raises if the denominator does not divide."""
        if self.k == 0:
            return self.num
        return self.num.divexact(self.base ** self.k)


@dataclass(frozen=True)
class LocalMatrix:
    """``rows / base^k``."""

    rows: tuple
    base: Poly
    k: int

    def at_exponent(self, k: int):
        if k < self.k:
            raise ValueError("can only raise the exponent")
        c = self.base ** (k - self.k)
        return tuple(tuple(c * e for e in r) for r in self.rows)


def expand_local(w: OrthWord, base: Poly) -> LocalMatrix:
    """Matrix of a word with parameters in ``A_base``, over a common denominator.

    For ``lam = a / s^k`` the generator ``I + lam P + lam^2 Q`` becomes
    ``(s^2k I + a s^k P + a^2 Q) / s^2k``.
    """
    R = w.ring
    size = 2 * w.n + 1
    rows = identity(R, size)
    total = 0
    for gen in w.factors:
        lam = LocalizedElement.of(gen.param, base)
        P, Q = generator_pq(gen, w.n)
        sk = base ** lam.k
        terms = [(lam.num * sk, P)]
        if Q:
            terms.append((lam.num * lam.num, Q))
        G = pq_matrix(R, size, terms)
        d = sk * sk
        G = tuple(tuple(e + d if r == c else e for c, e in enumerate(row)) for r, row in enumerate(G))
        rows = matmul(rows, G)
        total += 2 * lam.k
    return LocalMatrix(rows, base, total)


def rebase(x, f: Poly, max_power: int = 64):
    """Read ``num / d^k`` as ``num' / f^j`` when ``d^k`` divides a power of ``f``."""
    if not isinstance(x, LocalizedElement):
        return x
    if x.base == f or x.k == 0:
        return LocalizedElement(x.num, f, 0) if x.k == 0 else x
    dk = x.base ** x.k
    fj = f.ring.one()
    for j in range(1, max_power + 1):
        fj = fj * f
        try:
            q = fj.divexact(dk)
        except AlgebraError:
            continue
        return LocalizedElement(x.num * q, f, j)
    raise AlgebraError(f"denominator {x.base}^{x.k} does not divide a power of {f}")


def rebase_word(w: OrthWord, f: Poly) -> OrthWord:
    return w.map_params(lambda p: rebase(p, f), w.ring)


def relocalize_word(w: OrthWord, factor: Poly) -> OrthWord:
    """Read every parameter in ``A_{base * factor}``."""
    def move(p):
        return p.relocalize(factor) if isinstance(p, LocalizedElement) else p
    return w.map_params(move, w.ring)


def localized_defect(v: QuadricPoint, w: OrthWord, base: Poly, target: QuadricPoint) -> Poly | None:
    """First nonzero coordinate of ``v N - target s^k`` where ``v w = v N / s^k``."""
    M = expand_local(w, base)
    lhs = vecmat(v.coords, M.rows)
    c = base ** M.k
    for a, b in zip(lhs, target.coords):
        d = a - b * c
        if not d.is_zero():
            return d
    return None


# ---------------------------------------------------------------------------
# monic polynomials and Laurent reversal


def monic_check(f: Poly, var: str) -> int | None:
    """Degree of ``f`` in ``var`` if its leading coefficient there is 1, else None."""
    if f.is_zero():
        return None
    lc = f.leading_coeff_in(var)
    return f.degree_in(var) if lc == 1 else None


@dataclass(frozen=True)
class LaurentReversal:
    f: Poly
    f_star: Poly
    degree: int
    T: str
    Y: str
    bezout: BezoutCertificate  # 1 = f* - Y q

    @property
    def ring(self) -> Ring:
        return self.f_star.ring

    def verify(self) -> bool:
        zero = self.f_star.subs({self.Y: 0})
        return zero == 1 and self.bezout.verify() and self.bezout.u.element == self.f_star


def laurent_reverse(f: Poly, T: str = "T", Y: str | None = None) -> LaurentReversal:
    """``f* = Y^m f(1/Y)`` for ``f`` monic of degree ``m`` in ``T``, over ``A[Y]``."""
    m = monic_check(f, T)
    if m is None:
        raise NotMonic(f, T)
    Y = Y or f.ring.fresh_var("Y")
    S = f.ring.rename(T, Y)
    y = S.var(Y)
    fs = S.zero()
    for d, c in f.coeffs_in(T).items():
        fs = fs + _t_free(c, T).change_ring(S) * y ** (m - d)
    q = (fs - 1).divexact(y) if m else S.zero()
    u = MembershipCertificate(fs, (fs,), (S.one(),))
    v = MembershipCertificate(-y * q, (y,), (-q,))
    rev = LaurentReversal(f, fs, m, T, Y, BezoutCertificate(u, v))
    if not rev.verify():
        raise AlgebraError("internal: reversal failed its own check")
    return rev


def _t_free(p: Poly, T: str) -> Poly:
    return p.change_ring(p.ring.drop(T))


def to_laurent(x, rev: LaurentReversal) -> LocalizedElement:
    """``a / f^k`` in ``A[T]_f`` read in ``A[Y]_{Y f*}``."""
    f, T, Y = rev.f, rev.T, rev.Y
    S = rev.ring
    y = S.var(Y)
    if isinstance(x, LocalizedElement):
        if x.base != f:
            raise RingMismatch(f"element localized at {x.base}, expected {f}")
        a, k = x.num, x.k
    else:
        a, k = f.ring(x), 0
    m = rev.degree
    da = a.degree_in(T) if not a.is_zero() else 0
    a_star = S.zero()
    for d, c in a.coeffs_in(T).items():
        a_star = a_star + _t_free(c, T).change_ring(S) * y ** (da - d)
    # a(1/Y) / f(1/Y)^k = a* Y^(mk - da) / f*^k
    K = max(k, da - m * k)
    num = a_star * y ** (m * k - da + K) * rev.f_star ** (K - k)
    return LocalizedElement(num, y * rev.f_star, K)


def laurent_word(w: OrthWord, rev: LaurentReversal) -> OrthWord:
    return w.map_params(lambda p: to_laurent(p, rev), rev.ring)


# ---------------------------------------------------------------------------
# splitting and gluing


@dataclass(frozen=True)
class SplitCertificate:
    f: Poly
    g: Poly
    bezout: BezoutCertificate
    exponent: int


@dataclass(frozen=True)
class SplitFailure:
    defect: Poly
    entry: tuple[int, int]

    def __bool__(self):
        return False

    def __str__(self):
        return f"split fails at entry {self.entry}: defect {self.defect}"


def _at(w: OrthWord, base: Poly, factor: Poly) -> OrthWord:
    """Parameters of ``w`` (over ``A_base``) read in ``A_{base*factor}``."""
    def move(p):
        return LocalizedElement.of(p, base).relocalize(factor)
    return w.map_params(move, w.ring)


def verify_split(sigma: OrthWord, gamma: OrthWord, beta_: OrthWord, f: Poly, g: Poly):
    """Check ``sigma = gamma beta`` in ``A_{fg}``; ``gamma`` over ``A_f``, ``beta`` over ``A_g``."""
    bez = comaximal(Ideal(f.ring, [f]), Ideal(f.ring, [g]))
    fg = f * g
    Ms = expand_local(_at(sigma, fg, f.ring.one()), fg)
    Mg = expand_local(_at(gamma, f, g), fg)
    Mb = expand_local(_at(beta_, g, f), fg)
    prod = matmul(Mg.rows, Mb.rows)
    lhs = Ms.at_exponent(max(Ms.k, Mg.k + Mb.k))
    c = fg ** (max(Ms.k, Mg.k + Mb.k) - Mg.k - Mb.k)
    for r, (row_l, row_r) in enumerate(zip(lhs, prod)):
        for col, (a, b) in enumerate(zip(row_l, row_r)):
            d = a - c * b
            if not d.is_zero():
                return SplitFailure(d, (r, col))
    return SplitCertificate(f, g, bez, max(Ms.k, Mg.k + Mb.k))


@dataclass(frozen=True)
class GlueCertificate:
    value: Poly
    p: LocalizedElement
    q: LocalizedElement
    u: Poly
    v: Poly

    def verify(self) -> bool:
        fk = self.p.base ** self.p.k
        gl = self.q.base ** self.q.k
        return (self.u * fk + self.v * gl == 1 and self.value * fk == self.p.num
                and self.value * gl == self.q.num)


def glue_bezout(fk: Poly, gl: Poly) -> tuple[Poly, Poly]:
    """``u, v`` with ``u fk + v gl = 1``."""
    R = fk.ring
    cert = comaximal(Ideal(R, [fk]), Ideal(R, [gl]))
    return cert.u.cofactors[0], cert.v.cofactors[0]


def glue_element(p: LocalizedElement, q: LocalizedElement, bezout: tuple[Poly, Poly] | None = None) -> GlueCertificate:
    """The global ``x`` with ``x = p.num / f^k`` and ``x = q.num / g^l``."""
    fk = p.base ** p.k
    gl = q.base ** q.k
    d = p.num * gl - q.num * fk
    if not d.is_zero():
        raise GluingDisagreement(d)
    u, v = bezout if bezout is not None else glue_bezout(fk, gl)
    if not (u * fk + v * gl == 1):
        raise AlgebraError("supplied Bezout data does not sum to 1")
    x = u * p.num + v * q.num
    cert = GlueCertificate(x, p, q, u, v)
    if not cert.verify():
        raise AlgebraError("internal: glued element fails its check")
    return cert


@dataclass(frozen=True)
class GluedPoint:
    point: QuadricPoint
    coords: tuple[GlueCertificate, ...]


def glue_point(left: Sequence[LocalizedElement], right: Sequence[LocalizedElement],
               n: int, flavor: Flavor) -> GluedPoint:
    """Coordinate-wise gluing, re-validated on the quadric."""
    if len(left) != len(right):
        raise ValueError("coordinate count mismatch")
    certs = []
    cache: dict = {}
    for p, q in zip(left, right):
        key = (p.base, p.k, q.base, q.k)
        if key not in cache:
            cache[key] = glue_bezout(p.base ** p.k, q.base ** q.k)
        certs.append(glue_element(p, q, cache[key]))
    pt = QuadricPoint(certs[0].value.ring, n, flavor, tuple(c.value for c in certs))
    return GluedPoint(pt, tuple(certs))


def local_action(v: QuadricPoint, w: OrthWord, base: Poly) -> list[LocalizedElement]:
    M = expand_local(w, base)
    return [LocalizedElement(c, base, M.k) for c in vecmat(v.coords, M.rows)]


# ---------------------------------------------------------------------------
# the pipeline


@dataclass(frozen=True)
class PipelineStep:
    name: str
    ok: bool
    detail: str
    data: object = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class PipelineResult:
    chain: HomotopyChain | None
    steps: tuple[PipelineStep, ...]
    complete: bool
    remaining: str = ""


@dataclass(frozen=True)
class SplitWitness:
    """``sigma`` read in ``A[Y]_{Y f*}`` equals ``sigma1 sigma2``."""

    sigma1: OrthWord  # parameters in A[Y]_{f*}
    sigma2: OrthWord  # parameters in A[Y]_Y


def _specialize_word(w: OrthWord, bindings, target: Ring) -> OrthWord:
    def spec(p):
        out = p.subs(bindings, target)
        if isinstance(out, LocalizedElement):
            raise AlgebraError(f"parameter {p} does not specialize to a polynomial")
        return out
    return w.map_params(spec, target)


def monic_pipeline(v: QuadricPoint, f: Poly, sigma: OrthWord, T: str = "T",
                   split_witness: SplitWitness | None = None) -> PipelineResult:
    """Link ``v`` to the base point over ``A[T]`` given ``v sigma = base`` over ``A[T]_f``."""
    if v.flavor is not Flavor.QPRIME:
        raise ValueError("monic_pipeline expects a point of Q'")
    R = v.ring
    m = monic_check(f, T)
    if m is None:
        raise NotMonic(f, T)
    base = base_point(R, v.n, Flavor.QPRIME)
    steps = []
    d = localized_defect(v, sigma, f, base)
    if d is not None:
        raise PreconditionFailed("sigma does not send v to the base point over A[T]_f", d)
    steps.append(PipelineStep("precondition", True, f"v sigma = base over localization at {f}"))

    if f == R.var(T):
        first = HomotopyChain((path_to_one(v, T),))
        v1 = first.endpoints()[1]
        s1 = _specialize_word(sigma, {T: 1}, R)
        steps.append(PipelineStep("path", True, "v ~ v(1) by T -> T + X(1 - T)", first))
        second = elementary_homotopy(v1, s1)
        steps.append(PipelineStep("elementary", True, "v(1) ~ base by sigma(1)", second))
        chain = concatenate([first, second])
        cert = verify_chain(chain, v, base)
        steps.append(PipelineStep("chain", bool(cert), str(cert) if not cert else "verified"))
        return PipelineResult(chain if cert else None, tuple(steps), bool(cert))

    if any(not c.free_of(T) for c in v.coords):
        return PipelineResult(None, tuple(steps), False,
                              "v depends on T; an extendedness witness v ~ v(0) must be supplied")
    A = R.drop(T)
    vA = v.change_ring(A)
    rev = laurent_reverse(f, T)
    S = rev.ring
    Y = rev.Y
    y = S.var(Y)
    steps.append(PipelineStep("reverse", rev.verify(), f"f* = {rev.f_star}", rev))
    if split_witness is None:
        return PipelineResult(None, tuple(steps), False,
                              "no split witness: supply sigma1 over the localization at f* and "
                              "sigma2 over the localization at Y")
    sigL = laurent_word(sigma, rev)
    s1, s2 = split_witness.sigma1, split_witness.sigma2
    sp = verify_split(sigL, s1, s2, rev.f_star, y)
    steps.append(PipelineStep("split", bool(sp), str(sp) if not sp else "sigma = sigma1 sigma2",
                              (sigL, s1, s2, sp)))
    if not sp:
        return PipelineResult(None, tuple(steps), False, "split witness rejected")
    vS = vA.change_ring(S)
    baseS = base_point(S, v.n, Flavor.QPRIME)
    left = local_action(vS, s1, rev.f_star)
    right = local_action(baseS, s2.inverse(), y)
    try:
        glued = glue_point(left, right, v.n, Flavor.QPRIME)
    except GluingDisagreement as exc:
        steps.append(PipelineStep("glue", False, str(exc)))
        return PipelineResult(None, tuple(steps), False, "gluing failed")
    steps.append(PipelineStep("glue", True, f"w = {glued.point}", glued))
    w = glued.point
    s1_0 = _specialize_word(s1, {Y: 0}, A)
    s2_1 = _specialize_word(s2, {Y: 1}, A)
    c1 = elementary_homotopy(vA, s1_0)
    link = HomotopyChain((HomotopyWitness(w, Y),))
    c2 = elementary_homotopy(link.endpoints()[1], s2_1)
    chainA = concatenate([c1, link, c2])
    certA = verify_chain(chainA, vA, base_point(A, v.n, Flavor.QPRIME))
    steps.append(PipelineStep("chain", bool(certA), str(certA) if not certA else
                              "v ~ v sigma1(0) = w(0) ~ w(1) ~ base", chainA))
    if not certA:
        return PipelineResult(None, tuple(steps), False, "chain over A failed")
    chain = chainA.change_base(R)
    cert = verify_chain(chain, v, base)
    return PipelineResult(chain if cert else None, tuple(steps), bool(cert))


def common_monic_denominator(items: Sequence[tuple[OrthWord, Poly]], T: str = "T"):
    """Relocalize words over ``A[T]_{f_i}`` to the product of the monic ``f_i``."""
    if not items:
        raise ValueError("need at least one localized word")
    F = items[0][1].ring.one()
    for _, f in items:
        if monic_check(f, T) is None:
            raise NotMonic(f, T)
        F = F * f
    out = []
    for w, f in items:
        out.append(_at(w, f, F.divexact(f)))
    return F, out


# ---------------------------------------------------------------------------
# ideal-theoretic wrapper


@dataclass(frozen=True)
class GeneratorLift:
    g: tuple[Poly, ...]
    pipeline: PipelineResult
    generate: tuple[MembershipCertificate, ...]  # gens of I in (g)
    inside: tuple[MembershipCertificate, ...]  # g_i in I
    close: tuple[MembershipCertificate, ...]  # g_i - f_i in I^2


def lift_generators(I: Ideal, f_gens: Sequence[Poly], monic: Poly, sigma: OrthWord, T: str = "T",
                    split_witness: SplitWitness | None = None, trials: int = 200,
                    pool: Sequence[Poly] | None = None, seed: int = 0) -> GeneratorLift:
    """Generators ``g_i = f_i + s c_i`` of ``I`` once the theta point is trivial.

    ``sigma`` must trivialize ``beta(theta)`` over ``A[T]_monic``.  The
    ``c_i`` are searched (seeded) and every output is certified.
    """
    from .eulerlift import LocalOrientation, theta_point

    o = LocalOrientation.build(I, f_gens)
    tp = theta_point(o)
    res = monic_pipeline(beta(tp.point), monic, sigma, T, split_witness)
    if not res.complete:
        raise AlgebraError("pipeline incomplete: " + (res.remaining or "chain rejected"))
    R = I.ring
    pool = list(pool) if pool is not None else [R.const(c) for c in (0, 1, -1)] + list(R.gens())
    rng = random.Random(seed)
    I2 = I.square()
    f_gens = tuple(f_gens)
    for t in range(trials):
        cs = (R.zero(),) * len(f_gens) if t == 0 else tuple(rng.choice(pool) for _ in f_gens)
        g = tuple(fi + tp.s * ci for fi, ci in zip(f_gens, cs))
        G = Ideal(R, g)
        if all(member(h, G) for h in I.gens):
            gen = tuple(certify_member(h, G) for h in I.gens)
            inside = tuple(certify_member(gi, I) for gi in g)
            close = tuple(certify_member(gi - fi, I2) for gi, fi in zip(g, f_gens))
            return GeneratorLift(g, res, gen, inside, close)
    raise LiftSearchExhausted(trials)
