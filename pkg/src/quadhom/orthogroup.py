"""The form q = sum X_i Y_i + Z^2, its orthogonal matrices and elementary words.

Vectors are rows and matrices act on the right, ``v -> v @ M``.  The
hyperbolic basis is labelled ``e1..en`` (x-block), ``f1..fn`` (y-block)
and ``g`` (the z-axis, ``q(g) = 1``).

Two generator kinds span the elementary words used here:

* ``Transvection(u, v, lam)``, the Eichler map
  ``x -> x + lam B(x,u) v - lam B(x,v) u - lam^2 q(v) B(x,u) u``
  with ``u`` an isotropic basis vector and ``B(u, v) = 0``;
* ``Hyperbolic(i, j, lam)``, the block matrix ``diag(s, s^-t, 1)`` with
  ``s = E_ij(lam)`` elementary.

Both expand to ``I + lam P + lam^2 Q`` for integer matrices ``P, Q``; that
is what makes parameter scaling and denominator clearing uniform.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence, Union

from .algcore import AlgebraError, Poly, Ring, RingMismatch, determinant
from .quadric import Flavor, QuadricPoint, alpha, beta

Matrix = tuple[tuple[Poly, ...], ...]


class MalformedGenerator(AlgebraError):
    pass


class NotOrthogonal(AlgebraError):
    def __init__(self, defect: Matrix):
        super().__init__("matrix does not preserve the quadratic form")
        self.defect = defect


# ---------------------------------------------------------------------------
# basis bookkeeping


def basis_index(label: str, n: int) -> int:
    """Coordinate index of ``e<i>``, ``f<i>`` or ``g``."""
    if label == "g":
        return 2 * n
    if len(label) >= 2 and label[0] in "ef" and label[1:].isdigit():
        i = int(label[1:])
        if 1 <= i <= n:
            return i - 1 if label[0] == "e" else n + i - 1
    raise MalformedGenerator(f"bad basis vector {label!r} for n={n}")


def basis_label(idx: int, n: int) -> str:
    if idx == 2 * n:
        return "g"
    return f"e{idx + 1}" if idx < n else f"f{idx - n + 1}"


def _partner(idx: int, n: int) -> int:
    """Index paired with ``idx`` by the polar form (itself for ``g``)."""
    if idx == 2 * n:
        return idx
    return idx + n if idx < n else idx - n


def _gram_column(idx: int, n: int) -> dict[int, int]:
    """``G e_idx^t`` as a sparse column."""
    return {_partner(idx, n): 2 if idx == 2 * n else 1}


def _q_basis(idx: int, n: int) -> int:
    return 1 if idx == 2 * n else 0


@dataclass(frozen=True)
class Transvection:
    u: str
    v: str
    param: object

    def with_param(self, p) -> "Transvection":
        return Transvection(self.u, self.v, p)

    def __str__(self):
        return f"trans({self.u}, {self.v}, {self.param})"


@dataclass(frozen=True)
class Hyperbolic:
    i: int
    j: int
    param: object

    def with_param(self, p) -> "Hyperbolic":
        return Hyperbolic(self.i, self.j, p)

    def __str__(self):
        return f"hyp({self.i}, {self.j}, {self.param})"


OrthGenerator = Union[Transvection, Hyperbolic]


def generator_pq(gen: OrthGenerator, n: int) -> tuple[dict, dict]:
    """Sparse integer matrices ``P, Q`` with ``matrix(gen) = I + lam P + lam^2 Q``."""
    P: dict = {}
    Q: dict = {}
    if isinstance(gen, Transvection):
        u = basis_index(gen.u, n)
        v = basis_index(gen.v, n)
        if _q_basis(u, n) != 0:
            raise MalformedGenerator(f"transvection vector {gen.u} is not isotropic")
        if _partner(u, n) == v:
            raise MalformedGenerator(f"{gen.v} is not orthogonal to {gen.u}")
        gu = _gram_column(u, n)
        gv = _gram_column(v, n)
        for r, c in gu.items():
            P[(r, v)] = P.get((r, v), 0) + c
        for r, c in gv.items():
            P[(r, u)] = P.get((r, u), 0) - c
        qv = _q_basis(v, n)
        if qv:
            for r, c in gu.items():
                Q[(r, u)] = Q.get((r, u), 0) - qv * c
    elif isinstance(gen, Hyperbolic):
        i, j = gen.i, gen.j
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise MalformedGenerator(f"bad hyperbolic indices ({i}, {j}) for n={n}")
        P[(i - 1, j - 1)] = 1
        P[(n + j - 1, n + i - 1)] = -1
    else:
        raise MalformedGenerator(f"unknown generator {gen!r}")
    return ({k: c for k, c in P.items() if c}, {k: c for k, c in Q.items() if c})


# ---------------------------------------------------------------------------
# matrices


def identity(ring: Ring, size: int) -> Matrix:
    z, o = ring.zero(), ring.one()
    return tuple(tuple(o if r == c else z for c in range(size)) for r in range(size))


def matmul(A: Matrix, B: Matrix) -> Matrix:
    ring = A[0][0].ring
    m, k, n = len(A), len(B), len(B[0])
    out = []
    for r in range(m):
        row = []
        Ar = A[r]
        for c in range(n):
            acc = ring.zero()
            for t in range(k):
                a = Ar[t]
                if a.terms:
                    b = B[t][c]
                    if b.terms:
                        acc = acc + a * b
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def vecmat(v: Sequence[Poly], M: Matrix) -> tuple[Poly, ...]:
    ring = M[0][0].ring
    out = []
    for c in range(len(M[0])):
        acc = ring.zero()
        for t, a in enumerate(v):
            if a.terms:
                b = M[t][c]
                if b.terms:
                    acc = acc + a * b
        out.append(acc)
    return tuple(out)


def gram(ring: Ring, n: int) -> Matrix:
    """Gram matrix of the polar form ``B(u, v) = q(u+v) - q(u) - q(v)``."""
    size = 2 * n + 1
    rows = [[ring.zero()] * size for _ in range(size)]
    for i in range(n):
        rows[i][n + i] = ring.one()
        rows[n + i][i] = ring.one()
    rows[2 * n][2 * n] = ring.const(2)
    return tuple(tuple(r) for r in rows)


def quadratic_form(v: Sequence[Poly], n: int) -> Poly:
    out = v[2 * n] * v[2 * n]
    for i in range(n):
        out = out + v[i] * v[n + i]
    return out


def polar_form(u: Sequence[Poly], v: Sequence[Poly], n: int) -> Poly:
    out = 2 * u[2 * n] * v[2 * n]
    for i in range(n):
        out = out + u[i] * v[n + i] + u[n + i] * v[i]
    return out


def pq_matrix(ring: Ring, size: int, terms: Sequence[tuple[Poly, dict]]) -> Matrix:
    """``sum(coeff * P)`` where each ``P`` is a sparse integer matrix."""
    rows = [[ring.zero()] * size for _ in range(size)]
    for coeff, P in terms:
        for (r, c), k in P.items():
            rows[r][c] = rows[r][c] + coeff * k
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class OrthMatrix:
    """A square matrix of size ``2n+1``; orthogonality is checked where required."""

    ring: Ring
    n: int
    rows: Matrix

    def __post_init__(self):
        size = 2 * self.n + 1
        if len(self.rows) != size or any(len(r) != size for r in self.rows):
            raise ValueError(f"expected a {size}x{size} matrix")

    def __matmul__(self, other: "OrthMatrix") -> "OrthMatrix":
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        return OrthMatrix(self.ring, self.n, matmul(self.rows, other.rows))

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "OrthMatrix":
        return cls(ring, n, identity(ring, 2 * n + 1))

    def __str__(self):
        return "\n".join("[" + ", ".join(map(str, r)) + "]" for r in self.rows)


def orthogonality_defect(M: OrthMatrix) -> Matrix:
    """``M G M^t - G``; the zero matrix exactly when ``M`` preserves the form."""
    G = gram(M.ring, M.n)
    return mat_sub(matmul(matmul(M.rows, G), transpose(M.rows)), G)


def is_orthogonal(M: OrthMatrix) -> bool:
    return all(e.is_zero() for row in orthogonality_defect(M) for e in row)


def preserves_form_symbolically(M: OrthMatrix) -> bool:
    """``q(v M) - q(v) == 0`` for a vector of fresh indeterminates ``v``."""
    size = 2 * M.n + 1
    names = []
    base = M.ring
    for k in range(size):
        nm = base.fresh_var(f"v{k}")
        names.append(nm)
    S = base.extend(names)
    v = tuple(S.var(nm) for nm in names)
    rows = tuple(tuple(e.change_ring(S) for e in r) for r in M.rows)
    w = vecmat(v, rows)
    return (quadratic_form(w, M.n) - quadratic_form(v, M.n)).is_zero()


def det(M: OrthMatrix) -> Poly:
    return determinant([list(r) for r in M.rows], M.ring)


def generator_matrix(gen: OrthGenerator, ring: Ring, n: int) -> OrthMatrix:
    lam = gen.param
    if not isinstance(lam, Poly):
        raise AlgebraError("generator parameter must be a polynomial; clear denominators first")
    if lam.ring != ring:
        raise RingMismatch(f"parameter {lam} lives in {lam.ring}, expected {ring}")
    P, Q = generator_pq(gen, n)
    size = 2 * n + 1
    rows = pq_matrix(ring, size, [(lam, P), (lam * lam, Q)] if Q else [(lam, P)])
    return OrthMatrix(ring, n, tuple(
        tuple(e + 1 if r == c else e for c, e in enumerate(row)) for r, row in enumerate(rows)))


# ---------------------------------------------------------------------------
# words


def _param_ring(p):
    return p.ring


@dataclass(frozen=True)
class OrthWord:
    """A product of generators, applied left to right on row vectors.

    Parameters are polynomials, or localized elements for words over a
    localization (see ``localpatch``); words keep their factors unexpanded
    so that parameters can be rescaled or specialised.
    """

    ring: Ring
    n: int
    factors: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        for gen in self.factors:
            generator_pq(gen, self.n)
            if _param_ring(gen.param) != self.ring:
                raise RingMismatch(f"parameter of {gen} lives outside {self.ring}")

    def __len__(self):
        return len(self.factors)

    def __str__(self):
        return "word[" + ", ".join(map(str, self.factors)) + "]"

    def __mul__(self, other: "OrthWord") -> "OrthWord":
        if other.ring != self.ring or other.n != self.n:
            raise RingMismatch("words over different rings or sizes")
        return OrthWord(self.ring, self.n, self.factors + other.factors)

    @property
    def is_localized(self) -> bool:
        return any(not isinstance(g.param, Poly) for g in self.factors)

    def inverse(self) -> "OrthWord":
        return OrthWord(self.ring, self.n, tuple(g.with_param(-g.param) for g in reversed(self.factors)))

    def map_params(self, fn: Callable, ring: Ring | None = None) -> "OrthWord":
        facs = tuple(g.with_param(fn(g.param)) for g in self.factors)
        if ring is None:
            ring = _param_ring(facs[0].param) if facs else self.ring
        return OrthWord(ring, self.n, facs)

    def change_ring(self, target: Ring) -> "OrthWord":
        return self.map_params(lambda p: p.change_ring(target), target)

    def scaled(self, t: Poly) -> "OrthWord":
        """Replace every parameter ``lam`` by ``t * lam``."""
        return self.map_params(lambda p: _scale_param(p, t), self.ring)

    def subs(self, bindings, target: Ring | None = None) -> "OrthWord":
        tgt = target
        if tgt is None:
            rings = {b.ring for b in bindings.values() if isinstance(b, Poly)}
            tgt = rings.pop() if rings else self.ring
        return self.map_params(lambda p: p.subs(bindings, tgt), tgt)

    @cached_property
    def matrix(self) -> OrthMatrix:
        return expand(self)


def _scale_param(p, t: Poly):
    if isinstance(p, Poly):
        return t * p
    return p.scale_by(t)


def expand(w: OrthWord) -> OrthMatrix:
    """Product matrix of a polynomial word; raises if it fails to preserve the form."""
    if w.is_localized:
        raise AlgebraError("localized word: expand with localpatch.expand_local")
    M = OrthMatrix.identity(w.ring, w.n)
    for gen in w.factors:
        M = M @ generator_matrix(gen, w.ring, w.n)
    d = orthogonality_defect(M)
    if any(not e.is_zero() for row in d for e in row):
        raise NotOrthogonal(d)
    return M


def act(v: QuadricPoint, w: "OrthWord | OrthMatrix") -> QuadricPoint:
    """Right action; on Q it is transported as ``alpha(beta(v) M)``."""
    M = w.matrix if isinstance(w, OrthWord) else w
    if M.n != v.n:
        raise ValueError(f"size mismatch: point has n={v.n}, matrix n={M.n}")
    if M.ring != v.ring:
        raise RingMismatch(f"{v.ring} vs {M.ring}")
    if v.flavor is Flavor.QPRIME:
        return QuadricPoint(v.ring, v.n, v.flavor, vecmat(v.coords, M.rows))
    return alpha(act(beta(v), M))


def isotropic_labels(n: int) -> list[str]:
    return [f"e{i}" for i in range(1, n + 1)] + [f"f{i}" for i in range(1, n + 1)]


def orthogonal_labels(u: str, n: int) -> list[str]:
    """Basis vectors ``v`` allowed with ``u``: all but ``u`` and its partner."""
    ui = basis_index(u, n)
    return [basis_label(k, n) for k in range(2 * n + 1) if k != ui and k != _partner(ui, n)]


def random_generator(ring: Ring, n: int, rng: random.Random, pool: Sequence[Poly]) -> OrthGenerator:
    lam = rng.choice(pool)
    if rng.random() < 0.6:
        u = rng.choice(isotropic_labels(n))
        return Transvection(u, rng.choice(orthogonal_labels(u, n)), lam)
    i, j = rng.sample(range(1, n + 1), 2)
    return Hyperbolic(i, j, lam)


def random_word(ring: Ring, n: int, length: int, rng: random.Random,
                pool: Sequence[Poly] | None = None) -> OrthWord:
    if pool is None:
        pool = [ring.const(c) for c in (1, -1, 2)] + list(ring.gens())
    return OrthWord(ring, n, tuple(random_generator(ring, n, rng, pool) for _ in range(length)))
