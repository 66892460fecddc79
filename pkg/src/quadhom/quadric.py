"""Points of the affine quadrics Q_2n and Q'_2n over a polynomial ring.

Coordinates are ordered ``(x_1..x_n, y_1..y_n, z)``.  The two flavors are

* ``Flavor.QPRIME``:  sum x_i y_i + z^2 = 1,   base point (0, ..., 0, 1)
* ``Flavor.Q``:       sum x_i y_i = z - z^2,   base point (0, ..., 0, 0)

and :func:`beta` / :func:`alpha` are the mutually inverse bijections
between them.  Points are validated on construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algcore import AlgebraError, Poly, Ring, RingMismatch, dot
from .idealkit import Ideal


class Flavor(enum.Enum):
    Q = "Q"
    QPRIME = "Qprime"

    @classmethod
    def parse(cls, text: str) -> "Flavor":
        t = text.strip()
        if t in ("Q", "q"):
            return cls.Q
        if t in ("Qprime", "Q'", "qprime"):
            return cls.QPRIME
        raise ValueError(f"unknown quadric flavor {text!r}")


class NotOnQuadric(AlgebraError):
    """Coordinates violate the defining identity; ``defect`` is the nonzero residual."""

    def __init__(self, defect: Poly, flavor: Flavor):
        super().__init__(f"not a point of {flavor.value}: defect {defect}")
        self.defect = defect
        self.flavor = flavor


def defect(coords: Sequence[Poly], n: int, flavor: Flavor) -> Poly:
    """``sum x_i y_i + z^2 - 1`` (Q') or ``sum x_i y_i - z + z^2`` (Q)."""
    ring = coords[0].ring
    xs, ys, z = coords[:n], coords[n:2 * n], coords[2 * n]
    s = dot(xs, ys, ring)
    if flavor is Flavor.QPRIME:
        return s + z * z - 1
    return s - z + z * z


@dataclass(frozen=True)
class QuadricPoint:
    ring: Ring
    n: int
    flavor: Flavor
    coords: tuple[Poly, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        coords = tuple(self.ring(c) if not isinstance(c, Poly) else c for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != 2 * self.n + 1:
            raise ValueError(f"expected {2 * self.n + 1} coordinates, got {len(coords)}")
        for c in coords:
            if c.ring != self.ring:
                raise RingMismatch(f"coordinate {c} lives in {c.ring}, expected {self.ring}")
        d = defect(coords, self.n, self.flavor)
        if not d.is_zero():
            raise NotOnQuadric(d, self.flavor)

    @property
    def x(self) -> tuple[Poly, ...]:
        return self.coords[:self.n]

    @property
    def y(self) -> tuple[Poly, ...]:
        return self.coords[self.n:2 * self.n]

    @property
    def z(self) -> Poly:
        return self.coords[2 * self.n]

    def __str__(self):
        return f"{self.flavor.value}[" + ", ".join(map(str, self.coords)) + "]"

    def change_ring(self, target: Ring) -> "QuadricPoint":
        return QuadricPoint(target, self.n, self.flavor, tuple(c.change_ring(target) for c in self.coords))

    def subs(self, bindings: Mapping[str, object], target: Ring | None = None) -> "QuadricPoint":
        """Image under the substitution homomorphism (re-validated)."""
        coords = tuple(c.subs(bindings, target) for c in self.coords)
        return QuadricPoint(coords[0].ring, self.n, self.flavor, coords)

    def is_base(self) -> bool:
        return self == base_point(self.ring, self.n, self.flavor)


def check(coords: Sequence, n: int, flavor: Flavor, ring: Ring | None = None) -> QuadricPoint:
    """Build a point, raising :class:`NotOnQuadric` with the defect on failure."""
    if ring is None:
        ring = next(c.ring for c in coords if isinstance(c, Poly))
    return QuadricPoint(ring, n, flavor, tuple(coords))


def base_point(ring: Ring, n: int, flavor: Flavor) -> QuadricPoint:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    zero = ring.zero()
    last = ring.one() if flavor is Flavor.QPRIME else zero
    return QuadricPoint(ring, n, flavor, (zero,) * (2 * n) + (last,))


def beta(v: QuadricPoint) -> QuadricPoint:
    """Q -> Q': scale x, y by 2 and send z to 1 - 2z."""
    if v.flavor is not Flavor.Q:
        raise ValueError("beta expects a point of Q")
    two = v.ring.const(2)
    coords = tuple(two * c for c in v.coords[:-1]) + (1 - two * v.z,)
    return QuadricPoint(v.ring, v.n, Flavor.QPRIME, coords)


def alpha(v: QuadricPoint) -> QuadricPoint:
    """Q' -> Q: halve everything after sending z to 1 - z."""
    if v.flavor is not Flavor.QPRIME:
        raise ValueError("alpha expects a point of Q'")
    half = Fraction(1, 2)
    coords = tuple(c.scale(v.ring.field.convert(half)) for c in v.coords[:-1])
    coords += ((1 - v.z).scale(v.ring.field.convert(half)),)
    return QuadricPoint(v.ring, v.n, Flavor.Q, coords)


def associated_ideal(v: QuadricPoint) -> Ideal:
    """The ideal ``(x_1, ..., x_n, z)`` of a point of Q."""
    if v.flavor is not Flavor.Q:
        raise ValueError("associated_ideal expects a point of Q")
    return Ideal(v.ring, v.x + (v.z,))
