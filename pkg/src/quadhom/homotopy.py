"""Naive homotopies of quadric points and chains of them.

A witness is a quadric point over ``R[X]`` for a fresh parameter ``X``; its
endpoints are the specialisations ``X = 0`` and ``X = 1``.  Homotopy is not
transitive in general, so chains of witnesses are the certificate currency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algcore import Poly, Ring, RingMismatch
from .orthogroup import OrthWord, act
from .quadric import QuadricPoint, defect


@dataclass(frozen=True)
class HomotopyWitness:
    """``point`` lives over ``base`` extended by the parameter ``param``."""

    point: QuadricPoint
    param: str

    def __post_init__(self):
        self.point.ring.index(self.param)

    @property
    def base(self) -> Ring:
        return self.point.ring.drop(self.param)

    @property
    def n(self) -> int:
        return self.point.n

    @property
    def flavor(self):
        return self.point.flavor

    def at(self, value) -> QuadricPoint:
        p = self.point.subs({self.param: value})
        return p.change_ring(self.base)

    def endpoints(self) -> tuple[QuadricPoint, QuadricPoint]:
        return self.at(0), self.at(1)

    def change_base(self, target: Ring) -> "HomotopyWitness":
        """Embed into ``target`` (which must not contain the parameter)."""
        ext = target.extend([self.param])
        return HomotopyWitness(self.point.change_ring(ext), self.param)


def constant_witness(v: QuadricPoint, param: str | None = None) -> HomotopyWitness:
    param = param or v.ring.fresh_var("X")
    S = v.ring.extend([param])
    return HomotopyWitness(v.change_ring(S), param)


@dataclass(frozen=True)
class HomotopyChain:
    links: tuple[HomotopyWitness, ...]

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        if not self.links:
            raise ValueError("a chain needs at least one link")
        base = self.links[0].base
        for link in self.links:
            if link.base != base:
                raise RingMismatch("chain links over different base rings")

    @property
    def base(self) -> Ring:
        return self.links[0].base

    def endpoints(self) -> tuple[QuadricPoint, QuadricPoint]:
        return self.links[0].at(0), self.links[-1].at(1)

    def __add__(self, other: "HomotopyChain") -> "HomotopyChain":
        return HomotopyChain(self.links + other.links)

    def change_base(self, target: Ring) -> "HomotopyChain":
        return HomotopyChain(tuple(l.change_base(target) for l in self.links))

    def subs(self, bindings, target: Ring) -> "HomotopyChain":
        """Apply a base-ring homomorphism to every link."""
        out = []
        for l in self.links:
            ext = target.extend([l.param]) if l.param not in target else target
            b = {k: (v.change_ring(ext) if isinstance(v, Poly) else v) for k, v in bindings.items()}
            out.append(HomotopyWitness(l.point.subs(b, ext), l.param))
        return HomotopyChain(tuple(out))


def endpoints(h: HomotopyWitness | HomotopyChain) -> tuple[QuadricPoint, QuadricPoint]:
    return h.endpoints()


@dataclass(frozen=True)
class ChainCertificate:
    chain: HomotopyChain
    start: QuadricPoint
    end: QuadricPoint


@dataclass(frozen=True)
class ChainFailure:
    """Where verification broke: ``start``, ``junction`` k (between links k and k+1),
    ``end`` or ``link`` k (a link off the quadric); ``defect`` is the first
    nonzero coordinate difference or the quadric defect."""

    where: str
    index: int
    defect: Poly

    def __str__(self):
        return f"chain broken at {self.where} {self.index}: defect {self.defect}"

    def __bool__(self):
        return False


def _first_difference(p: QuadricPoint, q: QuadricPoint) -> Poly | None:
    for a, b in zip(p.coords, q.coords):
        if a != b:
            return a - b
    return None


def verify_chain(c: HomotopyChain, start: QuadricPoint, end: QuadricPoint) -> ChainCertificate | ChainFailure:
    """Certificate iff ``c`` links ``start`` to ``end`` through matching junctions."""
    for k, link in enumerate(c.links, 1):
        d = defect(link.point.coords, link.n, link.flavor)
        if not d.is_zero():
            return ChainFailure("link", k, d)
    if (start.n, start.flavor) != (c.links[0].n, c.links[0].flavor) or start.ring != c.base:
        return ChainFailure("start", 0, start.ring.one())
    points = [link.endpoints() for link in c.links]
    d = _first_difference(points[0][0], start)
    if d is not None:
        return ChainFailure("start", 0, d)
    for k in range(len(points) - 1):
        d = _first_difference(points[k][1], points[k + 1][0])
        if d is not None:
            return ChainFailure("junction", k + 1, d)
    if end.ring != c.base:
        return ChainFailure("end", len(points), end.ring.one())
    d = _first_difference(points[-1][1], end)
    if d is not None:
        return ChainFailure("end", len(points), d)
    return ChainCertificate(c, start, end)


def elementary_homotopy(v: QuadricPoint, w: OrthWord, param: str | None = None) -> HomotopyChain:
    """Chain from ``v`` to ``act(v, w)``, one link per factor of ``w``.

    Each link acts on the running point by a single generator with its
    parameter scaled by ``X``; at ``X = 0`` the generator is the identity.
    """
    if w.is_localized:
        raise ValueError("elementary homotopies need polynomial parameters")
    param = param or v.ring.fresh_var("X")
    S = v.ring.extend([param])
    X = S.var(param)
    if not w.factors:
        return HomotopyChain((constant_witness(v, param),))
    links = []
    current = v
    for gen in w.factors:
        g = OrthWord(v.ring, v.n, (gen,))
        scaled = g.change_ring(S).scaled(X)
        H = HomotopyWitness(act(current.change_ring(S), scaled), param)
        links.append(H)
        current = act(current, g)
    return HomotopyChain(tuple(links))


def cylinder(V: QuadricPoint, T: str = "T", param: str | None = None) -> HomotopyWitness:
    """Witness ``V(T X)`` linking ``V(0)`` (embedded) to ``V``."""
    if T not in V.ring:
        raise KeyError(f"variable {T!r} not in {V.ring}")
    param = param or V.ring.fresh_var("X")
    S = V.ring.extend([param])
    TX = S.var(T) * S.var(param)
    return HomotopyWitness(V.subs({T: TX}, S), param)


def path_to_one(V: QuadricPoint, T: str = "T", param: str | None = None) -> HomotopyWitness:
    """Witness ``V(T + X(1 - T))`` linking ``V`` to ``V(1)`` (embedded)."""
    if T not in V.ring:
        raise KeyError(f"variable {T!r} not in {V.ring}")
    param = param or V.ring.fresh_var("X")
    S = V.ring.extend([param])
    t, x = S.var(T), S.var(param)
    return HomotopyWitness(V.subs({T: t + x * (1 - t)}, S), param)


def concatenate(chains: Sequence[HomotopyChain]) -> HomotopyChain:
    links: tuple = ()
    for c in chains:
        links += c.links
    return HomotopyChain(links)
