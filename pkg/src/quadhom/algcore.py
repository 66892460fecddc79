"""Exact coefficient fields and sparse multivariate polynomials.

A polynomial is an immutable map from exponent tuples to nonzero
coefficients.  Coefficients live in ``Q`` (as :class:`fractions.Fraction`)
or in a prime field ``GF(p)`` with ``p`` odd (as ints in ``[0, p)``).
Two is always invertible, which the quadric bijections rely on.

    >>> R = Ring.parse("Q[x,y]")
    >>> x, y = R.gens()
    >>> str((x + 1) * (x - 1))
    'x^2 - 1'
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

Exponent = tuple[int, ...]

# Exponents are machine words; anything above this is a checked error.
MAX_EXPONENT = 2**63 - 1


class RingMismatch(ValueError):
    """Operands live in different polynomial rings."""


class AlgebraError(ValueError):
    """Generic failure of an exact algebraic operation."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class CoefficientField:
    """``Q`` when ``p == 0``, otherwise the prime field with ``p`` elements."""

    p: int = 0

    def __post_init__(self):
        if self.p != 0:
            if self.p == 2:
                raise ValueError("characteristic 2 is not supported: 2 must be invertible")
            if not _is_prime(self.p):
                raise ValueError(f"{self.p} is not an odd prime")

    @classmethod
    def parse(cls, text: str) -> "CoefficientField":
        t = text.replace(" ", "")
        if t in ("Q", "QQ"):
            return cls(0)
        for prefix in ("GF(", "F("):
            if t.startswith(prefix) and t.endswith(")"):
                return cls(int(t[len(prefix):-1]))
        if t.startswith("F") and t[1:].isdigit():
            return cls(int(t[1:]))
        raise ValueError(f"unknown coefficient field {text!r}")

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def __str__(self) -> str:
        return "Q" if self.p == 0 else f"GF({self.p})"

    def convert(self, value) -> Union[int, Fraction]:
        if self.p == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            num, den = value.numerator, value.denominator
            if den % self.p == 0:
                raise ZeroDivisionError(f"{value} has no image in {self}")
            return num * pow(den, -1, self.p) % self.p
        if isinstance(value, int):
            return value % self.p
        raise TypeError(f"cannot convert {value!r} into {self}")

    def normalize(self, c):
        return c % self.p if self.p else c

    def inv(self, c):
        if not c:
            raise ZeroDivisionError("inverse of zero")
        if self.p:
            return pow(c, -1, self.p)
        return 1 / Fraction(c)

    def div(self, a, b):
        return self.normalize(a * self.inv(b))

    def neg(self, c):
        return self.normalize(-c)

    def format(self, c) -> str:
        if self.p:
            return str(c)
        c = Fraction(c)
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


QQ = CoefficientField(0)


def _grevlex_key(e: Exponent):
    return (sum(e), tuple(-a for a in reversed(e)))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order; ``key`` maps exponents so larger keys are larger monomials.

    ``name`` is one of ``grevlex``, ``grlex``, ``lex`` or ``block``.  A block
    order compares the leading ``blocks`` segments of the exponent tuple in
    turn, each by grevlex; it is an elimination order for the first block.
    """

    name: str = "grevlex"
    blocks: tuple[int, ...] = ()

    def __post_init__(self):
        if self.name not in ("grevlex", "grlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {self.name!r}")
        if self.name == "block" and not self.blocks:
            raise ValueError("block order needs block sizes")

    @classmethod
    def parse(cls, text: str) -> "MonomialOrder":
        t = text.replace(" ", "")
        if t.startswith("block(") and t.endswith(")"):
            return cls("block", tuple(int(b) for b in t[6:-1].split(",") if b))
        return cls(t)

    def __str__(self) -> str:
        if self.name == "block":
            return "block(" + ",".join(map(str, self.blocks)) + ")"
        return self.name

    def key(self, e: Exponent):
        name = self.name
        if name == "grevlex":
            return _grevlex_key(e)
        if name == "lex":
            return e
        if name == "grlex":
            return (sum(e), e)
        out = []
        start = 0
        for size in self.blocks:
            out.append(_grevlex_key(e[start:start + size]))
            start += size
        out.append(_grevlex_key(e[start:]))
        return tuple(out)


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


@dataclass(frozen=True)
class Ring:
    """A polynomial ring ``field[vars]`` with a default monomial order."""

    field: CoefficientField
    vars: tuple[str, ...]
    order: MonomialOrder = dc_field(default=GREVLEX)

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"duplicate variable names in {self.vars}")
        for v in self.vars:
            if not v or not isinstance(v, str):
                raise ValueError("variable names must be nonempty strings")

    @classmethod
    def parse(cls, text: str, order: str | MonomialOrder | None = None) -> "Ring":
        """Parse ``Q[x,y]`` or ``GF(7)[x]``."""
        t = text.replace(" ", "")
        if not t.endswith("]") or "[" not in t:
            raise ValueError(f"cannot parse ring {text!r}")
        head, _, body = t[:-1].partition("[")
        names = tuple(v for v in body.split(",") if v)
        if isinstance(order, str):
            order = MonomialOrder.parse(order)
        return cls(CoefficientField.parse(head), names, order or GREVLEX)

    def __str__(self) -> str:
        return f"{self.field}[{','.join(self.vars)}]"

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise KeyError(f"variable {name!r} not in {self}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.vars

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = self.field.convert(c)
        if not c:
            return Poly(self, {})
        return Poly(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "Poly":
        i = self.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): self.field.convert(1)})

    def gens(self) -> tuple["Poly", ...]:
        return tuple(self.var(v) for v in self.vars)

    def monomial(self, exp: Exponent, coeff=1) -> "Poly":
        c = self.field.convert(coeff)
        return Poly(self, {tuple(exp): c} if c else {})

    def extend(self, new_vars: Iterable[str], front: bool = False) -> "Ring":
        new_vars = tuple(new_vars)
        clash = [v for v in new_vars if v in self.vars]
        if clash:
            raise ValueError(f"variable(s) {clash} already in {self}")
        vars_ = new_vars + self.vars if front else self.vars + new_vars
        return Ring(self.field, vars_, self.order)

    def drop(self, name: str) -> "Ring":
        self.index(name)
        return Ring(self.field, tuple(v for v in self.vars if v != name), self.order)

    def rename(self, old: str, new: str) -> "Ring":
        self.index(old)
        if new in self.vars:
            raise ValueError(f"variable {new!r} already in {self}")
        return Ring(self.field, tuple(new if v == old else v for v in self.vars), self.order)

    def with_order(self, order: MonomialOrder | str) -> "Ring":
        if isinstance(order, str):
            order = MonomialOrder.parse(order)
        return Ring(self.field, self.vars, order)

    def fresh_var(self, base: str = "X") -> str:
        if base not in self.vars:
            return base
        i = 1
        while f"{base}{i}" in self.vars:
            i += 1
        return f"{base}{i}"

    def __call__(self, value) -> "Poly":
        """Coerce a constant or parse polynomial text into this ring."""
        if isinstance(value, Poly):
            return value.change_ring(self)
        if isinstance(value, str):
            from .shell.parser import parse_poly
            return parse_poly(value, self)
        return self.const(value)


def extend_ring(r: Ring, new_vars: Iterable[str]) -> Ring:
    """Append ``new_vars`` to ``r``; existing polynomials embed by name."""
    return r.extend(new_vars)


Scalar = Union[int, Fraction]


class Poly:
    """An immutable sparse polynomial over a :class:`Ring`."""

    __slots__ = ("ring", "terms", "_hash", "_lead")

    def __init__(self, ring: Ring, terms: Mapping[Exponent, object]):
        self.ring = ring
        self.terms = dict(terms)
        self._hash = None
        self._lead = {}

    # construction helpers -------------------------------------------------

    def _new(self, terms) -> "Poly":
        return Poly(self.ring, terms)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        norm = self.ring.field.normalize
        for e, c in other.terms.items():
            s = norm(out.get(e, 0) + c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        neg = self.ring.field.neg
        return self._new({e: neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return self.ring.zero()
        if self.total_degree() + other.total_degree() > MAX_EXPONENT:
            raise OverflowError("exponent overflow in polynomial product")
        norm = self.ring.field.normalize
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                out[e] = s
        return self._new({e: c for e, c in ((e, norm(c)) for e, c in out.items()) if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a nonzero constant."""
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise AlgebraError("division only by nonzero constants; use divexact")
            other = other.constant_value()
        inv = self.ring.field.inv(self.ring.field.convert(other))
        return self.scale(inv)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative int")
        if k and self.total_degree() * k > MAX_EXPONENT:
            raise OverflowError("exponent overflow in polynomial power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "Poly":
        f = self.ring.field
        c = f.convert(c) if not isinstance(c, int) or f.p else c
        if not c:
            return self.ring.zero()
        return self._new({e: f.normalize(v * c) for e, v in self.terms.items()})

    def mul_term(self, exp: Exponent, c) -> "Poly":
        """Multiply by the single term ``c * x^exp``."""
        if not c:
            return self.ring.zero()
        norm = self.ring.field.normalize
        return self._new({tuple(a + b for a, b in zip(e, exp)): norm(v * c)
                          for e, v in self.terms.items()})

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # inspection -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self):
        if not self.is_constant():
            raise AlgebraError(f"{self} is not constant")
        return next(iter(self.terms.values()), self.ring.field.convert(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: str) -> int:
        i = self.ring.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def variables(self) -> tuple[str, ...]:
        used = [False] * self.ring.nvars
        for e in self.terms:
            for i, a in enumerate(e):
                if a:
                    used[i] = True
        return tuple(v for v, u in zip(self.ring.vars, used) if u)

    def free_of(self, var: str) -> bool:
        i = self.ring.index(var)
        return all(e[i] == 0 for e in self.terms)

    def coeffs_in(self, var: str) -> dict[int, "Poly"]:
        """View as a univariate polynomial in ``var``: degree -> coefficient.

        Coefficients stay in the same ring and are free of ``var``.
        """
        i = self.ring.index(var)
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            d = e[i]
            out.setdefault(d, {})[e[:i] + (0,) + e[i + 1:]] = c
        return {d: self._new(t) for d, t in sorted(out.items())}

    def leading_coeff_in(self, var: str) -> "Poly":
        cs = self.coeffs_in(var)
        if not cs:
            return self.ring.zero()
        return cs[max(cs)]

    def lead(self, order: MonomialOrder | None = None) -> tuple[Exponent, object]:
        """Leading (exponent, coefficient) with respect to ``order``."""
        order = order or self.ring.order
        hit = self._lead.get(order)
        if hit is None:
            if not self.terms:
                raise AlgebraError("zero polynomial has no leading term")
            e = max(self.terms, key=order.key)
            hit = (e, self.terms[e])
            self._lead[order] = hit
        return hit

    def monic(self, order: MonomialOrder | None = None) -> "Poly":
        if not self.terms:
            return self
        _, c = self.lead(order)
        return self.scale(self.ring.field.inv(c))

    # ring changes ---------------------------------------------------------

    def change_ring(self, target: Ring) -> "Poly":
        """Re-express in ``target`` matching variables by name.

        Variables of ``self.ring`` missing from ``target`` must not occur.
        """
        if target == self.ring:
            return self
        if target.field != self.ring.field:
            raise RingMismatch(f"coefficient fields differ: {self.ring.field} vs {target.field}")
        src = self.ring.vars
        pos = []
        for i, v in enumerate(src):
            pos.append(target.vars.index(v) if v in target.vars else -1)
        n = target.nvars
        out = {}
        for e, c in self.terms.items():
            t = [0] * n
            for i, a in enumerate(e):
                if a:
                    if pos[i] < 0:
                        raise RingMismatch(f"variable {src[i]!r} of {self} not in {target}")
                    t[pos[i]] = a
            out[tuple(t)] = c
        return Poly(target, out)

    def subs(self, bindings: Mapping[str, object], target: Ring | None = None) -> "Poly":
        return substitute(self, bindings, target)

    def divexact(self, q: "Poly") -> "Poly":
        """Exact quotient ``self / q``; raises if ``q`` does not divide."""
        q = self._coerce(q)
        if q.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        order = self.ring.order
        qe, qc = q.lead(order)
        f = self.ring.field
        qinv = f.inv(qc)
        rem = dict(self.terms)
        quot: dict = {}
        key = order.key
        while rem:
            e = max(rem, key=key)
            d = tuple(a - b for a, b in zip(e, qe))
            if any(a < 0 for a in d):
                raise AlgebraError(f"{q} does not divide {self}")
            c = f.normalize(rem[e] * qinv)
            quot[d] = c
            for e2, c2 in q.terms.items():
                t = tuple(a + b for a, b in zip(e2, d))
                s = f.normalize(rem.get(t, 0) - c * c2)
                if s:
                    rem[t] = s
                else:
                    rem.pop(t, None)
        return self._new(quot)

    # printing -------------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, {self.ring})"


def format_poly(p: Poly) -> str:
    """Canonical text: terms in decreasing ring order, ``c*x^a*y^b`` style."""
    if not p.terms:
        return "0"
    ring = p.ring
    fmt = ring.field.format
    p_char = ring.field.p
    parts = []
    for e in sorted(p.terms, key=ring.order.key, reverse=True):
        c = p.terms[e]
        negative = (not p_char) and c < 0
        mag = -c if negative else c
        mono = "*".join(v if a == 1 else f"{v}^{a}" for v, a in zip(ring.vars, e) if a)
        cs = fmt(mag)
        if not mono:
            body = cs
        elif cs == "1":
            body = mono
        else:
            body = f"{cs}*{mono}"
        parts.append(("-" if negative else "+", body))
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def substitute(p: Poly, bindings: Mapping[str, object], target: Ring | None = None) -> Poly:
    """Ring homomorphism sending each bound variable to its image.

    Unbound variables map to the variable of the same name in the target
    ring.  The target defaults to the common ring of the images, falling
    back to ``p.ring`` when every image is a constant.
    """
    for name in bindings:
        if name not in p.ring.vars:
            raise KeyError(f"variable {name!r} not in {p.ring}")
    if target is None:
        rings = {v.ring for v in bindings.values() if isinstance(v, Poly)}
        if len(rings) > 1:
            raise RingMismatch("substitution images live in different rings")
        target = rings.pop() if rings else p.ring
    images = []
    for v in p.ring.vars:
        if v in bindings:
            img = bindings[v]
            if isinstance(img, Poly):
                if img.ring != target:
                    raise RingMismatch(f"image of {v} lives in {img.ring}, expected {target}")
            else:
                img = target.const(img)
        else:
            if v not in target.vars:
                raise RingMismatch(f"unbound variable {v!r} has no image in {target}")
            img = target.var(v)
        images.append(img)
    # monomial images substitute termwise without multiplication
    mono_img = []
    for img in images:
        if len(img.terms) == 1:
            mono_img.append(next(iter(img.terms.items())))
        else:
            mono_img.append(None)
    f = target.field
    n = target.nvars
    acc: dict = {}
    cache: dict = {}
    general: list[Poly] = []
    for e, c in p.terms.items():
        exp = [0] * n
        coeff = c
        rest = target.one()
        dead = False
        for i, a in enumerate(e):
            if not a:
                continue
            mi = mono_img[i]
            if mi is not None:
                me, mc = mi
                for j in range(n):
                    exp[j] += me[j] * a
                coeff = coeff * mc ** a
            elif images[i].is_zero():
                dead = True
                break
            else:
                k = (i, a)
                if k not in cache:
                    cache[k] = images[i] ** a
                rest = rest * cache[k]
        if dead:
            continue
        coeff = f.normalize(coeff)
        if not coeff:
            continue
        if rest.terms == target.one().terms:
            t = tuple(exp)
            acc[t] = f.normalize(acc.get(t, 0) + coeff)
        else:
            general.append(rest.mul_term(tuple(exp), coeff))
    out = Poly(target, {e: c for e, c in acc.items() if c})
    for g in general:
        out = out + g
    return out


def poly_sum(polys: Iterable[Poly], ring: Ring) -> Poly:
    out = ring.zero()
    for p in polys:
        out = out + p
    return out


def dot(xs: Iterable[Poly], ys: Iterable[Poly], ring: Ring) -> Poly:
    out = ring.zero()
    for a, b in zip(xs, ys):
        out = out + a * b
    return out


def determinant(rows: list[list[Poly]], ring: Ring) -> Poly:
    """Division-free determinant by cofactor expansion with memoised minors.

    Only meant for the small matrices arising in the determinant trick.
    """
    m = len(rows)
    if m == 0:
        return ring.one()
    memo: dict = {}

    def minor(row: int, cols: tuple[int, ...]) -> Poly:
        if row == m:
            return ring.one()
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = ring.zero()
        for idx, c in enumerate(cols):
            a = rows[row][c]
            if a.is_zero():
                continue
            sub = minor(row + 1, cols[:idx] + cols[idx + 1:])
            term = a * sub
            total = total - term if idx % 2 else total + term
        memo[key] = total
        return total

    return minor(0, tuple(range(m)))


PolyMap = Callable[[Poly], Poly]
