"""JSON certificates: serialization and independent re-verification.

Every certificate is a JSON object::

    {"schema": "quadhom.certificate", "version": 1, "tool_version": "...",
     "kind": "...", "seed": null | int, "ring": {...},
     "inputs": {...}, "claim": {...}, "evidence": {...}}

Polynomials are stored as canonical text.  ``verify_certificate`` rebuilds
values from that text and re-checks each named claim by expansion and
division only; it never repeats a search.  See ``docs/certificates.md``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

from .. import __version__
from ..algcore import CoefficientField, MonomialOrder, Poly, Ring, dot, poly_sum
from ..homotopy import HomotopyChain, HomotopyWitness, verify_chain
from ..idealkit import GroebnerBasis, Ideal, MembershipCertificate, _divide
from ..localpatch import LocalizedElement, localized_defect
from ..orthogroup import Hyperbolic, OrthWord, Transvection, act, expand, gram, matmul, transpose
from ..quadric import Flavor, QuadricPoint, base_point, defect
from .parser import parse_poly

SCHEMA = "quadhom.certificate"
BUNDLE = "quadhom.bundle"
VERSION = 1
KINDS = ("membership", "groebner", "height", "point", "orthogonality", "action", "chain", "theta",
         "nakayama", "moving", "crt", "reversal", "split", "glue", "pipeline")


# The elementary group is represented by a fixed generator set; any word in
# these generators is accepted as an elementary witness.
CONVENTIONS = {
    "generators": "Eichler transvections trans(u, v, lam) and hyperbolic hyp(i, j, lam)",
    "action": "row vectors, matrices on the right",
    "form": "sum x_i y_i + z^2",
}


class SchemaError(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization


def ser_ring(R: Ring) -> dict:
    return {"field": str(R.field), "vars": list(R.vars), "order": str(R.order)}


def de_ring(d: dict) -> Ring:
    return Ring(CoefficientField.parse(d["field"]), tuple(d["vars"]), MonomialOrder.parse(d["order"]))


def ser_poly(p: Poly) -> str:
    return str(p)


def de_poly(s: str, R: Ring) -> Poly:
    if not isinstance(s, str):
        raise SchemaError(f"expected polynomial text, got {s!r}")
    return parse_poly(s, R)


def ser_polys(ps) -> list:
    return [ser_poly(p) for p in ps]


def de_polys(xs, R: Ring) -> tuple:
    return tuple(de_poly(x, R) for x in xs)


def ser_point(v: QuadricPoint) -> dict:
    return {"n": v.n, "flavor": v.flavor.value, "coords": ser_polys(v.coords)}


def de_point(d: dict, R: Ring) -> QuadricPoint:
    return QuadricPoint(R, int(d["n"]), Flavor(d["flavor"]), de_polys(d["coords"], R))


def ser_param(p):
    if isinstance(p, LocalizedElement):
        return {"num": ser_poly(p.num), "base": ser_poly(p.base), "k": p.k}
    return ser_poly(p)


def de_param(x, R: Ring):
    if isinstance(x, dict):
        return LocalizedElement(de_poly(x["num"], R), de_poly(x["base"], R), int(x["k"]))
    return de_poly(x, R)


def ser_word(w: OrthWord) -> dict:
    facs = []
    for g in w.factors:
        if isinstance(g, Transvection):
            facs.append({"gen": "trans", "u": g.u, "v": g.v, "param": ser_param(g.param)})
        else:
            facs.append({"gen": "hyp", "i": g.i, "j": g.j, "param": ser_param(g.param)})
    return {"n": w.n, "factors": facs}


def de_word(d: dict, R: Ring) -> OrthWord:
    facs = []
    for f in d["factors"]:
        p = de_param(f["param"], R)
        if f["gen"] == "trans":
            facs.append(Transvection(f["u"], f["v"], p))
        elif f["gen"] == "hyp":
            facs.append(Hyperbolic(int(f["i"]), int(f["j"]), p))
        else:
            raise SchemaError(f"unknown generator {f['gen']!r}")
    return OrthWord(R, int(d["n"]), tuple(facs))


def ser_matrix(rows) -> list:
    return [ser_polys(r) for r in rows]


def de_matrix(rows, R: Ring) -> tuple:
    return tuple(de_polys(r, R) for r in rows)


def ser_membership(c: MembershipCertificate) -> dict:
    return {"element": ser_poly(c.element), "gens": ser_polys(c.gens), "cofactors": ser_polys(c.cofactors)}


def ser_groebner(gb: GroebnerBasis) -> dict:
    return {"order": str(gb.order), "gens": ser_polys(gb.gens), "basis": ser_polys(gb.basis),
            "cofactors": [ser_polys(r) for r in gb.cofactors]}


def ser_chain(c: HomotopyChain) -> dict:
    return {"base": ser_ring(c.base),
            "links": [{"param": l.param, "ring": ser_ring(l.point.ring), "point": ser_point(l.point)}
                      for l in c.links]}


def de_chain(d: dict) -> HomotopyChain:
    links = []
    for l in d["links"]:
        R = de_ring(l["ring"])
        links.append(HomotopyWitness(de_point(l["point"], R), l["param"]))
    return HomotopyChain(tuple(links))


def ser_height(h) -> object:
    return "inf" if h == math.inf else int(h)


def de_height(x):
    return math.inf if x == "inf" else int(x)


def envelope(kind: str, ring: Ring, inputs: dict, claim: dict, evidence: dict, seed=None) -> dict:
    if kind not in KINDS:
        raise SchemaError(f"unknown certificate kind {kind!r}")
    return {"schema": SCHEMA, "version": VERSION, "tool_version": __version__, "kind": kind,
            "conventions": CONVENTIONS, "seed": seed, "ring": ser_ring(ring), "inputs": inputs, "claim": claim, "evidence": evidence}


def bundle(certs: list) -> dict:
    return {"schema": BUNDLE, "version": VERSION, "tool_version": __version__, "certificates": list(certs)}


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# verification


@dataclass
class Check:
    name: str
    ok: bool
    message: str = ""


@dataclass
class Report:
    kind: str
    checks: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(c.ok for c in self.checks)

    def failed(self) -> list:
        return [c for c in self.checks if not c.ok]

    def lines(self) -> list[str]:
        out = [f"{self.kind}: {'ok' if self.ok else 'FAIL'}"]
        for c in self.checks:
            out.append(f"  [{'ok' if c.ok else 'FAIL'}] {c.name}" + (f": {c.message}" if c.message else ""))
        out.extend(f"  warning: {w}" for w in self.warnings)
        return out


class _Ctx:
    def __init__(self, report: Report, prefix: str = ""):
        self.report = report
        self.prefix = prefix

    def check(self, name: str, fn):
        """Run ``fn``; truthy passes, exceptions and falsy values fail."""
        full = self.prefix + name
        try:
            res = fn()
        except Exception as exc:  # a malformed certificate is a failed claim
            self.report.checks.append(Check(full, False, f"{type(exc).__name__}: {exc}"))
            return None
        if isinstance(res, tuple):
            ok, msg = res
        else:
            ok, msg = bool(res), ""
        self.report.checks.append(Check(full, ok, msg))
        return ok


def _membership_ok(d: dict, R: Ring, element: Poly, gens) -> tuple[bool, str]:
    """Cofactors expand to ``element`` over exactly ``gens``."""
    cof = de_polys(d["cofactors"], R)
    gens = tuple(gens)
    if len(cof) != len(gens):
        return False, f"{len(cof)} cofactors for {len(gens)} generators"
    got = poly_sum((c * g for c, g in zip(cof, gens)), R)
    if got != element:
        return False, f"cofactors expand to {got}, not {element}"
    return True, ""


def _gens(R: Ring, polys) -> tuple:
    return Ideal(R, polys).gens


def _spoly(f: Poly, g: Poly, order: MonomialOrder) -> Poly:
    ef, cf = f.lead(order)
    eg, cg = g.lead(order)
    lcm = tuple(max(a, b) for a, b in zip(ef, eg))
    fe = tuple(a - b for a, b in zip(lcm, ef))
    ge = tuple(a - b for a, b in zip(lcm, eg))
    field_ = f.ring.field
    return f.mul_term(fe, field_.inv(cf)) - g.mul_term(ge, field_.inv(cg))


def _groebner_checks(ctx: _Ctx, gbd: dict, R: Ring, gens, what: str):
    """Check a serialized basis generates the same ideal as ``gens`` and is Groebner."""
    order = MonomialOrder.parse(gbd["order"])
    basis = de_polys(gbd["basis"], R)
    sgens = de_polys(gbd["gens"], R)
    gens = tuple(gens)

    def same_gens():
        return sgens == gens, "" if sgens == gens else "generators differ from the claimed ideal"

    def basis_in_ideal():
        rows = gbd["cofactors"]
        if len(rows) != len(basis):
            return False, "missing cofactor rows"
        for b, row in zip(basis, rows):
            ok, msg = _membership_ok({"cofactors": row}, R, b, gens)
            if not ok:
                return False, f"basis element {b}: {msg}"
        return True, ""

    def ideal_in_basis():
        for g in gens:
            _, rem = _divide(g, basis, order, False)
            if not rem.is_zero():
                return False, f"{g} leaves remainder {rem}"
        return True, ""

    def criterion():
        for f, g in itertools.combinations(basis, 2):
            _, rem = _divide(_spoly(f, g, order), basis, order, False)
            if not rem.is_zero():
                return False, f"S({f}, {g}) leaves remainder {rem}"
        return True, ""

    ctx.check(f"{what}: basis generators match", same_gens)
    ctx.check(f"{what}: basis lies in the ideal", basis_in_ideal)
    ctx.check(f"{what}: ideal lies in the basis span", ideal_in_basis)
    ctx.check(f"{what}: Buchberger criterion", criterion)
    return basis, order


def height_from_basis(basis, order: MonomialOrder, R: Ring):
    if any(b.is_constant() and not b.is_zero() for b in basis):
        return math.inf
    supports = [frozenset(i for i, a in enumerate(b.lead(order)[0]) if a) for b in basis]
    n = R.nvars
    for size in range(n, -1, -1):
        for S in itertools.combinations(range(n), size):
            if not any(sup <= frozenset(S) for sup in supports):
                return n - size
    return n


def _height_checks(ctx: _Ctx, gbd: dict, R: Ring, gens, claimed, what: str, threshold=None):
    basis, order = _groebner_checks(ctx, gbd, R, gens, what)
    h = height_from_basis(basis, order, R)
    ctx.check(f"{what}: height {ser_height(claimed)}",
              lambda: (h == claimed, "" if h == claimed else f"leading terms give height {ser_height(h)}"))
    if threshold is not None:
        ctx.check(f"{what}: height >= {threshold}", lambda: claimed >= threshold)


def _v_membership(cert, R: Ring, ctx: _Ctx):
    inp, claim, ev = cert["inputs"], cert["claim"], cert["evidence"]
    gens = _gens(R, de_polys(inp["ideal"], R))
    p = de_poly(inp["element"], R)
    if claim["member"]:
        ctx.check(f"{inp['element']} in ideal", lambda: _membership_ok(ev, R, p, gens))
    else:
        basis, order = _groebner_checks(ctx, ev["groebner"], R, gens, "ideal")
        def nonmember():
            _, rem = _divide(p, basis, order, False)
            want = de_poly(ev["remainder"], R)
            if rem != want:
                return False, f"remainder is {rem}, certificate says {want}"
            return not rem.is_zero(), "" if not rem.is_zero() else "remainder is zero"
        ctx.check(f"{inp['element']} not in ideal", nonmember)


def _v_groebner(cert, R, ctx):
    gens = _gens(R, de_polys(cert["inputs"]["ideal"], R))
    gbd = dict(cert["evidence"], basis=cert["claim"]["basis"], order=cert["claim"]["order"])
    _groebner_checks(ctx, gbd, R, gens, "groebner basis")


def _v_height(cert, R, ctx):
    gens = _gens(R, de_polys(cert["inputs"]["ideal"], R))
    _height_checks(ctx, cert["evidence"]["groebner"], R, gens, de_height(cert["claim"]["height"]), "ideal")


def _v_point(cert, R, ctx):
    d = cert["claim"]["point"]
    coords = de_polys(d["coords"], R)
    n, fl = int(d["n"]), Flavor(d["flavor"])
    ctx.check("point on quadric", lambda: (len(coords) == 2 * n + 1 and defect(coords, n, fl).is_zero(),
                                           f"defect {defect(coords, n, fl)}"))


def _v_orthogonality(cert, R, ctx):
    w = de_word(cert["inputs"]["word"], R)
    M = de_matrix(cert["claim"]["matrix"], R)
    ctx.check("matrix is the product of the generators", lambda: expand(w).rows == M)
    G = gram(R, w.n)
    ctx.check("M G M^t = G", lambda: matmul(matmul(M, G), transpose(M)) == G)


def _v_action(cert, R, ctx):
    v = de_point(cert["inputs"]["point"], R)
    w = de_word(cert["inputs"]["word"], R)
    ctx.check("result = v w", lambda: act(v, w).coords == de_polys(cert["claim"]["result"]["coords"], R))
    _v_point({"claim": {"point": cert["claim"]["result"]}}, R, ctx)


def _chain_checks(ctx, chd: dict, start: QuadricPoint, end: QuadricPoint, what: str = "chain"):
    def run():
        c = de_chain(chd)
        res = verify_chain(c, start, end)
        return bool(res), "" if res else str(res)
    ctx.check(f"{what} links the endpoints", run)


def _v_chain(cert, R, ctx):
    start = de_point(cert["inputs"]["from"], R)
    end = de_point(cert["inputs"]["to"], R)
    _chain_checks(ctx, cert["evidence"]["chain"], start, end)


def _v_theta(cert, R, ctx):
    inp, claim, ev = cert["inputs"], cert["claim"], cert["evidence"]
    J = _gens(R, de_polys(inp["J"], R))
    a = de_polys(inp["a"], R)
    s = de_poly(claim["s"], R)
    b = de_polys(claim["b"], R)
    J2 = Ideal(R, J).square().gens
    aJ2 = _gens(R, a + J2)
    for g, d in zip(J, ev["orientation"]):
        ctx.check(f"J = (a) + J^2: {g}", lambda g=g, d=d: _membership_ok(d, R, g, aJ2))
    ctx.check("J = (a) + J^2: all generators covered", lambda: len(ev["orientation"]) == len(J))
    ctx.check("s in J^2", lambda: _membership_ok(ev["s_in_J2"], R, s, J2))
    AS = _gens(R, a + (s,))
    ctx.check("J in (a, s)", lambda: len(ev["J_in_as"]) == len(J) and all(
        _membership_ok(d, R, g, AS)[0] for g, d in zip(J, ev["J_in_as"])))
    ctx.check("(a, s) in J", lambda: len(ev["as_in_J"]) == len(AS) and all(
        _membership_ok(d, R, g, J)[0] for g, d in zip(AS, ev["as_in_J"])))
    ctx.check("s - s^2 = sum a_i b_i", lambda: len(b) == len(a) and dot(a, b, R) == s - s * s)
    ctx.check("point is (a, b, s)", lambda: de_polys(claim["point"]["coords"], R) == a + b + (s,))
    _v_point({"claim": {"point": claim["point"]}}, R, ctx)


def _v_nakayama(cert, R, ctx):
    inp, ev = cert["inputs"], cert["evidence"]
    I = _gens(R, de_polys(inp["I"], R))
    J = _gens(R, de_polys(inp["J"], R))
    K = _gens(R, de_polys(inp["K"], R))
    s = de_poly(cert["claim"]["s"], R)
    JK = _gens(R, J + K)
    I2 = Ideal(R, I).square().gens
    sJ = _gens(R, (s,) + J)

    def all_in(elems, gens, ds):
        ds = list(ds)
        if len(ds) != len(elems):
            return False, f"{len(ds)} certificates for {len(elems)} elements"
        for e, d in zip(elems, ds):
            ok, msg = _membership_ok(d, R, e, gens)
            if not ok:
                return False, f"{e}: {msg}"
        return True, ""

    ctx.check("I in J + K", lambda: all_in(I, JK, ev["I_in_JK"]))
    ctx.check("J + K in I", lambda: all_in(JK, I, ev["JK_in_I"]))
    ctx.check("K in I^2", lambda: all_in(K, I2, ev["K_in_I2"]))
    ctx.check("s in K", lambda: _membership_ok(ev["s_in_K"], R, s, K))
    ctx.check("I = (s) + J", lambda: all_in(I, sJ, ev["I_in_sJ"]))
    ctx.check("s - s^2 in J", lambda: _membership_ok(ev["idempotent"], R, s - s * s, J))


def _v_moving(cert, R, ctx):
    inp, claim, ev = cert["inputs"], cert["claim"], cert["evidence"]
    v = de_point(inp["point"], R)
    mu = de_polys(inp["mu"], R)
    moved = de_point(claim["moved"], R)
    wd = ev["witness"]
    S = de_ring(wd["ring"])
    X = S.var(wd["param"])

    def formula():
        H = de_point(wd["point"], S)
        a = [c.change_ring(S) for c in v.x]
        b = [c.change_ring(S) for c in v.y]
        s = v.z.change_ring(S)
        m = [c.change_ring(S) for c in mu]
        mb = dot(m, b, S)
        want = tuple(ai + X * mi * (1 - s) ** 2 for ai, mi in zip(a, m))
        want += tuple((1 - X * mb) * bi for bi in b) + (s + X * mb * (1 - s),)
        return H.coords == want
    ctx.check("witness matches the moving formula", formula)

    def identity():
        a = [c.change_ring(S) for c in v.x]
        b = [c.change_ring(S) for c in v.y]
        s = v.z.change_ring(S)
        m = [c.change_ring(S) for c in mu]
        w = 1 - X * dot(m, b, S)
        A = [ai + X * mi * (1 - s) ** 2 for ai, mi in zip(a, m)]
        d = dot(A, b, S) * w - ((1 - s) * w - (1 - s) ** 2 * w * w)
        return d.is_zero(), f"expands to {d}"
    ctx.check("proof identity A b^t (1 - X mu b^t) = (1-s)(1 - X mu b^t) - (1-s)^2 (1 - X mu b^t)^2", identity)
    _chain_checks(ctx, {"links": [wd]}, v, moved, "witness")
    K = _gens(R, moved.x + (moved.z,))
    ctx.check("K = (a', s')", lambda: de_polys(claim["K"], R) == K)
    _height_checks(ctx, ev["groebner"], R, K, de_height(claim["height"]), "K", int(claim["threshold"]))


def _v_crt(cert, R, ctx):
    inp, ev = cert["inputs"], cert["evidence"]
    x = de_poly(cert["claim"]["value"], R)
    vals = de_polys(inp["values"], R)
    mods = [_gens(R, de_polys(m, R)) for m in inp["moduli"]]
    ctx.check("one congruence per target", lambda: len(vals) == len(mods) == len(ev["congruences"]))
    for i, (v, I, d) in enumerate(zip(vals, mods, ev["congruences"]), 1):
        ctx.check(f"value = target {i} modulo ideal {i}", lambda v=v, I=I, d=d: _membership_ok(d, R, x - v, I))


def _v_reversal(cert, R, ctx):
    inp, claim, ev = cert["inputs"], cert["claim"], cert["evidence"]
    T, Y = inp["T"], inp["Y"]
    f = de_poly(inp["f"], R)
    S = R.rename(T, Y)
    fs = de_poly(claim["f_star"], S)
    q = de_poly(ev["q"], S)
    y = S.var(Y)

    def formula():
        m = f.degree_in(T)
        want = S.zero()
        for d, c in f.coeffs_in(T).items():
            want = want + c.change_ring(R.drop(T)).change_ring(S) * y ** (m - d)
        return f.leading_coeff_in(T) == 1 and want == fs, f"expected {want}"
    ctx.check("f* = Y^m f(1/Y)", formula)
    ctx.check("f*(0) = 1", lambda: fs.subs({Y: 0}) == 1)
    ctx.check("1 = f* - Y q", lambda: fs - y * q == 1)


def _v_split(cert, R, ctx):
    inp, ev = cert["inputs"], cert["evidence"]
    f = de_poly(inp["f"], R)
    g = de_poly(inp["g"], R)
    u = de_poly(ev["u"], R)
    w = de_poly(ev["v"], R)
    ctx.check("f, g comaximal", lambda: u * f + w * g == 1)

    def eq():
        from ..localpatch import verify_split
        res = verify_split(de_word(inp["sigma"], R), de_word(inp["gamma"], R), de_word(inp["beta"], R), f, g)
        return bool(res), "" if res else str(res)
    ctx.check("sigma = gamma beta over the localization at f g", eq)


def _v_glue(cert, R, ctx):
    inp, ev = cert["inputs"], cert["evidence"]
    p, q = de_param(inp["p"], R), de_param(inp["q"], R)
    x = de_poly(cert["claim"]["value"], R)
    u, v = de_poly(ev["u"], R), de_poly(ev["v"], R)
    fk, gl = p.base ** p.k, q.base ** q.k
    ctx.check("1 = u f^k + v g^l", lambda: u * fk + v * gl == 1)
    ctx.check("x f^k = p", lambda: x * fk == p.num)
    ctx.check("x g^l = q", lambda: x * gl == q.num)


def _v_pipeline(cert, R, ctx):
    inp, ev = cert["inputs"], cert["evidence"]
    v = de_point(inp["point"], R)
    f = de_poly(inp["f"], R)
    sigma = de_word(inp["sigma"], R)
    base = base_point(R, v.n, Flavor.QPRIME)

    def pre():
        d = localized_defect(v, sigma, f, base)
        return d is None, "" if d is None else f"defect {d}"
    ctx.check("precondition: v sigma = base after inverting f", pre)
    for k, sub in enumerate(ev["steps"], 1):
        rep = verify_certificate(sub)
        for c in rep.checks:
            ctx.report.checks.append(Check(f"step {k} ({sub.get('kind')}): {c.name}", c.ok, c.message))
    _chain_checks(ctx, ev["chain"], v, base, "final chain")


_VERIFIERS = {
    "membership": _v_membership, "groebner": _v_groebner, "height": _v_height, "point": _v_point,
    "orthogonality": _v_orthogonality, "action": _v_action, "chain": _v_chain, "theta": _v_theta,
    "nakayama": _v_nakayama, "moving": _v_moving, "crt": _v_crt, "reversal": _v_reversal,
    "split": _v_split, "glue": _v_glue, "pipeline": _v_pipeline,
}


def verify_certificate(cert) -> Report:
    if not isinstance(cert, dict):
        raise SchemaError("certificate must be a JSON object")
    if cert.get("schema") != SCHEMA:
        raise SchemaError(f"not a certificate (schema {cert.get('schema')!r})")
    for key in ("version", "kind", "ring", "inputs", "claim", "evidence"):
        if key not in cert:
            raise SchemaError(f"missing field {key!r}")
    kind = cert["kind"]
    if kind not in _VERIFIERS:
        raise SchemaError(f"unknown certificate kind {kind!r}")
    rep = Report(kind)
    if cert["version"] != VERSION:
        rep.warnings.append(f"certificate version {cert['version']}, verifier version {VERSION}")
    if cert.get("tool_version") != __version__:
        rep.warnings.append(f"written by tool version {cert.get('tool_version')}, this is {__version__}")
    if cert.get("conventions") != CONVENTIONS:
        rep.warnings.append("generator conventions differ from this verifier's")
    ctx = _Ctx(rep)
    try:
        R = de_ring(cert["ring"])
    except Exception as exc:
        raise SchemaError(f"bad ring: {exc}") from None
    try:
        _VERIFIERS[kind](cert, R, ctx)
    except (KeyError, TypeError) as exc:
        rep.checks.append(Check("certificate structure", False, f"{type(exc).__name__}: {exc}"))
    except Exception as exc:
        rep.checks.append(Check("certificate data", False, f"{type(exc).__name__}: {exc}"))
    return rep


def verify_document(doc) -> list[Report]:
    """Verify a single certificate or a bundle."""
    if isinstance(doc, dict) and doc.get("schema") == BUNDLE:
        certs = doc.get("certificates")
        if not isinstance(certs, list):
            raise SchemaError("bundle without a certificate list")
        return [verify_certificate(c) for c in certs]
    return [verify_certificate(doc)]


def load(text: str):
    if not text.strip():
        raise SchemaError("empty certificate file")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
