"""Execute session scripts: evaluate bindings, dispatch commands, collect certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..algcore import AlgebraError, CoefficientField, MonomialOrder, Poly, Ring
from ..eulerlift import (LocalOrientation, MovingSearchExhausted, default_pool, find_moving_mu,
                         moving_step, nakayama_lift, theta_point)
from ..homotopy import (HomotopyChain, HomotopyWitness, cylinder, elementary_homotopy,
                        verify_chain)
from ..idealkit import Ideal, crt_lift, height, reduce
from ..localpatch import (LocalizedElement, SplitWitness, glue_element, laurent_reverse,
                          monic_pipeline, rebase_word, verify_split)
from ..orthogroup import Hyperbolic, OrthWord, Transvection, act, expand
from ..quadric import Flavor, NotOnQuadric, QuadricPoint
from . import builders as B
from . import certs as C
from .parser import (BinOp, Command, IdealExpr, Let, ListExpr, Name, Neg, Num, Pow,
                     QPointExpr, RingDecl, Script, TransExpr, TupleExpr, WordExpr, parse, print_expr)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    """Bad script: unknown names or commands, missing arguments, wrong value types."""


@dataclass
class RunOptions:
    seed: int = 0
    trials: int = 200
    pool: tuple[str, ...] | None = None  # polynomial texts
    order: str | None = None


@dataclass
class RunResult:
    transcript: list[str] = field(default_factory=list)
    certificates: list[dict] = field(default_factory=list)
    status: int = EXIT_OK

    def text(self) -> str:
        return "".join(line + "\n" for line in self.transcript)

    def bundle(self) -> dict:
        return C.bundle(self.certificates)


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class _Rat:
    num: Poly
    den: Poly

    def __add__(self, o):
        if self.den == o.den:
            return _Rat(self.num + o.num, self.den)
        return _Rat(self.num * o.den + o.num * self.den, self.den * o.den)

    def __neg__(self):
        return _Rat(-self.num, self.den)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        return _Rat(self.num * o.num, self.den * o.den)

    def __truediv__(self, o):
        if o.num.is_zero():
            raise UsageError("division by zero")
        return _Rat(self.num * o.den, self.den * o.num)

    def value(self):
        """A polynomial when the denominator is constant, else a localized element."""
        if self.den.is_constant():
            return self.num / self.den.constant_value()
        try:
            return self.num.divexact(self.den)
        except AlgebraError:
            return LocalizedElement(self.num, self.den, 1)


class Env:
    def __init__(self):
        self.ring: Ring | None = None
        self.bindings: dict[str, object] = {}

    def require_ring(self) -> Ring:
        if self.ring is None:
            raise UsageError("no ring declared")
        return self.ring

    def eval(self, e, R: Ring, _stack=()):
        if isinstance(e, Name):
            if e.id in self.bindings:
                if e.id in _stack:
                    raise UsageError(f"circular binding {e.id!r}")
                return self.eval(self.bindings[e.id], R, _stack + (e.id,))
            if e.id in R:
                return _Rat(R.var(e.id), R.one())
            raise UsageError(f"unknown name {e.id!r} (not bound and not a variable of {R})")
        if isinstance(e, Num):
            return _Rat(R.const(e.value), R.one())
        if isinstance(e, Neg):
            return -self._rat(e.operand, R, _stack)
        if isinstance(e, Pow):
            b = self._rat(e.base, R, _stack)
            return _Rat(b.num ** e.exp, b.den ** e.exp)
        if isinstance(e, BinOp):
            a = self._rat(e.left, R, _stack)
            b = self._rat(e.right, R, _stack)
            return {"+": a.__add__, "-": a.__sub__, "*": a.__mul__, "/": a.__truediv__}[e.op](b)
        if isinstance(e, IdealExpr):
            return Ideal(R, [self.poly(g, R, _stack) for g in e.gens])
        if isinstance(e, TupleExpr):
            return tuple(self.eval(x, R, _stack) for x in e.items)
        if isinstance(e, ListExpr):
            return [self.eval(x, R, _stack) for x in e.items]
        if isinstance(e, QPointExpr):
            try:
                fl = Flavor.parse(e.flavor)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            return QuadricPoint(R, e.n, fl, tuple(self.poly(c, R, _stack) for c in e.coords))
        if isinstance(e, WordExpr):
            return self._word(e, R, None, _stack)
        raise UsageError(f"cannot evaluate {print_expr(e)}")

    def _rat(self, e, R, stack) -> _Rat:
        v = self.eval(e, R, stack)
        if not isinstance(v, _Rat):
            raise UsageError(f"{print_expr(e)} is not a polynomial expression")
        return v

    def poly(self, e, R: Ring, stack=()) -> Poly:
        v = self._rat(e, R, stack).value()
        if not isinstance(v, Poly):
            raise UsageError(f"{print_expr(e)} is not a polynomial")
        return v

    def _word(self, e, R, n, stack) -> OrthWord:
        facs = []
        for g in e.factors:
            p = self._rat(g.param, R, stack).value()
            facs.append(Transvection(g.u, g.v, p) if isinstance(g, TransExpr) else Hyperbolic(g.i, g.j, p))
        if n is None:
            # size from the largest index used; callers re-check against the point
            n = 2
            for g in facs:
                if isinstance(g, Hyperbolic):
                    n = max(n, g.i, g.j)
                else:
                    for lab in (g.u, g.v):
                        if lab[0] in "ef" and lab[1:].isdigit():
                            n = max(n, int(lab[1:]))
        return OrthWord(R, n, tuple(facs))

    def word(self, e, R: Ring, n: int | None = None) -> OrthWord:
        while isinstance(e, Name) and e.id in self.bindings:
            e = self.bindings[e.id]
        if not isinstance(e, WordExpr):
            raise UsageError(f"{print_expr(e)} is not a word")
        return self._word(e, R, n, ())


# ---------------------------------------------------------------------------
# command helpers


class _Args:
    def __init__(self, cmd: Command, env: Env, R: Ring):
        self.cmd = cmd
        self.raw = {a.key: a.value for a in cmd.args}
        self.env = env
        self.R = R
        self.used: set = set()

    def has(self, key):
        return key in self.raw

    def expr(self, key):
        if key not in self.raw:
            raise UsageError(f"{self.cmd.name}: missing argument {key}=")
        self.used.add(key)
        return self.raw[key]

    def ident(self, key, default=None) -> str:
        if key not in self.raw:
            if default is None:
                raise UsageError(f"{self.cmd.name}: missing argument {key}=")
            return default
        e = self.expr(key)
        if not isinstance(e, Name):
            raise UsageError(f"{self.cmd.name}: {key}= expects a name")
        return e.id

    def poly(self, key, R=None) -> Poly:
        return self.env.poly(self.expr(key), R or self.R)

    def value(self, key, R=None):
        return self.env.eval(self.expr(key), R or self.R)

    def polys(self, key, R=None) -> tuple:
        e = self.expr(key)
        items = e.items if isinstance(e, (ListExpr, TupleExpr)) else (e,)
        return tuple(self.env.poly(x, R or self.R) for x in items)

    def ideal(self, key, R=None) -> Ideal:
        return self._ideal(self.expr(key), R or self.R)

    def _ideal(self, e, R) -> Ideal:
        v = self.env.eval(e, R)
        if isinstance(v, Ideal):
            return v
        if isinstance(v, (tuple, list)):
            return Ideal(R, [self._as_poly(x, e) for x in v])
        return Ideal(R, [self._as_poly(v, e)])

    def ideals(self, key) -> list[Ideal]:
        e = self.expr(key)
        if not isinstance(e, ListExpr):
            raise UsageError(f"{self.cmd.name}: {key}= expects a list of ideals")
        return [self._ideal(x, self.R) for x in e.items]

    @staticmethod
    def _as_poly(v, e) -> Poly:
        if isinstance(v, _Rat):
            p = v.value()
            if isinstance(p, Poly):
                return p
        raise UsageError(f"{print_expr(e)} is not a polynomial")

    def point(self, key, R=None) -> QuadricPoint:
        v = self.value(key, R)
        if not isinstance(v, QuadricPoint):
            raise UsageError(f"{self.cmd.name}: {key}= expects a qpoint")
        return v

    def word(self, key, n: int, R=None) -> OrthWord:
        return self.env.word(self.expr(key), R or self.R, n)

    def finish(self):
        extra = sorted(set(self.raw) - self.used)
        if extra:
            raise UsageError(f"{self.cmd.name}: unknown argument(s) {', '.join(extra)}")


def _pts(v: QuadricPoint) -> str:
    return "(" + ", ".join(map(str, v.coords)) + ")"


class CommandFailed(Exception):
    """A mathematical failure: the command ran but its claim does not hold."""

    def __init__(self, message: str):
        super().__init__(message)


_MATH_ERRORS = (AlgebraError, NotOnQuadric, ZeroDivisionError)


# ---------------------------------------------------------------------------
# commands; each returns (summary lines, certificate or None)


def _cmd_check(a: _Args, opts):
    try:
        v = a.point("point")
    except NotOnQuadric as exc:
        raise CommandFailed(f"not on the quadric: defect {exc.defect}") from None
    return [f"point {_pts(v)} lies on {v.flavor.value}"], B.point_cert(v)


def _order(a: _Args, opts):
    name = a.ident("order", opts.order or str(a.R.order)) if a.has("order") else (opts.order or str(a.R.order))
    return MonomialOrder.parse(name)


def _cmd_gb(a: _Args, opts):
    I = a.ideal("I")
    order = _order(a, opts)
    gb = I.groebner_basis(order)
    return [f"basis ({order}): [" + ", ".join(map(str, gb.basis)) + "]"], B.groebner_cert(I, order)


def _cmd_member(a: _Args, opts):
    p = a.poly("p")
    I = a.ideal("I")
    rem, _ = reduce(p, I)
    if rem.is_zero():
        return [f"{p} is in the ideal"], B.membership_cert(p, I)
    return [f"{p} is not in the ideal (remainder {rem})"], B.membership_cert(p, I)


def _cmd_height(a: _Args, opts):
    I = a.ideal("I")
    return [f"height {C.ser_height(height(I))}"], B.height_cert(I)


def _cmd_theta(a: _Args, opts):
    J = a.ideal("J")
    av = a.polys("a")
    o = LocalOrientation.build(J, av)
    tp = theta_point(o)
    c = B.theta_cert(o, tp)
    lines = [f"s = {tp.s}; b = (" + ", ".join(map(str, tp.b)) + f"); point {_pts(tp.point)}",
             f"height(J) = {C.ser_height(o.height)} (n = {o.n}{'' if o.height >= o.n else ', below n'})"]
    return lines, c


def _cmd_nakayama(a: _Args, opts):
    I, J, K = a.ideal("I"), a.ideal("J"), a.ideal("K")
    lift = nakayama_lift(I, J, K)
    return [f"s = {lift.s}"], B.nakayama_cert(lift)


def _pool(a: _Args, opts):
    if a.has("pool"):
        return list(a.polys("pool"))
    if opts.pool:
        from .parser import parse_poly
        return [parse_poly(t, a.R) for t in opts.pool]
    return default_pool(a.R)


def _cmd_move(a: _Args, opts):
    v = a.point("point") if a.has("point") else a.point("v")
    seed = None
    if a.has("mu"):
        step = moving_step(v, a.polys("mu"))
        trial = None
    else:
        seed = opts.seed
        trials = opts.trials
        if a.has("trials"):
            trials = int(a.poly("trials").constant_value())
        try:
            found = find_moving_mu(v, trials, _pool(a, opts), seed)
        except MovingSearchExhausted as exc:
            raise CommandFailed(str(exc)) from None
        step, trial = found.step, found.trial
    c = B.moving_cert(step, seed)
    lines = ["mu = (" + ", ".join(map(str, step.mu)) + ")" + (f" found at trial {trial} (seed {seed})" if trial else ""),
             f"v' = {_pts(step.moved)}",
             "K = (" + ", ".join(map(str, step.K.gens)) + f"), height {C.ser_height(step.report.height)}"
             f" {'>=' if step.report.ok else '<'} {step.report.threshold}"]
    if not step.identity_defect.is_zero():
        raise CommandFailed(f"proof identity fails: {step.identity_defect}")
    if not step.report.ok:
        return lines + ["height below threshold"], c
    return lines, c


def _cmd_act(a: _Args, opts):
    v = a.point("point") if a.has("point") else a.point("v")
    w = a.word("w", v.n)
    res = act(v, w)
    return [f"v w = {_pts(res)}"], B.action_cert(v, w, res)


def _cmd_orth(a: _Args, opts):
    n = int(a.poly("n").constant_value()) if a.has("n") else None
    w = a.word("w", n)
    M = expand(w)
    return [f"{w} preserves the form"], B.orthogonality_cert(w, M)


def _cmd_elementary(a: _Args, opts):
    v = a.point("point") if a.has("point") else a.point("v")
    w = a.word("w", v.n)
    chain = elementary_homotopy(v, w)
    end = act(v, w)
    res = verify_chain(chain, v, end)
    if not res:
        raise CommandFailed(str(res))
    return [f"{len(chain.links)} link(s) from {_pts(v)} to {_pts(end)}"], B.chain_cert(chain, v, end)


def _cmd_cylinder(a: _Args, opts):
    V = a.point("V")
    T = a.ident("T", "T")
    H = cylinder(V, T)
    chain = HomotopyChain((H,))
    start, end = chain.endpoints()
    return [f"witness {_pts(H.point)}", f"links {_pts(start)} to {_pts(end)}"], B.chain_cert(chain, start, end)


def _cmd_homotopy_verify(a: _Args, opts):
    param = a.ident("param", "X")
    R = a.R
    if param in R:
        S, base = R, R.drop(param)
    else:
        S, base = R.extend([param]), R
    e = a.expr("links")
    items = e.items if isinstance(e, ListExpr) else (e,)
    links = []
    for x in items:
        p = a.env.eval(x, S)
        if not isinstance(p, QuadricPoint):
            raise UsageError("homotopy-verify: links= expects qpoints")
        links.append(HomotopyWitness(p, param))
    start, end = a.point("from", base), a.point("to", base)
    chain = HomotopyChain(tuple(links))
    res = verify_chain(chain, start, end)
    if not res:
        raise CommandFailed(str(res))
    return [f"chain of {len(links)} link(s) verified"], B.chain_cert(chain, start, end)


def _cmd_crt(a: _Args, opts):
    vals = a.polys("values")
    mods = a.ideals("moduli")
    if len(vals) != len(mods):
        raise UsageError("crt: values= and moduli= differ in length")
    lift = crt_lift(list(zip(vals, mods)))
    return [f"x = {lift.value}"], B.crt_cert(vals, mods, lift)


def _cmd_reverse(a: _Args, opts):
    f = a.poly("f")
    T = a.ident("T", "T")
    Y = a.ident("Y", a.R.fresh_var("Y"))
    rev = laurent_reverse(f, T, Y)
    return [f"f* = {rev.f_star} (degree {rev.degree})"], B.reversal_cert(rev)


def _cmd_split_verify(a: _Args, opts):
    f, g = a.poly("f"), a.poly("g")
    n = int(a.poly("n").constant_value()) if a.has("n") else None
    sigma = rebase_word(a.word("sigma", n), f * g)
    gamma = rebase_word(a.word("gamma", sigma.n), f)
    beta_ = rebase_word(a.word("beta", sigma.n), g)
    res = verify_split(sigma, gamma, beta_, f, g)
    if not res:
        raise CommandFailed(str(res))
    return ["sigma = gamma beta verified"], B.split_cert(sigma, gamma, beta_, res)


def _loc(v, R) -> LocalizedElement:
    v = v.value() if isinstance(v, _Rat) else v
    if isinstance(v, Poly):
        return LocalizedElement(v, R.one(), 0)
    if isinstance(v, LocalizedElement):
        return v
    raise UsageError("expected a quotient p/f^k")


def _cmd_glue(a: _Args, opts):
    p = a.value("p")
    q = a.value("q")
    if not (isinstance(p, _Rat) and isinstance(q, _Rat)):
        raise UsageError("glue: p= and q= expect quotients")
    lp = LocalizedElement(p.num, p.den, 1)
    lq = LocalizedElement(q.num, q.den, 1)
    gc = glue_element(lp, lq)
    return [f"x = {gc.value}"], B.glue_cert(gc)


def _cmd_pipeline(a: _Args, opts):
    v = a.point("point") if a.has("point") else a.point("v")
    f = a.poly("f")
    T = a.ident("T", "T")
    sigma = rebase_word(a.word("sigma", v.n), f)
    split = None
    if a.has("sigma1") or a.has("sigma2"):
        Y = a.ident("Y", a.R.fresh_var("Y"))
        rev = laurent_reverse(f, T, Y)
        S = rev.ring
        s1 = rebase_word(a.word("sigma1", v.n, S), rev.f_star)
        s2 = rebase_word(a.word("sigma2", v.n, S), S.var(Y))
        split = SplitWitness(s1, s2)
    res = monic_pipeline(v, f, sigma, T, split)
    lines = [f"{st.name}: {'ok' if st.ok else 'FAIL'} {st.detail}" for st in res.steps]
    if not res.complete:
        raise CommandFailed("; ".join(lines + [res.remaining or "incomplete"]))
    lines.append(f"chain of {len(res.chain.links)} link(s) from v to the base point")
    return lines, B.pipeline_cert(v, f, sigma, res, T)


COMMANDS: dict[str, Callable] = {
    "check": _cmd_check, "gb": _cmd_gb, "member": _cmd_member, "height": _cmd_height,
    "theta": _cmd_theta, "nakayama": _cmd_nakayama, "move": _cmd_move, "act": _cmd_act,
    "orth": _cmd_orth, "elementary": _cmd_elementary, "cylinder": _cmd_cylinder,
    "homotopy-verify": _cmd_homotopy_verify, "crt": _cmd_crt, "reverse": _cmd_reverse,
    "split-verify": _cmd_split_verify, "glue": _cmd_glue, "pipeline": _cmd_pipeline,
}


# ---------------------------------------------------------------------------
# driver


def _declare_ring(d: RingDecl, opts: RunOptions) -> Ring:
    try:
        field_ = CoefficientField.parse(d.field)
        order = MonomialOrder.parse(d.order or opts.order or "grevlex")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if len(set(d.vars)) != len(d.vars):
        raise UsageError(f"repeated variable in ring {d.field}[{','.join(d.vars)}]")
    return Ring(field_, tuple(d.vars), order)


def run(script: Script | str, options: RunOptions | None = None) -> RunResult:
    """Execute statements in order; stops at the first usage error."""
    opts = options or RunOptions()
    out = RunResult()
    if isinstance(script, str):
        script = parse(script)
    env = Env()
    for idx, st in enumerate(script.statements, 1):
        try:
            if isinstance(st, RingDecl):
                env.ring = _declare_ring(st, opts)
                out.transcript.append(f"[{idx}] ring {env.ring}")
            elif isinstance(st, Let):
                if st.name in env.bindings:
                    raise UsageError(f"{st.name!r} is already bound")
                if env.ring is not None and st.name in env.ring:
                    raise UsageError(f"{st.name!r} is a ring variable")
                env.bindings[st.name] = st.value
            else:
                fn = COMMANDS.get(st.name)
                if fn is None:
                    raise UsageError(f"unknown command {st.name!r}")
                R = env.require_ring()
                args = _Args(st, env, R)
                try:
                    lines, cert = fn(args, opts)
                    args.finish()
                except CommandFailed as exc:
                    out.transcript.append(f"[{idx}] {st.name}: FAIL {exc}")
                    out.status = max(out.status, EXIT_FAIL)
                    continue
                except UsageError:
                    raise
                except _MATH_ERRORS as exc:
                    out.transcript.append(f"[{idx}] {st.name}: FAIL {type(exc).__name__}: {exc}")
                    out.status = max(out.status, EXIT_FAIL)
                    continue
                out.transcript.append(f"[{idx}] {st.name}: " + (lines[0] if lines else "ok"))
                out.transcript.extend("    " + line for line in lines[1:])
                if cert is not None:
                    out.certificates.append(cert)
        except (UsageError, KeyError) as exc:
            msg = exc.args[0] if exc.args else str(exc)
            out.transcript.append(f"[{idx}] error: {msg}")
            out.status = EXIT_USAGE
            break
    return out
