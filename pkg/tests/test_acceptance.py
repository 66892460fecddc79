"""The ten acceptance criteria, one test each.

Every criterion records its outcome in ``helpers.ACCEPTANCE`` (printed in
the pytest terminal summary) and prints a pass/fail line.  Certificates
produced along the way are collected for criterion 10.  Run this file
directly to print the lines without pytest.
"""

import functools
import io
import os
import random
import subprocess
import sys
import tempfile

import pytest

from quadhom.algcore import Ring
from quadhom.eulerlift import LocalOrientation, find_moving_mu, moving_step, nakayama_lift, theta_point
from quadhom.homotopy import (ChainCertificate, ChainFailure, HomotopyChain, constant_witness, cylinder,
                              elementary_homotopy, verify_chain)
from quadhom.idealkit import INFINITE_HEIGHT, Ideal, height, member
from quadhom.localpatch import (LocalizedElement, PreconditionFailed, glue_element, laurent_reverse,
                                monic_pipeline, relocalize_word, verify_split)
from quadhom.orthogroup import (Hyperbolic, OrthMatrix, OrthWord, Transvection, act, expand, gram,
                                isotropic_labels, matmul, orthogonal_labels, random_word,
                                transpose, vecmat)
from quadhom.quadric import Flavor, QuadricPoint, alpha, associated_ideal, base_point, beta, defect
from quadhom.shell import builders as B
from quadhom.shell.certs import bundle, dumps, verify_certificate
from quadhom.shell.cli import main
from quadhom.shell.parser import parse, print_script
import helpers
from helpers import F7XY, QXY, bounded_member, flip_digit, fuzz_script, random_point, random_poly

Q, QP = Flavor.Q, Flavor.QPRIME
RxT = Ring.parse("Q[x,T]")


class Tally:
    def __init__(self):
        self.checks = []
        self.certs = []

    def check(self, name, ok):
        self.checks.append((name, bool(ok)))
        return bool(ok)

    @property
    def ok(self):
        return all(ok for _, ok in self.checks)

    def summary(self):
        bad = [n for n, ok in self.checks if not ok]
        head = f"{len(self.checks) - len(bad)}/{len(self.checks)} checks"
        return head if not bad else head + "; failed: " + ", ".join(bad[:5])


def report(n, title, tally):
    helpers.ACCEPTANCE[n] = (tally.ok, f"{title}: {tally.summary()}")
    print(f"criterion {n}: {'PASS' if tally.ok else 'FAIL'}  {title}: {tally.summary()}")
    assert tally.ok, tally.summary()


# ---------------------------------------------------------------------------


@functools.lru_cache(None)
def criterion_1():
    t = Tally()
    rng = random.Random(101)
    for R in (QXY, F7XY):
        for n in (2, 3):
            t.check(f"base points {R} n={n}", beta(base_point(R, n, Q)) == base_point(R, n, QP)
                    and alpha(base_point(R, n, QP)) == base_point(R, n, Q))
            ok_ab = ok_ba = True
            for k in range(100):
                v = random_point(R, n, Q, rng)
                w = random_point(R, n, QP, rng)
                ok_ab &= alpha(beta(v)) == v
                ok_ba &= beta(alpha(w)) == w
                if k < 3:
                    t.certs += [B.point_cert(beta(v)), B.point_cert(alpha(w))]
            t.check(f"alpha o beta = id ({R}, n={n})", ok_ab)
            t.check(f"beta o alpha = id ({R}, n={n})", ok_ba)
    return t


@functools.lru_cache(None)
def criterion_2():
    t = Tally()
    rng = random.Random(202)
    ok = True
    for k in range(200):
        n = rng.choice([2, 3])
        R = rng.choice([QXY, F7XY])
        w = random_word(R, n, rng.randint(0, 5), rng)
        M = expand(w).rows
        G = gram(R, n)
        ok &= matmul(matmul(M, G), transpose(M)) == G
        if k < 10:
            t.certs.append(B.orthogonality_cert(w))
    t.check("M G M^t = G on 200 words", ok)
    ok = True
    for n in (2, 3):
        for u in isotropic_labels(n):
            for v in orthogonal_labels(u, n):
                ok &= expand(OrthWord(QXY, n, (Transvection(u, v, QXY.zero()),))) == OrthMatrix.identity(QXY, n)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    ok &= expand(OrthWord(QXY, n, (Hyperbolic(i, j, QXY.zero()),))) == OrthMatrix.identity(QXY, n)
    t.check("zero-parameter generators are the identity", ok)
    ok = True
    for _ in range(50):
        n = rng.choice([2, 3])
        lam, mu = random_poly(QXY, rng), random_poly(QXY, rng)
        u = rng.choice(isotropic_labels(n))
        v = rng.choice(orthogonal_labels(u, n))
        a = expand(OrthWord(QXY, n, (Transvection(u, v, lam),)))
        b = expand(OrthWord(QXY, n, (Transvection(u, v, mu),)))
        ok &= a @ b == expand(OrthWord(QXY, n, (Transvection(u, v, lam + mu),)))
    t.check("transvection additivity on 50 pairs", ok)
    return t


@functools.lru_cache(None)
def criterion_3():
    t = Tally()
    rng = random.Random(303)
    ok_def = ok_transport = True
    for k in range(100):
        n = rng.choice([2, 3])
        R = rng.choice([QXY, F7XY])
        flavor = rng.choice([Q, QP])
        v = random_point(R, n, flavor, rng, 1)
        w = random_word(R, n, rng.randint(1, 4), rng)
        res = act(v, w)
        ok_def &= defect(res.coords, n, flavor).is_zero()
        if flavor is Q:
            # recompute alpha(beta(v) M) from the formulas, without act
            two = R.const(2)
            bv = [two * c for c in v.coords[:-1]] + [1 - two * v.z]
            img = vecmat(bv, expand(w).rows)
            half = R.field.inv(R.field.convert(2))
            want = [c.scale(half) for c in img[:-1]] + [(1 - img[-1]).scale(half)]
            ok_transport &= list(res.coords) == want
        if k < 10:
            t.certs.append(B.action_cert(v, w, res))
    t.check("q(v w) defect is zero on 100 pairs", ok_def)
    t.check("Q action equals alpha(beta(v) M), recomputed", ok_transport)
    return t


@functools.lru_cache(None)
def criterion_4():
    t = Tally()
    rng = random.Random(404)
    ok = True
    for k in range(100):
        n = rng.choice([2, 3])
        flavor = rng.choice([Q, QP])
        v = random_point(QXY, n, flavor, rng, 1)
        w = random_word(QXY, n, rng.randint(0, 4), rng)
        c = elementary_homotopy(v, w)
        ok &= isinstance(verify_chain(c, v, act(v, w)), ChainCertificate)
        if k < 10:
            t.certs.append(B.chain_cert(c, v, act(v, w)))
    t.check("elementary homotopy endpoints on 100 pairs", ok)
    ok = True
    for k in range(50):
        flavor = rng.choice([Q, QP])
        V = act(base_point(RxT, 2, flavor), random_word(RxT, 2, rng.randint(1, 3), rng))
        H = cylinder(V, "T")
        a, b = H.endpoints()
        ok &= a == V.subs({"T": 0}) and b == V
        if k < 5:
            t.certs.append(B.chain_cert(HomotopyChain((H,)), a, b))
    t.check("cylinder endpoints (V(0), V) on 50 points", ok)
    ok, tried = True, 0
    while tried < 30:
        v = random_point(QXY, 2, Q, rng, 1)
        w = random_word(QXY, 2, 4, rng)
        c = elementary_homotopy(v, w, "X")
        k = rng.randrange(len(c.links) - 1)  # mutate link k+1 (1-based), keep its start
        link = c.links[k]
        s, e = link.endpoints()
        if s == e:
            continue
        tried += 1
        links = list(c.links)
        links[k] = constant_witness(s, "X")
        res = verify_chain(HomotopyChain(tuple(links)), v, act(v, w))
        ok &= isinstance(res, ChainFailure) and res.where == "junction" and res.index == k + 1
        ok &= not res.defect.is_zero()
    t.check("mutated chains fail at the mutated junction (30 chains)", ok)
    return t


def low_height_point(rng, n):
    """(a, b, s) with a_1 = s, b_1 = 1 - s, so I(v) = (s) has height 1, then mixed."""
    while True:
        s = random_poly(QXY, rng, 2, 3)
        if not s.is_constant():
            break
    zero = QXY.zero()
    coords = (s,) + (zero,) * (n - 1) + (1 - s,) + (zero,) * (n - 1) + (s,)
    v = QuadricPoint(QXY, n, Q, coords)
    facs = []
    for _ in range(rng.randint(0, 2)):
        i, j = rng.sample(range(1, n + 1), 2)
        facs.append(Hyperbolic(i, j, rng.choice([QXY.one(), -QXY.one()] + list(QXY.gens()))))
    return act(v, OrthWord(QXY, n, tuple(facs)))


@functools.lru_cache(None)
def criterion_5():
    t = Tally()
    Rx = Ring.parse("Q[x]")
    x = Rx.var("x")
    v = QuadricPoint(Rx, 2, Q, (x, Rx.zero(), 1 - x, Rx.zero(), x))
    st = moving_step(v, [0, 1])
    t.check("worked instance: K is the unit ideal", st.K.is_unit() and st.report.height == INFINITE_HEIGHT)
    t.check("worked instance: height >= 2", st.report.ok)
    t.check("worked instance: proof identity expands to 0", st.identity_defect.is_zero())
    t.check("worked instance: v' = (x, (1-x)^2, 1-x, 0, x)",
            st.moved.coords == (x, (1 - x) ** 2, 1 - x, 0, x))
    t.certs.append(B.moving_cert(st))
    rng = random.Random(505)
    ok = True
    for k in range(20):
        n = 2 if k < 10 else 3
        v = low_height_point(rng, n)
        ok &= height(associated_ideal(v)) < n
        found = find_moving_mu(v, trials=200, seed=k)
        step = found.step
        ok &= found.trial <= 200 and step.report.ok and step.identity_defect.is_zero()
        ok &= height(step.K) >= n
        t.certs.append(B.moving_cert(step, seed=k))
    t.check("find_moving_mu within 200 trials on 20 low-height points", ok)
    return t


@functools.lru_cache(None)
def criterion_6():
    t = Tally()
    x, y = QXY.gens()
    J = Ideal(QXY, [x, y])
    a = [x + x ** 2, y + x * y]
    o = LocalOrientation.build(J, a)
    tp = theta_point(o)
    t.check("theta: s in J^2", tp.s_in_J2.verify() and member(tp.s, J.square()))
    t.check("theta: J = (a, s)", Ideal(QXY, a + [tp.s]).equals(J) and all(c.verify() for c in tp.J_in_as))
    t.check("theta: s - s^2 = sum a_i b_i", sum((p * q for p, q in zip(a, tp.b)), QXY.zero()) == tp.s - tp.s ** 2)
    t.certs.append(B.theta_cert(o, tp))

    def contract(I, Jn, K):
        lift = nakayama_lift(I, Jn, K)
        s = lift.s
        ok = member(s, K) and Ideal(I.ring, (s,) + Jn.gens).equals(I) and member(s - s * s, Jn)
        t.certs.append(B.nakayama_cert(lift))
        return ok and lift.verify()

    Rx = Ring.parse("Q[x]")
    X = Rx.var("x")
    t.check("nakayama on (x)/(x-x^2)/(x^2)", contract(Ideal(Rx, [X]), Ideal(Rx, [X - X ** 2]), Ideal(Rx, [X ** 2])))
    rng = random.Random(606)
    done, ok = 0, True
    while done < 10:
        p = random_poly(QXY, rng, 2, 2)
        u = random_poly(QXY, rng, 1, 2)
        if p.is_constant() or u.is_zero():
            continue
        done += 1
        ok &= contract(Ideal(QXY, [p]), Ideal(QXY, [p - p * p * u]), Ideal(QXY, [p * p * u]))
    t.check("nakayama on 10 instances I=(p), J=(p-p^2u), K=(p^2u)", ok)
    return t


@functools.lru_cache(None)
def criterion_7():
    t = Tally()
    rng = random.Random(707)
    agree = sound = 0
    trials = 0
    while trials < 50:
        gens = [g for g in (random_poly(QXY, rng, 3, 2) for _ in range(2)) if not g.is_zero()]
        if not gens:
            continue
        trials += 1
        if trials % 2:
            p = sum((random_poly(QXY, rng, 1, 2) * g for g in gens), QXY.zero())
        else:
            p = random_poly(QXY, rng, 3, 3)
        oracle = bounded_member(p, gens, 6)
        I = Ideal(QXY, gens)
        gb = member(p, I)
        agree += oracle == gb
        sound += (not oracle) or gb
        if trials <= 10:
            t.certs.append(B.membership_cert(p, I))
    t.check(f"Groebner agrees with the linear-algebra oracle ({agree}/50)", agree == 50)
    t.check("oracle never contradicts Groebner", sound == 50)
    for m in (1, 2, 3):
        R = Ring.parse("Q[" + ",".join(f"x{i}" for i in range(1, m + 1)) + "]")
        for k in range(1, m + 1):
            I = Ideal(R, R.gens()[:k])
            t.check(f"height(x1..x{k}) = {k} in {m} vars", height(I) == k)
            t.certs.append(B.height_cert(I))
    return t


def loc(w, f, k=0):
    return w.map_params(lambda p: LocalizedElement(p, f, k), w.ring)


@functools.lru_cache(None)
def criterion_8():
    t = Tally()
    rng = random.Random(808)
    x, T = RxT.gens()
    base = base_point(RxT, 2, QP)
    ok = True
    for k in range(20):
        W = random_word(RxT, 2, rng.randint(1, 4), rng, pool=[RxT.one(), -RxT.one(), x, T, x * T, T * T])
        v = act(base, W)
        sigma = loc(W.inverse(), T)
        res = monic_pipeline(v, T, sigma)
        ok &= res.complete and isinstance(verify_chain(res.chain, v, base), ChainCertificate)
        if res.complete and k < 10:
            t.certs.append(B.pipeline_cert(v, T, sigma, res, "T"))
    t.check("f = T pipeline on 20 acted points", ok)
    W = OrthWord(RxT, 2, (Transvection("e1", "g", x), Transvection("e2", "g", T)))
    v = act(base, W)
    rejected = False
    try:
        monic_pipeline(v, T, loc(W, T))
    except PreconditionFailed as exc:
        rejected = not exc.defect.is_zero()
    t.check("corrupted sigma rejected at the precondition", rejected)
    return t


@functools.lru_cache(None)
def criterion_9():
    t = Tally()
    rng = random.Random(909)
    x, T = RxT.gens()
    A = RxT.drop("T")
    ok = True
    for k in range(20):
        m = rng.randint(1, 4)
        f = T ** m + sum((random_poly(A, rng, 1, 2).change_ring(RxT) * T ** i for i in range(m)), RxT.zero())
        rev = laurent_reverse(f, "T")
        ok &= rev.verify() and rev.f_star.subs({rev.Y: 0}) == 1 and rev.bezout.verify()
        if k < 10:
            t.certs.append(B.reversal_cert(rev))
    t.check("reversal: f*(0) = 1 and comaximality on 20 monic f", ok)

    R = QXY
    X, Y = R.gens()
    ok = True
    for k in range(20):
        f = X + rng.randint(1, 3) * Y  # comaximal partner g = 1 - f
        g = 1 - f
        val = random_poly(R, rng, 2, 3)
        kk, ll = rng.randint(0, 3), rng.randint(0, 3)
        gc = glue_element(LocalizedElement(val * f ** kk, f, kk), LocalizedElement(val * g ** ll, g, ll))
        ok &= gc.value == val and gc.value * f ** kk == gc.p.num and gc.value * g ** ll == gc.q.num
        if k < 5:
            t.certs.append(B.glue_cert(gc))
    t.check("glue round trip x f^k = p, x g^l = q", ok)

    accept = reject = True
    f, g = X, 1 - X
    for k in range(20):
        def rword(base):
            facs = []
            for _ in range(rng.randint(1, 3)):
                lam = LocalizedElement(random_poly(R, rng, 1, 2), base, rng.randint(0, 2))
                if rng.random() < 0.5:
                    u = rng.choice(isotropic_labels(2))
                    facs.append(Transvection(u, rng.choice(orthogonal_labels(u, 2)), lam))
                else:
                    facs.append(Hyperbolic(*rng.sample([1, 2], 2), lam))
            return OrthWord(R, 2, tuple(facs))
        gamma, beta_ = rword(f), rword(g)
        sigma = relocalize_word(gamma, g) * relocalize_word(beta_, f)
        sc = verify_split(sigma, gamma, beta_, f, g)
        accept &= bool(sc)
        if sc and k < 5:
            t.certs.append(B.split_cert(sigma, gamma, beta_, sc))
        # mutate one generator of gamma
        i = rng.randrange(len(gamma))
        facs = list(gamma.factors)
        facs[i] = facs[i].with_param(facs[i].param + LocalizedElement(R.one(), f, 0))
        bad = OrthWord(R, 2, tuple(facs))
        res = verify_split(sigma, bad, beta_, f, g)
        reject &= not res and not res.defect.is_zero()
    t.check("verify_split accepts 20 constructed witnesses", accept)
    t.check("verify_split rejects single-generator mutations", reject)
    return t


ALL = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
       criterion_8, criterion_9]

ROUND_TRIP_SCRIPT = """ring Q[x];
let v = qpoint n=2 flavor=Q [x, 0, 1-x, 0, x];
cmd move v=v;
ring Q[x,y];
cmd theta J=(x,y) a=[x+x^2, y+x*y];
"""


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    return main(list(argv), out, err), out.getvalue()


@functools.lru_cache(None)
def criterion_10():
    t = Tally()
    ok = True
    for seed in range(100):
        s = fuzz_script(random.Random(10_000 + seed))
        p1 = parse(print_script(s))
        ok &= parse(print_script(p1)) == p1
    t.check("parse o print o parse stable on 100 fuzzed scripts", ok)

    certs = [c for crit in ALL for c in crit().certs]
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "suites.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(bundle(certs)))
        code, text = _cli("verify-cert", path, "--quiet")
        t.check(f"verify-cert accepts all {len(certs)} suite certificates", code == 0)
        failing = [line for line in text.splitlines() if "FAIL" in line]
        if failing:
            print("\n".join(failing[:10]))

        theta = next(c for c in certs if c["kind"] == "theta")
        bad = flip_digit(theta, ["claim", "s"])
        rep = verify_certificate(bad)
        t.check("bit-flipped theta certificate fails naming 's in J^2'",
                not rep.ok and "s in J^2" in [c.name for c in rep.failed()])
        moving = next(c for c in certs if c["kind"] == "moving")
        bad = flip_digit(moving, ["claim", "moved", "coords", 1])
        rep = verify_certificate(bad)
        t.check("bit-flipped moving certificate fails naming the moved point",
                not rep.ok and any("moved" in c.name or "endpoint" in c.name for c in rep.failed()))
        path = os.path.join(tmp, "bad.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(bad))
        t.check("verify-cert exits 1 on the flipped certificate", _cli("verify-cert", path)[0] == 1)

        script = os.path.join(tmp, "s.qh")
        with open(script, "w", encoding="utf-8") as fh:
            fh.write(ROUND_TRIP_SCRIPT)
        outs = []
        for hs in ("0", "1", "4242"):
            out = os.path.join(tmp, f"out{hs}.json")
            env = dict(os.environ, PYTHONHASHSEED=hs)
            proc = subprocess.run([sys.executable, "-m", "quadhom", "run", script, "--seed", "5", "--out", out],
                                  env=env, capture_output=True)
            with open(out, "rb") as fh:
                outs.append((proc.stdout, fh.read()))
        t.check("identical script + seed gives byte-identical output", outs[0] == outs[1] == outs[2])
    return t


TITLES = {
    1: "bijection suite", 2: "orthogonality suite", 3: "action suite", 4: "homotopy suite",
    5: "moving lemma", 6: "theta / Nakayama", 7: "Groebner cross-validation",
    8: "monic inversion, f = T", 9: "Laurent reversal and patching", 10: "CLI and certificates",
}


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n):
    report(n, TITLES[n], globals()[f"criterion_{n}"]())


if __name__ == "__main__":
    status = 0
    for n in range(1, 11):
        try:
            report(n, TITLES[n], globals()[f"criterion_{n}"]())
        except AssertionError:
            status = 1
    sys.exit(status)
