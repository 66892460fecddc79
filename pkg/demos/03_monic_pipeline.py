"""Patching a point of Q' over A[T] to the base point.

Given v and sigma with v sigma = base after inverting a monic f, the
pipeline returns a verified chain of homotopies over A[T].

Run: python demos/03_monic_pipeline.py
"""

import random

from quadhom.algcore import Ring
from quadhom.homotopy import verify_chain
from quadhom.localpatch import (LocalizedElement, SplitWitness, laurent_reverse, localized_defect,
                                monic_pipeline)
from quadhom.orthogroup import Hyperbolic, OrthWord, Transvection, act, random_word
from quadhom.quadric import Flavor, QuadricPoint, base_point

QP = Flavor.QPRIME
R = Ring.parse("Q[x,T]")
x, T = R.gens()
base = base_point(R, 2, QP)


def show(res):
    for s in res.steps:
        print(f"  {s.name:12s} {'ok' if s.ok else 'FAILED'}  {s.detail}")
    print("  complete:", res.complete, res.remaining)


# f = T: the word only needs to send v to base after inverting T
v = QuadricPoint(R, 2, QP, (-2 * x * T, -2 * x * T ** 2, R.zero(), R.zero(), R.one()))
sig = OrthWord(R, 2, (Hyperbolic(1, 2, -T), Transvection("e1", "g", -x * T)))
print("f = T, v =", v)
res = monic_pipeline(v, T, sig, "T")
show(res)
print("  chain re-verifies:", bool(verify_chain(res.chain, v, base)))

# f = T^2 + 1 with a T-free point; the split of sigma over A[Y] is supplied
f = T ** 2 + 1
A = R.drop("T")
tau = random_word(R, 2, 2, random.Random(2), pool=[R.one(), x])
v = act(base, tau.inverse())
sig = tau * OrthWord(R, 2, (Hyperbolic(1, 2, LocalizedElement(x + T, f, 1)),))
print("\nf =", f, "v =", v)
print("sigma sends v to base after inverting f:", localized_defect(v, sig, f, base) is None)

print("without a split witness:")
show(monic_pipeline(v, f, sig, "T"))

rev = laurent_reverse(f, "T")
S = rev.ring
Yv, xs = S.var(rev.Y), S.var("x")
s2 = OrthWord(S, 2, (Transvection("e1", "g", xs * Yv),))
hp = LocalizedElement(xs * Yv ** 2 + Yv, rev.f_star, 1)
s1 = tau.change_ring(A).change_ring(S) * OrthWord(S, 2, (Hyperbolic(1, 2, hp),)) * s2.inverse()
print("with sigma = sigma1 sigma2 over A[Y], f* =", rev.f_star)
res = monic_pipeline(v, f, sig, "T", SplitWitness(s1, s2))
show(res)
print("  chain re-verifies:", bool(verify_chain(res.chain, v, base)))
