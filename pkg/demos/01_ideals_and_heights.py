"""Ideal membership with cofactors, Groebner bases and heights.

Run: python demos/01_ideals_and_heights.py
"""

from quadhom.algcore import Ring
from quadhom.idealkit import Ideal, certify_member, height, member

R = Ring.parse("Q[x,y]")
x, y = R.gens()

# a membership claim comes with cofactors that expand back to the element
I = Ideal(R, [x * y - 1, y ** 2 - x])
p = (x * y - 1) * (x + y) + (y ** 2 - x) * y ** 3
cert = certify_member(p, I)
print("p in I:", member(p, I))
print("cofactors:", [str(c) for c in cert.cofactors])
print("certificate re-checks:", cert.verify())

# non-members keep a nonzero normal form
q = x + y
rem, _ = I.groebner_basis().reduce(q)
print("x + y in I:", member(q, I), "remainder", rem)

# reduced basis and height
gb = I.groebner_basis()
print("basis:", [str(g) for g in gb.basis])
print("height of I:", height(I))
print("height of (x):", height(Ideal(R, [x])))
print("height of the unit ideal:", height(Ideal(R, [R.one()])))
