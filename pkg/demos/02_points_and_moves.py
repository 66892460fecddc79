"""Points of the quadrics, the orthogonal action and the moving lemma.

Run: python demos/02_points_and_moves.py
"""

from quadhom.algcore import Ring
from quadhom.eulerlift import LocalOrientation, find_moving_mu, moving_step, theta_point
from quadhom.homotopy import HomotopyChain, elementary_homotopy, verify_chain
from quadhom.idealkit import Ideal, height
from quadhom.orthogroup import Hyperbolic, OrthWord, Transvection, act
from quadhom.quadric import Flavor, alpha, associated_ideal, beta, check

R = Ring.parse("Q[x]")
x = R.var("x")

# a point of Q over Q[x] and its image on Q'
v = check((x, R.zero(), 1 - x, R.zero(), x), 2, Flavor.Q)
print("v =", v)
print("beta(v) =", beta(v))
print("alpha(beta(v)) == v:", alpha(beta(v)) == v)
print("I(v) =", [str(g) for g in associated_ideal(v).gens], "height", height(associated_ideal(v)))

# acting by an elementary word gives an explicit homotopy to the image
w = OrthWord(R, 2, (Transvection("e1", "f2", R.one()), Hyperbolic(1, 2, x)))
b = beta(v)
bw = act(b, w)
print("beta(v) . w =", bw)
chain = elementary_homotopy(b, w)
print("elementary chain verifies:", bool(verify_chain(chain, b, bw)))

# one moving step with mu = (0, 1) makes the associated ideal the unit ideal
step = moving_step(v, [0, 1], param="X")
print("moved point:", step.moved)
print("height after move:", step.report.height, ">= n:", step.report.ok)
print("witness links v to the moved point:",
      bool(verify_chain(HomotopyChain((step.witness,)), v, step.moved)))

# the search tries mu = 0 first, then seeded draws
found = find_moving_mu(v, trials=50)
print("search picked mu =", [str(m) for m in found.step.mu], "on trial", found.trial)

# a local orientation of J = (x, y) over Q[x,y] and its point on Q
S = Ring.parse("Q[x,y]")
X, Y = S.gens()
o = LocalOrientation.build(Ideal(S, [X, Y]), [X + X ** 2, Y + X * Y])
t = theta_point(o)
print("theta point:", t.point, "s =", t.s)
print("theta certificate re-checks:", t.verify())
