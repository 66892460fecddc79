import random

import pytest
from hypothesis import given, settings, strategies as st

from quadhom.algcore import Ring
from quadhom.quadric import (Flavor, NotOnQuadric, alpha, associated_ideal, base_point, beta, check,
                             defect)
from helpers import QXY, F7XY, random_point

Rx = Ring.parse("Q[x]")
x = Rx.var("x")
Q, QP = Flavor.Q, Flavor.QPRIME


def test_base_points():
    assert base_point(Rx, 2, QP).coords == (0, 0, 0, 0, 1)
    assert base_point(Rx, 2, Q).coords == (0, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        base_point(Rx, 1, Q)


def test_check_examples():
    v = check((x, Rx.zero(), 1 - x, Rx.zero(), x), 2, Q)
    assert v.x == (x, 0) and v.z == x
    with pytest.raises(NotOnQuadric) as exc:
        check([Rx.const(c) for c in (1, 0, 1, 0, 0)], 2, Q)
    assert exc.value.defect == 1
    check((2 * x, Rx.zero(), 2 - 2 * x, Rx.zero(), 1 - 2 * x), 2, QP)


def test_check_wrong_length():
    with pytest.raises(ValueError):
        check((x, x, x), 2, Q)


def test_beta_alpha_examples():
    assert beta(base_point(Rx, 3, Q)) == base_point(Rx, 3, QP)
    assert alpha(base_point(Rx, 3, QP)) == base_point(Rx, 3, Q)
    v = check((x, Rx.zero(), 1 - x, Rx.zero(), x), 2, Q)
    assert beta(v).coords == (2 * x, 0, 2 - 2 * x, 0, 1 - 2 * x)
    with pytest.raises(ValueError):
        alpha(v)


def test_associated_ideal_examples():
    assert associated_ideal(base_point(Rx, 2, Q)).is_zero()
    v = check((x, Rx.zero(), 1 - x, Rx.zero(), x), 2, Q)
    assert associated_ideal(v).equals(associated_ideal(v).__class__(Rx, [x]))
    X, Y = QXY.gens()
    z = X + Y
    # x-coords (X, Y) with y-coords chosen to land on Q: X*a + Y*b = z - z^2
    w = check((X, Y, 1 - X - Y, 1 - X - Y, z), 2, Q)
    J = associated_ideal(w)
    assert J.equals(J.__class__(QXY, [X, Y]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]), st.sampled_from(["Q", "F7"]))
def test_alpha_beta_inverse(seed, n, field):
    R = QXY if field == "Q" else F7XY
    rng = random.Random(seed)
    v = random_point(R, n, Q, rng)
    assert alpha(beta(v)) == v
    w = random_point(R, n, QP, rng)
    assert beta(alpha(w)) == w


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_defect_is_exact(cs):
    cs = [Rx.const(c) + c * x for c in cs]
    xs, ys, z = cs[:2], cs[2:4], cs[4]
    s = xs[0] * ys[0] + xs[1] * ys[1]
    assert defect(cs, 2, QP) == s + z * z - 1
    assert defect(cs, 2, Q) == s - z + z * z
    for fl in (Q, QP):
        d = defect(cs, 2, fl)
        if d.is_zero():
            check(cs, 2, fl)
        else:
            with pytest.raises(NotOnQuadric) as exc:
                check(cs, 2, fl)
            assert exc.value.defect == d


def test_is_base():
    assert base_point(QXY, 2, Q).is_base()
    assert not check((x, Rx.zero(), 1 - x, Rx.zero(), x), 2, Q).is_base()
