import random

import pytest
from hypothesis import given, settings, strategies as st

from quadhom.algcore import Ring
from quadhom.homotopy import (ChainCertificate, HomotopyChain, HomotopyWitness, concatenate,
                              constant_witness, cylinder, elementary_homotopy, endpoints, path_to_one,
                              verify_chain)
from quadhom.orthogroup import Hyperbolic, OrthWord, Transvection, act, random_word
from quadhom.quadric import Flavor, base_point, check, defect
from helpers import QXY, random_point

Q, QP = Flavor.Q, Flavor.QPRIME
Rx = Ring.parse("Q[x]")
RxX = Ring.parse("Q[x,X]")
RT = Ring.parse("Q[T]")
RxT = Ring.parse("Q[x,T]")


def test_constant_witness():
    b = base_point(Rx, 2, Q)
    assert endpoints(constant_witness(b)) == (b, b)
    assert verify_chain(HomotopyChain((constant_witness(b),)), b, b)


def test_moving_witness_endpoints():
    x, X = RxX.gens()
    H = HomotopyWitness(check((x, X * (1 - x) ** 2, 1 - x, RxX.zero(), x), 2, Q), "X")
    a, b = H.endpoints()
    assert a.coords == (Rx("x"), 0, Rx("1-x"), 0, Rx("x"))
    assert b.coords == (Rx("x"), Rx("(1-x)^2"), Rx("1-x"), 0, Rx("x"))


def test_cylinder_examples():
    T = RT.var("T")
    V = check((2 * T, RT.zero(), 2 - 2 * T, RT.zero(), 1 - 2 * T), 2, QP)
    H = cylinder(V)
    S = H.point.ring
    X = S.var(H.param)
    Ts = S.var("T")
    assert H.point.coords == (2 * Ts * X, 0, 2 - 2 * Ts * X, 0, 1 - 2 * Ts * X)
    a, b = H.endpoints()
    assert a.coords == (0, 0, 2, 0, 1) and b == V
    x, T = RxT.gens()
    V2 = check((x, T * (1 - x) ** 2, 1 - x, RxT.zero(), x), 2, Q)
    a, b = cylinder(V2).endpoints()
    assert a.coords == (x, 0, 1 - x, 0, x) and b == V2
    c = base_point(RxT, 2, Q)
    assert cylinder(c).endpoints() == (c, c)
    with pytest.raises(KeyError):
        cylinder(base_point(Rx, 2, Q))


def test_path_to_one():
    x, T = RxT.gens()
    V = check((x, T * (1 - x) ** 2, 1 - x, RxT.zero(), x), 2, Q)
    a, b = path_to_one(V).endpoints()
    assert a == V and b == V.subs({"T": 1})


def test_mismatched_junction():
    b = base_point(Rx, 2, Q)
    x = Rx.var("x")
    v = check((x, Rx.zero(), 1 - x, Rx.zero(), x), 2, Q)
    chain = HomotopyChain((constant_witness(b, "X"), constant_witness(v, "X")))
    fail = verify_chain(chain, b, v)
    assert not fail and fail.where == "junction" and fail.index == 1
    assert not fail.defect.is_zero()


def test_endpoint_mismatch():
    b = base_point(Rx, 2, Q)
    x = Rx.var("x")
    v = check((x, Rx.zero(), 1 - x, Rx.zero(), x), 2, Q)
    fail = verify_chain(HomotopyChain((constant_witness(b),)), b, v)
    assert fail.where == "end"
    fail = verify_chain(HomotopyChain((constant_witness(b),)), v, b)
    assert fail.where == "start"


def test_elementary_examples():
    b = base_point(Rx, 2, QP)
    x = Rx.var("x")
    c = elementary_homotopy(b, OrthWord(Rx, 2))
    assert c.endpoints() == (b, b)
    w = OrthWord(Rx, 2, (Transvection("e1", "g", x),))
    c = elementary_homotopy(b, w)
    assert len(c.links) == 1 and c.endpoints() == (b, act(b, w))
    v = act(b, OrthWord(Rx, 2, (Transvection("f1", "e2", Rx.one()),)))
    w = OrthWord(Rx, 2, (Hyperbolic(1, 2, x),))
    c = elementary_homotopy(v, w)
    H = c.links[0]
    assert H.at(0) == v and H.at(1) == act(v, w)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([Q, QP]))
def test_elementary_always_verifies(seed, flavor):
    rng = random.Random(seed)
    v = random_point(QXY, 2, flavor, rng, 1)
    w = random_word(QXY, 2, rng.randint(0, 4), rng)
    c = elementary_homotopy(v, w)
    for link in c.links:
        assert defect(link.point.coords, 2, flavor).is_zero()
    assert isinstance(verify_chain(c, v, act(v, w)), ChainCertificate)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_concatenation_is_associative(seed):
    rng = random.Random(seed)
    v = random_point(QXY, 2, Q, rng, 1)
    ws = [random_word(QXY, 2, 2, rng) for _ in range(3)]
    pts = [v]
    for w in ws:
        pts.append(act(pts[-1], w))
    cs = [elementary_homotopy(pts[k], ws[k], "X") for k in range(3)]
    left = concatenate([concatenate(cs[:2]), cs[2]])
    right = concatenate([cs[0], concatenate(cs[1:])])
    assert left == right == cs[0] + cs[1] + cs[2]
    assert verify_chain(left, v, pts[-1]) and verify_chain(right, v, pts[-1])


def test_link_off_quadric_is_reported():
    x, X = RxX.gens()
    good = HomotopyWitness(check((x, X * (1 - x) ** 2, 1 - x, RxX.zero(), x), 2, Q), "X")
    chain = HomotopyChain((good,))
    assert verify_chain(chain, *good.endpoints())
