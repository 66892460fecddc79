"""Certificate builders: library results in, JSON-ready envelopes out.

Each builder takes the objects an operation returned and records exactly
the data ``certs.verify_certificate`` needs to re-check the claim.
"""

from __future__ import annotations

from ..algcore import MonomialOrder, Poly
from ..eulerlift import LocalOrientation, MovingStep, NakayamaLift, ThetaPoint
from ..homotopy import HomotopyChain
from ..idealkit import CRTLift, Ideal, MembershipCertificate, certify_member, height
from ..localpatch import (GlueCertificate, GluedPoint, LaurentReversal, PipelineResult,
                          SplitCertificate)
from ..orthogroup import OrthMatrix, OrthWord
from ..quadric import QuadricPoint
from . import certs as C


def _gb(I: Ideal, order: MonomialOrder | None = None) -> dict:
    return C.ser_groebner(I.groebner_basis(order))


def point_cert(v: QuadricPoint) -> dict:
    return C.envelope("point", v.ring, {}, {"point": C.ser_point(v)}, {})


def membership_cert(p: Poly, I: Ideal, cert: MembershipCertificate | None = None) -> dict:
    """Certificate for ``p in I`` or, when ``p`` is not a member, for the nonzero remainder."""
    inputs = {"element": C.ser_poly(p), "ideal": C.ser_polys(I.gens)}
    rem, _ = I.groebner_basis().reduce(p)
    if rem.is_zero():
        cert = cert or certify_member(p, I)
        return C.envelope("membership", p.ring, inputs, {"member": True}, C.ser_membership(cert))
    return C.envelope("membership", p.ring, inputs, {"member": False},
                      {"groebner": _gb(I), "remainder": C.ser_poly(rem)})


def groebner_cert(I: Ideal, order: MonomialOrder | None = None) -> dict:
    gb = I.groebner_basis(order)
    return C.envelope("groebner", I.ring, {"ideal": C.ser_polys(I.gens)},
                      {"basis": C.ser_polys(gb.basis), "order": str(gb.order)},
                      {"cofactors": [C.ser_polys(r) for r in gb.cofactors], "gens": C.ser_polys(gb.gens)})


def height_cert(I: Ideal) -> dict:
    return C.envelope("height", I.ring, {"ideal": C.ser_polys(I.gens)},
                      {"height": C.ser_height(height(I))}, {"groebner": _gb(I)})


def orthogonality_cert(w: OrthWord, M: OrthMatrix | None = None) -> dict:
    M = M or w.matrix
    return C.envelope("orthogonality", w.ring, {"word": C.ser_word(w)}, {"matrix": C.ser_matrix(M.rows)}, {})


def action_cert(v: QuadricPoint, w: OrthWord, result: QuadricPoint) -> dict:
    return C.envelope("action", v.ring, {"point": C.ser_point(v), "word": C.ser_word(w)},
                      {"result": C.ser_point(result)}, {})


def chain_cert(chain: HomotopyChain, start: QuadricPoint, end: QuadricPoint, seed=None) -> dict:
    return C.envelope("chain", chain.base, {"from": C.ser_point(start), "to": C.ser_point(end)},
                      {"homotopic": True}, {"chain": C.ser_chain(chain)}, seed)


def theta_cert(o: LocalOrientation, tp: ThetaPoint) -> dict:
    ev = {"orientation": [C.ser_membership(c) for c in o.certificates],
          "s_in_J2": C.ser_membership(tp.s_in_J2),
          "J_in_as": [C.ser_membership(c) for c in tp.J_in_as],
          "as_in_J": [C.ser_membership(c) for c in tp.as_in_J]}
    claim = {"s": C.ser_poly(tp.s), "b": C.ser_polys(tp.b), "point": C.ser_point(tp.point),
             "height": C.ser_height(o.height)}
    return C.envelope("theta", o.J.ring, {"J": C.ser_polys(o.J.gens), "a": C.ser_polys(o.a)}, claim, ev)


def nakayama_cert(lift: NakayamaLift) -> dict:
    I, J, K = lift.I, lift.J, lift.K
    R = I.ring
    JK = Ideal(R, J.gens + K.gens)
    I2 = I.square()
    ev = {"I_in_JK": [C.ser_membership(certify_member(g, JK)) for g in I.gens],
          "JK_in_I": [C.ser_membership(certify_member(g, I)) for g in JK.gens],
          "K_in_I2": [C.ser_membership(certify_member(g, I2)) for g in K.gens],
          "s_in_K": C.ser_membership(lift.s_in_K),
          "I_in_sJ": [C.ser_membership(c) for c in lift.I_in_sJ],
          "idempotent": C.ser_membership(lift.idempotent)}
    return C.envelope("nakayama", R, {"I": C.ser_polys(I.gens), "J": C.ser_polys(J.gens),
                                      "K": C.ser_polys(K.gens)}, {"s": C.ser_poly(lift.s)}, ev)


def moving_cert(step: MovingStep, seed=None) -> dict:
    H = step.witness
    ev = {"witness": {"param": H.param, "ring": C.ser_ring(H.point.ring), "point": C.ser_point(H.point)},
          "groebner": _gb(step.K)}
    claim = {"moved": C.ser_point(step.moved), "K": C.ser_polys(step.K.gens),
             "height": C.ser_height(step.report.height), "threshold": step.report.threshold}
    return C.envelope("moving", step.v.ring, {"point": C.ser_point(step.v), "mu": C.ser_polys(step.mu)},
                      claim, ev, seed)


def crt_cert(values, moduli, lift: CRTLift) -> dict:
    R = moduli[0].ring
    return C.envelope("crt", R, {"values": C.ser_polys(values), "moduli": [C.ser_polys(I.gens) for I in moduli]},
                      {"value": C.ser_poly(lift.value)},
                      {"congruences": [C.ser_membership(m) for m in lift.certificates]})


def reversal_cert(rev: LaurentReversal) -> dict:
    q = -rev.bezout.v.cofactors[0]
    return C.envelope("reversal", rev.f.ring, {"f": C.ser_poly(rev.f), "T": rev.T, "Y": rev.Y},
                      {"f_star": C.ser_poly(rev.f_star)}, {"q": C.ser_poly(q)})


def split_cert(sigma: OrthWord, gamma: OrthWord, beta_: OrthWord, sc: SplitCertificate) -> dict:
    return C.envelope("split", sc.f.ring, {"sigma": C.ser_word(sigma), "gamma": C.ser_word(gamma),
                                           "beta": C.ser_word(beta_), "f": C.ser_poly(sc.f),
                                           "g": C.ser_poly(sc.g)},
                      {"split": True}, {"u": C.ser_poly(sc.bezout.u.cofactors[0]),
                                        "v": C.ser_poly(sc.bezout.v.cofactors[0])})


def glue_cert(gc: GlueCertificate) -> dict:
    return C.envelope("glue", gc.value.ring, {"p": C.ser_param(gc.p), "q": C.ser_param(gc.q)},
                      {"value": C.ser_poly(gc.value)}, {"u": C.ser_poly(gc.u), "v": C.ser_poly(gc.v)})


def pipeline_cert(v: QuadricPoint, f: Poly, sigma: OrthWord, result: PipelineResult, T: str) -> dict:
    """One sub-certificate per data-carrying step, plus the final chain."""
    if not result.complete:
        raise ValueError("only complete pipelines are certified")
    steps = []
    for st in result.steps:
        d = st.data
        if isinstance(d, HomotopyChain):
            s, e = d.endpoints()
            steps.append(chain_cert(d, s, e))
        elif isinstance(d, LaurentReversal):
            steps.append(reversal_cert(d))
        elif isinstance(d, tuple) and len(d) == 4 and isinstance(d[3], SplitCertificate):
            steps.append(split_cert(d[0], d[1], d[2], d[3]))
        elif isinstance(d, GluedPoint):
            steps.extend(glue_cert(gc) for gc in d.coords)
            steps.append(point_cert(d.point))
    ev = {"steps": steps, "chain": C.ser_chain(result.chain)}
    return C.envelope("pipeline", v.ring, {"point": C.ser_point(v), "f": C.ser_poly(f),
                                           "sigma": C.ser_word(sigma), "T": T}, {"trivial": True}, ev)
