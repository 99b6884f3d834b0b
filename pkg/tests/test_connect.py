"""Connecting homomorphisms: two routes, composites, LES exactness."""

import os

import pytest

from extchart.connect import (
    WiringError, compose_connecting, composite_routes_agree, connecting_hom,
    connecting_hom_yoneda, extension_class, les_assemble, modules_match,
    routes_agree,
)
from extchart.fplin import veq
from extchart.fpmod import SES, Presentation, load_ses, map_from_images, verify_ses
from extchart.resolve import minimal_resolution, yoneda_action
from extchart.steenrod import named_profile

FIX = os.path.join(os.path.dirname(__file__), "..", "src", "extchart", "data",
                   "fixtures")


def fixture(name):
    return os.path.join(FIX, name)


def counts(bases, polys):
    """Dimension counter for a free polynomial family: bases is a list of
    (s0,t0), polys a list of (ds,dt) bidegrees of polynomial generators.
    Returns a function (s,t) -> number of monomials."""
    def count(s, t):
        n = 0

        def rec(s0, t0, i):
            nonlocal n
            if i == len(polys):
                if s0 == s and t0 == t:
                    n += 1
                return
            ds, dt = polys[i]
            k = 0
            while s0 + k * ds <= s and t0 + k * dt <= t:
                rec(s0 + k * ds, t0 + k * dt, i + 1)
                k += 1

        for (s0, t0) in bases:
            rec(s0, t0, 0)
        return n

    return count


def split_ses():
    p2 = named_profile("A(1)", 2)
    kill = lambda g: [[("Sq1", g)], [("Sq2", g)]]
    sub = Presentation(p2, [("x", 0)], kill("x"), name="ssub").realize()
    mid = Presentation(p2, [("a", 0), ("b", 1)], kill("a") + kill("b"),
                       name="smid").realize()
    quot = Presentation(p2, [("y", 1)], kill("y"), name="squot").realize()
    inj = map_from_images(sub, mid, {"x": "a"})
    surj = map_from_images(mid, quot, {"a": "0", "b": "y"})
    return SES(sub, mid, quot, inj, surj, name="split")


@pytest.fixture(scope="module")
def ses_y():
    return load_ses(fixture("ext_y.ses"))


@pytest.fixture(scope="module")
def ses_z():
    return load_ses(fixture("ext_z.ses"))


@pytest.fixture(scope="module")
def conn_y(ses_y):
    return connecting_hom(ses_y, smax=9, tmax=28)


@pytest.fixture(scope="module")
def conn_z(ses_z):
    return connecting_hom(ses_z, smax=9, tmax=28)


def test_split_sequence():
    ses = split_ses()
    assert verify_ses(ses).ok
    conn = connecting_hom(ses, smax=5, tmax=14)
    for s in range(conn.s_max + 1):
        for t in range(conn.t_max + 1):
            assert conn.delta(s, t).is_zero(), (s, t)
    ec = extension_class(ses, smax=3, tmax=10)
    assert ec.is_zero()
    conn2 = connecting_hom_yoneda(ses, smax=5, tmax=14)
    ok, sign = routes_agree(conn, conn2)
    assert ok and sign == 1
    rep = les_assemble(ses, smax=4, tmax=12)
    assert rep.ok


def test_ext_y_kernel_dims(conn_y):
    # kernel of the boundary is a rank-one free polynomial family on the
    # class at (3,7), over polynomial generators at (1,1) and (4,12)
    want = counts([(3, 7)], [(1, 1), (4, 12)])
    for s in range(conn_y.s_max + 1):
        for t in range(conn_y.t_max + 1):
            assert conn_y.kernel_dim(s, t) == want(s, t), (s, t)


def test_ext_y_cokernel_dims(conn_y):
    want = counts([(0, 0)], [(1, 1), (4, 12)])
    extra = counts([(1, 2), (2, 4)], [(4, 12)])
    for s in range(conn_y.s_max + 1):
        for t in range(conn_y.t_max + 1):
            assert conn_y.cokernel_dim(s, t) == want(s, t) + extra(s, t), (s, t)


def test_ext_z_kernel_dims(conn_z):
    # rank-one free family on the class at (1,9)
    want = counts([(1, 9)], [(1, 1), (4, 12)])
    for s in range(conn_z.s_max + 1):
        for t in range(conn_z.t_max + 1):
            assert conn_z.kernel_dim(s, t) == want(s, t), (s, t)


def test_ext_z_cokernel_dims(conn_z):
    # suspended by 4: polynomial family at (0,4) plus two w1-families on the
    # stem-9 and stem-10 classes
    want = counts([(0, 4)], [(1, 1), (4, 12)])
    extra = counts([(2, 11), (3, 13)], [(4, 12)])
    for s in range(conn_z.s_max + 1):
        for t in range(conn_z.t_max + 1):
            assert conn_z.cokernel_dim(s, t) == want(s, t) + extra(s, t), (s, t)


def test_routes_agree_p2(ses_y, conn_y, ses_z, conn_z):
    for ses, conn in ((ses_y, conn_y), (ses_z, conn_z)):
        other = connecting_hom_yoneda(ses, smax=6, tmax=20,
                                      res_sub=conn.res_sub,
                                      res_quot=conn.res_quot)
        ok, sign = routes_agree(conn, other)
        assert ok and sign == 1


def test_extension_classes(ses_y):
    assert not extension_class(ses_y, smax=2, tmax=12).is_zero()
    ses_j = load_ses(fixture("ext_j.ses"))
    assert not extension_class(ses_j, smax=2, tmax=16).is_zero()
    ses_j_split = load_ses(fixture("ext_j_split.ses"))
    assert extension_class(ses_j_split, smax=2, tmax=16).is_zero()


def test_compose_kernel_and_cokernel(ses_y, ses_z):
    comp = compose_connecting(ses_z, ses_y, smax=8, tmax=26)
    kern = counts([(1, 9)], [(1, 1), (4, 12)])
    for s in range(comp.s_max + 1):
        for t in range(comp.t_max + 1):
            assert comp.kernel_dim(s, t) == kern(s, t), (s, t)
    base = counts([(0, 0)], [(1, 1), (4, 12)])
    extra = counts([(1, 2), (2, 4), (1, 4), (2, 5), (3, 6), (3, 11), (4, 13)],
                   [(4, 12)])
    for s in range(comp.s_max + 1):
        for t in range(comp.t_max + 1):
            assert comp.cokernel_dim(s, t) == base(s, t) + extra(s, t), (s, t)
    ok, sign = composite_routes_agree(comp, smax=6, tmax=20)
    assert ok and sign == 1


def test_compose_wiring_error(ses_y):
    with pytest.raises(WiringError):
        compose_connecting(ses_y, ses_y, smax=3, tmax=10)


def test_les_assemble_ext_y(ses_y):
    rep = les_assemble(ses_y, smax=6, tmax=20)
    assert rep.ok, rep.failures[:5]
    # chart dimensions line up with the boundary bookkeeping at a sample
    dims = rep.chart_dims("mid")
    assert dims.get((0, 0), 0) == 1


def test_naturality_of_delta(ses_y, conn_y):
    # the boundary commutes with multiplication by the (4,12) ground class
    p2 = named_profile("A(2)", 2)
    ground = Presentation(p2, [("x", 0)],
                          [[("Sq1", "x")], [("Sq2", "x")], [("Sq4", "x")]],
                          name="ground").realize()
    res_g = minimal_resolution(ground, s_max=10, t_max=28)
    w1 = res_g.cls(4, 12, index=0)
    rs, rq = conn_y.res_sub, conn_y.res_quot
    for (s, t) in [(0, 4), (3, 7), (1, 5), (2, 6)]:
        for j in range(rs.ext_dim(s, t)):
            x = rs.cls(s, t, index=j)
            w1x = yoneda_action(w1, x)
            lhs = conn_y.delta(s + 4, t + 12).matvec(w1x.vec)
            dx = rq.cls(s + 1, t, conn_y.delta(s, t).matvec(x.vec))
            rhs = yoneda_action(w1, dx)
            assert veq(2, lhs, rhs.vec), (s, t, j)


def test_modules_match(ses_y, ses_z):
    assert modules_match(ses_z.quot, ses_y.sub, 20)
    assert not modules_match(ses_y.sub, ses_y.quot, 12)
