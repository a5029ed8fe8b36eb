import math

import numpy as np
import pytest

import kobalab as kl
from kobalab.errors import PreconditionError, RejectedInputError
from kobalab.hyperbolicity import (four_point_delta, gromov_product,
                                   radius_sampler, shadowing_gap,
                                   thin_triangle_delta, visibility_check)
from kobalab.metric import MetricBound, PolylinePath, distance, geodesic

import oracles


def _disc_dist(a, b):
    return oracles.disc_distance(complex(a[0]), complex(b[0]))


def test_gromov_product_identities():
    x, y, w = [0.3], [0.3], [0.5j]
    d = lambda a, b: _disc_dist(a, b)
    # x == y collapses to d(x, w)
    assert gromov_product(x, y, w, d) == pytest.approx(d(x, w))
    # w == x collapses to zero
    assert gromov_product(x, [0.7], x, d) == pytest.approx(0.0)


def test_gromov_product_symmetric_pair():
    d = lambda a, b: _disc_dist(a, b)
    val = gromov_product([0.9], [-0.9], [0.0], d)
    assert val == pytest.approx(0.0, abs=1e-12)


def test_four_point_delta_disc_bounded():
    disc = kl.Ball(1)
    rep = four_point_delta(disc, radius_sampler(disc, 0.95), 200, seed=10)
    assert 0.0 <= rep.delta_four_point <= 1.0
    assert rep.n_samples == 200


def test_four_point_delta_monotone_in_samples():
    disc = kl.Ball(1)
    r1 = four_point_delta(disc, radius_sampler(disc, 0.9), 60, seed=3)
    r2 = four_point_delta(disc, radius_sampler(disc, 0.9), 120, seed=3)
    assert r2.delta_four_point >= r1.delta_four_point - 1e-12


def test_four_point_witness_reproduces_value():
    disc = kl.Ball(1)
    rep = four_point_delta(disc, radius_sampler(disc, 0.9), 80, seed=5)
    w, x, y, z = rep.max_witness["roles_wxyz"]
    pts = [np.array([complex(c[0][0], c[0][1])]) for c in
           [[p[0]] for p in rep.max_witness["points"]]]
    d = lambda a, b: distance(disc, a, b).bound.upper
    pxz = 0.5 * (d(pts[x], pts[w]) + d(pts[z], pts[w]) - d(pts[x], pts[z]))
    pzy = 0.5 * (d(pts[z], pts[w]) + d(pts[y], pts[w]) - d(pts[z], pts[y]))
    pxy = 0.5 * (d(pts[x], pts[w]) + d(pts[y], pts[w]) - d(pts[x], pts[y]))
    assert min(pxz, pzy) - pxy == pytest.approx(rep.delta_four_point, abs=1e-9)


def test_four_point_delta_polydisc_grows():
    poly = kl.Polydisc(2)
    lo = four_point_delta(poly, radius_sampler(poly, 0.9), 300, seed=0)
    hi = four_point_delta(poly, radius_sampler(poly, 0.99), 300, seed=0)
    assert hi.delta_four_point > lo.delta_four_point


def test_degenerate_quadruple_contributes_nothing():
    # x == y makes every labeling defect <= 0
    from kobalab.hyperbolicity import QuadrupleSample, _quad_defect
    pts = [np.array([0.3]), np.array([0.3]), np.array([0.5j]), np.array([-0.2])]
    dist = {}
    for i in range(4):
        for j in range(i + 1, 4):
            dist[(i, j)] = _disc_dist(pts[i], pts[j])
    val, _ = _quad_defect(QuadrupleSample(pts, dist))
    assert val == pytest.approx(0.0, abs=1e-12)


def test_thin_triangle_degenerate_collinear():
    disc = kl.Ball(1)
    val = thin_triangle_delta(disc, [-0.6], [0.0], [0.6])
    assert val < 0.05


def test_thin_triangle_disc_bounded():
    disc = kl.Ball(1)
    val = thin_triangle_delta(disc, [0.8], [0.8j], [-0.8])
    assert 0.0 < val <= 1.5


def test_thin_triangle_polydisc_exceeds_disc():
    poly = kl.Polydisc(2)
    r = 0.95
    val = thin_triangle_delta(poly, [r, r], [r, -r], [-r, 0])
    disc_val = thin_triangle_delta(kl.Ball(1), [0.8], [0.8j], [-0.8])
    assert val > disc_val


def test_thin_triangle_rejects_duplicates():
    with pytest.raises(PreconditionError):
        thin_triangle_delta(kl.Ball(1), [0.1], [0.1], [0.5])


def test_visibility_disc_bounded():
    disc = kl.Ball(1)
    xs = [[r] for r in (0.9, 0.99, 0.999)]
    ys = [[-r] for r in (0.9, 0.99, 0.999)]
    A, stab, profile = visibility_check(disc, [0.0], xs, ys)
    # opposite boundary points: the defect 2 atanh r - d(r, -r) tends to log 2
    assert A <= math.log(2.0) + 1e-6
    assert stab
    assert profile == sorted(profile)


def test_visibility_rejects_overlap():
    with pytest.raises(RejectedInputError):
        visibility_check(kl.Ball(1), [0.0], [[0.5]], [[0.5]])


def test_shadowing_gap_of_geodesic_is_zero():
    disc = kl.Ball(1)
    g = geodesic(disc, [-0.7], [0.7])
    assert shadowing_gap(disc, g) < 1e-6


def test_shadowing_gap_euclidean_chord():
    disc = kl.Ball(1)
    nodes = [np.array([complex(x, y)]) for x, y in
             zip(np.linspace(-0.9, 0.0, 12), np.linspace(0.0, 0.9, 12))]
    segs = []
    for a, b in zip(nodes, nodes[1:]):
        u = distance(disc, a, b).bound.upper
        segs.append(MetricBound(0.5 * u, u))
    chord = PolylinePath(disc, nodes, segs)
    gap = shadowing_gap(disc, chord)
    assert 0.0 < gap < 1.5
