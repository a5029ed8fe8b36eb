import math

import numpy as np
import pytest

import kobalab as kl
from kobalab.errors import (MetricDegenerateError, PreconditionError,
                            RejectedInputError)
from kobalab.metric import (MetricBound, PolylinePath, delta, distance,
                            exact_infinitesimal, geodesic, infinitesimal_bounds,
                            path_length, ray, segment_bound)

import oracles


# ---------------------------------------------------------------------------
# boundary gap

def test_delta_trivia():
    disc = kl.Ball(1)
    assert delta(disc, [0], [1]) == pytest.approx(1.0, abs=1e-12)
    assert delta(disc, [0.5], [1]) == pytest.approx(0.5, abs=1e-12)
    poly = kl.Polydisc(2)
    assert delta(poly, [0, 0], [1, 0]) == pytest.approx(1.0, abs=1e-12)
    strip = kl.Strip.planar(1.0)
    assert delta(strip, [0.0], [1j]) == pytest.approx(1.0, abs=1e-10)


def test_delta_matches_membership_bisection():
    rng = np.random.default_rng(2)
    for domain in (kl.Ball(2), kl.Polydisc(2), kl.Siegel(2), kl.Strip.planar()):
        pts = domain.sample_interior(rng, 3)
        dirs = rng.standard_normal((3, domain.dim)) + 1j * rng.standard_normal((3, domain.dim))
        for z, w in zip(pts, dirs):
            got = delta(domain, z, w)
            ref = oracles.delta_bruteforce(domain, z, w, n_theta=240, iters=48)
            if math.isfinite(ref):
                assert got == pytest.approx(ref, rel=5e-4), domain.kind


def test_delta_siegel_example():
    # along (1,0) from (2i,0) the slice constraint reads Im(2i+lam) > 0
    assert delta(kl.Siegel(2), [2j, 0], [1, 0]) == pytest.approx(2.0, abs=1e-9)


def test_delta_rejects_bad_input():
    disc = kl.Ball(1)
    with pytest.raises(RejectedInputError):
        delta(disc, [0], [0])
    with pytest.raises(PreconditionError):
        delta(disc, [2.0], [1])


def test_delta_infinite_sentinel():
    prod = kl.ProductWithPlane(2)
    assert delta(prod, [0, 0], [0, 1]) == math.inf


# ---------------------------------------------------------------------------
# infinitesimal bounds

def test_infinitesimal_bounds_ratio_exactly_two():
    rng = np.random.default_rng(4)
    for domain in (kl.Ball(1), kl.Ball(2), kl.Polydisc(2), kl.Siegel(2)):
        pts = domain.sample_interior(rng, 10)
        for z in pts:
            v = rng.standard_normal(domain.dim) + 1j * rng.standard_normal(domain.dim)
            b = infinitesimal_bounds(domain, z, v)
            assert b.upper == 2.0 * b.lower     # exact in floating point


def test_infinitesimal_bounds_bracket_exact():
    rng = np.random.default_rng(5)
    cases = ((kl.Ball(1), oracles.disc_metric_vec), (kl.Ball(2), oracles.ball_metric),
             (kl.Polydisc(2), oracles.polydisc_metric),
             (kl.LeftHalfSpaces(2), oracles.halfspaces_metric))
    for domain, oracle in cases:
        pts = domain.sample_interior(rng, 25)
        for z in pts:
            v = rng.standard_normal(domain.dim) + 1j * rng.standard_normal(domain.dim)
            b = infinitesimal_bounds(domain, z, v)
            k = oracle(z, v)
            # the lower bound is attained exactly on half-plane products;
            # allow rounding at the equality case
            ulp = 1e-12 * k
            assert b.lower <= k + ulp and k <= b.upper + ulp, domain.kind


def test_exact_infinitesimal_values():
    disc = kl.Ball(1)
    assert exact_infinitesimal(disc, [0], [1]) == pytest.approx(1.0)
    assert exact_infinitesimal(disc, [0.5], [1]) == pytest.approx(1 / 0.75)
    poly = kl.Polydisc(2)
    assert exact_infinitesimal(poly, [0.5, 0], [0, 1]) == pytest.approx(1.0)
    with pytest.raises(RejectedInputError):
        exact_infinitesimal(kl.Siegel(2), [2j, 0], [1, 0])


def test_exact_infinitesimal_finite_difference():
    # k(z; v) ~ K(z, z + eps v)/eps for small eps
    ball = kl.Ball(2)
    z = np.array([0.3 + 0.1j, -0.2j])
    v = np.array([0.5, 1.0 - 0.5j])
    eps = 1e-6
    fd = distance(ball, z, z + eps * v).bound.upper / eps
    assert fd == pytest.approx(exact_infinitesimal(ball, z, v), rel=1e-4)


def test_degenerate_direction_raises():
    with pytest.raises(MetricDegenerateError):
        infinitesimal_bounds(kl.ProductWithPlane(2), [0, 0], [0, 1])


# ---------------------------------------------------------------------------
# path length (quadrature route)

def test_path_length_upper_exceeds_true_distance():
    disc = kl.Ball(1)
    path = PolylinePath(disc, [[0.0], [0.5]],
                        [MetricBound(0.0, 1.0)])
    b = path_length(disc, path, quadrature_nodes=32)
    # integral of 1/(1-t) from 0 to 0.5 = log 2
    assert b.upper == pytest.approx(math.log(2.0), rel=1e-10)
    assert b.upper >= math.atanh(0.5)
    assert b.lower == pytest.approx(0.5 * b.upper)


def test_path_length_strip_translation_constant():
    strip = kl.Strip.planar(1.0)
    v = 2.5
    path = PolylinePath(strip, [[0.0], [v]], [MetricBound(0.0, 1.0)])
    b = path_length(strip, path, quadrature_nodes=16)
    d = delta(strip, [0.0], [1.0])
    assert b.upper == pytest.approx(v / d, rel=1e-12)


def test_path_exits_domain_error():
    disc = kl.Ball(1)
    path = PolylinePath(disc, [[-0.95], [0.95j]], [MetricBound(0.0, 1.0)])
    path.nodes[1] = np.array([1.5 + 0j])    # corrupt after construction
    with pytest.raises(PreconditionError):
        path_length(disc, path, 8)


def test_degenerate_path_rejected():
    with pytest.raises(RejectedInputError):
        PolylinePath(kl.Ball(1), [[0.3], [0.3]], None)


# ---------------------------------------------------------------------------
# distance

def test_distance_disc_oracle_grid():
    disc = kl.Ball(1)
    for r in np.arange(0.1, 0.95, 0.1):
        est = distance(disc, [0.0], [r])
        assert abs(est.bound.upper - math.atanh(r)) < 1e-3
        assert est.bound.lower <= math.atanh(r) + 1e-12


def test_distance_polydisc_oracle():
    poly = kl.Polydisc(2)
    rng = np.random.default_rng(6)
    pts = poly.sample_interior(rng, 40) * 0.92
    for k in range(0, 40, 2):
        x, y = pts[k], pts[k + 1]
        est = distance(poly, x, y)
        assert abs(est.bound.upper - oracles.polydisc_distance(x, y)) < 1e-3


def test_distance_ball2_oracle():
    ball = kl.Ball(2)
    rng = np.random.default_rng(7)
    pts = ball.sample_interior(rng, 40) * 0.95
    for k in range(0, 40, 2):
        est = distance(ball, pts[k], pts[k + 1])
        assert abs(est.bound.upper - oracles.ball_distance(pts[k], pts[k + 1])) < 1e-3


def test_distance_identity():
    est = distance(kl.Ball(2), [0.1, 0.2], [0.1, 0.2])
    assert est.bound.lower == 0.0 and est.bound.upper == 0.0
    assert est.path is None


def test_distance_symmetry_exact():
    ball = kl.Ball(2)
    x = np.array([0.3 + 0.2j, -0.4])
    y = np.array([-0.1, 0.5j])
    assert distance(ball, x, y).bound.upper == distance(ball, y, x).bound.upper


def test_distance_estimate_invariant():
    poly = kl.Polydisc(2)
    est = distance(poly, [0.3, 0.1], [-0.2, 0.5j])
    total = sum(b.upper for b in est.path.per_segment_bounds)
    assert est.bound.upper == pytest.approx(total, rel=1e-9)


def test_distance_monotone_under_node_doubling():
    # three-half-plane wedge slices exercise the genuine polyline descent
    hs = kl.LeftHalfSpaces(3)
    x = np.array([-1 + 0.5j, -2 - 1j, -0.5 + 0.2j])
    y = np.array([-0.5 - 0.2j, -1 + 2j, -2.0 - 0.7j])
    cfg17 = kl.SolverConfig(n_nodes=17, max_sweeps=60)
    cfg33 = kl.SolverConfig(n_nodes=33, max_sweeps=60)
    u17 = distance(hs, x, y, cfg17, effort="full").bound.upper
    u33 = distance(hs, x, y, cfg33, effort="full").bound.upper
    assert u33 <= u17 + 1e-9


def test_distance_translation_invariance_strip():
    strip = kl.Strip.planar(1.0)
    x, y = np.array([0.2j]), np.array([1.5 - 0.3j])
    base = distance(strip, x, y).bound.upper
    for t in (1.0, 7.5, 40.0):
        shifted = distance(strip, x + t, y + t).bound.upper
        assert shifted == pytest.approx(base, rel=1e-6)


def test_distance_halfspace_embedding_lower_bound():
    ball = kl.Ball(2)
    x = np.array([0.5, 0.1j])
    y = np.array([-0.3, 0.2])
    est = distance(ball, x, y)
    emb = ball.halfspace_embedding()
    ref = oracles.halfspaces_distance(emb(x), emb(y))
    assert est.bound.lower >= ref - 1e-12


def test_distance_strip_quasi_geodesic_bounds():
    strip = kl.Strip.planar(1.0)
    alpha = strip.base_circumradius
    d0 = delta(strip, [0.0], [1.0])
    for a, b in ((0.0, 3.0), (-5.0, 5.0), (2.0, 20.0)):
        est = distance(strip, [a], [b])
        assert est.bound.upper >= (b - a) / (2 * alpha) - 1e-9
        assert est.bound.lower <= (b - a) / d0 + 1e-9


# ---------------------------------------------------------------------------
# geodesics and rays

def test_geodesic_diameter_nodes():
    disc = kl.Ball(1)
    g = geodesic(disc, [-0.5], [0.5])
    for p in g.nodes:
        assert abs(complex(p[0]).imag) < 1e-3
    # unit-speed-ish: cumulative segments roughly equal
    ups = [b.upper for b in g.per_segment_bounds]
    assert max(ups) <= 3.0 * min(ups) + 1e-9


def test_geodesic_degenerate_rejected():
    with pytest.raises(RejectedInputError):
        geodesic(kl.Ball(1), [0.2], [0.2])


def test_geodesic_strip_axis():
    strip = kl.Strip.planar(1.0)
    g = geodesic(strip, [0.0], [8.0])
    for p in g.nodes:
        assert abs(complex(p[0]).imag) < 1e-2


def test_ray_disc_arclength():
    disc = kl.Ball(1)
    r = ray(disc, [0.0], [1.0], 3.0)
    assert abs(complex(r.nodes[-1][0]) - math.tanh(3.0)) < 1e-6
    assert r.upper_length() == pytest.approx(3.0, abs=1e-6)


def test_ray_strip_end():
    from kobalab.boundary import IdealPoint
    strip = kl.Strip.planar(1.0)
    d0 = delta(strip, [0.0], [1.0])
    T = 6.0
    r = ray(strip, [0.0], IdealPoint.end(0, [1.0]), T)
    s = complex(r.nodes[-1][0]).real
    assert d0 * T * 0.5 <= s <= 2.0 * strip.base_circumradius * T + 1e-9


def test_ray_rejects_bad_targets():
    disc = kl.Ball(1)
    with pytest.raises(RejectedInputError):
        ray(disc, [0.0], [0.5], 2.0)        # interior target
    with pytest.raises(RejectedInputError):
        ray(disc, [0.0], [2.0], 2.0)        # far outside
    with pytest.raises(RejectedInputError):
        ray(disc, [0.0], [1.0], 0.0)        # zero horizon


def test_segment_bound_is_upper_bound():
    rng = np.random.default_rng(8)
    for domain, oracle in ((kl.Ball(2), oracles.ball_distance),
                           (kl.Polydisc(2), oracles.polydisc_distance),
                           (kl.LeftHalfSpaces(2), oracles.halfspaces_distance)):
        pts = domain.sample_interior(rng, 30)
        for k in range(0, 30, 2):
            v, _ = segment_bound(domain, pts[k], pts[k + 1])
            assert v >= oracle(pts[k], pts[k + 1]) - 1e-10, domain.kind
