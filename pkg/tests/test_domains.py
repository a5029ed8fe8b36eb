import json

import numpy as np
import pytest

import kobalab as kl
from kobalab.domains import contains, classify_ends, is_c_proper, recession_directions
from kobalab.errors import PreconditionError, RejectedInputError


def test_membership_trivia():
    ball2 = kl.Ball(2)
    assert contains(ball2, [0, 0])
    assert not contains(ball2, [1, 0])            # boundary excluded, domain open
    sieg = kl.Siegel(2)
    assert contains(sieg, [2j, 0])                # Im(2i)=2 > 0


def test_membership_dimension_mismatch():
    with pytest.raises(RejectedInputError):
        contains(kl.Ball(2), [0.5])


def test_membership_rejects_nan():
    with pytest.raises(RejectedInputError):
        contains(kl.Ball(1), [float("nan")])


def test_convexity_witness_property():
    rng = np.random.default_rng(3)
    for domain in (kl.Ball(2), kl.Polydisc(2), kl.Siegel(2), kl.Strip.box(2)):
        pts = domain.sample_interior(rng, 20)
        for k in range(0, 20, 2):
            x, y = pts[k], pts[k + 1]
            for t in np.linspace(0.1, 0.9, 9):
                assert domain.contains(t * x + (1 - t) * y), domain.kind


def test_recession_ball_bounded():
    ball = kl.Ball(1)
    rep = recession_directions(ball, [0.0], n_dirs=32)
    assert rep.directions == []
    assert rep.is_bounded
    assert classify_ends(ball, rep).kind == "Bounded"


def test_recession_strip_antipodal():
    strip = kl.Strip.planar(1.0)
    rep = recession_directions(strip, [0.0], n_dirs=32)
    assert rep.antipodal_pair is not None
    ends = classify_ends(strip, rep)
    assert ends.kind == "TwoEnds"
    assert abs(abs(complex(ends.axis[0])) - 1.0) < 1e-9
    assert abs(complex(ends.axis[0]).imag) < 1e-6   # axis is the real line


def test_recession_box_strip_two_ends():
    strip = kl.Strip.box(2)
    rep = recession_directions(strip, np.zeros(2), n_dirs=64)
    ends = classify_ends(strip, rep)
    assert ends.kind == "TwoEnds"
    assert abs(abs(complex(ends.axis[0])) - 1.0) < 1e-9


def test_recession_siegel_one_end_with_cone():
    sieg = kl.Siegel(2)
    rep = recession_directions(sieg, [2j, 0], n_dirs=64)
    assert len(rep.directions) >= 3
    ends = classify_ends(sieg, rep)
    assert ends.kind == "OneEnd"
    # the vertical direction i*e_0 belongs to the cone
    assert sieg.recession_cone_contains(np.array([1j, 0.0]))
    best = min(np.linalg.norm(v - np.array([1j, 0.0])) for v in rep.directions)
    assert best < 0.75


def test_recession_consistency_other_basepoints():
    sieg = kl.Siegel(2)
    rep = recession_directions(sieg, [2j, 0], n_dirs=32)
    rng = np.random.default_rng(5)
    others = sieg.sample_interior(rng, 5)
    for v in rep.directions[:5]:
        for z in others:
            for t in (1.0, 10.0, 100.0):
                assert sieg.contains(z + t * v)


def test_strip_decomposition_numeric():
    strip = kl.Strip.planar(1.0)
    rep = recession_directions(strip, [0.0], n_dirs=32)
    v = rep.antipodal_pair
    rng = np.random.default_rng(7)
    pts = strip.sample_interior(rng, 10, spread=0.4)
    for z in pts:
        for T in (1e2, 1e4):
            assert strip.contains(z + T * v) and strip.contains(z - T * v)
        # projection orthogonal to the axis stays bounded by the base
        proj = z - (z @ np.conj(v)) * v
        assert np.linalg.norm(proj) <= strip.base_circumradius + 1e-9


def test_c_proper_catalog():
    for domain, expect in ((kl.ProductWithPlane(2), False),
                           (kl.Siegel(2), True),
                           (kl.Ball(2), True),
                           (kl.Strip.planar(), True)):
        rep = recession_directions(domain, domain.default_witness(), n_dirs=32)
        verdict, _approx = is_c_proper(domain, rep)
        assert verdict is expect, domain.kind


def test_c_proper_numeric_route():
    # same geometry as the disc-times-plane product, via raw constraints
    cone = kl.NormCone(2, [{"L": [[1.0, 0.0], [0.0, 0.0]], "b": [0, 0],
                            "a": [0, 0], "c": 1.0}])
    rep = recession_directions(cone, cone.default_witness(), n_dirs=64)
    verdict, approx = is_c_proper(cone, rep)
    assert approx
    assert verdict is False


def test_end_count_always_valid():
    rng = np.random.default_rng(11)
    for domain in (kl.Ball(2), kl.Polydisc(2), kl.LeftHalfSpaces(2),
                   kl.Siegel(2), kl.Strip.planar(), kl.ProductWithPlane(2)):
        rep = recession_directions(domain, domain.default_witness(), n_dirs=32)
        assert classify_ends(domain, rep).kind in ("Bounded", "OneEnd", "TwoEnds")


def test_degenerate_spec_rejected():
    with pytest.raises(RejectedInputError):
        kl.HalfSpaceIntersection(1, normals=[[1.0], [-1.0]], offsets=[0.0, 0.0])


def test_precondition_witness_outside():
    with pytest.raises(PreconditionError):
        recession_directions(kl.Ball(1), [2.0])


def test_json_roundtrip(tmp_path):
    for domain in (kl.Ball(2), kl.Polydisc(3), kl.Siegel(2), kl.Strip.box(2),
                   kl.LeftHalfSpaces(2), kl.ProductWithPlane(2)):
        path = tmp_path / f"{domain.kind}.json"
        path.write_text(json.dumps(domain.to_json()))
        back = kl.load_domain(str(path))
        assert back.kind == domain.kind and back.dim == domain.dim
        rng = np.random.default_rng(1)
        for p in domain.sample_interior(rng, 8):
            assert back.contains(p)


def test_recession_report_json_digits():
    strip = kl.Strip.planar(1.0)
    rep = recession_directions(strip, [0.0], n_dirs=16)
    blob = json.dumps(rep.to_json())
    assert "antipodal_pair" in blob
