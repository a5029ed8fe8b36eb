"""Counterexample gallery: three experiments probing the limits of boundary
extension.

* "8.1" -- on the disc-times-plane product, a shear by a lacunary series
  sends pairs with merging boundary limits to pairs that stay separated.
* "8.2" -- on the bidisc, two sequences marching to different boundary points
  stay at bounded distance from each other (flat boundary behavior).
* "8.3" -- the Cayley-type map of the upper cone domain onto a bounded image:
  a distance-preserving biholomorphism whose inverse sends a whole boundary
  ball to infinity.
"""

from __future__ import annotations

import math

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .domains import Polydisc, ProductWithPlane, Siegel
from .errors import RejectedInputError
from .metric import distance, geodesic
from .points import as_point, norm, point_to_json

LACUNARY_TERMS = 64


def lacunary_shear(z: complex, terms: int = LACUNARY_TERMS) -> complex:
    """g(z) = sum_k z^(2^k): bounded-coefficient lacunary polynomial whose
    angular oscillation near |z|=1 grows without bound with the truncation."""
    acc = 0.0 + 0.0j
    w = complex(z)
    for _ in range(terms):
        acc += w
        if abs(w) < 1e-320:
            break
        w = w * w
    return acc


def product_shear_map(z: np.ndarray, terms: int = LACUNARY_TERMS) -> np.ndarray:
    """F(z, w) = (z, w + g(z)) on the disc-times-plane product."""
    out = np.array(z, dtype=complex)
    out[1] = out[1] + lacunary_shear(out[0], terms)
    return out


def cayley_map(z: np.ndarray) -> np.ndarray:
    """(z0, z') -> (1/(z0+i), z'/(z0+i)); biholomorphism of the cone domain."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    den = z[0] + 1j
    if den == 0:
        raise RejectedInputError("Cayley map pole at z0 = -i")
    return np.concatenate([[1.0 / den], z[1:] / den])


def cayley_inverse(w: np.ndarray) -> np.ndarray:
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if w[0] == 0:
        raise RejectedInputError("Cayley inverse pole at w0 = 0")
    z0 = 1.0 / w[0] - 1j
    return np.concatenate([[z0], w[1:] / w[0]])


def _image_contains(w: np.ndarray) -> bool:
    """Membership in the bounded Cayley image of the cone domain."""
    if w[0] == 0:
        return False
    z = cayley_inverse(w)
    rest = norm(z[1:]) if len(z) > 1 else 0.0
    return z[0].imag > rest + 1e-12


def _membership_first_exit(inside, lam0: complex, phase: complex,
                           iters: int = 24) -> float:
    t = 1e-3
    if not inside(lam0 + t * phase):
        lo, hi = 0.0, t
    else:
        guard = 0
        while inside(lam0 + t * phase):
            t *= 2.0
            guard += 1
            if guard > 60:
                return math.inf
        lo, hi = t / 2.0, t
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if inside(lam0 + mid * phase):
            lo = mid
        else:
            hi = mid
    return lo


def membership_segment_bound(inside, a: np.ndarray, b: np.ndarray,
                             n_theta: int = 32) -> float:
    """Inscribed-disc distance bound using only a membership oracle.

    Valid for arbitrary (even non-convex) domains: the disc radius is the
    first-exit minimum over rays, verified on a sampling ring and shrunk.
    """
    u = b - a

    def in_slice(lam: complex) -> bool:
        return inside(a + lam * u)

    if not (in_slice(0.0) and in_slice(1.0)):
        return math.inf
    c = complex(0.5)
    exits = [_membership_first_exit(in_slice, c, np.exp(2j * math.pi * k / n_theta))
             for k in range(n_theta)]
    R = min(exits) * 0.98
    if not math.isfinite(R) or R <= 0:
        return math.inf
    for _ in range(8):
        ring_ok = all(in_slice(c + R * np.exp(2j * math.pi * k / (3 * n_theta)))
                      for k in range(3 * n_theta))
        if ring_ok:
            break
        R *= 0.9
    else:
        return math.inf
    if abs(0.0 - c) >= R or abs(1.0 - c) >= R:
        return math.inf
    from .slices import unit_disc_distance
    return unit_disc_distance((0.0 - c) / R, (1.0 - c) / R)


def membership_path_bound(inside, nodes, n_theta: int = 32,
                          max_depth: int = 4) -> float:
    """Chained inscribed-disc bound along a node sequence inside the oracle."""
    total = 0.0
    stack = [(as_point(a), as_point(b), 0) for a, b in zip(nodes, nodes[1:])][::-1]
    while stack:
        a, b, depth = stack.pop()
        if np.array_equal(a, b):
            continue
        v = membership_segment_bound(inside, a, b, n_theta)
        if math.isfinite(v):
            total += v
            continue
        if depth >= max_depth:
            return math.inf
        mid = 0.5 * (a + b)
        stack.append((mid, b, depth + 1))
        stack.append((a, mid, depth + 1))
    return total


def _polydisc_lower(u: np.ndarray, w: np.ndarray) -> float:
    """Distance of the enclosing unit polydisc: a valid lower bound."""
    worst = 0.0
    for a, b in zip(u, w):
        r = abs((a - b) / (1.0 - np.conj(a) * b))
        worst = max(worst, math.atanh(min(r, 1.0 - 1e-16)))
    return worst


def run_gallery(which: str, config: SolverConfig = DEFAULT_CONFIG,
                n_pairs: int = 100) -> dict:
    if which in ("8.1", "product-shear"):
        return _gallery_product_shear()
    if which in ("8.2", "bidisc-flat"):
        return _gallery_bidisc_flat(config)
    if which in ("8.3", "cone-cayley"):
        return _gallery_cone_cayley(config, n_pairs)
    raise RejectedInputError(f"unknown gallery item {which!r}")


def _gallery_product_shear() -> dict:
    domain = ProductWithPlane(2)
    rows = []
    for n in range(5, 19):
        r = 1.0 - 2.0 ** (-n)
        th = math.pi * 2.0 ** (-n)
        p = np.array([r, 0.0], dtype=complex)
        q = np.array([r * np.exp(1j * th), 0.0], dtype=complex)
        assert domain.contains(p) and domain.contains(q)
        fp, fq = product_shear_map(p), product_shear_map(q)
        rows.append({
            "n": n,
            "input_separation": norm(p - q),
            "image_separation": norm(fp - fq),
        })
    min_img = min(r["image_separation"] for r in rows[4:])
    last_input = rows[-1]["input_separation"]
    return {
        "which": "8.1",
        "rows": rows,
        "min_image_separation_tail": min_img,
        "final_input_separation": last_input,
        "non_extension_witnessed": bool(min_img > 0.25 and last_input < 1e-4),
    }


def _gallery_bidisc_flat(config: SolverConfig) -> dict:
    domain = Polydisc(2)
    rows = []
    for n in range(1, 41):
        zn = np.array([1.0 - 1.0 / (n + 1), 0.0], dtype=complex)
        wn = np.array([1.0 - 1.0 / (n + 1), 0.5], dtype=complex)
        est = distance(domain, zn, wn, config)
        rows.append({"n": n, "upper": est.bound.upper, "lower": est.bound.lower})
    sup_upper = max(r["upper"] for r in rows)
    return {
        "which": "8.2",
        "rows": rows,
        "sup_upper": sup_upper,
        "bounded": bool(math.isfinite(sup_upper)),
        "target_limits": [[1.0, 0.0], [1.0, 0.5]],
    }


def _gallery_cone_cayley(config: SolverConfig, n_pairs: int) -> dict:
    domain = Siegel(2)
    rng = np.random.default_rng(config.seed)

    fwd = cayley_map(np.array([2j, 0.0]))
    fwd_expected = np.array([-1j / 3.0, 0.0])

    inv_roundtrip = 0.0
    pts = domain.sample_interior(rng, 50)
    for p in pts:
        inv_roundtrip = max(inv_roundtrip,
                            norm(cayley_inverse(cayley_map(p)) - as_point(p, 2)))

    escape = []
    for n in (1, 10, 100, 1000):
        z = np.array([n * 1j, 0.0], dtype=complex)
        escape.append({"n": n, "source_norm": norm(z),
                       "image_norm": norm(cayley_map(z))})

    overlaps = 0
    samples = []
    pair_pts = domain.sample_interior(rng, 2 * n_pairs)
    for k in range(n_pairs):
        x = as_point(pair_pts[2 * k], 2)
        y = as_point(pair_pts[2 * k + 1], 2)
        if np.array_equal(x, y):
            y = y + 0.1
        d_est = distance(domain, x, y, config, effort="direct")
        lo_d, up_d = d_est.bound.lower, d_est.bound.upper
        u, w = cayley_map(x), cayley_map(y)
        lo_o = _polydisc_lower(u, w)
        light = config.with_(n_nodes=5, n_theta=min(config.n_theta, 24))
        try:
            path = geodesic(domain, x, y, light, effort="direct")
            img_nodes = [cayley_map(p) for p in path.nodes]
        except Exception:
            img_nodes = [u, w]
        up_o = membership_path_bound(_image_contains, img_nodes, n_theta=24)
        ok = max(lo_d, lo_o) <= min(up_d, up_o) + 1e-9
        overlaps += int(ok)
        if k < 5:
            samples.append({"source_interval": [lo_d, up_d],
                            "image_interval": [lo_o, up_o], "overlap": bool(ok)})
    return {
        "which": "8.3",
        "forward_value": point_to_json(fwd),
        "forward_expected": point_to_json(fwd_expected),
        "forward_error": norm(fwd - fwd_expected),
        "inverse_roundtrip_error": inv_roundtrip,
        "escape_rows": escape,
        "isometry_overlaps": overlaps,
        "isometry_pairs": n_pairs,
        "sample_intervals": samples,
    }
