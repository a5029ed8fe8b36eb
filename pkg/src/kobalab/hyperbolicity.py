"""Hyperbolicity statistics: four-point constants, thin triangles,
visibility gaps and quasi-geodesic shadowing, all on sampled configurations.

The four-point and thin-triangle constants are related but not equal; both
are reported separately and never conflated.  Distance values feeding the
statistics are upper estimates; the interval slack is carried along so a
reported constant comes with an honest error bar.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig, max_workers
from .domains import ConvexDomain
from .errors import PreconditionError, RejectedInputError
from .metric import PolylinePath, distance, geodesic
from .points import as_point, norm, point_to_json


@dataclass
class QuadrupleSample:
    points: list
    dist: dict                      # (i, j) -> upper estimate, i < j
    slack: float = 0.0              # accumulated interval width

    def d(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        return self.dist[(min(i, j), max(i, j))]


@dataclass
class DeltaReport:
    delta_four_point: float
    delta_thin_triangle: float
    n_samples: int
    max_witness: dict = field(default_factory=dict)
    slack: float = 0.0

    def to_json(self):
        return {
            "delta_four_point": self.delta_four_point,
            "delta_thin_triangle": self.delta_thin_triangle,
            "n_samples": self.n_samples,
            "max_witness": self.max_witness,
            "slack": self.slack,
        }


def gromov_product(x, y, w, dist) -> float:
    """(x|y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2 with supplied distances."""
    return 0.5 * (dist(x, w) + dist(y, w) - dist(x, y))


def radius_sampler(domain: ConvexDomain, radius: float):
    """Uniform sampling in the domain scaled by ``radius`` (catalog kinds)."""
    def sample(rng: np.random.Generator, n: int) -> np.ndarray:
        pts = domain.sample_interior(rng, n)
        return pts * (radius / 0.999) if domain.kind in ("ball", "polydisc") else pts
    return sample


def _quad_defect(q: QuadrupleSample) -> tuple:
    """Max four-point defect over the labelings of one quadruple."""
    best = 0.0
    witness = None
    for w in range(4):
        rest = [i for i in range(4) if i != w]
        for z_pos in range(3):
            z = rest[z_pos]
            x, y = [i for i in rest if i != z]
            pxz = 0.5 * (q.d(x, w) + q.d(z, w) - q.d(x, z))
            pzy = 0.5 * (q.d(z, w) + q.d(y, w) - q.d(z, y))
            pxy = 0.5 * (q.d(x, w) + q.d(y, w) - q.d(x, y))
            val = min(pxz, pzy) - pxy
            if val > best:
                best = val
                witness = (w, x, y, z)
    return best, witness


def four_point_delta(domain: ConvexDomain, sampler, n_samples: int,
                     config: SolverConfig = DEFAULT_CONFIG,
                     distance_fn=None, seed: int | None = None) -> DeltaReport:
    """Empirical four-point constant over sampled quadruples.

    ``sampler(rng, n)`` yields interior points; quadruples are consecutive
    blocks of four, so the statistic is monotone in ``n_samples`` for a fixed
    seed.  ``distance_fn(a, b) -> (upper, width)`` defaults to the distance
    estimator's upper bound.
    """
    if n_samples < 1:
        raise PreconditionError("need at least one quadruple")
    base_seed = config.seed if seed is None else seed
    if distance_fn is None:
        def distance_fn(a, b):
            est = distance(domain, a, b, config)
            return est.bound.upper, est.bound.width

    def eval_quad(k):
        # per-quadruple child seed: the statistic is monotone in n_samples
        rng = np.random.default_rng([base_seed, k])
        quad = [as_point(p, domain.dim) for p in sampler(rng, 4)]
        dist = {}
        slack = 0.0
        for i in range(4):
            for j in range(i + 1, 4):
                u, wdt = distance_fn(quad[i], quad[j])
                dist[(i, j)] = u
                slack += wdt
        q = QuadrupleSample(quad, dist, slack)
        val, wit = _quad_defect(q)
        return val, wit, q

    workers = max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(eval_quad, range(n_samples)))
    else:
        results = [eval_quad(k) for k in range(n_samples)]

    best = (0.0, None, None)
    for val, wit, q in results:
        if val > best[0]:
            best = (val, wit, q)
    witness = {}
    if best[1] is not None:
        w, x, y, z = best[1]
        witness = {
            "roles_wxyz": [w, x, y, z],
            "points": [point_to_json(p) for p in best[2].points],
            "value": best[0],
        }
    slack = best[2].slack if best[2] is not None else 0.0
    return DeltaReport(best[0], math.nan, n_samples, witness, slack)


def thin_triangle_delta(domain: ConvexDomain, x, y, z,
                        config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Max over sides of the distance to the union of the two other sides."""
    x, y, z = (as_point(p, domain.dim) for p in (x, y, z))
    for a, b in ((x, y), (y, z), (z, x)):
        if np.array_equal(a, b):
            raise PreconditionError("triangle vertices must be pairwise distinct")
    sides = [geodesic(domain, x, y, config),
             geodesic(domain, y, z, config),
             geodesic(domain, z, x, config)]
    worst = 0.0
    for k, side in enumerate(sides):
        others = [p for j, s in enumerate(sides) if j != k for p in s.nodes]
        for p in side.nodes:
            dmin = min(
                distance(domain, p, o, config, effort="direct").bound.upper
                if not np.array_equal(p, o) else 0.0
                for o in others)
            worst = max(worst, dmin)
    return worst


def visibility_check(domain: ConvexDomain, x0, samples_near_xi, samples_near_eta,
                     config: SolverConfig = DEFAULT_CONFIG):
    """Empirical visibility constant A with a stabilization verdict.

    Returns (A, stabilizes, profile) where profile lists the running maxima
    as the sample pairs approach the two ideal points.
    """
    x0 = domain.require_inside(x0)
    xs = [domain.require_inside(p) for p in samples_near_xi]
    ys = [domain.require_inside(p) for p in samples_near_eta]
    if not xs or not ys:
        raise PreconditionError("both sample clouds must be nonempty")
    sep = min(norm(a - b) for a in xs for b in ys)
    if sep < 1e-9 * domain.scale:
        raise RejectedInputError("sample clouds overlap")

    def up(a, b):
        if np.array_equal(a, b):
            return 0.0, 0.0
        est = distance(domain, a, b, config)
        return est.bound.upper, est.bound.width

    records = []
    for a in xs:
        for b in ys:
            da, _ = up(a, x0)
            db, _ = up(b, x0)
            dab, wab = up(a, b)
            records.append((min(da, db), da + db - dab, wab))
    records.sort(key=lambda r: r[0])
    profile = []
    running = -math.inf
    for _, val, _ in records:
        running = max(running, val)
        profile.append(running)
    A = profile[-1]
    slack = 2.0 * max(r[2] for r in records)
    tail = profile[-3:] if len(profile) >= 3 else profile
    stabilizes = (max(tail) - min(tail)) <= max(slack, 1e-9) + 0.05 * max(abs(A), 1.0)
    return A, stabilizes, profile


def shadowing_gap(domain: ConvexDomain, quasi: PolylinePath,
                  config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Symmetric node-cloud Hausdorff gap between a path and the geodesic
    joining its endpoints, in upper distance estimates."""
    if quasi.n_segments < 1:
        raise PreconditionError("quasi-geodesic needs at least 2 nodes")
    geo = geodesic(domain, quasi.nodes[0], quasi.nodes[-1], config)

    def up(a, b):
        if np.array_equal(a, b):
            return 0.0
        return distance(domain, a, b, config, effort="direct").bound.upper

    def directed(src, dst):
        worst = 0.0
        for p in src:
            worst = max(worst, min(up(p, o) for o in dst))
        return worst

    return max(directed(quasi.nodes, geo.nodes), directed(geo.nodes, quasi.nodes))
