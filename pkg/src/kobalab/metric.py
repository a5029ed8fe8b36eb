"""Boundary gaps, two-sided infinitesimal metric bounds, path lengths,
distance estimates and approximate geodesics.

All distances are interval-valued.  The infinitesimal metric is bracketed by
the convex-domain estimate ``|v|/(2*gap) <= k(z;v) <= |v|/gap`` where ``gap``
is the Euclidean distance to the boundary along the complex line of ``v``;
the ratio of the two bounds is exactly 2 by construction.  Distance upper
bounds are realized by chains of analytic discs inscribed in complex-line
slices, optimized over polyline paths; lower bounds combine half the upper
bound with the exact distance of an affine image inside a product of left
half-planes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import slices as sl
from .config import DEFAULT_CONFIG, SolverConfig
from .domains import ConvexDomain
from .errors import (MetricDegenerateError, PreconditionError,
                     RejectedInputError, SolverError)
from .points import as_point, herm, norm, point_to_json

_GL_CACHE: dict = {}


def _gauss_legendre01(n: int):
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_CACHE[n]


@dataclass(frozen=True)
class MetricBound:
    """Two-sided estimate in Kobayashi-length units."""
    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper):
            raise RejectedInputError(f"invalid bound ({self.lower}, {self.upper})")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_json(self):
        return {"lower": self.lower, "upper": self.upper}


class PolylinePath:
    """Piecewise-linear path with per-segment length bounds."""

    def __init__(self, domain: ConvexDomain, nodes, per_segment_bounds=None,
                 realizers=None, check: bool = True):
        self.domain = domain
        self.nodes = [as_point(p, domain.dim) for p in nodes]
        if len(self.nodes) < 2:
            raise RejectedInputError("a path needs at least 2 nodes")
        for a, b in zip(self.nodes, self.nodes[1:]):
            if np.array_equal(a, b):
                raise RejectedInputError("consecutive path nodes must be distinct")
        if check:
            for p in self.nodes:
                domain.require_inside(p)
        self.per_segment_bounds = per_segment_bounds
        self._realizers = realizers

    @property
    def n_segments(self) -> int:
        return len(self.nodes) - 1

    def upper_length(self) -> float:
        return float(sum(b.upper for b in self.per_segment_bounds))

    def lower_length(self) -> float:
        return float(sum(b.lower for b in self.per_segment_bounds))

    def cumulative_upper(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([b.upper for b in self.per_segment_bounds])])

    def point_at_upper_length(self, t: float) -> np.ndarray:
        """Point at cumulative upper length t (clamped), linear within segments."""
        cum = self.cumulative_upper()
        t = min(max(t, 0.0), cum[-1])
        k = int(np.searchsorted(cum, t, side="right") - 1)
        k = min(k, self.n_segments - 1)
        seg = cum[k + 1] - cum[k]
        f = 0.0 if seg == 0 else (t - cum[k]) / seg
        return self.nodes[k] + f * (self.nodes[k + 1] - self.nodes[k])

    def to_json(self):
        return {
            "nodes": [point_to_json(p) for p in self.nodes],
            "per_segment_bounds": [b.to_json() for b in self.per_segment_bounds],
        }


@dataclass
class DistanceEstimate:
    bound: MetricBound
    path: PolylinePath | None
    iterations: int = 0

    def to_json(self):
        return {
            "bound": self.bound.to_json(),
            "iterations": self.iterations,
            "path": self.path.to_json() if self.path is not None else None,
        }


# ---------------------------------------------------------------------------
# boundary gap and infinitesimal bounds

def delta(domain: ConvexDomain, z, w, config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Distance from z to the boundary along the complex line spanned by w.

    Returns math.inf (sentinel) when the line never meets the boundary.
    """
    z = domain.require_inside(z)
    w = as_point(w, domain.dim)
    nw = norm(w)
    if nw == 0:
        raise RejectedInputError("direction w must be nonzero")
    cons = domain.slice_constraints(z, w)
    gap = sl.slice_gap(cons, 0.0, config.n_theta)
    if not math.isfinite(gap):
        return math.inf
    return gap * nw


def infinitesimal_bounds(domain: ConvexDomain, z, v,
                         config: SolverConfig = DEFAULT_CONFIG) -> MetricBound:
    v = as_point(v, domain.dim)
    d = delta(domain, z, v, config)
    if not math.isfinite(d):
        raise MetricDegenerateError("metric degenerate along v")
    if d <= 0:
        raise PreconditionError("boundary gap vanished; point too close to the boundary")
    upper = norm(v) / d
    return MetricBound(0.5 * upper, upper)


def exact_infinitesimal(domain: ConvexDomain, z, v) -> float:
    """Classical closed forms; test oracles for the catalog kinds."""
    z = domain.require_inside(z)
    v = as_point(v, domain.dim)
    if domain.kind == "ball":
        z2 = float(np.sum(np.abs(z) ** 2))
        h = herm(v, z)
        val2 = float(np.sum(np.abs(v) ** 2)) / (1.0 - z2) + abs(h) ** 2 / (1.0 - z2) ** 2
        return math.sqrt(val2)
    if domain.kind == "polydisc":
        return float(max(abs(vj) / (1.0 - abs(zj) ** 2) for zj, vj in zip(z, v)))
    if domain.kind == "left_half_spaces":
        return float(max(abs(vj) / (2.0 * abs(zj.real)) for zj, vj in zip(z, v)))
    raise RejectedInputError(f"no closed-form metric for kind {domain.kind!r}")


# ---------------------------------------------------------------------------
# segment machinery

def _quad_upper(domain, a, u, cons, n_quad, n_theta) -> float:
    """Gauss-Legendre estimate of the segment length with the upper integrand."""
    ts, ws = _gauss_legendre01(n_quad)
    total = 0.0
    for t, w in zip(ts, ws):
        gap = sl.slice_gap(cons, complex(t), n_theta)
        if not math.isfinite(gap):
            continue  # metric degenerate along this line: zero contribution
        if gap <= 0:
            raise PreconditionError("path exits domain")
        total += w / gap
    return total


def segment_bound(domain: ConvexDomain, a, b,
                  config: SolverConfig = DEFAULT_CONFIG,
                  polish: bool = False,
                  want_realizer: bool = True):
    """Upper bound for the distance between segment endpoints.

    Returns (upper_value, realizer or None).  Both the inscribed-disc chain
    value and the quadrature of the upper integrand are valid upper bounds;
    the smaller is returned.
    """
    u = b - a
    cons = domain.slice_constraints(a, u)
    val, realizer = sl.segment_bound(cons, config.n_theta, polish=polish)
    if not math.isfinite(val):
        qv = _quad_upper(domain, a, u, cons, config.quad, config.n_theta)
        return qv, sl.Realizer("plane")
    return val, (realizer if want_realizer else None)


def path_length(domain: ConvexDomain, path: PolylinePath,
                quadrature_nodes: int = 16,
                config: SolverConfig = DEFAULT_CONFIG) -> MetricBound:
    """Composite Gauss-Legendre quadrature of the two-sided integrand."""
    if quadrature_nodes < 2:
        raise PreconditionError("need at least 2 quadrature nodes per segment")
    upper = 0.0
    for p, q in zip(path.nodes, path.nodes[1:]):
        u = q - p
        cons = domain.slice_constraints(p, u)
        ts, ws = _gauss_legendre01(quadrature_nodes)
        for t, w in zip(ts, ws):
            zt = p + t * u
            if not domain.contains(zt):
                raise PreconditionError("path exits domain")
            gap = sl.slice_gap(cons, complex(t), config.n_theta)
            if not math.isfinite(gap):
                continue
            upper += w / gap
    return MetricBound(0.5 * upper, upper)


# ---------------------------------------------------------------------------
# polyline optimization

_STAGE_LADDER = (3, 5, 9, 17, 33, 65, 129)


def _stage_counts(n_nodes: int):
    counts = [n for n in _STAGE_LADDER if n < n_nodes]
    counts.append(n_nodes)
    return counts


def _bound_value(domain, a, b, config) -> float:
    v, _ = segment_bound(domain, a, b, config, want_realizer=False)
    return v


def _subdivide(domain, nodes, config, target: int):
    """Insert realizer-geodesic midpoints into the largest segments."""
    nodes = list(nodes)
    vals = [None] * (len(nodes) - 1)
    reals = [None] * (len(nodes) - 1)
    for i in range(len(nodes) - 1):
        vals[i], reals[i] = segment_bound(domain, nodes[i], nodes[i + 1], config)
    while len(nodes) < target:
        i = int(np.argmax(vals))
        a, b = nodes[i], nodes[i + 1]
        lam = reals[i].midpoint() if reals[i] is not None else complex(0.5)
        mid = a + lam * (b - a)
        if not domain.contains(mid) or np.array_equal(mid, a) or np.array_equal(mid, b):
            mid = 0.5 * (a + b)
        nodes.insert(i + 1, mid)
        v1, r1 = segment_bound(domain, a, mid, config)
        v2, r2 = segment_bound(domain, mid, b, config)
        vals[i:i + 1] = [v1, v2]
        reals[i:i + 1] = [r1, r2]
    return nodes, vals


def _pattern_sweeps(domain, nodes, vals, config, max_sweeps, tol):
    """Cyclic coordinate descent with backtracking pattern steps per node."""
    dim = domain.dim
    n = len(nodes)
    probes = []
    for k in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[k] = 1.0
        probes.extend([e, -e, 1j * e, -1j * e])
    scale = 1.0 + max(norm(p) for p in nodes)
    steps = [0.25 * norm(nodes[i + 1] - nodes[i - 1]) + 1e-6 for i in range(1, n - 1)]
    total = float(sum(vals))
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        prev_total = total
        for i in range(1, n - 1):
            cur = vals[i - 1] + vals[i]
            improved = False
            for e in probes:
                cand = nodes[i] + steps[i - 1] * e
                if not domain.contains(cand):
                    continue
                v1 = _bound_value(domain, nodes[i - 1], cand, config)
                v2 = _bound_value(domain, cand, nodes[i + 1], config)
                if v1 + v2 < cur - 1e-15:
                    nodes[i] = cand
                    vals[i - 1], vals[i] = v1, v2
                    cur = v1 + v2
                    improved = True
            if improved:
                steps[i - 1] *= 1.4
            else:
                steps[i - 1] *= 0.5
        total = float(sum(vals))
        # pattern steps must collapse before declaring convergence
        if max(steps) < 1e-8 * scale and prev_total - total < tol * max(total, 1e-12):
            break
    return nodes, vals, sweeps


def _corner_candidates(domain, x, y):
    """Interior points mixing coordinates of the endpoints (staircase joints)."""
    dim = domain.dim
    if dim < 2 or dim > 4:
        return []
    out = []
    for mask in range(1, 2 ** dim - 1):
        m = np.where([(mask >> k) & 1 for k in range(dim)], y, x)
        if domain.contains(m) and not np.array_equal(m, x) and not np.array_equal(m, y):
            out.append(as_point(m, dim))
    return out


def _optimize_polyline(domain, x, y, config, budget: float = 1.0):
    """Coarse-to-fine polyline descent with staircase multi-starts."""
    sweeps_total = 0
    best = (math.inf, None, None)

    starts = [[x, y]]
    for m in _corner_candidates(domain, x, y):
        starts.append([x, m, y])

    max_sweeps = max(4, int(config.max_sweeps * budget))
    for start in starts:
        nodes = list(start)
        vals = None
        for target in _stage_counts(config.n_nodes):
            if target < len(nodes):
                continue
            nodes, vals = _subdivide(domain, nodes, config, target)
            nodes, vals, sw = _pattern_sweeps(domain, nodes, vals, config,
                                              max_sweeps, config.tol_rel)
            sweeps_total += sw
        total = float(sum(vals))
        if total < best[0]:
            best = (total, nodes, vals)
    return best[1], best[2], sweeps_total


def _embedding_lower(domain, x, y) -> float:
    emb = domain.halfspace_embedding()
    if emb is None:
        return 0.0
    ex, ey = emb(x), emb(y)
    val = 0.0
    for a, b in zip(ex, ey):
        r = sl.left_halfplane_distance(complex(a), complex(b))
        if math.isfinite(r):
            val = max(val, r)
    return val


def _canonical_pair(x, y):
    kx = tuple(np.concatenate([x.real, x.imag]))
    ky = tuple(np.concatenate([y.real, y.imag]))
    return (x, y, False) if kx <= ky else (y, x, True)


def distance(domain: ConvexDomain, x, y,
             config: SolverConfig = DEFAULT_CONFIG,
             effort: str = "auto") -> DistanceEstimate:
    """Interval estimate of the invariant distance with a realizing path.

    ``effort``: 'auto' optimizes the polyline unless the direct slice bound is
    provably exact; 'direct' skips optimization; 'full' always optimizes.
    """
    x = domain.require_inside(x)
    y = domain.require_inside(y)
    if np.array_equal(x, y):
        return DistanceEstimate(MetricBound(0.0, 0.0), None, 0)

    p, q, swapped = _canonical_pair(x, y)
    direct_val, realizer = segment_bound(domain, p, q, config, polish=False)
    sweeps = 0
    best_nodes = [p, q]
    best_vals = [direct_val]

    can_skip = realizer is not None and realizer.optimal
    pick_nodes = None
    invs = domain.pick_pseudo_distances(p, q)
    if invs is not None:
        s = max(invs)
        pick_val = math.atanh(s) if s < 1.0 else math.inf
        if math.isfinite(pick_val) and pick_val <= direct_val:
            n_pick = max(2, min(9, config.n_nodes))
            pick_nodes = [domain.pick_point(p, q, t)
                          for t in np.linspace(0.0, 1.0, n_pick)]
            pick_nodes[0], pick_nodes[-1] = p, q
            best_nodes = pick_nodes
            best_vals = [pick_val / (n_pick - 1)] * (n_pick - 1)
            can_skip = True   # interpolation threshold equals the product distance

    if effort == "full" or (effort == "auto" and not can_skip):
        opt_config = config
        if effort != "full" and any(isinstance(c, sl.QuadC)
                                    for c in domain.slice_constraints(p, q - p)):
            # conic slices price every bound evaluation heavily; cap the budget
            opt_config = config.with_(
                n_theta=min(config.n_theta, 16),
                n_nodes=min(config.n_nodes, 5),
                max_sweeps=min(config.max_sweeps, 12))
        nodes, vals, sweeps = _optimize_polyline(domain, p, q, opt_config)
        if nodes is not None and opt_config is not config:
            vals = [_bound_value(domain, a, b, config)
                    for a, b in zip(nodes, nodes[1:])]
        if nodes is not None and float(sum(vals)) < float(sum(best_vals)):
            best_nodes, best_vals = nodes, vals

        # polished direct bound can still win for lens-like slices
        dv2, r2 = segment_bound(domain, p, q, config, polish=True)
        if dv2 < float(sum(best_vals)):
            best_nodes, best_vals = [p, q], [dv2]

    upper = float(sum(best_vals))
    if not math.isfinite(upper):
        raise SolverError("no finite upper bound found for the segment")
    lower = max(0.5 * upper, _embedding_lower(domain, x, y))
    lower = min(lower, upper)

    if swapped:
        best_nodes = best_nodes[::-1]
        best_vals = best_vals[::-1]
    segs = [MetricBound(0.5 * v, v) for v in best_vals]
    # collapse accidental duplicate nodes (flat factors move nothing)
    nodes_clean, vals_clean = [best_nodes[0]], []
    for node, v in zip(best_nodes[1:], segs):
        if np.array_equal(node, nodes_clean[-1]):
            if vals_clean:
                vals_clean[-1] = MetricBound(vals_clean[-1].lower + v.lower,
                                             vals_clean[-1].upper + v.upper)
            continue
        nodes_clean.append(node)
        vals_clean.append(v)
    if len(nodes_clean) < 2:
        nodes_clean = [x, y]
        vals_clean = [MetricBound(0.5 * upper, upper)]
    path = PolylinePath(domain, nodes_clean, vals_clean, check=False)
    return DistanceEstimate(MetricBound(lower, upper), path, sweeps)


def geodesic(domain: ConvexDomain, x, y,
             config: SolverConfig = DEFAULT_CONFIG,
             effort: str = "auto") -> PolylinePath:
    """Near-unit-speed polyline approximating the distance minimizer."""
    x = domain.require_inside(x)
    y = domain.require_inside(y)
    if np.array_equal(x, y):
        raise RejectedInputError("degenerate geodesic request: endpoints coincide")
    est = distance(domain, x, y, config, effort=effort)
    nodes = est.path.nodes
    if len(nodes) < config.n_nodes:
        nodes, vals = _subdivide(domain, nodes, config, config.n_nodes)
    else:
        vals = [b.upper for b in est.path.per_segment_bounds]
    # approximate unit-speed parametrization: equalize cumulative upper lengths
    nodes, vals = _equalize(domain, nodes, vals, config)
    segs = [MetricBound(0.5 * v, v) for v in vals]
    return PolylinePath(domain, nodes, segs, check=False)


def _equalize(domain, nodes, vals, config, rounds: int = 2):
    for _ in range(rounds):
        cum = np.concatenate([[0.0], np.cumsum(vals)])
        total = cum[-1]
        if total <= 0:
            return nodes, vals
        targets = np.linspace(0.0, total, len(nodes))
        new_nodes = [nodes[0]]
        for t in targets[1:-1]:
            k = int(np.searchsorted(cum, t, side="right") - 1)
            k = min(k, len(vals) - 1)
            f = (t - cum[k]) / vals[k] if vals[k] > 0 else 0.0
            cand = nodes[k] + f * (nodes[k + 1] - nodes[k])
            new_nodes.append(cand if domain.contains(cand) else nodes[k])
        new_nodes.append(nodes[-1])
        # drop accidental duplicates
        dedup = [new_nodes[0]]
        for pnt in new_nodes[1:]:
            if not np.array_equal(pnt, dedup[-1]):
                dedup.append(pnt)
        if len(dedup) < 2:
            return nodes, vals
        new_vals = [_bound_value(domain, a, b, config)
                    for a, b in zip(dedup, dedup[1:])]
        if float(sum(new_vals)) <= float(sum(vals)) * (1.0 + 1e-9):
            nodes, vals = dedup, new_vals
        else:
            break
    return nodes, vals


def path_point_at(domain: ConvexDomain, path: PolylinePath, T: float,
                  config: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Point at cumulative upper length T, placed along the segment realizer
    (exact geodesic placement inside round/conformal slices)."""
    cum = path.cumulative_upper()
    T = min(max(T, 0.0), float(cum[-1]))
    k = int(np.searchsorted(cum, T, side="right") - 1)
    k = min(k, path.n_segments - 1)
    seg = cum[k + 1] - cum[k]
    f = 0.0 if seg == 0 else (T - cum[k]) / seg
    a, b = path.nodes[k], path.nodes[k + 1]
    _, realizer = segment_bound(domain, a, b, config)
    lam = realizer.point_at(f) if realizer is not None else complex(f)
    cand = a + lam * (b - a)
    return cand if domain.contains(cand) else a + f * (b - a)


def ray(domain: ConvexDomain, x0, target, T: float,
        config: SolverConfig = DEFAULT_CONFIG) -> PolylinePath:
    """Geodesic-ray prefix of upper length T toward an ideal target.

    ``target`` is either a finite boundary point (array-like) or an end
    direction wrapped by the boundary module.
    """
    from .boundary import IdealPoint  # local import to avoid a cycle

    x0 = domain.require_inside(x0)
    if T <= 0:
        raise RejectedInputError("ray horizon T must be positive")
    if isinstance(target, IdealPoint):
        if target.is_end():
            v = target.direction
            s = 1.0 * domain.scale
            for _ in range(80):
                if distance(domain, x0, x0 + s * v, config).bound.upper >= T:
                    break
                s *= 2.0
            else:
                raise SolverError("could not reach the requested length along the end")
            g = geodesic(domain, x0, x0 + s * v, config)
            return _truncate(domain, g, T, config)
        target = target.point
    xi = as_point(target, domain.dim)
    if domain.contains(xi) or domain.constraint_margin(xi) < -1e-6 * domain.scale:
        raise RejectedInputError("finite ray target must lie on the boundary")
    if not domain.contains(0.5 * (x0 + xi)):
        raise RejectedInputError("target does not face the domain boundary")
    g = None
    for k in range(1, 41):
        yk = x0 + (1.0 - 2.0 ** (-k)) * (xi - x0)
        if not domain.contains(yk):
            break
        g = geodesic(domain, x0, yk, config)
        if g.upper_length() >= T:
            return _truncate(domain, g, T, config)
    if g is None:
        raise SolverError("could not build a ray toward the target")
    return g


def _truncate(domain, path: PolylinePath, T: float, config) -> PolylinePath:
    cum = path.cumulative_upper()
    if cum[-1] <= T:
        return path
    k = int(np.searchsorted(cum, T, side="right") - 1)
    k = min(k, path.n_segments - 1)
    nodes = list(path.nodes[: k + 1])
    vals = [b.upper for b in path.per_segment_bounds[:k]]
    seg_v = path.per_segment_bounds[k].upper
    f = (T - cum[k]) / seg_v if seg_v > 0 else 0.0
    a, b = path.nodes[k], path.nodes[k + 1]
    _, realizer = segment_bound(domain, a, b, config)
    lam = realizer.point_at(f) if realizer is not None else complex(f)
    cut = a + lam * (b - a)
    if not domain.contains(cut) or np.array_equal(cut, a):
        cut = a + f * (b - a)
    if np.array_equal(cut, a):
        if len(nodes) < 2:
            raise RejectedInputError("ray prefix degenerated to a point")
    else:
        nodes.append(cut)
        vals.append(_bound_value(domain, a, cut, config))
    segs = [MetricBound(0.5 * v, v) for v in vals]
    return PolylinePath(domain, nodes, segs, check=False)
