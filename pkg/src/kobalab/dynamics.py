"""Holomorphic self-map iteration: orbit traces and their trichotomy
classification, start-independence checks, the commuting-pair compact-return
experiment with its quantitative selector bound, and the iterated-limit
retract approximation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .domains import ConvexDomain, classify_ends, recession_directions
from .errors import (PreconditionError, RejectedInputError, UndecidedError,
                     VerificationError)
from .metric import distance, geodesic
from .points import as_point, herm, norm, point_from_json, point_to_json

_VALIDATION_SAMPLES = 200
_COMMUTE_TOL = 1e-9


# ---------------------------------------------------------------------------
# map specifications

class HoloMap:
    """Base class for holomorphic self-map specifications."""

    kind = "abstract"

    def apply(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params_json(self) -> dict:
        return {}

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params_json()}

    def validate_on(self, domain: ConvexDomain, seed: int = 0,
                    n: int = _VALIDATION_SAMPLES) -> None:
        rng = np.random.default_rng(seed)
        pts = domain.sample_interior(rng, n)
        for p in pts:
            q = self.apply(as_point(p, domain.dim))
            if not domain.contains(q):
                raise RejectedInputError(
                    f"{self.kind} is not a self-map: sample escaped the domain")


class DiscMoebius(HoloMap):
    """f(z) = exp(i theta) (z - a) / (1 - conj(a) z) on the unit disc."""

    kind = "disc_moebius"

    def __init__(self, a: complex, theta: float = 0.0):
        if abs(a) >= 1:
            raise RejectedInputError("moebius parameter must satisfy |a| < 1")
        self.a = complex(a)
        self.theta = float(theta)
        self._phase = complex(math.cos(self.theta), math.sin(self.theta))

    def apply(self, z):
        w = (z[0] - self.a) / (1.0 - self.a.conjugate() * z[0])
        return np.asarray([self._phase * w], dtype=complex)

    def inverse(self) -> "DiscMoebius":
        # f^{-1}(w) = (w' + a)/(1 + conj(a) w') with w' = w / phase
        b = -self.a * self._phase
        return DiscMoebius(b, -self.theta)

    def params_json(self):
        return {"a": [self.a.real, self.a.imag], "theta": self.theta}


class BallAutomorphism(HoloMap):
    """f(z) = phi_a(U z): unitary followed by the standard involution at a."""

    kind = "ball_automorphism"

    def __init__(self, a, unitary=None):
        self.a = np.atleast_1d(np.asarray(a, dtype=complex))
        if norm(self.a) >= 1:
            raise RejectedInputError("automorphism center must satisfy |a| < 1")
        d = self.a.shape[0]
        self.U = np.eye(d, dtype=complex) if unitary is None \
            else np.asarray(unitary, dtype=complex).reshape(d, d)
        if not np.allclose(self.U.conj().T @ self.U, np.eye(d), atol=1e-10):
            raise RejectedInputError("unitary part must be unitary")

    def apply(self, z):
        w = self.U @ z
        a = self.a
        na2 = float(np.sum(np.abs(a) ** 2))
        if na2 == 0.0:
            return w
        s = math.sqrt(1.0 - na2)
        inner = herm(w, a)
        proj = (inner / na2) * a
        orth = w - proj
        return (a - proj - s * orth) / (1.0 - inner)

    @staticmethod
    def translation(dim: int, step: float) -> "BallAutomorphism":
        """Hyperbolic translation by tanh-parameter ``step`` along the first axis."""
        a = np.zeros(dim, dtype=complex)
        a[0] = step
        return BallAutomorphism(a, -np.eye(dim, dtype=complex))

    def params_json(self):
        return {"a": point_to_json(self.a),
                "unitary": [point_to_json(row) for row in self.U]}


class Translation(HoloMap):
    kind = "translation"

    def __init__(self, v):
        self.v = np.atleast_1d(np.asarray(v, dtype=complex))
        if norm(self.v) == 0:
            raise RejectedInputError("translation vector must be nonzero")

    def apply(self, z):
        return z + self.v

    def validate_on(self, domain, seed: int = 0, n: int = _VALIDATION_SAMPLES):
        u = self.v / norm(self.v)
        ok = domain.recession_cone_contains(u)
        if ok is None:
            super().validate_on(domain, seed, n)
            return
        if not ok:
            raise RejectedInputError(
                "translation direction is not in the recession cone")

    def params_json(self):
        return {"v": point_to_json(self.v)}


class AffineContraction(HoloMap):
    """z -> L z + b; validated as a self-map by sampling."""

    kind = "affine_contraction"

    def __init__(self, L, b=None):
        self.L = np.atleast_2d(np.asarray(L, dtype=complex))
        d = self.L.shape[0]
        self.b = np.zeros(d, dtype=complex) if b is None \
            else np.atleast_1d(np.asarray(b, dtype=complex))

    def apply(self, z):
        return self.L @ z + self.b

    def params_json(self):
        return {"L": [point_to_json(r) for r in self.L], "b": point_to_json(self.b)}


class ProductMap(HoloMap):
    """Apply an independent one-variable map to each coordinate."""

    kind = "product_map"

    def __init__(self, factors):
        self.factors = list(factors)

    def apply(self, z):
        out = np.empty(len(self.factors), dtype=complex)
        for j, f in enumerate(self.factors):
            out[j] = f.apply(np.asarray([z[j]], dtype=complex))[0]
        return out

    def params_json(self):
        return {"factors": [f.to_json() for f in self.factors]}


class Composition(HoloMap):
    kind = "composition"

    def __init__(self, maps):
        self.maps = list(maps)

    def apply(self, z):
        for f in self.maps:
            z = f.apply(z)
        return z

    def params_json(self):
        return {"maps": [f.to_json() for f in self.maps]}


class Identity(HoloMap):
    kind = "identity"

    def apply(self, z):
        return z


_MAP_KINDS = {}


def map_from_json(obj: dict) -> HoloMap:
    try:
        kind = obj["kind"]
        params = obj.get("params", {})
    except (KeyError, TypeError) as exc:
        raise RejectedInputError(f"malformed map spec: {exc}") from exc
    if kind == "disc_moebius":
        return DiscMoebius(complex(params["a"][0], params["a"][1]),
                           float(params.get("theta", 0.0)))
    if kind == "ball_automorphism":
        U = None
        if "unitary" in params:
            U = np.asarray([point_from_json(r) for r in params["unitary"]])
        return BallAutomorphism(point_from_json(params["a"]), U)
    if kind == "translation":
        return Translation(point_from_json(params["v"]))
    if kind == "affine_contraction":
        L = np.asarray([point_from_json(r) for r in params["L"]])
        b = point_from_json(params["b"]) if "b" in params else None
        return AffineContraction(L, b)
    if kind == "product_map":
        return ProductMap([map_from_json(f) for f in params["factors"]])
    if kind == "composition":
        return Composition([map_from_json(f) for f in params["maps"]])
    if kind == "identity":
        return Identity()
    raise RejectedInputError(f"unknown map kind {kind!r}")


def load_map(path: str) -> HoloMap:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RejectedInputError(f"malformed map JSON: {exc}") from exc
    return map_from_json(obj)


# ---------------------------------------------------------------------------
# orbits

@dataclass
class OrbitTrace:
    points: list
    step_dist: list
    step_slack: list
    norms: list

    def check_monotone_steps(self, tol: float = 1e-6) -> None:
        for k in range(len(self.step_dist) - 1):
            a, b = self.step_dist[k], self.step_dist[k + 1]
            if math.isnan(a) or math.isnan(b):
                continue
            allowance = tol + self.step_slack[k] + self.step_slack[k + 1]
            if b > a + allowance:
                raise VerificationError(
                    f"orbit step {k + 1} grew: {b:.6g} > {a:.6g} "
                    "(1-Lipschitz violation)")

    def to_csv_rows(self):
        rows = []
        for n, p in enumerate(self.points):
            row = {"n": n, "norm": self.norms[n]}
            for j, c in enumerate(p):
                row[f"re{j}"] = c.real
                row[f"im{j}"] = c.imag
            row["step_dist"] = self.step_dist[n] if n < len(self.step_dist) else ""
            rows.append(row)
        return rows


@dataclass
class OrbitClassification:
    verdict: str                    # 'InteriorAttractor' | 'BoundaryPoint' | 'DivergesToEnd'
    point: np.ndarray | None = None
    end_id: int | None = None
    end_direction: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def same_as(self, other: "OrbitClassification", tol: float) -> bool:
        if self.verdict != other.verdict:
            return False
        if self.verdict in ("InteriorAttractor", "BoundaryPoint"):
            return norm(self.point - other.point) <= tol
        return self.end_id == other.end_id

    def to_json(self):
        return {
            "verdict": self.verdict,
            "point": point_to_json(self.point) if self.point is not None else None,
            "end_id": self.end_id,
            "end_direction": (point_to_json(self.end_direction)
                              if self.end_direction is not None else None),
            "diagnostics": self.diagnostics,
        }


def iterate(domain: ConvexDomain, f: HoloMap, x0, N: int,
            config: SolverConfig = DEFAULT_CONFIG) -> OrbitTrace:
    """Record f^n(x0) for n = 0..N with step distance diagnostics."""
    x0 = domain.require_inside(x0)
    if N < 1:
        raise PreconditionError("N must be >= 1")
    drift_tol = -1e-9 * domain.scale
    points = [x0]
    for n in range(N):
        nxt = as_point(f.apply(points[-1]), domain.dim)
        # orbits may legitimately converge onto the boundary; only outward
        # numerical drift is an error
        if domain.constraint_margin(nxt) < drift_tol:
            raise PreconditionError(f"iterate escaped the domain at step {n + 1}")
        points.append(nxt)
    dist_floor = 1e-9 * domain.scale
    step_dist, step_slack = [], []
    for a, b in zip(points, points[1:]):
        if np.array_equal(a, b):
            step_dist.append(0.0)
            step_slack.append(0.0)
            continue
        if min(domain.constraint_margin(a), domain.constraint_margin(b)) <= dist_floor:
            step_dist.append(math.nan)   # too close to the boundary to estimate
            step_slack.append(math.nan)
            continue
        est = distance(domain, a, b, config, effort="direct")
        step_dist.append(est.bound.upper)
        step_slack.append(est.bound.width)
    norms = [norm(p) for p in points]
    return OrbitTrace(points, step_dist, step_slack, norms)


_DIVERGENCE_FACTOR = 1e3


def _averaged_fixed_point(domain, f, p0, iters: int = 400):
    """Krasnoselskii averaging p <- (p + f(p))/2; converges for 1-Lipschitz
    maps with an interior fixed point."""
    p = p0
    for _ in range(iters):
        q = 0.5 * (p + as_point(f.apply(p), domain.dim))
        if norm(q - p) < 1e-13:
            return q
        p = q
    return p


def classify_orbit(domain: ConvexDomain, trace: OrbitTrace, tol: float = 1e-4,
                   config: SolverConfig = DEFAULT_CONFIG,
                   map_spec: HoloMap | None = None) -> OrbitClassification:
    if len(trace.points) < 20:
        raise PreconditionError("orbit too short to classify (need >= 20 points)")
    tail = trace.points[len(trace.points) // 2:]
    tail_norms = trace.norms[len(trace.points) // 2:]
    diam = max(norm(a - tail[-1]) for a in tail)
    margins = [domain.constraint_margin(p) for p in tail]
    base_scale = domain.scale

    # compactly divergent orbits: norms blow up with a positive growth trend
    if tail_norms[-1] > _DIVERGENCE_FACTOR * base_scale:
        ns = np.arange(len(tail_norms), dtype=float)
        slope = np.polyfit(ns, np.asarray(tail_norms), 1)[0]
        if slope > 0:
            dirs = np.array([p / norm(p) for p in tail[-8:]])
            mean_dir = dirs.mean(axis=0)
            mean_dir = mean_dir / norm(mean_dir)
            report = recession_directions(domain, domain.default_witness(),
                                          seed=config.seed)
            ends = classify_ends(domain, report)
            if ends.kind == "TwoEnds":
                sign = herm(mean_dir, ends.axis).real
                end_id = 0 if sign >= 0 else 1
                axis = ends.axis if sign >= 0 else -ends.axis
            else:
                end_id, axis = 0, as_point(mean_dir, domain.dim)
            return OrbitClassification(
                "DivergesToEnd", end_id=end_id, end_direction=axis,
                diagnostics={"tail_norm": tail_norms[-1], "growth_rate": float(slope)})

    if diam < tol and min(margins) <= 1e-5 * domain.scale:
        return OrbitClassification(
            "BoundaryPoint", point=tail[-1],
            diagnostics={"tail_diameter": diam, "boundary_margin": min(margins)})
    if diam < tol and min(margins) > 1e-5 * domain.scale:
        point = tail[-1]
        if map_spec is not None:
            point = _averaged_fixed_point(domain, map_spec, point)
        return OrbitClassification(
            "InteriorAttractor", point=point,
            diagnostics={"tail_diameter": diam, "boundary_margin": min(margins)})
    # bounded non-converging orbit with a compact closure still counts as interior
    if min(margins) > 1e-3 * domain.scale and \
            tail_norms[-1] < 10 * max(base_scale, trace.norms[0]):
        point = np.mean(np.asarray(tail), axis=0)
        if map_spec is not None:
            point = _averaged_fixed_point(domain, map_spec, point)
        return OrbitClassification(
            "InteriorAttractor", point=point,
            diagnostics={"tail_diameter": diam, "boundary_margin": min(margins),
                         "note": "relatively compact tail"})
    raise UndecidedError("undecided orbit pattern; increase N")


def denjoy_wolff(domain: ConvexDomain, f: HoloMap, starts, N: int,
                 tol: float = 1e-3,
                 config: SolverConfig = DEFAULT_CONFIG) -> OrbitClassification:
    """Classify orbits from several starts and insist on agreement."""
    starts = [domain.require_inside(p) for p in starts]
    if len(starts) < 3:
        raise PreconditionError("need at least 3 distinct starting points")
    for i in range(len(starts)):
        for j in range(i + 1, len(starts)):
            if np.array_equal(starts[i], starts[j]):
                raise PreconditionError("starting points must be distinct")
    verdicts = [classify_orbit(domain, iterate(domain, f, p, N, config),
                               tol=tol, config=config, map_spec=f) for p in starts]
    head = verdicts[0]
    for v in verdicts[1:]:
        if not head.same_as(v, tol=max(tol, 10 * tol)):
            raise VerificationError(
                "start-dependence detected: orbit classifications disagree")
    return head


# ---------------------------------------------------------------------------
# commuting pairs

def _check_commute(domain, f, g, seed=0, n=100, tol=_COMMUTE_TOL):
    rng = np.random.default_rng(seed)
    pts = domain.sample_interior(rng, n)
    for p in pts:
        p = as_point(p, domain.dim)
        a = f.apply(g.apply(p))
        b = g.apply(f.apply(p))
        if norm(a - b) > tol * domain.scale:
            raise RejectedInputError("maps fail to commute on sampled points")


def _ideal_points_distinct(cf: OrbitClassification, cg: OrbitClassification,
                           tol: float) -> bool:
    if cf.verdict == "InteriorAttractor" or cg.verdict == "InteriorAttractor":
        return False
    if cf.verdict != cg.verdict:
        return True
    if cf.verdict == "BoundaryPoint":
        return norm(cf.point - cg.point) > tol
    return cf.end_id != cg.end_id


def commuting_return(domain: ConvexDomain, f: HoloMap, g: HoloMap, x0,
                     M: int, n_max: int | None = None,
                     config: SolverConfig = DEFAULT_CONFIG,
                     dw_iters: int = 200, skip_checks: bool = False):
    """For each m <= M, the n minimizing the return distance of f^m g^n.

    Returns a list of (m, n(m), dist) with the smallest minimizing n.
    """
    x0 = domain.require_inside(x0)
    if n_max is None:
        n_max = 4 * M + 100
    if not skip_checks:
        _check_commute(domain, f, g, seed=config.seed)
        starts = _default_starts(domain, x0)
        cf = denjoy_wolff(domain, f, starts, dw_iters, config=config)
        cg = denjoy_wolff(domain, g, starts, dw_iters, config=config)
        if not _ideal_points_distinct(cf, cg, tol=1e-2 * domain.scale):
            raise RejectedInputError(
                "the two maps share their attracting ideal point")

    g_orbit = [x0]
    for _ in range(n_max):
        g_orbit.append(as_point(g.apply(g_orbit[-1]), domain.dim))

    floor = 1e-9 * domain.scale

    def dist_to_x0(p):
        if np.array_equal(p, x0):
            return 0.0
        if domain.constraint_margin(p) <= floor:
            return math.inf     # orbit point collapsed onto the boundary
        return distance(domain, x0, p, config, effort="direct").bound.upper

    rows = []
    current = list(g_orbit)
    for m in range(M + 1):
        vals = [dist_to_x0(p) for p in current]
        n_best = int(np.argmin(vals))
        rows.append((m, n_best, float(vals[n_best])))
        if m < M:
            current = [as_point(f.apply(p), domain.dim) for p in current]
    return rows


def _default_starts(domain, x0):
    starts = [x0]
    k = 0
    while len(starts) < 3 and k < 40:
        k += 1
        e = np.eye(domain.dim, dtype=complex)[k % domain.dim]
        cand = x0 + 0.04 * domain.scale * k * (1j ** k) * e
        if domain.contains(cand) and all(not np.array_equal(cand, s) for s in starts):
            starts.append(cand)
    if len(starts) < 3:
        raise PreconditionError("could not build distinct default starts")
    return starts


@dataclass
class SelectorAudit:
    r: float
    R: float
    C: float
    bound: float
    max_return: float
    slack: float
    returns: list
    eq_defect: float              # worst violation of the two-sided estimate

    def ok(self) -> bool:
        return self.max_return <= self.bound + self.slack

    def to_json(self):
        return {"r": self.r, "R": self.R, "C": self.C, "bound": self.bound,
                "max_return": self.max_return, "slack": self.slack,
                "eq_defect": self.eq_defect,
                "returns": [{"m": m, "n": n, "dist": d} for m, n, d in self.returns]}


def selector_bound_audit(domain: ConvexDomain, f: HoloMap, g: HoloMap, x0,
                         M: int, config: SolverConfig = DEFAULT_CONFIG,
                         n_max: int | None = None,
                         skip_checks: bool = False) -> SelectorAudit:
    """Estimate the visibility constant r, the shadowing constant R and the
    one-step size C, and check the returns against 4r + 2R + C/2."""
    x0 = domain.require_inside(x0)
    returns = commuting_return(domain, f, g, x0, M, n_max=n_max,
                               config=config, skip_checks=skip_checks)

    n_deep = max(M, max(n for _, n, _ in returns))
    f_orbit = [x0]
    for _ in range(M):
        f_orbit.append(as_point(f.apply(f_orbit[-1]), domain.dim))
    g_orbit = [x0]
    for _ in range(n_deep):
        g_orbit.append(as_point(g.apply(g_orbit[-1]), domain.dim))

    floor = 1e-9 * domain.scale

    def up(a, b):
        if np.array_equal(a, b):
            return 0.0, 0.0
        if min(domain.constraint_margin(a), domain.constraint_margin(b)) <= floor:
            return math.inf, 0.0
        est = distance(domain, a, b, config, effort="direct")
        return est.bound.upper, est.bound.width

    d_f = [up(p, x0) for p in f_orbit]
    d_g = [up(p, x0) for p in g_orbit]
    r = 0.0
    slack = 0.0
    eq_defect = 0.0
    for m in range(1, M + 1):
        for n in range(1, M + 1):
            d_cross, w_cross = up(f_orbit[m], g_orbit[n])
            prod = 0.5 * (d_f[m][0] + d_g[n][0] - d_cross)
            r = max(r, prod)
            slack = max(slack, w_cross + d_f[m][1] + d_g[n][1])
            eq_defect = max(eq_defect,
                            d_f[m][0] + d_g[n][0] - 2.0 * r - d_cross)

    from .hyperbolicity import shadowing_gap
    from .metric import PolylinePath, MetricBound

    R = 0.0
    for m in (max(1, M // 3), max(1, (2 * M) // 3), M):
        n = returns[m][1]
        if n < 1:
            continue
        w0 = x0
        for _ in range(n):
            w0 = as_point(g.apply(w0), domain.dim)
        for _ in range(m):
            w0 = as_point(f.apply(w0), domain.dim)
        # concatenated quasi-geodesic through the joint image
        try:
            leg1 = geodesic(domain, w0, f_orbit[m], config)
            leg2 = geodesic(domain, w0, g_orbit[n], config)
        except RejectedInputError:
            continue
        nodes = leg1.nodes[::-1] + leg2.nodes[1:]
        segs = []
        keep = [nodes[0]]
        for p in nodes[1:]:
            if not np.array_equal(p, keep[-1]):
                keep.append(p)
        if len(keep) < 2:
            continue
        for a, b in zip(keep, keep[1:]):
            u, _ = up(a, b)
            segs.append(MetricBound(0.5 * u, u))
        quasi = PolylinePath(domain, keep, segs, check=False)
        R = max(R, shadowing_gap(domain, quasi, config))

    C, wC = up(x0, as_point(g.apply(x0), domain.dim))
    bound = 4.0 * r + 2.0 * R + 0.5 * C
    max_return = max(d for _, _, d in returns)
    return SelectorAudit(r, R, C, bound, max_return, slack + wC, returns, eq_defect)


# ---------------------------------------------------------------------------
# retract approximation

@dataclass
class RetractReport:
    h_samples: list
    rho_samples: list
    idempotency_defect: float
    invariance_defect_f: float
    invariance_defect_g: float
    powers: tuple

    def to_json(self):
        return {
            "idempotency_defect": self.idempotency_defect,
            "invariance_defect_f": self.invariance_defect_f,
            "invariance_defect_g": self.invariance_defect_g,
            "powers": list(self.powers),
            "h_samples": [point_to_json(p) for p in self.h_samples],
            "rho_samples": [point_to_json(p) for p in self.rho_samples],
        }


def retract_approx(domain: ConvexDomain, f: HoloMap, g: HoloMap, x0,
                   schedule, grid=None,
                   config: SolverConfig = DEFAULT_CONFIG) -> RetractReport:
    """Approximate the idempotent limit map of a commuting pair.

    ``schedule`` lists (m_k, n_k) pairs (e.g. from commuting-return minima);
    the limit candidate uses the last pair, the idempotent candidate the last
    difference pair (m_{k+1}-m_k, n_{k+1}-n_k).
    """
    x0 = domain.require_inside(x0)
    schedule = [(int(m), int(n)) for m, n in schedule]
    if len(schedule) < 3:
        raise RejectedInputError("retract schedule needs at least 3 pairs")
    if grid is None:
        rng = np.random.default_rng(config.seed)
        grid = [0.5 * (as_point(p, domain.dim) + x0) * 0.8 + 0.2 * x0
                for p in domain.sample_interior(rng, 16)]
    grid = [domain.require_inside(p) for p in grid]

    def power_apply(z, m, n):
        for _ in range(n):
            z = g.apply(z)
        for _ in range(m):
            z = f.apply(z)
        return as_point(z, domain.dim)

    mK, nK = schedule[-1]
    p, pp = schedule[-1][0] - schedule[-2][0], schedule[-1][1] - schedule[-2][1]
    if p < 0 or pp < 0:
        raise RejectedInputError("retract schedule must be nondecreasing")

    h_samples = [power_apply(z, mK, nK) for z in grid]
    rho = lambda z: power_apply(z, p, pp)
    rho_samples = [rho(z) for z in grid]
    idem = max(norm(rho(rz) - rz) for rz in rho_samples)
    inv_f = max(norm(rho(as_point(f.apply(rz), domain.dim))
                     - as_point(f.apply(rz), domain.dim)) for rz in rho_samples)
    inv_g = max(norm(rho(as_point(g.apply(rz), domain.dim))
                     - as_point(g.apply(rz), domain.dim)) for rz in rho_samples)
    return RetractReport(h_samples, rho_samples, idem, inv_f, inv_g, (mK, nK, p, pp))


def schedule_from_returns(rows, min_m: int = 1):
    """Sparse subschedule of return minima with growing difference gaps."""
    out = []
    k = 1
    ms = {m: (m, n) for m, n, _ in rows}
    while k * k <= max(ms) if ms else False:
        m = k * k
        if m >= min_m and m in ms:
            out.append(ms[m])
        k += 1
    if len(out) < 3:
        out = [(m, n) for m, n, _ in rows if m >= min_m][:max(3, len(rows))]
    return out


def lipschitz_audit(domain: ConvexDomain, f: HoloMap, n_pairs: int = 200,
                    config: SolverConfig = DEFAULT_CONFIG,
                    seed: int | None = None) -> float:
    """Worst slack-adjusted violation of d(fx, fy) <= d(x, y); <= 0 passes."""
    rng = np.random.default_rng(config.seed if seed is None else seed)
    pts = domain.sample_interior(rng, 2 * n_pairs)
    worst = -math.inf
    for k in range(n_pairs):
        x = as_point(pts[2 * k], domain.dim)
        y = as_point(pts[2 * k + 1], domain.dim)
        if np.array_equal(x, y):
            continue
        fx, fy = as_point(f.apply(x), domain.dim), as_point(f.apply(y), domain.dim)
        exy = distance(domain, x, y, config, effort="direct").bound
        if np.array_equal(fx, fy):
            continue
        efxy = distance(domain, fx, fy, config, effort="direct").bound
        slack = 2.0 * max(exy.width, efxy.width)
        worst = max(worst, efxy.upper - exy.upper - slack)
    return worst
