"""Convex domains in C^d: membership, slices, recession directions, ends.

Supported kinds: unit ball, unit polydisc, products of left half-planes,
finite intersections of real-affine half-spaces, norm cones
``||L z + b|| < Re<a, z> + c`` (which subsume the upper cone over a ball),
strips (bounded base plus an invariant real direction) and the deliberately
degenerate disc-times-plane product.

The Hermitian pairing convention throughout is ``<a, z> = sum conj(a_k) z_k``,
linear in ``z`` so that ``z -> <a, z> + c`` is a holomorphic affine functional.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import PreconditionError, RejectedInputError, UndecidedError
from .points import as_point, herm, norm, point_from_json, point_to_json
from .slices import DiscC, HalfPlaneC, QuadC, _disc_to_lhp, _lhp_to_disc

MEMBERSHIP_EPS = 1e-12   # open-set strictness, relative to domain scale
CONE_TOL = 1e-11


class ConvexDomain:
    """Base class; subclasses provide constraints and analytic shortcuts."""

    kind = "abstract"

    def __init__(self, dim: int, scale: float = 1.0):
        if dim < 1:
            raise RejectedInputError("dimension must be >= 1")
        self.dim = int(dim)
        self.scale = float(scale)

    # -- membership ---------------------------------------------------------

    def constraint_margin(self, z: np.ndarray) -> float:
        """Positive inside, ~Euclidean units; min over all constraints."""
        raise NotImplementedError

    def contains(self, z, margin: float | None = None) -> bool:
        z = as_point(z, self.dim)
        eps = MEMBERSHIP_EPS * self.scale if margin is None else margin
        return self.constraint_margin(z) > eps

    def require_inside(self, z) -> np.ndarray:
        z = as_point(z, self.dim)
        if not self.contains(z):
            raise PreconditionError(f"point {z} is not strictly inside the domain")
        return z

    # -- slices -------------------------------------------------------------

    def slice_constraints(self, a: np.ndarray, u: np.ndarray) -> list:
        """Constraints of {lam : a + lam*u in D} in the lam-plane."""
        raise NotImplementedError

    # -- recession / boundedness -------------------------------------------

    def recession_cone_contains(self, v: np.ndarray) -> bool | None:
        return None

    def recession_hints(self) -> list:
        """Exact candidate directions (e.g. the lineality space of the cone)."""
        return []

    def is_bounded_hint(self) -> bool | None:
        return None

    # -- misc ----------------------------------------------------------------

    def default_witness(self) -> np.ndarray:
        raise NotImplementedError

    def sample_interior(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n interior points, seed-deterministic; distribution is kind-specific."""
        raise NotImplementedError

    def halfspace_embedding(self):
        """Holomorphic affine map into a product of left half-planes, or None."""
        return None

    # Two-point Schwarz-Pick interpolation for product-structured kinds:
    # a single analytic disc through x and y exists as soon as the disc
    # parameters dominate every factor's invariant, so the least feasible
    # parameter separation is an upper distance bound realized by that disc.

    def pick_pseudo_distances(self, x, y):
        """Per-factor Moebius invariants tanh(rho_j), or None when unsupported."""
        return None

    def pick_point(self, x, y, t: float) -> np.ndarray:
        """Point at fraction t of the interpolating disc's real geodesic."""
        raise NotImplementedError

    def constraints_json(self):
        return []

    def to_json(self) -> dict:
        return {"dim": self.dim, "kind": self.kind, "constraints": self.constraints_json()}


class Ball(ConvexDomain):
    """Unit Euclidean ball."""

    kind = "ball"

    def constraint_margin(self, z):
        return 1.0 - norm(z)

    def slice_constraints(self, a, u):
        nu2 = float(np.sum(np.abs(u) ** 2))
        h = herm(u, a)
        center = -h.conjugate() / nu2
        rad2 = (1.0 - float(np.sum(np.abs(a) ** 2))) / nu2 + abs(h) ** 2 / nu2 ** 2
        if rad2 <= 0.0:
            raise PreconditionError("segment base point outside the ball")
        return [DiscC(center, math.sqrt(rad2))]

    def recession_cone_contains(self, v):
        return False

    def is_bounded_hint(self):
        return True

    def default_witness(self):
        return np.zeros(self.dim, dtype=complex)

    def sample_interior(self, rng, n):
        x = rng.standard_normal((n, 2 * self.dim))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        r = rng.random(n) ** (1.0 / (2 * self.dim))
        x *= (0.999 * r)[:, None]
        return x[:, : self.dim] + 1j * x[:, self.dim:]

    def halfspace_embedding(self):
        one = np.ones(self.dim, dtype=complex)
        return lambda z: np.asarray(z, dtype=complex) - one


class Polydisc(ConvexDomain):
    """Unit polydisc D^d."""

    kind = "polydisc"

    def constraint_margin(self, z):
        return float(1.0 - np.max(np.abs(z)))

    def slice_constraints(self, a, u):
        cons = []
        for aj, uj in zip(a, u):
            if uj != 0:
                cons.append(DiscC(-complex(aj) / complex(uj), 1.0 / abs(uj)))
        return cons

    def recession_cone_contains(self, v):
        return False

    def is_bounded_hint(self):
        return True

    def default_witness(self):
        return np.zeros(self.dim, dtype=complex)

    def sample_interior(self, rng, n):
        r = 0.999 * np.sqrt(rng.random((n, self.dim)))
        th = 2 * np.pi * rng.random((n, self.dim))
        return r * np.exp(1j * th)

    def halfspace_embedding(self):
        one = np.ones(self.dim, dtype=complex)
        return lambda z: np.asarray(z, dtype=complex) - one

    def pick_pseudo_distances(self, x, y):
        return [abs((yj - xj) / (1.0 - np.conj(xj) * yj)) for xj, yj in zip(x, y)]

    def pick_point(self, x, y, t):
        return _disc_factor_geodesic(x, y, t)


def _moeb_to(a: complex, w: complex) -> complex:
    """Disc automorphism sending 0 to a."""
    return (w + a) / (1.0 + a.conjugate() * w)


def _moeb_from(a: complex, w: complex) -> complex:
    return (w - a) / (1.0 - a.conjugate() * w)


def _disc_factor_geodesic(x, y, t):
    invs = [abs((yj - xj) / (1.0 - np.conj(xj) * yj)) for xj, yj in zip(x, y)]
    s = max(invs)
    if s <= 0.0:
        return x + t * (y - x)
    out = np.empty(len(x), dtype=complex)
    for j, (xj, yj) in enumerate(zip(x, y)):
        cj = _moeb_from(complex(xj), complex(yj)) / s
        out[j] = _moeb_to(complex(xj), cj * math.tanh(t * math.atanh(min(s, 1 - 1e-16))))
    return out


class LeftHalfSpaces(ConvexDomain):
    """Product of left half-planes {Re z_j < 0}."""

    kind = "left_half_spaces"

    def constraint_margin(self, z):
        return float(-np.max(z.real))

    def slice_constraints(self, a, u):
        cons = []
        for aj, uj in zip(a, u):
            if uj != 0:
                nrm = complex(uj).conjugate() / abs(uj)
                cons.append(HalfPlaneC(nrm, -complex(aj).real / abs(uj)))
        return cons

    def recession_cone_contains(self, v):
        return bool(np.all(v.real <= CONE_TOL))

    def is_bounded_hint(self):
        return False

    def default_witness(self):
        return -np.ones(self.dim, dtype=complex)

    def sample_interior(self, rng, n):
        re = -(0.05 + rng.exponential(1.0, (n, self.dim)))
        im = rng.standard_normal((n, self.dim))
        return re + 1j * im

    def halfspace_embedding(self):
        return lambda z: np.asarray(z, dtype=complex)

    def pick_pseudo_distances(self, x, y):
        return [abs((yj - xj) / (xj + np.conj(yj))) for xj, yj in zip(x, y)]

    def pick_point(self, x, y, t):
        dx = np.array([_lhp_to_disc(complex(c)) for c in x])
        dy = np.array([_lhp_to_disc(complex(c)) for c in y])
        mid = _disc_factor_geodesic(dx, dy, t)
        return np.array([_disc_to_lhp(complex(c)) for c in mid])


class ProductWithPlane(ConvexDomain):
    """D x C^(d-1): unbounded and intentionally not C-proper."""

    kind = "product_with_plane"

    def __init__(self, dim: int = 2):
        if dim < 2:
            raise RejectedInputError("product_with_plane needs dim >= 2")
        super().__init__(dim)

    def constraint_margin(self, z):
        return 1.0 - abs(complex(z[0]))

    def slice_constraints(self, a, u):
        u0 = complex(u[0])
        if u0 == 0:
            return []
        return [DiscC(-complex(a[0]) / u0, 1.0 / abs(u0))]

    def recession_cone_contains(self, v):
        return bool(abs(complex(v[0])) <= CONE_TOL)

    def recession_hints(self):
        hints = []
        for j in range(1, self.dim):
            for unit in (1.0, -1.0, 1j, -1j):
                e = np.zeros(self.dim, dtype=complex)
                e[j] = unit
                hints.append(e)
        return hints

    def is_bounded_hint(self):
        return False

    def default_witness(self):
        return np.zeros(self.dim, dtype=complex)

    def sample_interior(self, rng, n):
        r = 0.999 * np.sqrt(rng.random(n))
        th = 2 * np.pi * rng.random(n)
        rest = rng.standard_normal((n, self.dim - 1)) + 1j * rng.standard_normal((n, self.dim - 1))
        return np.column_stack([r * np.exp(1j * th), rest])

    def halfspace_embedding(self):
        def emb(z):
            return np.asarray([complex(z[0]) - 1.0], dtype=complex)
        return emb

    def pick_pseudo_distances(self, x, y):
        return [abs((y[0] - x[0]) / (1.0 - np.conj(x[0]) * y[0]))]

    def pick_point(self, x, y, t):
        out = x + t * (y - x)
        invs = self.pick_pseudo_distances(x, y)
        s = invs[0]
        if s > 0.0:
            c = _moeb_from(complex(x[0]), complex(y[0])) / s
            out[0] = _moeb_to(complex(x[0]),
                              c * math.tanh(t * math.atanh(min(s, 1 - 1e-16))))
        return out


class HalfSpaceIntersection(ConvexDomain):
    """Finite intersection of half-spaces Re<a_j, z> + c_j < 0."""

    kind = "half_space_intersection"

    def __init__(self, dim, normals, offsets, witness=None, scale=1.0):
        super().__init__(dim, scale)
        self.normals = [as_point(a, dim) for a in normals]
        self.offsets = [float(c) for c in offsets]
        if not self.normals:
            raise RejectedInputError("at least one half-space constraint required")
        self._norms = [norm(a) for a in self.normals]
        if any(s == 0 for s in self._norms):
            raise RejectedInputError("half-space normal must be nonzero")
        self._witness = self._find_witness(witness)

    def _find_witness(self, witness):
        if witness is not None:
            w = as_point(witness, self.dim)
            if self.contains(w):
                return w
            raise RejectedInputError("provided witness is not inside the domain")
        x0 = np.zeros(2 * self.dim)

        def neg_margin(x):
            z = x[: self.dim] + 1j * x[self.dim:]
            return -self.constraint_margin(z)

        res = minimize(neg_margin, x0, method="Powell", options={"maxiter": 50})
        z = res.x[: self.dim] + 1j * res.x[self.dim:]
        if not self.contains(z):
            raise RejectedInputError("degenerate half-space spec: no interior witness found")
        return as_point(z, self.dim)

    def constraint_margin(self, z):
        vals = [-(herm(z, a).real + c) / s
                for a, c, s in zip(self.normals, self.offsets, self._norms)]
        return float(min(vals))

    def slice_constraints(self, a, u):
        cons = []
        for A, c in zip(self.normals, self.offsets):
            v0 = herm(a, A) + c
            v1 = herm(u, A)
            if v1 != 0:
                cons.append(HalfPlaneC(v1.conjugate() / abs(v1), -v0.real / abs(v1)))
        return cons

    def recession_cone_contains(self, v):
        return bool(all(herm(v, A).real <= CONE_TOL * s
                        for A, s in zip(self.normals, self._norms)))

    def recession_hints(self):
        return _lineality_directions(
            np.array([_real_functional(a) for a in self.normals]), self.dim)

    def is_bounded_hint(self):
        return None

    def default_witness(self):
        return self._witness

    def sample_interior(self, rng, n, spread: float = 1.0):
        out = np.empty((n, self.dim), dtype=complex)
        k = 0
        guard = 0
        while k < n:
            cand = self._witness + spread * (
                rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim))
            if self.contains(cand):
                out[k] = cand
                k += 1
            guard += 1
            if guard > 200 * n + 1000:
                raise UndecidedError("interior sampling stalled; reduce spread")
        return out

    def halfspace_embedding(self):
        normals = self.normals
        offsets = self.offsets
        def emb(z):
            return np.asarray([herm(z, a) + c for a, c in zip(normals, offsets)], dtype=complex)
        return emb

    def constraints_json(self):
        return [{"a": point_to_json(a), "c": c} for a, c in zip(self.normals, self.offsets)]


class Strip(HalfSpaceIntersection):
    """Bounded convex base plus an invariant real direction: D = base + R*axis."""

    kind = "strip"

    def __init__(self, dim, normals, offsets, axis, base_circumradius,
                 witness=None, scale=1.0):
        axis = as_point(axis, dim)
        axis = axis / norm(axis)
        for a in normals:
            if abs(herm(as_point(a, dim), axis).real) > 1e-9:
                raise RejectedInputError("strip constraints must be invariant along the axis")
        super().__init__(dim, normals, offsets, witness=witness, scale=scale)
        self.axis = axis
        self.base_circumradius = float(base_circumradius)

    @staticmethod
    def planar(half_width: float = 1.0) -> "Strip":
        """{z in C : |Im z| < half_width}, axis along the real line."""
        h = float(half_width)
        return Strip(1, normals=[[1j], [-1j]], offsets=[-h, -h],
                     axis=[1.0], base_circumradius=h, witness=[0.0])

    @staticmethod
    def box(dim: int = 2, half_width: float = 1.0) -> "Strip":
        """Axis e_0 real; |Im z_0| < h and |Re z_j|, |Im z_j| < h for j >= 1."""
        h = float(half_width)
        normals, offsets = [], []
        e = np.zeros(dim, dtype=complex)
        e[0] = 1j
        normals += [e.copy(), -e.copy()]
        offsets += [-h, -h]
        for j in range(1, dim):
            for unit in (1.0, 1j):
                e = np.zeros(dim, dtype=complex)
                e[j] = unit
                normals += [e.copy(), -e.copy()]
                offsets += [-h, -h]
        rad = h * math.sqrt(2 * dim - 1)
        return Strip(dim, normals, offsets, axis=np.eye(dim)[0],
                     base_circumradius=rad, witness=np.zeros(dim))

    def recession_cone_contains(self, v):
        # cone is exactly {t*axis : t in R}
        proj = herm(v, self.axis)
        rest = as_point(v, self.dim) - proj * self.axis
        return bool(norm(rest) <= 1e-9 and abs(proj.imag) <= 1e-9)

    def constraints_json(self):
        return {
            "axis": point_to_json(self.axis),
            "base_circumradius": self.base_circumradius,
            "halfspaces": [{"a": point_to_json(a), "c": c}
                           for a, c in zip(self.normals, self.offsets)],
        }


class NormCone(ConvexDomain):
    """Intersection of regions ||L z + b|| < Re<a, z> + c."""

    kind = "norm_cone"

    def __init__(self, dim, blocks, witness=None, scale=1.0):
        super().__init__(dim, scale)
        self.blocks = []
        for blk in blocks:
            L = np.asarray(blk["L"], dtype=complex).reshape(-1, dim)
            b = as_point(blk.get("b", np.zeros(L.shape[0])), L.shape[0])
            a = as_point(blk["a"], dim)
            c = float(blk.get("c", 0.0))
            self.blocks.append((L, b, a, c))
        if not self.blocks:
            raise RejectedInputError("at least one norm-cone constraint required")
        self._witness = self._find_witness(witness)

    def _find_witness(self, witness):
        if witness is not None:
            w = as_point(witness, self.dim)
            if self.contains(w):
                return w
            raise RejectedInputError("provided witness is not inside the domain")
        x0 = np.zeros(2 * self.dim)

        def neg_margin(x):
            z = x[: self.dim] + 1j * x[self.dim:]
            return -self.constraint_margin(z)

        res = minimize(neg_margin, x0, method="Powell", options={"maxiter": 50})
        z = res.x[: self.dim] + 1j * res.x[self.dim:]
        if not self.contains(z):
            raise RejectedInputError("degenerate norm-cone spec: no interior witness found")
        return as_point(z, self.dim)

    def constraint_margin(self, z):
        vals = []
        for L, b, a, c in self.blocks:
            rhs = herm(z, a).real + c
            lhs = float(np.linalg.norm(L @ z + b))
            scale = norm(a) + float(np.linalg.norm(L)) + 1e-30
            vals.append((rhs - lhs) / scale)
        return float(min(vals))

    def slice_constraints(self, a_pt, u):
        cons = []
        for L, b, a, c in self.blocks:
            A = L @ a_pt + b
            B = L @ u
            p = herm(a_pt, a).real + c
            q = herm(u, a)
            if np.allclose(B, 0.0, atol=1e-15):
                if q == 0:
                    continue
                m = (p - float(np.linalg.norm(A))) / abs(q)
                cons.append(HalfPlaneC(-q.conjugate() / abs(q), m))
            else:
                cons.append(QuadC(tuple(A.tolist()), tuple(B.tolist()), p, q))
        return cons

    def recession_cone_contains(self, v):
        for L, _b, a, _c in self.blocks:
            if float(np.linalg.norm(L @ v)) > herm(v, a).real + CONE_TOL:
                return False
        return True

    def recession_hints(self):
        rows = []
        for L, _b, a, _c in self.blocks:
            rows.append(_real_functional(a))
            for r in np.atleast_2d(L):
                rows.append(_real_functional(np.conj(r)))          # Re of (Lv)_j
                rows.append(_real_functional(np.conj(1j * r)))     # Im of (Lv)_j
        return _lineality_directions(np.array(rows), self.dim)

    def is_bounded_hint(self):
        return False

    def default_witness(self):
        return self._witness

    def sample_interior(self, rng, n, spread: float = 1.0):
        out = np.empty((n, self.dim), dtype=complex)
        k = 0
        guard = 0
        while k < n:
            cand = self._witness + spread * (
                rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim))
            if self.contains(cand):
                out[k] = cand
                k += 1
            guard += 1
            if guard > 400 * n + 1000:
                raise UndecidedError("interior sampling stalled; reduce spread")
        return out

    def halfspace_embedding(self):
        blocks = self.blocks
        def emb(z):
            coords = []
            for L, b, a, c in blocks:
                w = herm(z, a) + c
                coords.append(-w)
                Lz = L @ z + b
                for comp in Lz:
                    coords.append(comp - w)
                    coords.append(-comp - w)
            return np.asarray(coords, dtype=complex)
        return emb

    def constraints_json(self):
        return [{"L": [point_to_json(row) for row in L], "b": point_to_json(b),
                 "a": point_to_json(a), "c": c}
                for L, b, a, c in self.blocks]


class Siegel(NormCone):
    """{(z_0, z') : Im z_0 > ||z'||}, the upper cone over a ball."""

    kind = "siegel"

    def __init__(self, dim: int = 2):
        if dim < 1:
            raise RejectedInputError("siegel needs dim >= 1")
        L = np.zeros((max(dim - 1, 1), dim), dtype=complex)
        for j in range(1, dim):
            L[j - 1, j] = 1.0
        a = np.zeros(dim, dtype=complex)
        a[0] = 1j    # Re<a, z> = Re(-i z_0) = Im z_0
        blocks = [{"L": L, "b": np.zeros(L.shape[0]), "a": a, "c": 0.0}]
        super().__init__(dim, blocks, witness=np.eye(dim)[0] * 1j)

    def sample_interior(self, rng, n, spread: float = 1.0):
        fiber = spread * 0.5 * (rng.standard_normal((n, self.dim - 1))
                                + 1j * rng.standard_normal((n, self.dim - 1)))
        fn = np.linalg.norm(fiber, axis=1) if self.dim > 1 else np.zeros(n)
        h = fn + 0.1 + rng.exponential(spread, n)
        x = spread * rng.standard_normal(n)
        z0 = x + 1j * h
        return np.column_stack([z0, fiber]) if self.dim > 1 else z0[:, None]

    def constraints_json(self):
        return []

    def to_json(self):
        return {"dim": self.dim, "kind": self.kind, "constraints": []}


# ---------------------------------------------------------------------------
# reports and classification

@dataclass
class RecessionReport:
    directions: list = field(default_factory=list)
    antipodal_pair: np.ndarray | None = None
    is_bounded: bool = False
    n_probed: int = 0
    horizon: float = 0.0

    def to_json(self) -> dict:
        def r12(x):
            return float(np.format_float_positional(x, precision=12, unique=False,
                                                    fractional=False))
        def vec(v):
            return [[r12(c.real), r12(c.imag)] for c in v]
        return {
            "directions": [vec(v) for v in self.directions],
            "antipodal_pair": vec(self.antipodal_pair) if self.antipodal_pair is not None else None,
            "is_bounded": self.is_bounded,
            "n_probed": self.n_probed,
            "horizon": self.horizon,
        }


@dataclass
class EndClassification:
    kind: str                      # 'Bounded' | 'OneEnd' | 'TwoEnds'
    axis: np.ndarray | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "axis": point_to_json(self.axis) if self.axis is not None else None}


def contains(domain: ConvexDomain, z) -> bool:
    return domain.contains(as_point(z, domain.dim))


def _sphere_sweep(dim2: int, n: int, seed: int) -> np.ndarray:
    """Deterministic low-discrepancy directions on the unit sphere of R^dim2."""
    eng = qmc.Sobol(d=dim2, scramble=True, seed=seed)
    m = max(1, math.ceil(math.log2(max(n, 2))))
    pts = eng.random_base2(m)[:n]
    from scipy.special import ndtri
    g = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    nrm = np.linalg.norm(g, axis=1, keepdims=True)
    nrm[nrm == 0] = 1.0
    return g / nrm


def _real_functional(a: np.ndarray) -> np.ndarray:
    """Coefficients over (Re v, Im v) of the functional v -> Re<a, v>."""
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    return np.concatenate([a.real, a.imag])


def _lineality_directions(rows: np.ndarray, dim: int) -> list:
    """Unit directions spanning the common kernel of real-linear constraint rows."""
    from scipy.linalg import null_space
    if rows.size == 0:
        return []
    ns = null_space(rows, rcond=1e-10)
    hints = []
    for k in range(ns.shape[1]):
        col = ns[:, k]
        v = as_point(col[:dim] + 1j * col[dim:], dim)
        v = v / norm(v)
        hints.extend([v, -v])
    return hints


def _direction_survives(domain, witness, v, horizon) -> bool:
    analytic = domain.recession_cone_contains(v)
    if analytic is not None and not analytic:
        return False
    t = 1e-3 * domain.scale
    while t <= horizon:
        if not domain.contains(witness + t * v):
            return False
        t *= 4.0
    if not domain.contains(witness + horizon * v):
        return False
    return True if analytic is None else analytic


def _arc_bisect(domain, witness, v_in, v_out, horizon, iters: int = 40):
    """Bisect on the great circle between a surviving and a rejected direction."""
    a = np.concatenate([v_in.real, v_in.imag])
    b = np.concatenate([v_out.real, v_out.imag])
    for _ in range(iters):
        m = a + b
        nm = np.linalg.norm(m)
        if nm == 0:
            break
        m /= nm
        vm = as_point(m[: len(v_in)] + 1j * m[len(v_in):], len(v_in))
        if _direction_survives(domain, witness, vm, horizon):
            a = m
        else:
            b = m
    return as_point(a[: len(v_in)] + 1j * a[len(v_in):], len(v_in))


def recession_directions(domain: ConvexDomain, witness, n_dirs: int = 64,
                         horizon: float | None = None, seed: int = 0,
                         refine: bool = True) -> RecessionReport:
    witness = domain.require_inside(witness)
    if n_dirs < 2:
        raise PreconditionError("n_dirs must be >= 2")
    horizon = 1e4 * domain.scale if horizon is None else float(horizon)
    if horizon <= 0:
        raise PreconditionError("horizon must be positive")

    sweep = _sphere_sweep(2 * domain.dim, n_dirs, seed)
    kept, rejected = [], []
    for row in sweep:
        v = as_point(row[: domain.dim] + 1j * row[domain.dim:], domain.dim)
        if _direction_survives(domain, witness, v, horizon):
            kept.append(v)
        else:
            rejected.append(v)
    # exact lineality candidates reach knife-edge cones the sweep cannot hit
    for v in domain.recession_hints():
        if _direction_survives(domain, witness, v, horizon):
            kept.append(v)

    if kept and rejected and refine:
        # sharpen cone-boundary representatives; keeps interior samples as-is
        extra = []
        rej = np.array([np.concatenate([v.real, v.imag]) for v in rejected])
        for v in kept[: min(len(kept), 8)]:
            vr = np.concatenate([v.real, v.imag])
            u = rejected[int(np.argmax(rej @ vr))]
            extra.append(_arc_bisect(domain, witness, v, u, horizon))
        kept = kept + extra

    # deduplicate
    uniq = []
    for v in kept:
        if all(norm(v - w) > 1e-8 for w in uniq):
            uniq.append(v)
    kept = uniq

    report = RecessionReport(directions=kept, n_probed=n_dirs, horizon=horizon)
    if not kept:
        report.is_bounded = bool(domain.is_bounded_hint())
        return report

    # antipodal clustering within 1e-3 radians after refinement
    reals = np.array([np.concatenate([v.real, v.imag]) for v in kept])
    _w, vecs = np.linalg.eigh(reals.T @ reals)
    principal = vecs[:, -1]
    axis = as_point(principal[: domain.dim] + 1j * principal[domain.dim:], domain.dim)
    axis = axis / norm(axis)
    ar = np.concatenate([axis.real, axis.imag])
    cosines = np.abs(reals @ ar)
    if np.all(cosines >= math.cos(1e-3)):
        # canonical sign: first coordinate with the largest magnitude made positive real
        k = int(np.argmax(np.abs(ar)))
        if ar[k] < 0:
            axis = -axis
        report.antipodal_pair = axis
    return report


def classify_ends(domain: ConvexDomain, report: RecessionReport) -> EndClassification:
    if report.antipodal_pair is not None:
        return EndClassification("TwoEnds", report.antipodal_pair)
    if report.directions:
        return EndClassification("OneEnd")
    if not report.is_bounded and domain.is_bounded_hint() is False:
        raise UndecidedError("unbounded domain but no direction survived; increase n_dirs")
    return EndClassification("Bounded")


_CPROPER_CATALOG = {"ball": True, "polydisc": True, "left_half_spaces": True,
                    "siegel": True, "strip": True, "product_with_plane": False}


def is_c_proper(domain: ConvexDomain, report: RecessionReport):
    """(verdict, approximate). False iff a complex line fits in the recession cone."""
    if domain.kind in _CPROPER_CATALOG:
        return _CPROPER_CATALOG[domain.kind], False

    def line_margin(x):
        w = x[: domain.dim] + 1j * x[domain.dim:]
        nw = np.linalg.norm(w)
        if nw == 0:
            return 1e9
        w = as_point(w / nw, domain.dim)
        worst = math.inf
        for cand in (w, -w, 1j * w, -1j * w):
            worst = min(worst, _cone_slope_margin(domain, cand))
        return -worst

    starts = [np.concatenate([v.real, v.imag]) for v in report.directions[:6]]
    if not starts:
        starts = [np.ones(2 * domain.dim)]
    best = -math.inf
    for x0 in starts:
        res = minimize(line_margin, x0, method="Nelder-Mead",
                       options={"maxiter": 300, "fatol": 1e-12})
        best = max(best, -res.fun)
    # a complex line fits iff some w keeps all of +-w, +-iw in the closed cone
    return bool(best < -1e-6), True


def _cone_slope_margin(domain: ConvexDomain, v) -> float:
    """Asymptotic slack of the recession condition for direction v."""
    if isinstance(domain, NormCone):
        worst = math.inf
        for L, _b, a, _c in domain.blocks:
            worst = min(worst, herm(v, a).real - float(np.linalg.norm(L @ v)))
        return worst
    if isinstance(domain, HalfSpaceIntersection):
        return float(min(-herm(v, A).real / s
                         for A, s in zip(domain.normals, domain._norms)))
    ok = domain.recession_cone_contains(v)
    return 1.0 if ok else -1.0


# ---------------------------------------------------------------------------
# JSON loading

_KINDS = {}
for _cls in (Ball, Polydisc, LeftHalfSpaces, ProductWithPlane,
             HalfSpaceIntersection, Strip, NormCone, Siegel):
    _KINDS[_cls.kind] = _cls


def domain_from_json(obj: dict) -> ConvexDomain:
    try:
        dim = int(obj["dim"])
        kind = obj["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise RejectedInputError(f"malformed domain spec: {exc}") from exc
    cons = obj.get("constraints", [])
    if kind == "ball":
        return Ball(dim)
    if kind == "polydisc":
        return Polydisc(dim)
    if kind == "left_half_spaces":
        return LeftHalfSpaces(dim)
    if kind == "product_with_plane":
        return ProductWithPlane(dim)
    if kind == "siegel":
        return Siegel(dim)
    if kind == "half_space_intersection":
        normals = [point_from_json(c["a"], dim) for c in cons]
        offsets = [float(c["c"]) for c in cons]
        return HalfSpaceIntersection(dim, normals, offsets)
    if kind == "strip":
        hs = cons["halfspaces"]
        normals = [point_from_json(c["a"], dim) for c in hs]
        offsets = [float(c["c"]) for c in hs]
        return Strip(dim, normals, offsets, axis=point_from_json(cons["axis"], dim),
                     base_circumradius=float(cons["base_circumradius"]))
    if kind == "norm_cone":
        blocks = []
        for c in cons:
            blocks.append({
                "L": [point_from_json(row) for row in c["L"]],
                "b": point_from_json(c["b"]),
                "a": point_from_json(c["a"], dim),
                "c": float(c["c"]),
            })
        return NormCone(dim, blocks)
    raise RejectedInputError(f"unknown domain kind {kind!r}")


def load_domain(path: str) -> ConvexDomain:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RejectedInputError(f"malformed domain JSON: {exc}") from exc
    return domain_from_json(obj)
