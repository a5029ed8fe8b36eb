"""Geometry of one-dimensional complex slices of a convex domain.

Every metric computation reduces to the slice ``S = {lam in C : a + lam*u in D}``
of the domain by a complex affine line.  For the supported domain kinds the
slice is cut out by three primitive constraint types in the lam-plane:

* a disc ``|lam - c| < R``               (ball / polydisc coordinates),
* a half-plane ``Re(conj(n) lam) < m``   (real-affine constraints),
* a conic region ``||A + lam B|| < p + Re(lam q)`` (norm-cone constraints).

The slice is always open and convex and contains the real segment [0, 1]
when ``a`` and ``a+u`` lie in ``D``.

Two quantities are extracted here:

* ``slice_gap`` -- the Euclidean distance from a point of the slice to its
  boundary (the boundary gap along the complex line);
* ``segment_bound`` -- an upper bound for the invariant distance between
  ``lam=0`` and ``lam=1``.  When the slice is a disc, half-plane, strip,
  lens or wedge the bound is the exact hyperbolic distance of the slice
  (computed conformally); otherwise it is realized by an inscribed round
  disc.  The realizer is returned so callers can subdivide along its
  geodesic, which never increases chained bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Containment safety: inscribed realizers are shrunk by these factors before a
# bound is computed, so rounding can never produce a disc poking out of the slice.
_SHRINK_EXACT = 1.0 - 1e-12
_SHRINK_CHECKED = 1.0 - 1e-7

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# hyperbolic distance / geodesic helpers (Kobayashi normalization, curvature -4)

def disc_ratio(u: complex, w: complex) -> float:
    """Moebius invariant |u-w| / |1 - conj(u) w| on the unit disc."""
    return abs(u - w) / abs(1.0 - u.conjugate() * w)


def unit_disc_distance(u: complex, w: complex) -> float:
    # log form of atanh(disc_ratio): |1-conj(u)w|^2 - |u-w|^2 = (1-|u|^2)(1-|w|^2)
    # keeps precision when both points sit near the boundary
    a = abs(1.0 - u.conjugate() * w)
    b = abs(u - w)
    s2 = (1.0 - abs(u) ** 2) * (1.0 - abs(w) ** 2)
    if s2 <= 0.0:
        return math.inf
    return math.log((a + b) / math.sqrt(s2))


def unit_disc_point_at(u: complex, w: complex, t: float) -> complex:
    """Point at parameter fraction ``t`` of the geodesic from u to w."""
    wp = (w - u) / (1.0 - u.conjugate() * w)
    r = abs(wp)
    if r == 0.0:
        return u
    mp = (wp / r) * math.tanh(t * math.atanh(min(r, 1.0 - 1e-16)))
    return (mp + u) / (1.0 + u.conjugate() * mp)


def left_halfplane_distance(a: complex, b: complex) -> float:
    """Distance in {Re z < 0}; |a+conj(b)|^2 - |a-b|^2 = 4 Re(a) Re(b)."""
    s2 = 4.0 * a.real * b.real
    if s2 <= 0.0:
        return math.inf
    return math.log((abs(a + b.conjugate()) + abs(a - b)) / math.sqrt(s2))


def _lhp_to_disc(z: complex) -> complex:
    return (1.0 + z) / (1.0 - z)


def _disc_to_lhp(z: complex) -> complex:
    return (z - 1.0) / (z + 1.0)


def upper_halfplane_distance(a: complex, b: complex) -> float:
    # |a - conj(b)|^2 - |a-b|^2 = 4 Im(a) Im(b)
    s2 = 4.0 * a.imag * b.imag
    if s2 <= 0.0:
        return math.inf
    return math.log((abs(a - b.conjugate()) + abs(a - b)) / math.sqrt(s2))


def _uhp_to_disc(z: complex) -> complex:
    return (z - 1j) / (z + 1j)


def _disc_to_uhp(z: complex) -> complex:
    return 1j * (1.0 + z) / (1.0 - z)


def _uhp_point_at(a: complex, b: complex, t: float) -> complex:
    return _disc_to_uhp(unit_disc_point_at(_uhp_to_disc(a), _uhp_to_disc(b), t))


# ---------------------------------------------------------------------------
# slice constraints

@dataclass(frozen=True)
class DiscC:
    center: complex
    radius: float

    def gap(self, lam: complex) -> float:
        return self.radius - abs(lam - self.center)

    def exit(self, lam: complex, phase: complex) -> float:
        x = lam - self.center
        beta = (x * phase.conjugate()).real
        disc = beta * beta - (abs(x) ** 2 - self.radius ** 2)
        if disc < 0.0:
            return math.inf
        return -beta + math.sqrt(disc)


@dataclass(frozen=True)
class HalfPlaneC:
    normal: complex          # unit; inside where Re(conj(normal) lam) < offset
    offset: float

    def gap(self, lam: complex) -> float:
        return self.offset - (lam * self.normal.conjugate()).real

    def exit(self, lam: complex, phase: complex) -> float:
        speed = (phase * self.normal.conjugate()).real
        if speed <= 0.0:
            return math.inf
        return self.gap(lam) / speed


@dataclass(frozen=True)
class QuadC:
    """Region ||A + lam B|| < p + Re(lam q); convex for any data."""
    A: tuple
    B: tuple
    p: float
    q: complex

    def exits_vec(self, lam: complex, phases: np.ndarray) -> np.ndarray:
        """First exits along rays of the given phases (vectorized)."""
        Av = np.asarray(self.A, dtype=complex)
        Bv = np.asarray(self.B, dtype=complex)
        V = Av + lam * Bv
        p0 = self.p + (lam * self.q).real
        # W = phase*B, r = Re(phase*q)
        r = (phases * self.q).real
        a = float(np.sum(np.abs(Bv) ** 2)) - r * r
        dotVW = (np.outer(phases, Bv).conj() * V).sum(axis=1).real
        b = 2.0 * (dotVW - p0 * r)
        c = float(np.sum(np.abs(V) ** 2)) - p0 * p0
        out = np.full(phases.shape, math.inf)
        lin = np.abs(a) < 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            t_lin = np.where(b > 0.0, -c / b, math.inf)
            disc = b * b - 4.0 * a * c
            s = np.sqrt(np.maximum(disc, 0.0))
            r1 = (-b - s) / (2.0 * a)
            r2 = (-b + s) / (2.0 * a)
        tolp = 1e-14 * (abs(p0) + 1.0)
        for roots in (r1, r2):
            ok = (~lin) & (disc >= 0.0) & (roots > 0.0) & (p0 + roots * r >= -tolp)
            out[ok] = np.minimum(out[ok], roots[ok])
        ok = lin & (t_lin > 0.0) & (p0 + t_lin * r >= -tolp)
        out[ok] = np.minimum(out[ok], t_lin[ok])
        return out

    def exit(self, lam: complex, phase: complex) -> float:
        return float(self.exits_vec(lam, np.asarray([phase]))[0])

    def gap(self, lam: complex, n_theta: int = 64) -> float:
        return _phase_min_exit(self, lam, n_theta)


def _phase_min_exit(con: QuadC, lam: complex, n_theta: int) -> float:
    """min over ray phases of the first exit: grid sweep plus golden refinement."""
    thetas = np.arange(n_theta) * (_TWO_PI / n_theta)
    exits = con.exits_vec(lam, np.exp(1j * thetas))
    k = int(np.argmin(exits))
    best = float(exits[k])
    if not math.isfinite(best):
        return math.inf
    h = _TWO_PI / n_theta
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = thetas[k] - h, thetas[k] + h
    # golden refinement batched in pairs to amortize the vectorized solver
    iters = 36 if n_theta >= 48 else 10
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = (float(v) for v in
              con.exits_vec(lam, np.exp(1j * np.asarray([c, d]))))
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = float(con.exits_vec(lam, np.exp(1j * np.asarray([c])))[0])
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = float(con.exits_vec(lam, np.exp(1j * np.asarray([d])))[0])
        if (b - a) < 1e-12:
            break
    return min(best, fc, fd)


# ---------------------------------------------------------------------------
# slice-level queries

def slice_gap(constraints, lam: complex = 0.0, n_theta: int = 64) -> float:
    """Euclidean distance from ``lam`` to the slice boundary (inf when free)."""
    gap = math.inf
    for con in constraints:
        if isinstance(con, QuadC):
            g = con.gap(lam, n_theta)
        else:
            g = con.gap(lam)
        if g < gap:
            gap = g
    return gap


def first_exit(constraints, lam: complex, phase: complex) -> float:
    t = math.inf
    for con in constraints:
        t = min(t, con.exit(lam, phase))
    return t


def inscribed_radius(constraints, c: complex, n_theta: int = 64) -> float:
    return slice_gap(constraints, c, n_theta)


# ---------------------------------------------------------------------------
# realizers

@dataclass(frozen=True)
class Realizer:
    """The analytic disc (or conformal slice model) realizing a segment bound.

    ``exact`` -- the realizer fills the whole slice;
    ``optimal`` -- the bound provably equals the ambient distance (a
    holomorphic projection onto the slice model exists), so no polyline
    can improve on it.
    """
    kind: str                 # 'plane' | 'disc' | 'halfplane' | 'strip' | 'conformal'
    params: tuple = ()
    exact: bool = False
    optimal: bool = False

    def point_at(self, t: float) -> complex:
        """Point at fraction t of the realizer geodesic from lam=0 to lam=1."""
        if self.kind == "plane":
            return complex(t, 0.0)
        if self.kind == "disc":
            c, R = self.params
            u = (0.0 - c) / R
            w = (1.0 - c) / R
            return unit_disc_point_at(u, w, t) * R + c
        if self.kind == "halfplane":
            n, m = self.params
            za = complex(-m)
            zb = n.conjugate() - m
            zm = _disc_to_lhp(unit_disc_point_at(_lhp_to_disc(za), _lhp_to_disc(zb), t))
            return n * (zm + m)
        if self.kind == "strip":
            n, m1, m2 = self.params
            w = m2 - m1
            ua = _strip_to_uhp(complex(0.0), n, m1, w)
            ub = _strip_to_uhp(complex(1.0), n, m1, w)
            return _uhp_to_strip(_uhp_point_at(ua, ub, t), n, m1, w)
        if self.kind == "conformal":
            p, q, th_lo, alpha = self.params
            wa = _sector_to_uhp(complex(0.0), p, q, th_lo, alpha)
            wb = _sector_to_uhp(complex(1.0), p, q, th_lo, alpha)
            return _uhp_to_sector(_uhp_point_at(wa, wb, t), p, q, th_lo, alpha)
        raise ValueError(self.kind)

    def midpoint(self) -> complex:
        return self.point_at(0.5)


def _strip_to_uhp(lam: complex, n: complex, m1: float, w: float) -> complex:
    zeta = (lam * n.conjugate() - m1) / w      # 0 < Re < 1
    return complex(np.exp(1j * math.pi * zeta))


def _uhp_to_strip(u: complex, n: complex, m1: float, w: float) -> complex:
    zeta = complex(np.log(u) / (1j * math.pi))
    return n * (zeta * w + m1)


def _moebius_T(lam: complex, p: complex, q: complex | None) -> complex:
    # q is None for a wedge vertex at p (boundary lines meet at p)
    if q is None:
        return lam - p
    return (lam - p) / (lam - q)


def _moebius_T_inv(zeta: complex, p: complex, q: complex | None) -> complex:
    if q is None:
        return zeta + p
    return (p - zeta * q) / (1.0 - zeta)


def _sector_to_uhp(lam: complex, p, q, th_lo, alpha) -> complex:
    w = _moebius_T(lam, p, q) * complex(math.cos(-th_lo), math.sin(-th_lo))
    ang = math.atan2(w.imag, w.real) % _TWO_PI
    mod = abs(w)
    k = math.pi / alpha
    if mod <= 0.0:
        return complex(0.0)
    log_mod = k * math.log(mod)
    if abs(log_mod) > 650.0:
        return complex(math.inf)        # caller treats as unusable model
    m = math.exp(log_mod)
    return complex(m * math.cos(k * ang), m * math.sin(k * ang))


def _uhp_to_sector(u: complex, p, q, th_lo, alpha) -> complex:
    ang = math.atan2(u.imag, u.real) % _TWO_PI
    mod = abs(u)
    k = alpha / math.pi
    w = complex(mod ** k * math.cos(k * ang), mod ** k * math.sin(k * ang))
    w *= complex(math.cos(th_lo), math.sin(th_lo))
    return _moebius_T_inv(w, p, q)


def _disc_bound(c: complex, R: float) -> float:
    return unit_disc_distance((0.0 - c) / R, (1.0 - c) / R)


def _halfplane_bound(n: complex, m: float) -> float:
    return left_halfplane_distance(complex(-m), n.conjugate() - m)


def _strip_bound(n: complex, m1: float, m2: float) -> float:
    w = m2 - m1
    return upper_halfplane_distance(_strip_to_uhp(complex(0.0), n, m1, w),
                                    _strip_to_uhp(complex(1.0), n, m1, w))


# ---------------------------------------------------------------------------
# two-constraint conformal models (lens / wedge)

def _boundary_crossings(c1, c2):
    """Intersection points of the two constraint boundaries, or None."""
    if isinstance(c1, DiscC) and isinstance(c2, DiscC):
        d = abs(c2.center - c1.center)
        if d < 1e-15 or d >= c1.radius + c2.radius - 1e-15 \
                or d <= abs(c1.radius - c2.radius) + 1e-15:
            return None
        a = (d * d + c1.radius ** 2 - c2.radius ** 2) / (2.0 * d)
        h2 = c1.radius ** 2 - a * a
        if h2 <= 0:
            return None
        e = (c2.center - c1.center) / d
        base = c1.center + a * e
        h = math.sqrt(h2)
        return base + 1j * h * e, base - 1j * h * e
    if isinstance(c1, HalfPlaneC) and isinstance(c2, HalfPlaneC):
        n1, n2 = c1.normal, c2.normal
        det = (n1.conjugate() * n2).imag       # sin of angle between normals
        if abs(det) < 1e-12:
            return None
        # solve Re(conj(n_i) lam) = m_i
        a1, b1 = n1.real, n1.imag
        a2, b2 = n2.real, n2.imag
        den = a1 * b2 - b1 * a2
        x = (c1.offset * b2 - b1 * c2.offset) / den
        y = (a1 * c2.offset - c1.offset * a2) / den
        return complex(x, y), None
    # disc & half-plane
    if isinstance(c1, HalfPlaneC):
        c1, c2 = c2, c1
    if not (isinstance(c1, DiscC) and isinstance(c2, HalfPlaneC)):
        return None
    s = c2.offset - (c1.center * c2.normal.conjugate()).real
    if abs(s) >= c1.radius - 1e-15:
        return None
    foot = c1.center + s * c2.normal
    h = math.sqrt(c1.radius ** 2 - s * s)
    t = 1j * c2.normal
    return foot + h * t, foot - h * t


def _line_angle_through_origin(con, p, q, ref: complex) -> float:
    """Angle (mod pi) of the image of the constraint boundary under T."""
    if isinstance(con, DiscC):
        chord_mid = 0.5 * (p + (q if q is not None else p))
        e = chord_mid - con.center
        ne = abs(e)
        w = con.center - con.radius * (e / ne) if ne > 1e-14 else con.center + con.radius
    else:
        t = 1j * con.normal
        w = p + 3.0 * t * max(1.0, abs(p - ref))
    img = _moebius_T(w, p, q)
    return math.atan2(img.imag, img.real) % math.pi


def _two_constraint_model(c1, c2):
    """Exact conformal model of the intersection of two flat constraints."""
    cross = _boundary_crossings(c1, c2)
    if cross is None:
        return None
    p, q = cross
    if q is not None and (abs(p) < 1e-13 or abs(q) < 1e-13
                          or abs(p - 1) < 1e-13 or abs(q - 1) < 1e-13):
        return None
    if q is None and (abs(p) < 1e-13 or abs(p - 1) < 1e-13):
        return None
    th1 = _line_angle_through_origin(c1, p, q, complex(0.5))
    th2 = _line_angle_through_origin(c2, p, q, complex(0.5))
    if abs(math.sin(th1 - th2)) < 1e-12:
        return None
    w_in = _moebius_T(complex(0.5), p, q)
    phi_in = math.atan2(w_in.imag, w_in.real) % _TWO_PI
    bounds = sorted({th1 % _TWO_PI, (th1 + math.pi) % _TWO_PI,
                     th2 % _TWO_PI, (th2 + math.pi) % _TWO_PI})
    th_lo, alpha = None, None
    for i, b in enumerate(bounds):
        b_next = bounds[(i + 1) % len(bounds)]
        width = (b_next - b) % _TWO_PI
        if (phi_in - b) % _TWO_PI < width:
            th_lo, alpha = b, width
            break
    if th_lo is None or alpha <= 1e-12 or alpha > math.pi + 1e-9:
        return None
    wa = _sector_to_uhp(complex(0.0), p, q, th_lo, alpha)
    wb = _sector_to_uhp(complex(1.0), p, q, th_lo, alpha)
    if not (math.isfinite(wa.real) and math.isfinite(wb.real)):
        return None
    if wa.imag <= 0 or wb.imag <= 0:
        return None
    val = upper_halfplane_distance(wa, wb)
    if not math.isfinite(val):
        return None
    return val, Realizer("conformal", (p, q, th_lo, alpha), exact=True)


def _contains(outer, inner) -> bool | None:
    """region(inner) inside region(outer); None when undecidable symbolically."""
    tol = 1e-12
    if isinstance(inner, DiscC):
        if isinstance(outer, DiscC):
            return abs(inner.center - outer.center) + inner.radius <= outer.radius + tol
        if isinstance(outer, HalfPlaneC):
            return (inner.center * outer.normal.conjugate()).real + inner.radius <= outer.offset + tol
        return None
    if isinstance(inner, HalfPlaneC):
        if isinstance(outer, HalfPlaneC):
            return (abs(inner.normal - outer.normal) <= 1e-12
                    and inner.offset <= outer.offset + tol)
        return False if isinstance(outer, DiscC) else None
    return None


def _feasible_disc(c: complex, R: float) -> bool:
    return abs(c) < R and abs(1.0 - c) < R


def segment_bound(constraints, n_theta: int = 64, polish: bool = False):
    """Upper bound for the invariant distance between lam=0 and lam=1.

    Returns ``(value, realizer)``.  The value is an upper bound for the
    Kobayashi distance of the ambient domain between the segment endpoints
    because every realizer is an analytic disc mapping into the domain.
    """
    cons = list(constraints)
    if not cons:
        return 0.0, Realizer("plane", exact=True, optimal=True)

    quads = [c for c in cons if isinstance(c, QuadC)]
    flats = [c for c in cons if not isinstance(c, QuadC)]

    # Exact slice shortcuts (no conic constraint present).
    if not quads:
        dominant = None
        for cand in flats:
            if all(cand is other or _contains(other, cand) for other in flats):
                dominant = cand
                break
        if dominant is not None:
            if isinstance(dominant, DiscC):
                R = dominant.radius * _SHRINK_EXACT
                if _feasible_disc(dominant.center, R):
                    return _disc_bound(dominant.center, R), Realizer(
                        "disc", (dominant.center, R), exact=True, optimal=True)
            else:
                m = dominant.offset - 1e-12 * (1.0 + abs(dominant.offset))
                v = _halfplane_bound(dominant.normal, m)
                if math.isfinite(v):
                    return v, Realizer("halfplane", (dominant.normal, m),
                                       exact=True, optimal=True)
        effective = _drop_redundant(flats)
        if len(effective) == 2:
            a, b = effective
            if isinstance(a, HalfPlaneC) and isinstance(b, HalfPlaneC) \
                    and abs(a.normal + b.normal) <= 1e-12:
                m2, m1 = a.offset, -b.offset
                pad = 1e-12 * (1.0 + abs(m1) + abs(m2))
                v = _strip_bound(a.normal, m1 + pad, m2 - pad)
                if math.isfinite(v):
                    return v, Realizer("strip", (a.normal, m1 + pad, m2 - pad),
                                       exact=True, optimal=True)
            model = _two_constraint_model(a, b)
            if model is not None:
                return model

    # Inscribed-disc candidates.
    best = (math.inf, None)
    shrink = _SHRINK_EXACT if not quads else _SHRINK_CHECKED

    def try_center(c: complex):
        nonlocal best
        R = inscribed_radius(cons, c, n_theta) * shrink
        if R > 0.0 and _feasible_disc(c, R):
            v = _disc_bound(c, R)
            if v < best[0]:
                best = (v, Realizer("disc", (c, R)))
            return v
        return math.inf

    for cand in [c for c in flats if isinstance(c, DiscC)]:
        if all(cand is o or _contains(o, cand) for o in flats):
            ok = all(q.gap(cand.center, n_theta) >= cand.radius * (1.0 - 1e-9)
                     for q in quads)
            if ok:
                R = cand.radius * _SHRINK_CHECKED
                if _feasible_disc(cand.center, R):
                    v = _disc_bound(cand.center, R)
                    if v < best[0]:
                        best = (v, Realizer("disc", (cand.center, R)))

    r_mid = try_center(complex(0.5))
    span = 2.0 * (inscribed_radius(cons, complex(0.5), n_theta)
                  if math.isfinite(r_mid) else 1.0)
    if not math.isfinite(span) or span <= 0:
        span = 2.0
    ss = np.linspace(-span, span, 9)
    vals = [try_center(complex(0.5, s)) for s in ss]
    k = int(np.argmin(vals))
    if math.isfinite(vals[k]):
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = ss[max(0, k - 1)], ss[min(len(ss) - 1, k + 1)]
        c1 = b - invphi * (b - a)
        d1 = a + invphi * (b - a)
        fc, fd = try_center(complex(0.5, c1)), try_center(complex(0.5, d1))
        for _ in range(24):
            if fc < fd:
                b, d1, fd = d1, c1, fc
                c1 = b - invphi * (b - a)
                fc = try_center(complex(0.5, c1))
            else:
                a, c1, fc = c1, d1, fd
                d1 = a + invphi * (b - a)
                fd = try_center(complex(0.5, d1))
            if abs(b - a) < 1e-9:
                break

    if polish and best[1] is not None and best[1].kind == "disc":
        from scipy.optimize import minimize

        def obj(xy):
            c = complex(xy[0], xy[1])
            R = inscribed_radius(cons, c, n_theta) * shrink
            if R <= 0.0 or not _feasible_disc(c, R):
                return 1e6
            return _disc_bound(c, R)

        c0 = best[1].params[0]
        res = minimize(obj, [c0.real, c0.imag], method="Nelder-Mead",
                       options={"maxiter": 120, "xatol": 1e-10, "fatol": 1e-12})
        if res.fun < best[0]:
            try_center(complex(res.x[0], res.x[1]))

    if best[1] is None:
        return math.inf, Realizer("plane")
    return best


def _drop_redundant(flats):
    """Remove constraints whose region contains another constraint's region."""
    keep = []
    for i, c in enumerate(flats):
        redundant = False
        for j, o in enumerate(flats):
            if i == j:
                continue
            if _contains(c, o) and not (_contains(o, c) and j > i):
                redundant = True
                break
        if not redundant:
            keep.append(c)
    return keep if keep else list(flats)
