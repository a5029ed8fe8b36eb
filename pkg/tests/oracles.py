"""Independent closed-form oracles and brute-force references for the tests.

These never call the package's slice machinery: distances come from the
classical formulas, boundary gaps from membership-only bisection.
"""

import math

import numpy as np


def disc_distance(x: complex, y: complex) -> float:
    return math.atanh(abs((x - y) / (1 - np.conj(x) * y)))


def polydisc_distance(x, y) -> float:
    return max(disc_distance(complex(a), complex(b)) for a, b in zip(x, y))


def ball_distance(x, y) -> float:
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    inner = np.sum(x * np.conj(y))
    num = (1 - np.sum(np.abs(x) ** 2)) * (1 - np.sum(np.abs(y) ** 2))
    val = 1.0 - num / abs(1 - inner) ** 2
    return math.atanh(math.sqrt(max(val, 0.0)))


def halfplane_distance(a: complex, b: complex) -> float:
    """Distance in {Re z < 0}."""
    return math.atanh(abs((a - b) / (a + np.conj(b))))


def halfspaces_distance(x, y) -> float:
    return max(halfplane_distance(complex(a), complex(b)) for a, b in zip(x, y))


def planar_strip_distance(x: complex, y: complex, half_width: float = 1.0) -> float:
    """{|Im z| < h} via the exponential map onto the upper half-plane."""
    u = np.exp(math.pi * (x + 1j * half_width) / (2 * half_width))
    v = np.exp(math.pi * (y + 1j * half_width) / (2 * half_width))
    return math.atanh(abs((u - v) / (u - np.conj(v))))


def disc_metric(z: complex, v: complex) -> float:
    return abs(v) / (1 - abs(z) ** 2)


def disc_metric_vec(z, v) -> float:
    return disc_metric(complex(z[0]), complex(v[0]))


def ball_metric(z, v) -> float:
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    z2 = float(np.sum(np.abs(z) ** 2))
    h = abs(np.sum(v * np.conj(z)))
    return math.sqrt(float(np.sum(np.abs(v) ** 2)) / (1 - z2) + h ** 2 / (1 - z2) ** 2)


def polydisc_metric(z, v) -> float:
    return max(abs(b) / (1 - abs(a) ** 2) for a, b in zip(z, v))


def halfspaces_metric(z, v) -> float:
    return max(abs(b) / (2 * abs(a.real)) for a, b in zip(z, v))


def delta_bruteforce(domain, z, w, n_theta: int = 720, iters: int = 60) -> float:
    """Boundary gap along the complex line of w using membership only."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    u = w / np.linalg.norm(w)
    best = math.inf
    for k in range(n_theta):
        phase = np.exp(2j * math.pi * k / n_theta)
        t = 1.0
        guard = 0
        while domain.contains(z + t * phase * u):
            t *= 2.0
            guard += 1
            if guard > 80:
                t = math.inf
                break
        if not math.isfinite(t):
            continue
        lo, hi = 0.0, t
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if domain.contains(z + mid * phase * u):
                lo = mid
            else:
                hi = mid
        best = min(best, lo)
    return best
