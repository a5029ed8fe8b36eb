"""Points and tangent vectors of C^d as complex numpy arrays.

A point is a 1-d ``complex128`` array of length ``d`` (equivalently 2d real
coordinates).  JSON encodes each coordinate as a ``[re, im]`` pair.
"""

from __future__ import annotations

import numpy as np

from .errors import RejectedInputError


def as_point(value, dim: int | None = None) -> np.ndarray:
    """Coerce ``value`` to a finite complex vector, optionally checking its dimension."""
    z = np.atleast_1d(np.asarray(value, dtype=complex))
    if z.ndim != 1:
        raise RejectedInputError(f"expected a 1-d coordinate vector, got shape {z.shape}")
    if not np.all(np.isfinite(z.view(float))):
        raise RejectedInputError("coordinates must be finite (no NaN/Inf)")
    if dim is not None and z.shape[0] != dim:
        raise RejectedInputError(f"dimension mismatch: expected {dim}, got {z.shape[0]}")
    return z


def point_to_json(z: np.ndarray) -> list:
    return [[float(c.real), float(c.imag)] for c in np.atleast_1d(z)]


def point_from_json(obj, dim: int | None = None) -> np.ndarray:
    try:
        coords = [complex(float(re), float(im)) for re, im in obj]
    except (TypeError, ValueError) as exc:
        raise RejectedInputError(f"cannot parse point from {obj!r}") from exc
    return as_point(coords, dim)


def norm(z: np.ndarray) -> float:
    return float(np.linalg.norm(z))


def herm(z: np.ndarray, w: np.ndarray) -> complex:
    """Hermitian product sum_k z_k * conj(w_k)."""
    return complex(np.sum(np.asarray(z) * np.conj(w)))
