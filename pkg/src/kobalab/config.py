"""Solver and run configuration records."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, asdict, replace

from .errors import RejectedInputError


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of the variational distance solver and the boundary-gap search.

    Matches the JSON record
    ``{"n_theta":64, "n_nodes":33, "quad":16, "tol_rel":1e-8, "max_sweeps":500, "seed":0}``.
    """

    n_theta: int = 64
    n_nodes: int = 33
    quad: int = 16
    tol_rel: float = 1e-8
    max_sweeps: int = 500
    seed: int = 0

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)

    def to_json(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_json(obj: dict) -> "SolverConfig":
        known = {f: obj[f] for f in SolverConfig.__dataclass_fields__ if f in obj}
        unknown = set(obj) - set(known)
        if unknown:
            raise RejectedInputError(f"unknown config fields: {sorted(unknown)}")
        return SolverConfig(**known)


DEFAULT_CONFIG = SolverConfig()


def load_config(path: str | None) -> SolverConfig:
    if path is None:
        return DEFAULT_CONFIG
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RejectedInputError(f"malformed config JSON: {exc}") from exc
    return SolverConfig.from_json(obj)


def max_workers() -> int:
    """Parallelism cap honoring the KOBALAB_THREADS environment variable."""
    raw = os.environ.get("KOBALAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
