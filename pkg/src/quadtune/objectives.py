"""Tracking-error integrals over phi, theta, psi and z, plus weighted aggregation."""

from __future__ import annotations

from dataclasses import astuple, dataclass

import numba as nb
import numpy as np

from .control import Reference, Trajectory

PENALTY = 1e6
N_OBJECTIVES = 4


@dataclass(frozen=True)
class ObjectiveVector:
    f1: float
    f2: float
    f3: float
    f4: float

    @classmethod
    def penalty(cls) -> ObjectiveVector:
        return cls(PENALTY, PENALTY, PENALTY, PENALTY)

    @classmethod
    def from_array(cls, values) -> ObjectiveVector:
        return cls(*(float(v) for v in np.asarray(values).reshape(N_OBJECTIVES)))

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)


@dataclass(frozen=True)
class Weights:
    w1: float = 1.0
    w2: float = 1.0
    w3: float = 1.0
    w4: float = 1.0

    def __post_init__(self):
        w = np.array(astuple(self), dtype=np.float64)
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError(f"weights must be finite and >= 0, got {tuple(w)}")
        if not np.any(w > 0):
            raise ValueError("weights must not all be zero")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)


@nb.njit(cache=True, nogil=True)
def _tracking_errors(states, ref, dt, out):
    # left-endpoint rectangle rule: sample k weights the interval [t_k, t_k+1)
    cols = (6, 7, 8, 2)
    for i in range(4):
        out[i] = 0.0
    for k in range(states.shape[0] - 1):
        for i in range(4):
            out[i] += abs(states[k, cols[i]] - ref[i])
    for i in range(4):
        out[i] *= dt


def tracking_errors(states: np.ndarray, ref: np.ndarray, dt: float, stable: bool) -> np.ndarray:
    if not stable:
        return np.full(N_OBJECTIVES, PENALTY)
    out = np.empty(N_OBJECTIVES)
    _tracking_errors(states, ref, float(dt), out)
    return out


def evaluate_objectives(traj: Trajectory, ref: Reference) -> ObjectiveVector:
    return ObjectiveVector.from_array(tracking_errors(traj.states, ref.as_array(), traj.dt, traj.stable))


def aggregate(obj, w=None) -> float:
    """Weighted sum of objective components (unit weights by default)."""
    obj = obj.as_array() if isinstance(obj, ObjectiveVector) else np.asarray(obj, dtype=np.float64)
    if w is None:
        w = Weights()
    w = w.as_array() if isinstance(w, Weights) else np.asarray(w, dtype=np.float64)
    return float(np.dot(obj, w))
