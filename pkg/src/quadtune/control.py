"""PD attitude/altitude control law and closed-loop rollouts."""

from __future__ import annotations

import csv
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numba as nb
import numpy as np

from .dynamics import (
    DIVERGENCE_LIMIT,
    OK,
    STATE_DIM,
    ControlInput,
    DroneParams,
    DroneState,
    _rk4_step_ws,
)

COS_GUARD = 1e-6
THRUST_LIMIT_FACTOR = 4.0
DEFAULT_DT = 0.01
DEFAULT_T_FINAL = 10.0

GAIN_NAMES = ("kp_phi", "kd_phi", "kp_theta", "kd_theta", "kp_psi", "kd_psi", "kp_z", "kd_z")


class AttitudeSingularityError(ArithmeticError):
    """cos(phi) * cos(theta) too small to compensate thrust for tilt."""


@dataclass(frozen=True)
class PdGains:
    kp_phi: float
    kd_phi: float
    kp_theta: float
    kd_theta: float
    kp_psi: float
    kd_psi: float
    kp_z: float
    kd_z: float

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"gain {f.name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, f.name, v)

    @classmethod
    def from_array(cls, genes) -> PdGains:
        genes = np.asarray(genes, dtype=np.float64).reshape(-1)
        if genes.size != 8:
            raise ValueError(f"expected 8 gains, got {genes.size}")
        return cls(*(float(g) for g in genes))

    @classmethod
    def conventional(cls) -> PdGains:
        """Manually chosen baseline gains used to seed the optimizers."""
        return cls(6.0, 1.75, 6.0, 1.75, 6.0, 1.75, 1.5, 2.5)

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)


@dataclass(frozen=True)
class Reference:
    z_d: float = 0.0
    phi_d: float = 0.0
    theta_d: float = 0.0
    psi_d: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(astuple(self))):
            raise ValueError("reference must be finite")

    def as_array(self) -> np.ndarray:
        """Setpoints ordered like the objectives: (phi, theta, psi, z)."""
        return np.array([self.phi_d, self.theta_d, self.psi_d, self.z_d], dtype=np.float64)

    def equilibrium(self) -> DroneState:
        return DroneState(eps=[0.0, 0.0, self.z_d], eta=[self.phi_d, self.theta_d, self.psi_d])


def default_initial_state() -> DroneState:
    return DroneState(eps=[0.0, 0.0, -1.0], eta=[-0.7, -0.7, -0.7])


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 12)
    inputs: np.ndarray  # (n, 4): T, tau_phi, tau_theta, tau_psi
    stable: bool
    dt: float

    def __post_init__(self):
        n = len(self.times)
        if self.states.shape != (n, STATE_DIM) or self.inputs.shape != (n, 4):
            raise ValueError("states/inputs must have one row per sample")
        if n == 0:
            raise ValueError("empty trajectory")

    def __len__(self):
        return len(self.times)

    def state(self, k: int) -> DroneState:
        return DroneState.from_array(self.states[k])

    def input(self, k: int) -> ControlInput:
        return ControlInput(self.inputs[k, 0], self.inputs[k, 1:])

    @property
    def tracked(self) -> np.ndarray:
        """(n, 4) columns phi, theta, psi, z."""
        return self.states[:, [6, 7, 8, 2]]

    @property
    def thrust(self) -> np.ndarray:
        return self.inputs[:, 0]


TRAJECTORY_COLUMNS = (
    "t", "x", "y", "z", "phi", "theta", "psi",
    "x_dot", "y_dot", "z_dot", "phi_dot", "theta_dot", "psi_dot",
    "T", "tau_phi", "tau_theta", "tau_psi",
)  # fmt: skip


def write_trajectory_csv(traj: Trajectory, path) -> None:
    rows = np.column_stack([traj.times, traj.states, traj.inputs])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def read_trajectory_csv(path, stable: bool = True) -> Trajectory:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise ValueError(f"{Path(path).name}: unexpected header {header}")
        data = np.array([[float(v) for v in row] for row in reader], dtype=np.float64)
    times = data[:, 0]
    dt = float(times[1] - times[0]) if len(times) > 1 else 0.0
    return Trajectory(times, data[:, 1:13], data[:, 13:17], stable, dt)


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def _pd_law(s, gains, ref, p, t_max, out):
    """Writes [T, tau_phi, tau_theta, tau_psi] into ``out``; nonzero on attitude singularity."""
    m, g = p[0], p[1]
    tilt = np.cos(s[6]) * np.cos(s[7])
    if abs(tilt) < COS_GUARD:
        return 1
    T = m * (g + gains[6] * (ref[3] - s[2]) + gains[7] * (0.0 - s[5])) / tilt
    if T < 0.0:
        T = 0.0
    elif T > t_max:
        T = t_max
    out[0] = T
    out[1] = p[3] * (gains[0] * (ref[0] - s[6]) + gains[1] * (0.0 - s[9]))
    out[2] = p[4] * (gains[2] * (ref[1] - s[7]) + gains[3] * (0.0 - s[10]))
    out[3] = p[5] * (gains[4] * (ref[2] - s[8]) + gains[5] * (0.0 - s[11]))
    return 0


@nb.njit(cache=True, nogil=True)
def _admissible(s):
    half_pi = np.pi / 2
    if abs(s[6]) >= half_pi or abs(s[7]) >= half_pi:
        return False
    for i in range(STATE_DIM):
        if not (abs(s[i]) <= DIVERGENCE_LIMIT):
            return False
    return True


@nb.njit(cache=True, nogil=True)
def _closed_loop(gains, ref, init, p, dt, n_steps, t_max, states, inputs):
    """Roll out the loop into preallocated (n_steps+1, .) buffers.

    Returns (number of valid samples, stable flag).
    """
    for i in range(STATE_DIM):
        states[0, i] = init[i]
    if not _admissible(states[0]) or _pd_law(states[0], gains, ref, p, t_max, inputs[0]) != 0:
        return 1, False
    tau = np.empty(3)
    ws = np.empty((5, STATE_DIM))
    for k in range(n_steps):
        u = inputs[k]
        tau[0], tau[1], tau[2] = u[1], u[2], u[3]
        if _rk4_step_ws(states[k], u[0], tau, p, dt, states[k + 1], ws) != OK:
            return k + 1, False
        if not _admissible(states[k + 1]):
            return k + 1, False
        if _pd_law(states[k + 1], gains, ref, p, t_max, inputs[k + 1]) != 0:
            return k + 1, False
    return n_steps + 1, True


def pd_law(state: DroneState, ref: Reference, gains: PdGains, params: DroneParams) -> ControlInput:
    out = np.empty(4)
    t_max = THRUST_LIMIT_FACTOR * params.m * params.g
    if _pd_law(state.as_array(), gains.as_array(), ref.as_array(), params.as_array(), t_max, out):
        raise AttitudeSingularityError(
            f"|cos(phi)cos(theta)| < {COS_GUARD} at eta={tuple(state.eta)}"
        )
    return ControlInput(out[0], out[1:])


def n_steps_for(dt: float, t_final: float) -> int:
    return int(round(t_final / dt))


def rollout_arrays(gains, ref, init, p, dt, t_final):
    """Array-level rollout shared by :func:`simulate` and batch evaluation."""
    n_steps = n_steps_for(dt, t_final)
    states = np.zeros((n_steps + 1, STATE_DIM))
    inputs = np.zeros((n_steps + 1, 4))
    t_max = THRUST_LIMIT_FACTOR * p[0] * p[1]
    n, stable = _closed_loop(gains, ref, init, p, float(dt), n_steps, t_max, states, inputs)
    return states[:n], inputs[:n], bool(stable)


def simulate(
    gains: PdGains,
    ref: Reference | None = None,
    init: DroneState | None = None,
    params: DroneParams | None = None,
    dt: float = DEFAULT_DT,
    t_final: float = DEFAULT_T_FINAL,
) -> Trajectory:
    """Closed-loop rollout; an aborted (diverged) run comes back truncated with ``stable=False``."""
    ref = ref or Reference()
    init = init or default_initial_state()
    params = params or DroneParams()
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if not t_final >= dt:
        raise ValueError(f"t_final must be >= dt, got t_final={t_final!r}, dt={dt!r}")
    states, inputs, stable = rollout_arrays(
        gains.as_array(), ref.as_array(), init.as_array(), params.as_array(), dt, t_final
    )
    times = np.arange(len(states)) * float(dt)
    return Trajectory(times, states, inputs, stable, float(dt))
