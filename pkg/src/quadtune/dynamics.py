"""Rigid-body quadrotor model in Euler-angle coordinates.

The 12-dimensional state is packed as

    [x, y, z, x', y', z', phi, theta, psi, phi', theta', psi']

and the physical constants as ``[m, g, l, Ixx, Iyy, Izz, Ax, Ay, Az]``.
Everything numeric lives in numba kernels (``nogil``) so that closed-loop
rollouts can be fanned out over threads; the dataclasses and wrappers below
are the Python-facing surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba as nb
import numpy as np

STATE_DIM = 12
GIMBAL_EPS = 1e-9
DIVERGENCE_LIMIT = 1e6

# status codes returned by kernels
OK = 0
SINGULAR = 1
NONFINITE = 2


class SingularJacobianError(ArithmeticError):
    """Euler-angle Jacobian is (numerically) singular, i.e. |cos theta| < 1e-9."""


class NonFiniteStateError(ArithmeticError):
    """Integration produced a NaN or infinite state component."""


@dataclass(frozen=True)
class DroneParams:
    m: float = 0.468
    g: float = 9.81
    l: float = 0.225
    Ixx: float = 4.856e-3
    Iyy: float = 4.856e-3
    Izz: float = 8.801e-3
    Ax: float = 0.25
    Ay: float = 0.25
    Az: float = 0.25

    def __post_init__(self):
        for name, value in self.__dict__.items():
            drag = name in ("Ax", "Ay", "Az")  # zero drag is a valid idealisation
            if not (np.isfinite(value) and (value >= 0 if drag else value > 0)):
                raise ValueError(f"DroneParams.{name} out of range: {value!r}")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.m, self.g, self.l, self.Ixx, self.Iyy, self.Izz, self.Ax, self.Ay, self.Az],
            dtype=np.float64,
        )

    @property
    def inertia(self) -> np.ndarray:
        return np.diag([self.Ixx, self.Iyy, self.Izz])


def _vec3(value) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64).reshape(3)
    return arr.copy()


@dataclass(frozen=True)
class DroneState:
    eps: np.ndarray = field(default_factory=lambda: np.zeros(3))
    eps_dot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    eta: np.ndarray = field(default_factory=lambda: np.zeros(3))
    eta_dot: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name in ("eps", "eps_dot", "eta", "eta_dot"):
            object.__setattr__(self, name, _vec3(getattr(self, name)))

    @classmethod
    def from_array(cls, x) -> DroneState:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (STATE_DIM,):
            raise ValueError(f"expected a {STATE_DIM}-vector, got shape {x.shape}")
        return cls(x[0:3], x[3:6], x[6:9], x[9:12])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.eps, self.eps_dot, self.eta, self.eta_dot])

    @property
    def body_rates(self) -> np.ndarray:
        """Body angular velocity [p, q, r] = W(eta) @ eta_dot."""
        return euler_rate_matrix(self.eta) @ self.eta_dot

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_array())))

    def __eq__(self, other):
        if not isinstance(other, DroneState):
            return NotImplemented
        return np.array_equal(self.as_array(), other.as_array())

    __hash__ = None


@dataclass(frozen=True)
class ControlInput:
    T: float = 0.0
    tau: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "tau", _vec3(self.tau))
        if not np.isfinite(self.T) or self.T < 0:
            raise ValueError(f"thrust must be finite and >= 0, got {self.T!r}")
        if not np.all(np.isfinite(self.tau)):
            raise ValueError("torques must be finite")

    @classmethod
    def hover(cls, params: DroneParams) -> ControlInput:
        return cls(params.m * params.g, np.zeros(3))

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.T], self.tau])


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def _rotation(phi, theta, psi):
    """Body-to-inertial rotation Rz(psi) @ Ry(theta) @ Rx(phi)."""
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    R = np.empty((3, 3))
    R[0, 0] = cp * ct
    R[0, 1] = cp * st * sf - sp * cf
    R[0, 2] = cp * st * cf + sp * sf
    R[1, 0] = sp * ct
    R[1, 1] = sp * st * sf + cp * cf
    R[1, 2] = sp * st * cf - cp * sf
    R[2, 0] = -st
    R[2, 1] = ct * sf
    R[2, 2] = ct * cf
    return R


@nb.njit(cache=True, nogil=True)
def _linear_accel(s, T, p, out):
    m, g = p[0], p[1]
    phi, theta, psi = s[6], s[7], s[8]
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    # only the third column of R is needed: R @ [0, 0, T/m]
    a = T / m
    out[0] = (cp * st * cf + sp * sf) * a - p[6] * s[3] / m
    out[1] = (sp * st * cf - cp * sf) * a - p[7] * s[4] / m
    out[2] = -g + ct * cf * a - p[8] * s[5] / m


@nb.njit(cache=True, nogil=True)
def _euler_rate_matrix(phi, theta):
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    W = np.zeros((3, 3))
    W[0, 0] = 1.0
    W[0, 2] = -st
    W[1, 1] = cf
    W[1, 2] = ct * sf
    W[2, 1] = -sf
    W[2, 2] = ct * cf
    return W


@nb.njit(cache=True, nogil=True)
def _sandwich(A, I, B):
    """A^T diag(I) B for 3x3 A, B."""
    out = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            acc = 0.0
            for k in range(3):
                acc += A[k, i] * I[k] * B[k, j]
            out[i, j] = acc
    return out


@nb.njit(cache=True, nogil=True)
def _jacobian_terms(phi, theta, I):
    """J = W^T I W and its partials with respect to phi and theta (J is psi-free)."""
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    W = _euler_rate_matrix(phi, theta)
    dW_phi = np.zeros((3, 3))
    dW_phi[1, 1] = -sf
    dW_phi[1, 2] = ct * cf
    dW_phi[2, 1] = -cf
    dW_phi[2, 2] = -ct * sf
    dW_theta = np.zeros((3, 3))
    dW_theta[0, 2] = -ct
    dW_theta[1, 2] = -st * sf
    dW_theta[2, 2] = -st * cf
    J = _sandwich(W, I, W)
    dJ = np.zeros((3, 3, 3))
    A = _sandwich(dW_phi, I, W)
    B = _sandwich(dW_theta, I, W)
    for i in range(3):
        for j in range(3):
            dJ[0, i, j] = A[i, j] + A[j, i]
            dJ[1, i, j] = B[i, j] + B[j, i]
    return J, dJ


@nb.njit(cache=True, nogil=True)
def _coriolis(dJ, eta_dot):
    """Coriolis matrix from the Euler-Lagrange equations of L = 1/2 eta_dot^T J eta_dot.

    C(eta, eta_dot) @ eta_dot = J_dot @ eta_dot - 1/2 d/deta (eta_dot^T J eta_dot), which
    expands entry-wise to

        C[i, j] = sum_k (dJ[i, j]/d eta_k - 1/2 dJ[j, k]/d eta_i) * eta_dot[k]

    with dJ/d eta_k = dW_k^T I W + W^T I dW_k and dJ/dpsi = 0. Nonzero partials of W:
        dW/dphi:   [1,1] = -sin(phi), [1,2] = cos(theta)cos(phi),
                   [2,1] = -cos(phi), [2,2] = -cos(theta)sin(phi)
        dW/dtheta: [0,2] = -cos(theta), [1,2] = -sin(theta)sin(phi),
                   [2,2] = -sin(theta)cos(phi)
    """
    C = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            acc = 0.0
            for k in range(3):
                t = 0.0
                if k < 2:
                    t += dJ[k, i, j]
                if i < 2:
                    t -= 0.5 * dJ[i, j, k]
                acc += t * eta_dot[k]
            C[i, j] = acc
    return C


@nb.njit(cache=True, nogil=True)
def _angular_accel(s, tau, p, out):
    """eta'' = J^-1 (tau - C eta') with J and C written out entry by entry.

    With I = diag(a, b, c) and J = W^T I W (symmetric, J01 = 0):
        J00 = a                 J02 = -a s_th
        J11 = b c_ph^2 + c s_ph^2
        J12 = (b - c) c_ph s_ph c_th
        J22 = a s_th^2 + (b s_ph^2 + c c_ph^2) c_th^2
    Only the phi and theta partials are nonzero. C eta' is assembled as
    J_dot eta' - 1/2 [eta'^T (dJ/d eta_i) eta']_i.
    """
    phi, theta = s[6], s[7]
    ct = np.cos(theta)
    if abs(ct) < GIMBAL_EPS:
        return SINGULAR
    a, b, c = p[3], p[4], p[5]
    cf, sf = np.cos(phi), np.sin(phi)
    st = np.sin(theta)
    dphi, dth, dpsi = s[9], s[10], s[11]

    j00 = a
    j02 = -a * st
    j11 = b * cf * cf + c * sf * sf
    j12 = (b - c) * cf * sf * ct
    j22 = a * st * st + (b * sf * sf + c * cf * cf) * ct * ct

    # partials w.r.t. phi
    p11 = 2.0 * (c - b) * sf * cf
    p12 = (b - c) * ct * (cf * cf - sf * sf)
    p22 = 2.0 * (b - c) * sf * cf * ct * ct
    # partials w.r.t. theta
    q02 = -a * ct
    q12 = -(b - c) * cf * sf * st
    q22 = 2.0 * a * st * ct - 2.0 * (b * sf * sf + c * cf * cf) * st * ct

    # J_dot = dphi * dJ/dphi + dth * dJ/dtheta
    d02 = dth * q02
    d11 = dphi * p11
    d12 = dphi * p12 + dth * q12
    d22 = dphi * p22 + dth * q22
    jd0 = d02 * dpsi
    jd1 = d11 * dth + d12 * dpsi
    jd2 = d02 * dphi + d12 * dth + d22 * dpsi

    # quadratic forms eta'^T (dJ/d eta_i) eta'
    qf_phi = p11 * dth * dth + 2.0 * p12 * dth * dpsi + p22 * dpsi * dpsi
    qf_th = 2.0 * q02 * dphi * dpsi + 2.0 * q12 * dth * dpsi + q22 * dpsi * dpsi

    r0 = tau[0] - (jd0 - 0.5 * qf_phi)
    r1 = tau[1] - (jd1 - 0.5 * qf_th)
    r2 = tau[2] - jd2

    # Cramer on the symmetric J with J01 = J10 = 0
    c00 = j11 * j22 - j12 * j12
    c01 = j12 * j02
    c02 = -j11 * j02
    det = j00 * c00 + j02 * c02
    c11 = j00 * j22 - j02 * j02
    c12 = -j00 * j12
    c22 = j00 * j11
    out[0] = (c00 * r0 + c01 * r1 + c02 * r2) / det
    out[1] = (c01 * r0 + c11 * r1 + c12 * r2) / det
    out[2] = (c02 * r0 + c12 * r1 + c22 * r2) / det
    return OK


@nb.njit(cache=True, nogil=True)
def _derivative(s, T, tau, p, ds):
    for i in range(3):
        ds[i] = s[3 + i]
        ds[6 + i] = s[9 + i]
    _linear_accel(s, T, p, ds[3:6])
    return _angular_accel(s, tau, p, ds[9:12])


@nb.njit(cache=True, nogil=True)
def _rk4_step_ws(s, T, tau, p, dt, out, ws):
    """RK4 step using a caller-owned (5, 12) workspace."""
    k1, k2, k3, k4, tmp = ws[0], ws[1], ws[2], ws[3], ws[4]
    if _derivative(s, T, tau, p, k1) != OK:
        return SINGULAR
    for i in range(STATE_DIM):
        tmp[i] = s[i] + 0.5 * dt * k1[i]
    if _derivative(tmp, T, tau, p, k2) != OK:
        return SINGULAR
    for i in range(STATE_DIM):
        tmp[i] = s[i] + 0.5 * dt * k2[i]
    if _derivative(tmp, T, tau, p, k3) != OK:
        return SINGULAR
    for i in range(STATE_DIM):
        tmp[i] = s[i] + dt * k3[i]
    if _derivative(tmp, T, tau, p, k4) != OK:
        return SINGULAR
    for i in range(STATE_DIM):
        out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if not np.isfinite(out[i]):
            return NONFINITE
    return OK


@nb.njit(cache=True, nogil=True)
def _rk4_step(s, T, tau, p, dt, out):
    return _rk4_step_ws(s, T, tau, p, dt, out, np.empty((5, STATE_DIM)))


# --------------------------------------------------------------------------
# public surface
# --------------------------------------------------------------------------


def rotation_matrix(eta) -> np.ndarray:
    """Body-to-inertial rotation for ZYX Euler angles ``eta = (phi, theta, psi)``."""
    phi, theta, psi = (float(a) for a in np.asarray(eta, dtype=np.float64).reshape(3))
    return _rotation(phi, theta, psi)


def euler_rate_matrix(eta) -> np.ndarray:
    """W(eta) mapping Euler-angle rates to body rates."""
    phi, theta, _ = (float(a) for a in np.asarray(eta, dtype=np.float64).reshape(3))
    return _euler_rate_matrix(phi, theta)


def euler_jacobian(eta, params: DroneParams) -> np.ndarray:
    """J(eta) = W^T I W."""
    phi, theta, _ = (float(a) for a in np.asarray(eta, dtype=np.float64).reshape(3))
    J, _ = _jacobian_terms(phi, theta, params.as_array()[3:6])
    return J


def coriolis_matrix(eta, eta_dot, params: DroneParams) -> np.ndarray:
    phi, theta, _ = (float(a) for a in np.asarray(eta, dtype=np.float64).reshape(3))
    _, dJ = _jacobian_terms(phi, theta, params.as_array()[3:6])
    return _coriolis(dJ, np.asarray(eta_dot, dtype=np.float64).reshape(3).copy())


def linear_accel(state: DroneState, u: ControlInput, params: DroneParams) -> np.ndarray:
    out = np.empty(3)
    _linear_accel(state.as_array(), u.T, params.as_array(), out)
    return out


def angular_accel(state: DroneState, u: ControlInput, params: DroneParams) -> np.ndarray:
    out = np.empty(3)
    if _angular_accel(state.as_array(), u.tau, params.as_array(), out) != OK:
        raise SingularJacobianError(f"|cos(theta)| < {GIMBAL_EPS} at theta={state.eta[1]!r}")
    return out


def step(state: DroneState, u: ControlInput, params: DroneParams, dt: float = 0.01) -> DroneState:
    """Advance the state by one RK4 step with the input held constant."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    out = np.empty(STATE_DIM)
    status = _rk4_step(state.as_array(), u.T, u.tau, params.as_array(), float(dt), out)
    if status == SINGULAR:
        raise SingularJacobianError("gimbal guard tripped during RK4 stage evaluation")
    if status == NONFINITE:
        raise NonFiniteStateError("state left the finite range")
    return DroneState.from_array(out)
