import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadtune.control import (
    AttitudeSingularityError,
    PdGains,
    Reference,
    Trajectory,
    default_initial_state,
    pd_law,
    read_trajectory_csv,
    simulate,
    write_trajectory_csv,
)
from quadtune.dynamics import DroneParams, DroneState

P = DroneParams()
PD = PdGains.conventional()


def test_zero_error_gives_hover():
    ref = Reference(z_d=2.0, psi_d=0.3)
    u = pd_law(ref.equilibrium(), ref, PD, P)
    assert u.T == pytest.approx(P.m * P.g, rel=1e-15)
    assert np.array_equal(u.tau, np.zeros(3))


def test_altitude_error_thrust():
    s = DroneState(eps=[0, 0, -1.0])
    u = pd_law(s, Reference(), PD, P)
    assert u.T == pytest.approx(0.468 * (9.81 + 1.5 * 1), rel=1e-14)
    assert u.T == pytest.approx(5.293, abs=1e-3)


def test_roll_error_torque():
    s = DroneState(eta=[-0.7, 0, 0])
    u = pd_law(s, Reference(), PD, P)
    assert u.tau[0] == pytest.approx(4.856e-3 * 6 * 0.7, rel=1e-14)
    assert u.tau[0] == pytest.approx(0.0204, abs=5e-5)
    assert u.tau[1] == u.tau[2] == 0


def test_thrust_clamped():
    u = pd_law(DroneState(eps=[0, 0, -100.0]), Reference(), PD, P)
    assert u.T == 4 * P.m * P.g
    u = pd_law(DroneState(eps=[0, 0, 100.0]), Reference(), PD, P)
    assert u.T == 0


def test_cos_guard():
    with pytest.raises(AttitudeSingularityError):
        pd_law(DroneState(eta=[np.pi / 2, 0, 0]), Reference(), PD, P)


def test_equilibrium_is_fixed_point():
    # level attitude: any roll or pitch setpoint would push the craft sideways
    ref = Reference(z_d=1.0, psi_d=0.2)
    traj = simulate(PD, ref, ref.equilibrium(), t_final=2.0)
    assert traj.stable
    assert np.abs(traj.states - ref.equilibrium().as_array()).max() < 1e-9


def test_conventional_gains_settle():
    traj = simulate(PD)
    assert traj.stable and len(traj) == 1001
    init = default_initial_state().as_array()
    final = traj.states[-1]
    # within 2% of the initial offset from the zero reference
    for col in (2, 6, 7, 8):
        assert abs(final[col]) < 0.02 * abs(init[col])


def test_zero_gains_do_not_regulate():
    traj = simulate(PdGains.from_array(np.zeros(8)))
    assert not traj.stable or abs(traj.states[-1, 6]) >= 0.05


def test_divergent_gains_are_truncated_and_flagged():
    # extreme gains with a coarse step blow up the attitude loop
    traj = simulate(PdGains(400, 0, 400, 0, 400, 0, 3, 0), dt=0.05, t_final=5.0)
    assert not traj.stable
    assert len(traj) < 101


def test_simulate_validates_step():
    with pytest.raises(ValueError):
        simulate(PD, dt=0)
    with pytest.raises(ValueError):
        simulate(PD, dt=0.1, t_final=0.01)


def test_gains_validation():
    with pytest.raises(ValueError):
        PdGains.from_array([1] * 7)
    with pytest.raises(ValueError):
        PdGains(-1, 0, 0, 0, 0, 0, 0, 0)


@given(st.lists(st.floats(0, 20), min_size=8, max_size=8))
def test_gains_round_trip(values):
    assert PdGains.from_array(values).as_array().tolist() == values


def test_trajectory_csv_round_trip(tmp_path):
    traj = simulate(PD, t_final=0.5)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, path)
    back = read_trajectory_csv(path)
    assert np.array_equal(back.times, traj.times)
    assert np.array_equal(back.states, traj.states)
    assert np.array_equal(back.inputs, traj.inputs)


def test_trajectory_shape_checked():
    with pytest.raises(ValueError):
        Trajectory(np.zeros(3), np.zeros((2, 12)), np.zeros((3, 4)), True, 0.01)
