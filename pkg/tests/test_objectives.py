import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadtune.control import PdGains, Reference, Trajectory, simulate
from quadtune.objectives import (
    PENALTY,
    ObjectiveVector,
    Weights,
    aggregate,
    evaluate_objectives,
    tracking_errors,
)


def _constant_error_traj(err, n, dt, ref=Reference()):
    """Trajectory whose tracked columns sit at a fixed offset from the reference."""
    states = np.zeros((n, 12))
    states[:, 6] = ref.phi_d + err[0]
    states[:, 7] = ref.theta_d + err[1]
    states[:, 8] = ref.psi_d + err[2]
    states[:, 2] = ref.z_d + err[3]
    return Trajectory(np.arange(n) * dt, states, np.zeros((n, 4)), True, dt)


def test_zero_error_is_zero():
    traj = _constant_error_traj((0, 0, 0, 0), 50, 0.01)
    assert evaluate_objectives(traj, Reference()).as_array().tolist() == [0, 0, 0, 0]


def test_altitude_offset_for_two_seconds():
    traj = _constant_error_traj((0, 0, 0, -1.0), 201, 0.01)
    obj = evaluate_objectives(traj, Reference())
    assert obj.f4 == 2.0
    assert (obj.f1, obj.f2, obj.f3) == (0, 0, 0)


@given(
    st.tuples(*[st.sampled_from([0.0, 0.25, -0.5, 1.0, -3.0, 0.1])] * 4),
    st.integers(2, 400),
    st.sampled_from([0.01, 0.005, 0.02, 0.125]),
)
def test_constant_error_rectangle_rule(err, n, dt):
    # n samples span n - 1 intervals; the last sample carries no weight
    ref = Reference(z_d=0.5, phi_d=-0.25)
    traj = _constant_error_traj(err, n, dt, ref)
    got = evaluate_objectives(traj, ref).as_array()
    states = traj.states
    want = [
        sum(abs(states[k, c] - r) for k in range(n - 1)) * dt
        for c, r in zip((6, 7, 8, 2), ref.as_array())
    ]
    assert got.tolist() == want


def test_last_sample_ignored():
    traj = _constant_error_traj((0, 0, 0, 0), 10, 0.1)
    traj.states[-1, 2] = 100.0
    assert evaluate_objectives(traj, Reference()).f4 == 0


def test_unstable_gets_penalty():
    out = tracking_errors(np.zeros((3, 12)), np.zeros(4), 0.01, stable=False)
    assert out.tolist() == [PENALTY] * 4
    assert ObjectiveVector.penalty().as_array().tolist() == [PENALTY] * 4


def test_aggregate_examples():
    assert aggregate(ObjectiveVector(1, 2, 3, 4)) == 10
    assert aggregate([1, 2, 3, 4], Weights(0, 0, 0, 1)) == 4
    assert aggregate([0, 0, 0, 0], Weights(0.3, 2, 5, 1)) == 0


def test_weights_validation():
    with pytest.raises(ValueError):
        Weights(-1, 1, 1, 1)
    with pytest.raises(ValueError):
        Weights(0, 0, 0, 0)


def test_conventional_baseline_cost():
    # pinned regression value for the default simulation setup
    obj = evaluate_objectives(simulate(PdGains.conventional()), Reference())
    assert aggregate(obj) == pytest.approx(3.9464667, rel=1e-6)


@pytest.mark.xfail(strict=True, reason="reported baseline depends on an unstated control law and horizon")
def test_conventional_baseline_matches_reported_value():
    obj = evaluate_objectives(simulate(PdGains.conventional()), Reference())
    assert aggregate(obj) == pytest.approx(0.3911, rel=0.1)
