import numpy as np
import pytest

from grflab.flow import (FlowBlowup, FlowState, dual_path_residual, frame_db,
                         grf_rhs, run_flow, soliton_residual, step_rk4)
from grflab.tensors import SingularMetric


def round_state(eps=0.0, h0=2.0):
    return FlowState(g=np.diag([1.0 + eps, 1.0, 1.0]), b=np.zeros((3, 3)),
                     H0_coeff=h0)


def test_fixed_point():
    dg, db = grf_rhs(round_state())
    assert np.abs(dg).max() == 0.0
    assert np.abs(db).max() == 0.0
    assert soliton_residual(round_state()) == 0.0


def test_invariant_two_forms_are_closed():
    rng = np.random.default_rng(0)
    for _ in range(5):
        b = rng.normal(size=(3, 3))
        b = b - b.T
        assert np.abs(frame_db(b)).max() < 1e-14


def test_torsion_free_reduction():
    dg, db = grf_rhs(round_state(h0=0.0))
    # plain Ricci flow of the round sphere: dg = -2 Rc = -4 g
    assert np.allclose(dg, -4.0 * np.eye(3))
    assert np.abs(db).max() == 0.0


def test_dual_path_identity_random_states():
    rng = np.random.default_rng(1)
    for _ in range(10):
        d = 1.0 + rng.uniform(-0.4, 0.8, 3)
        b = rng.normal(size=(3, 3)) * 0.2
        b = b - b.T
        s = FlowState(g=np.diag(d), b=b, H0_coeff=rng.uniform(0.5, 2.5))
        assert dual_path_residual(s) < 1e-12


def test_singular_metric():
    with pytest.raises(SingularMetric):
        grf_rhs(FlowState(g=np.diag([1.0, -1.0, 1.0]), b=np.zeros((3, 3)),
                          H0_coeff=2.0))


def test_rk4_order_by_step_halving():
    def integrate(dt, n):
        s = round_state(eps=0.2)
        for _ in range(n):
            s = step_rk4(s, dt)
        return s.g

    ref = integrate(0.0025, 80)
    e1 = np.abs(integrate(0.01, 20) - ref).max()
    e2 = np.abs(integrate(0.005, 40) - ref).max()
    assert e1 / e2 > 12  # fourth order: ratio near 16 (reference error shrinks it)


def test_berger_run_monotone():
    traj = run_flow(round_state(eps=0.01), 1e-3, 3000, sample_every=300)
    lams = traj.lambdas()
    res = traj.residuals()
    assert all(b >= a - 1e-8 for a, b in zip(lams, lams[1:]))
    assert all(b <= a + 1e-12 for a, b in zip(res[1:], res[2:]))
    assert res[-1] < res[0]
    assert abs(lams[-1] - 4.0) < 1e-6
    assert traj.times() == sorted(traj.times())


def test_blowup_detected():
    # torsion-free round sphere collapses in finite time under plain Ricci flow
    with pytest.raises(FlowBlowup) as exc:
        run_flow(round_state(h0=0.0), 1e-3, 400, sample_every=100)
    assert exc.value.trajectory.samples  # partial trajectory retained


def test_bad_dt():
    with pytest.raises(ValueError):
        run_flow(round_state(), -1.0, 10)
