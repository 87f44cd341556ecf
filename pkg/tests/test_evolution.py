import math

import numpy as np
import pytest

from inls_lab import Field, NumericsError, StepPolicy, ValidationError, evolve
from inls_lab.evolution import EvolutionState, step
from inls_lab.exact import standing_wave
from inls_lab import functionals as fn


def test_zero_field_is_fixed_point(plain_line):
    params, grid = plain_line
    state = EvolutionState(field=Field(np.zeros(grid.n, dtype=complex), grid, params), dt=1e-3)
    out = step(state)
    assert np.all(out.field.values == 0)
    assert out.time == pytest.approx(1e-3)
    assert out.step_count == 1


def test_constant_field_pure_phase_rotation(plain_line):
    # b = 0: the potential phase is spatially constant, the Laplacian vanishes
    params, grid = plain_line
    c = 0.7 + 0.1j
    state = EvolutionState(field=Field(np.full(grid.n, c), grid, params), dt=1e-3)
    out = step(state)
    expected = c * np.exp(1j * 1e-3 * abs(c) ** (2 * params.sigma))
    assert np.max(np.abs(out.field.values - expected)) < 1e-13


def test_nan_detection(plain_line):
    params, grid = plain_line
    vals = np.ones(grid.n, dtype=complex)
    vals[3] = np.nan
    state = EvolutionState(field=Field(vals, grid, params), dt=1e-3)
    with pytest.raises(NumericsError):
        step(state)


def test_step_requires_positive_dt(plain_line):
    params, grid = plain_line
    state = EvolutionState(field=Field(np.ones(grid.n, dtype=complex), grid, params))
    with pytest.raises(ValidationError):
        step(state)


def test_standing_wave_short_run(quintic_gs):
    u0 = standing_wave(quintic_gs, 0.0)
    traj = evolve(u0, StepPolicy(dt0=1e-3, c_dt=1e9, theta=1e9, t_end=0.1, sample_every=20))
    final = traj.samples[-1]
    ref = standing_wave(quintic_gs, final.time)
    diff = final.snapshot if final.snapshot else None
    assert traj.termination == "t_end"
    assert abs(final.mass - traj.initial_mass) / traj.initial_mass < 1e-10
    g0 = fn.grad_norm_sq(u0)
    assert final.grad_norm_sq == pytest.approx(g0, rel=1e-4)


def test_free_gaussian_width_law(plain_line):
    # amplitude 1e-6 turns the nonlinearity off; the density variance obeys
    # sigma^2(t) = sigma^2(0) (1 + t^2 / sigma^4(0))
    params, grid = plain_line
    u0 = Field(1e-6 * np.exp(-grid.nodes ** 2 / 2).astype(complex), grid, params)
    s0 = fn.variance(u0) / fn.mass(u0)
    traj = evolve(u0, StepPolicy(dt0=5e-4, c_dt=1e9, theta=1e9, t_end=1.0, sample_every=100))
    final = traj.samples[-1]
    s_t = final.variance / final.mass
    predicted = s0 * (1 + final.time ** 2 / s0 ** 2)
    assert s_t == pytest.approx(predicted, rel=1e-4)


def test_subthreshold_runs_to_t_end(quintic_gs):
    u0 = quintic_gs.profile.with_values(0.5 * quintic_gs.profile.values.astype(complex))
    traj = evolve(u0, StepPolicy(dt0=1e-3, c_dt=5e-3, theta=0.5, t_end=0.5, sample_every=20))
    assert traj.termination == "t_end"
    gnorms = traj.grad_norms()
    assert gnorms.max() < 4 * gnorms[0]     # global regime: no collapse
    assert not traj.mass_drift_flag


def test_supercritical_hits_resolution_limit(quintic_gs):
    u0 = quintic_gs.profile.with_values(1.05 * quintic_gs.profile.values.astype(complex))
    traj = evolve(u0, StepPolicy(dt0=5e-4, c_dt=5e-3, theta=0.15, t_end=10.0, sample_every=10))
    assert traj.termination == "resolution_limit"
    gnorms = traj.grad_norms()
    # gradient growth is monotone over the final stretch of the collapse
    tail = gnorms[-10:]
    assert np.all(np.diff(tail) > -1e-9)
    assert gnorms[-1] * u0.grid.spacing > 0.15


def test_adaptive_dt_follows_gradient(quintic_gs):
    u0 = quintic_gs.profile.with_values(1.05 * quintic_gs.profile.values.astype(complex))
    policy = StepPolicy(dt0=5e-4, c_dt=5e-3, theta=0.15, t_end=10.0, sample_every=10)
    traj = evolve(u0, policy)
    for s in traj.samples[2:]:
        if s.dt > 0:
            assert s.dt <= policy.dt0 + 1e-15


def test_singular_weight_standing_wave_regression(line_b_gs):
    """With b > 0 the splitting keeps mass exact but loses its formal order
    at the singular origin cells; this pins the honestly measured level."""
    u0 = standing_wave(line_b_gs, 0.0)
    traj = evolve(u0, StepPolicy(dt0=1e-4, c_dt=1e9, theta=1e9, t_end=0.1,
                                 sample_every=500, snapshot_every=10 ** 6))
    final = traj.samples[-1]
    assert abs(final.mass - traj.initial_mass) / traj.initial_mass < 1e-10
    ref = standing_wave(line_b_gs, final.time)
    diff = final.snapshot.with_values(final.snapshot.values - ref.values)
    rel = math.sqrt(fn.mass(diff) / traj.initial_mass)
    assert rel < 1e-2          # measured ~3e-3 at n=8192, dt=1e-4, t=0.1
    # the radiated defect carries O(1) gradient energy; only mass survives
    # as a clean invariant here (see b=0 runs for the clean-order gates)


def test_trajectory_times_strictly_increasing(quintic_gs):
    u0 = standing_wave(quintic_gs, 0.0)
    traj = evolve(u0, StepPolicy(dt0=1e-3, c_dt=1e9, theta=1e9, t_end=0.05, sample_every=7))
    ts = traj.times()
    assert np.all(np.diff(ts) > 0)


def test_policy_validation():
    with pytest.raises(ValidationError):
        StepPolicy(dt0=-1e-3)
    with pytest.raises(ValidationError):
        StepPolicy(theta=1e9, t_end=None)


def test_snapshots_recorded_on_cadence(quintic_gs):
    u0 = standing_wave(quintic_gs, 0.0)
    traj = evolve(
        u0, StepPolicy(dt0=1e-3, c_dt=1e9, theta=1e9, t_end=0.05,
                       sample_every=10, snapshot_every=2)
    )
    snaps = traj.snapshots()
    assert len(snaps) >= 2
    assert snaps[-1].time == traj.samples[-1].time   # final state always kept
