"""Unit tests for the Lagrangian integrator."""
import math

import numpy as np
import pytest

from _oracles import ellipse_semiaxes_closed
from cauchyflow.complexfield import KernelSpec
from cauchyflow.dynamics import (BlowupError, SimState, StepConfig,
                                 load_checkpoint, run, save_checkpoint, step)
from cauchyflow.vorticity import Disk, VorticityGrid, make_indicator, to_blobs

CAUCHY = KernelSpec("cauchy", 0.0)
EULER = KernelSpec("euler", 0.0)


def disk_blobs(spacing=0.1):
    n = int(round(2.4 / spacing))
    grid = make_indicator(Disk(1.0), 1.0, VorticityGrid.empty_centered(1.2, n))
    return to_blobs(grid)


def coarse_cfg(**kw):
    kw.setdefault("dt", 0.1)
    kw.setdefault("blob_radius", 0.15)
    return StepConfig(**kw)


# ---------------------------------------------------------------------------
# configuration invariants
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("bad", [
    dict(dt=0.0), dict(dt=-0.1), dict(dt=0.1, blob_radius=0.0),
    dict(dt=0.1, scheme="euler_fwd"), dict(dt=0.1, divergence_mode="spectral"),
])
def test_step_config_validation(bad):
    with pytest.raises(ValueError):
        StepConfig(**bad)


def test_fd_eta_defaults_to_three_radii():
    assert StepConfig(dt=0.1, blob_radius=0.05).eta == pytest.approx(0.15)
    assert StepConfig(dt=0.1, blob_radius=0.05, fd_eta=0.02).eta == 0.02


def test_run_rejects_non_multiple_t_end():
    with pytest.raises(ValueError):
        run(disk_blobs(0.3), CAUCHY, coarse_cfg(), 0.25)
    with pytest.raises(ValueError):
        run(disk_blobs(0.3), CAUCHY, coarse_cfg(), 0.3,
            sample_times=[0.17])


# ---------------------------------------------------------------------------
# time bookkeeping
# ---------------------------------------------------------------------------

def test_time_is_exact_step_multiple():
    times = []
    run(disk_blobs(0.3), CAUCHY, coarse_cfg(dt=0.05), 0.3,
        observers=[lambda st, _r: times.append(st.t)],
        sample_times=[0.0, 0.15, 0.3])
    # t carries one rounding (step_count * dt), never accumulation drift
    assert times == [0.0, 3 * 0.05, 6 * 0.05]


def test_step_returns_new_state():
    state = SimState.from_blobs(disk_blobs(0.3), CAUCHY)
    z_before = state.z.copy()
    out = step(state, coarse_cfg())
    assert out is not state
    assert np.array_equal(state.z, z_before)
    assert out.step_count == 1 and out.t == pytest.approx(0.1)


# ---------------------------------------------------------------------------
# physics invariants
# ---------------------------------------------------------------------------

def test_euler_mode_conserves_measure():
    blobs = disk_blobs(0.15)
    final = {}
    run(blobs, EULER, coarse_cfg(dt=0.1), 0.5,
        observers=[lambda st, _r: final.update(state=st)])
    st = final["state"]
    # divergence-free velocity: Jacobians stay exactly 1, so the L1 mass
    # and blob support area are bit-identical to their initial values
    assert np.all(st.logj == 0.0)
    m0 = sum(b.omega * b.area0 for b in blobs)
    assert np.sum(st.masses()) == pytest.approx(m0, abs=1e-12)


def test_euler_rankine_rotates_rigidly():
    # inside a uniform disk the Euler field is rigid rotation at rate 1/2
    blobs = disk_blobs(0.15)
    final = {}
    run(blobs, EULER, coarse_cfg(dt=0.05), 1.0,
        observers=[lambda st, _r: final.update(state=st)])
    z0 = np.array([b.position for b in blobs])
    inner = np.abs(z0) < 0.6
    expect = z0[inner] * np.exp(1j * 0.5)
    err = np.abs(final["state"].z[inner] - expect).max()
    assert err < 2e-3


def test_cauchy_disk_semiaxes_short_run():
    blobs = disk_blobs(0.1)
    final = {}
    run(blobs, CAUCHY, coarse_cfg(dt=0.05, fd_eta=0.1), 0.5,
        observers=[lambda st, _r: final.update(state=st)])
    z0 = np.array([b.position for b in blobs])
    z1 = final["state"].z
    a_ref, b_ref = ellipse_semiaxes_closed(0.5)
    a = math.sqrt(np.mean(z1.real ** 2) / np.mean(z0.real ** 2))
    b = math.sqrt(np.mean(z1.imag ** 2) / np.mean(z0.imag ** 2))
    assert abs(a / a_ref - 1) < 0.02 and abs(b / b_ref - 1) < 0.02


def test_rk4_order_against_fine_reference():
    blobs = disk_blobs(0.2)
    def final_z(dt):
        out = {}
        run(blobs, CAUCHY, coarse_cfg(dt=dt, blob_radius=0.3), 0.5,
            observers=[lambda st, _r: out.update(state=st)])
        return out["state"].z
    ref = final_z(0.03125)
    e1 = np.abs(final_z(0.25) - ref).max()
    e2 = np.abs(final_z(0.125) - ref).max()
    # halving dt shrinks the error ~16x for rk4
    assert 8.0 <= e1 / e2 <= 32.0


def test_rk2_less_accurate_than_rk4():
    blobs = disk_blobs(0.25)
    def final_z(scheme):
        out = {}
        run(blobs, CAUCHY, coarse_cfg(dt=0.25, blob_radius=0.4,
                                      scheme=scheme), 0.5,
            observers=[lambda st, _r: out.update(state=st)])
        return out["state"].z
    out = {}
    run(blobs, CAUCHY, coarse_cfg(dt=0.015625, blob_radius=0.4), 0.5,
        observers=[lambda st, _r: out.update(state=st)])
    ref = out["state"].z
    assert (np.abs(final_z("rk2") - ref).max()
            > 5.0 * np.abs(final_z("rk4") - ref).max())


def test_negative_time_reverses_flow():
    blobs = disk_blobs(0.15)
    cfg = coarse_cfg(dt=0.05)
    fwd = {}
    run(blobs, CAUCHY, cfg, 0.5,
        observers=[lambda st, _r: fwd.update(state=st)])
    back = {}
    run(fwd["state"].blobs, CAUCHY, cfg, -0.5,
        observers=[lambda st, _r: back.update(state=st)])
    z0 = np.array([b.position for b in blobs])
    assert np.abs(back["state"].z - z0).max() < 5e-5
    assert np.abs(back["state"].logj).max() < 5e-5


# ---------------------------------------------------------------------------
# blow-up policy
# ---------------------------------------------------------------------------

def test_vmax_abort_raises():
    state = SimState.from_blobs(disk_blobs(0.3), CAUCHY)
    with pytest.raises(BlowupError):
        step(state, coarse_cfg(vmax_abort=1e-9))


def test_nonfinite_positions_raise():
    state = SimState.from_blobs(disk_blobs(0.3), CAUCHY)
    state.z[0] = complex("nan")
    with pytest.raises(BlowupError):
        step(state, coarse_cfg())


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

def test_checkpoint_roundtrip(tmp_path):
    state = SimState.from_blobs(disk_blobs(0.3), CAUCHY)
    state = step(state, coarse_cfg())
    path = tmp_path / "c.csv"
    save_checkpoint(state, path)
    back = load_checkpoint(path, CAUCHY, t=state.t)
    assert np.array_equal(back.z, state.z)
    assert np.array_equal(back.omega, state.omega)
    assert np.allclose(back.logj, state.logj, atol=1e-15)
    assert back.t == state.t
