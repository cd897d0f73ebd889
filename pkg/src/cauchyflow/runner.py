"""Scenario execution: wiring configs into the simulator and studies.

Used by the CLI and directly by the test suite.
"""
from __future__ import annotations

import math
import os
from dataclasses import replace

import numpy as np

from .complexfield import KernelSpec, linfty_bound
from .config import ScenarioConfig
from .dynamics import StepConfig, run, save_checkpoint
from .flowdiag import FlowDiagObserver, NormBoundsObserver, make_tracers
from .report import DiagnosticsReport
from .velform import (MTheta, curl_mtheta_check, formulation_residual,
                      snapshot_from_state)
from .vorticity import (Disk, Ellipse, MollifierSpec, RectUnion,
                        VorticityGrid, deposit_blobs, make_gaussian,
                        make_indicator, mollify, stats, to_blobs)

__all__ = ["build_initial", "run_scenario", "converge_study",
           "velform_study"]


def build_initial(cfg: ScenarioConfig):
    """Initial scalar field from a scenario config.

    Returns (omega0_raw, omega0) — the datum before and after mollification
    (norm bounds use sup|omega0_raw| and the mollified support, matching the
    construction the growth estimates are stated for).
    """
    geom = VorticityGrid.empty_centered(cfg.grid_extent, cfg.grid_n)
    if cfg.shape == "disk":
        raw = make_indicator(Disk(cfg.radius, cfg.center), cfg.amplitude,
                             geom)
    elif cfg.shape == "ellipse":
        raw = make_indicator(Ellipse(cfg.a, cfg.b, cfg.center),
                             cfg.amplitude, geom)
    elif cfg.shape == "rects":
        raw = make_indicator(RectUnion(cfg.rects), cfg.amplitude, geom)
    elif cfg.shape == "gaussian":
        raw = make_gaussian(cfg.amplitude, cfg.width, geom,
                            center=cfg.center)
    elif cfg.shape == "two_disks":
        values = np.zeros((geom.ny, geom.nx))
        amps = cfg.amplitudes or tuple(cfg.amplitude
                                       for _ in cfg.centers)
        for (cx, cy), amp in zip(cfg.centers, amps):
            values += make_indicator(Disk(cfg.radius, complex(cx, cy)),
                                     amp, geom).values
        raw = VorticityGrid(geom.origin, geom.h, geom.nx, geom.ny, values)
    else:
        raise ValueError("unsupported shape %r" % cfg.shape)
    if cfg.mollify_epsilon > 0:
        return raw, mollify(raw, MollifierSpec(cfg.mollify_epsilon))
    return raw, raw


def _blob_lattice(cfg: ScenarioConfig):
    """Blob discretization of the initial datum at the requested blob
    spacing: the datum is rebuilt (shape evaluation plus mollification) on
    a grid of that spacing, so the particle lattice resolves the data
    boundary at its own resolution, independent of the diagnostic grid."""
    n = int(round(2 * cfg.grid_extent / cfg.blob_spacing))
    _, omega = build_initial(replace(cfg, grid_n=n))
    return to_blobs(omega)


def _observers(cfg: ScenarioConfig, omega0_raw, omega0, kernel, blobs=()):
    # The blob lattice samples the datum at its own points, which may catch
    # a slightly higher sup than the diagnostic grid (e.g. a Gaussian peak
    # between cell centers); growth bounds must use the larger value.
    linf0 = max(float(np.abs(omega0_raw.values).max(initial=0.0)),
                max((abs(b.omega) for b in blobs), default=0.0))
    st0 = stats(omega0)
    obs = [NormBoundsObserver(linf0=linf0, support_area0=st0.support_area,
                              blob_radius=cfg.blob_radius,
                              tol_rel=cfg.tol_rel)]
    if cfg.tracers_enabled:
        obs.append(FlowDiagObserver(
            omega0=omega0, kernel=kernel,
            support_centroid=st0.centroid, support_radius=st0.support_radius,
            tol_rel=cfg.tol_rel, tol_conformal=cfg.tol_conformal,
            pointwise_tol_rel=cfg.pointwise_tol_rel,
            conformal_margin=cfg.conformal_margin,
            area_factor=cfg.area_factor,
            farfield_b_zero=cfg.farfield_b_zero,
            quasi_triples=cfg.quasi_triples, quasi_seed=cfg.quasi_seed,
            blob_radius=cfg.blob_radius))
    return obs, linf0, st0


def _scale_tolerances(cfg: ScenarioConfig, tol_scale: float):
    if tol_scale == 1.0:
        return cfg
    return replace(cfg, tol_rel=cfg.tol_rel * tol_scale,
                   tol_conformal=cfg.tol_conformal * tol_scale,
                   pointwise_tol_rel=cfg.pointwise_tol_rel * tol_scale)


def run_scenario(cfg: ScenarioConfig, out_dir=None, tol_scale: float = 1.0):
    """Execute a configured scenario with full diagnostics.

    Returns (report, final_state).  When ``out_dir`` is given, writes
    report.csv, summary.txt and (if enabled) blobs_t*.csv checkpoints.
    """
    cfg = _scale_tolerances(cfg, tol_scale)
    kernel = KernelSpec(kind=cfg.kernel_kind, theta=cfg.theta)
    omega0_raw, omega0 = build_initial(cfg)
    blobs = _blob_lattice(cfg)
    obs, linf0, st0 = _observers(cfg, omega0_raw, omega0, kernel, blobs)

    tracers = None
    if cfg.tracers_enabled:
        tracers = make_tracers(omega0, cfg.tracer_extent, cfg.tracer_spacing,
                               far_radii=cfg.far_radii,
                               far_count=cfg.far_count,
                               near_jump=cfg.near_jump,
                               center=st0.centroid)

    vbound = (math.sqrt(2.0 / math.pi) * math.exp(cfg.t_end / 2.0 * linf0)
              * linf0 * math.sqrt(st0.support_area))
    step_cfg = StepConfig(dt=cfg.dt, scheme=cfg.scheme,
                          blob_radius=cfg.blob_radius,
                          divergence_mode=cfg.divergence_mode,
                          fd_eta=cfg.fd_eta,
                          vmax_abort=10.0 * vbound if vbound > 0 else None)

    if out_dir and cfg.write_checkpoints:
        os.makedirs(out_dir, exist_ok=True)

        def checkpoint(state, report):
            save_checkpoint(state, os.path.join(
                out_dir, "blobs_t%g.csv" % state.t))
        obs = obs + [checkpoint]

    report = DiagnosticsReport(scenario={
        "name": cfg.name, "kernel": cfg.kernel_kind, "theta": cfg.theta,
        "shape": cfg.shape, "blob_spacing": cfg.blob_spacing,
        "dt": cfg.dt, "t_end": cfg.t_end,
        "mollify_epsilon": cfg.mollify_epsilon})

    final = {}

    def capture(state, _report):
        final["state"] = state
    report = run(blobs, kernel, step_cfg, cfg.t_end,
                 observers=obs + [capture], tracers=tracers,
                 sample_times=sorted(set(cfg.sample_times) | {0.0}),
                 report=report)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        report.to_csv(os.path.join(out_dir, "report.csv"))
        report.write_summary(os.path.join(out_dir, "summary.txt"))
    return report, final["state"]


def _final_state(cfg: ScenarioConfig):
    """Run without diagnostics; returns the final state."""
    kernel = KernelSpec(kind=cfg.kernel_kind, theta=cfg.theta)
    _, omega0 = build_initial(cfg)
    blobs = _blob_lattice(cfg)
    step_cfg = StepConfig(dt=cfg.dt, scheme=cfg.scheme,
                          blob_radius=cfg.blob_radius,
                          divergence_mode=cfg.divergence_mode,
                          fd_eta=cfg.fd_eta)
    final = {}

    def capture(state, _report):
        final["state"] = state
    run(blobs, kernel, step_cfg, cfg.t_end, observers=[capture])
    return final["state"]


def converge_study(cfg: ScenarioConfig, parameter: str, levels: int):
    """Successive-difference refinement study at the final time.

    parameter = "epsilon": halve the mollification radius; fields are
    compared by cloud-in-cell deposit on the scenario grid, L1 differences.
    parameter = "h": halve the blob spacing (and core radius with it),
    same comparison.  parameter = "dt": halve the step; blob sets coincide,
    so positions are compared in sup norm and the empirical order is
    log2 of successive ratios.

    Returns a list of row dicts (level, value, diff, order).
    """
    if levels < 3:
        raise ValueError("need at least 3 levels")
    if parameter not in ("epsilon", "h", "dt"):
        raise ValueError("parameter must be epsilon, h or dt")

    rows = []
    if parameter == "dt":
        states = []
        values = []
        for k in range(levels):
            dt = cfg.dt / 2 ** k
            states.append(_final_state(replace(cfg, dt=dt)))
            values.append(dt)
        diffs = [float(np.abs(a.z - b.z).max())
                 for a, b in zip(states, states[1:])]
    else:
        grids = []
        values = []
        geom = VorticityGrid.empty_centered(cfg.grid_extent, cfg.grid_n)
        for k in range(levels):
            if parameter == "epsilon":
                lv = replace(cfg, mollify_epsilon=cfg.mollify_epsilon / 2 ** k)
                values.append(lv.mollify_epsilon)
            else:
                lv = replace(cfg, blob_spacing=cfg.blob_spacing / 2 ** k,
                             blob_radius=cfg.blob_radius / 2 ** k)
                values.append(lv.blob_spacing)
            state = _final_state(lv)
            grids.append(deposit_blobs(state.blobs, geom))
        h2 = geom.h ** 2
        diffs = [float(np.abs(a.values - b.values).sum() * h2)
                 for a, b in zip(grids, grids[1:])]

    for k in range(levels):
        diff = diffs[k] if k < len(diffs) else float("nan")
        order = (math.log2(diffs[k] / diffs[k + 1])
                 if k + 1 < len(diffs) and diffs[k + 1] > 0 else float("nan"))
        rows.append({"level": k, "value": values[k], "diff": diff,
                     "order": order})
    return rows


def velform_study(cfg: ScenarioConfig, levels: int | None = None):
    """Velocity-formulation residuals across simultaneous refinement.

    Level k halves the diagnostic grid spacing, the blob spacing/core and
    dt relative to the scenario config.  At each level, three velocity
    snapshots centered on ``velform_t_mid`` feed the residual computation.
    Returns a list of row dicts.
    """
    levels = levels or cfg.velform_levels
    m = MTheta(cfg.theta)
    kernel = KernelSpec(kind=cfg.kernel_kind, theta=cfg.theta)
    base = replace(
        cfg,
        grid_n=cfg.velform_grid_n or cfg.grid_n,
        blob_spacing=cfg.velform_blob_spacing or cfg.blob_spacing,
        blob_radius=cfg.velform_blob_radius or cfg.blob_radius,
        dt=cfg.velform_dt or cfg.dt)
    rows = []
    for k in range(levels):
        lv = replace(base,
                     grid_n=base.grid_n * 2 ** k,
                     blob_spacing=base.blob_spacing / 2 ** k,
                     blob_radius=base.blob_radius / 2 ** k,
                     dt=base.dt / 2 ** k)
        _, omega0 = build_initial(lv)
        blobs = _blob_lattice(lv)
        step_cfg = StepConfig(dt=lv.dt, scheme=lv.scheme,
                              blob_radius=lv.blob_radius,
                              divergence_mode=lv.divergence_mode,
                              fd_eta=lv.fd_eta)
        geom = VorticityGrid.empty_centered(lv.grid_extent, lv.grid_n)
        snaps = []

        t_mid = cfg.velform_t_mid
        snap_times = [t_mid - lv.dt, t_mid, t_mid + lv.dt]

        def observe(state, _report, _snaps=snaps, _times=snap_times,
                    _lv=lv, _geom=geom):
            if any(abs(state.t - ts) < 1e-9 for ts in _times):
                _snaps.append(snapshot_from_state(
                    state, _geom.origin, _geom.h, _geom.nx, _geom.ny,
                    _lv.blob_radius))
        run(blobs, kernel, step_cfg, t_mid + lv.dt, observers=[observe],
            sample_times=snap_times)
        # Trim in cells doubles with the level so the compared interior
        # region keeps fixed physical extent across refinements.
        trim = lv.velform_trim * 2 ** k
        res = formulation_residual(tuple(snaps), m, trim=trim)
        curl = curl_mtheta_check(snaps[1], m, trim=trim)
        q_max = float(np.abs(res["q"]).max())
        rows.append({"level": k, "h": geom.h, "dt": lv.dt,
                     "r1_l2": res["r1_l2"], "r1_linf": res["r1_linf"],
                     "r2_l2": res["r2_l2"], "r2_linf": res["r2_linf"],
                     "curl_mtheta": curl.measured, "q_max": q_max})
    return rows
