"""Shared fixtures: each bundled scenario is run once per session and its
report/final state cached, since several acceptance criteria read different
slices of the same run.  Refinement studies are likewise session-cached."""
import os
from dataclasses import replace
from types import SimpleNamespace

import pytest

from cauchyflow.cli import _resolve_config
from cauchyflow.config import load_config
from cauchyflow.runner import (_blob_lattice, converge_study, run_scenario,
                               velform_study)

SCENARIOS = ("cauchy_disk", "cauchy_ellipse", "cauchy_gaussian",
             "euler_rankine", "cauchy_two_patches")

_cache = {}


@pytest.fixture(scope="session")
def scenario_run(tmp_path_factory):
    """scenario_run(name) -> namespace(cfg, report, state, blobs0, out)."""

    def get(name):
        if name not in _cache:
            cfg = load_config(_resolve_config(name))
            out = tmp_path_factory.mktemp(name)
            report, state = run_scenario(cfg, out_dir=str(out))
            _cache[name] = SimpleNamespace(
                cfg=cfg, report=report, state=state,
                blobs0=_blob_lattice(cfg), out=str(out))
        return _cache[name]

    return get


@pytest.fixture(scope="session")
def disk_run(scenario_run):
    return scenario_run("cauchy_disk")


@pytest.fixture(scope="session")
def velform_rows(scenario_run):
    """Three-level simultaneous (h, dt) refinement on the Gaussian data."""
    cfg = load_config(_resolve_config("cauchy_gaussian"))
    return velform_study(cfg)


@pytest.fixture(scope="session")
def dt_rows():
    """dt-halving on the disk patch.  The base step 0.2 keeps all the
    successive position differences (1e-7 .. 1e-9) above the integrator's
    roundoff floor (~1e-10), so the fitted order is meaningful."""
    cfg = load_config(_resolve_config("cauchy_disk"))
    cfg = replace(cfg, tracers_enabled=False, write_checkpoints=False,
                  blob_spacing=0.08, blob_radius=0.12, dt=0.2)
    return converge_study(cfg, "dt", 4)


@pytest.fixture(scope="session")
def epsilon_rows():
    """Mollification-halving on the disk patch, L1 differences at t=1."""
    cfg = load_config(_resolve_config("cauchy_disk"))
    cfg = replace(cfg, tracers_enabled=False, write_checkpoints=False,
                  mollify_epsilon=0.32, dt=0.05)
    return converge_study(cfg, "epsilon", 3)


@pytest.fixture(scope="session")
def quick_config(tmp_path_factory):
    """A small, fast disk scenario for CLI / determinism tests."""
    path = tmp_path_factory.mktemp("cfg") / "quick_disk.yaml"
    path.write_text(
        "scenario: quick_disk\n"
        "kernel: {kind: cauchy, theta: 0.0}\n"
        "initial: {shape: disk, radius: 1.0, amplitude: 1.0}\n"
        "grid: {extent: 5.0, n: 100}\n"
        "numerics: {blob_spacing: 0.1, blob_radius: 0.15, dt: 0.1,\n"
        "           t_end: 0.2, scheme: rk4, divergence_mode: fd}\n"
        "tracers: {enabled: true, extent: 1.6, spacing: 0.05,\n"
        "          far_radii: [4.0, 8.0, 16.0], far_count: 16}\n"
        "diagnostics: {sample_times: [0.2]}\n")
    return str(path)


def pytest_configure(config):
    # Pairwise kernels are compiled once with on-disk caching; no per-test
    # warmup needed.  Keep numba quiet about the absent TBB backend.
    os.environ.setdefault("NUMBA_WARNINGS", "0")
