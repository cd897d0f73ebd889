"""Unit tests for the convolution transforms and a-priori bounds."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import (beurling_transform_quad, cauchy_transform_quad,
                      disk_beurling, disk_velocity_euler,
                      disk_velocity_theta0, velocity_sup_bound)
from cauchyflow.complexfield import (KernelSpec, blob_beurling, blob_velocity,
                                     cell_beurling_integral,
                                     cell_cauchy_integral, divergence_of_velocity,
                                     eval_kernel, farfield_constant,
                                     linfty_bound, velocity_direct)
from cauchyflow.vorticity import (Disk, VorticityGrid, make_indicator, stats,
                                  to_blobs)

CAUCHY = KernelSpec("cauchy", 0.0)
EULER = KernelSpec("euler", 0.0)


# ---------------------------------------------------------------------------
# kernel values
# ---------------------------------------------------------------------------

def test_eval_kernel_values():
    z = 1.0 + 2.0j
    assert eval_kernel(CAUCHY, z) == 1.0 / (2 * math.pi * z)
    th = 0.7
    spec = KernelSpec("cauchy", th)
    assert abs(eval_kernel(spec, z)
               - np.exp(1j * th) / (2 * math.pi * z)) < 1e-15
    assert abs(eval_kernel(EULER, z) - 1j / (2 * math.pi * np.conj(z))) < 1e-15


def test_eval_kernel_singularity():
    with pytest.raises(ValueError):
        eval_kernel(CAUCHY, 0j)


# ---------------------------------------------------------------------------
# exact cell integrals vs adaptive quadrature
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("z", [0.3 + 0.1j, 1.5 - 0.7j])
def test_cell_cauchy_integral_outside_against_quadrature(z):
    # target outside the cell: the integrand is smooth over the cell, so
    # plain Cartesian quadrature is a reliable oracle
    from scipy import integrate
    h = 0.2
    re, _ = integrate.dblquad(
        lambda y, x: (1.0 / (z - (x + 1j * y))).real,
        -h / 2, h / 2, -h / 2, h / 2, epsabs=1e-11, epsrel=1e-11)
    im, _ = integrate.dblquad(
        lambda y, x: (1.0 / (z - (x + 1j * y))).imag,
        -h / 2, h / 2, -h / 2, h / 2, epsabs=1e-11, epsrel=1e-11)
    got = complex(cell_cauchy_integral(z, h, h))
    assert abs(got - (re + 1j * im)) < 1e-9


def test_cell_cauchy_integral_inside_against_quadrature():
    # target inside the cell: polar quadrature about z removes the pole
    z = 0.03 + 0.04j
    h = 0.2
    cell = lambda w: float(abs(w.real) < h / 2 and abs(w.imag) < h / 2)
    ref = cauchy_transform_quad(cell, z, radius=abs(z) + h) * 2 * math.pi
    got = complex(cell_cauchy_integral(z, h, h))
    assert abs(got - ref) < 5e-5


def test_cell_beurling_integral_outside():
    # far from the cell the p.v. integral tends to area / z^2
    h = 0.1
    z = 3.0 + 1.0j
    got = complex(cell_beurling_integral(z, h, h))
    assert abs(got - h * h / z ** 2) < 1e-6


def test_cell_integrals_inside_center():
    # at the cell center both integrals vanish by symmetry
    assert abs(complex(cell_cauchy_integral(0j, 0.1, 0.1))) < 1e-14
    assert abs(complex(cell_beurling_integral(1e-13 + 0j, 0.1, 0.1))) < 1e-6


# ---------------------------------------------------------------------------
# grid transforms against closed forms
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def disk_grid():
    return make_indicator(Disk(1.0), 1.0, VorticityGrid.empty_centered(2.0, 200))


def test_velocity_direct_disk_center_zero(disk_grid):
    # zero by symmetry; 40k-term float summation leaves ~1e-9 residue
    (s,) = velocity_direct(disk_grid, [0j], CAUCHY)
    assert abs(s.value) < 1e-8


def test_velocity_direct_disk_exterior(disk_grid):
    (s,) = velocity_direct(disk_grid, [2.0 + 0j], CAUCHY)
    assert abs(s.value - 0.25) < 1e-3


def test_velocity_direct_euler_disk(disk_grid):
    pts = [0.5 + 0.1j, 2.0 - 1.0j]
    for s in velocity_direct(disk_grid, pts, EULER):
        assert abs(s.value - disk_velocity_euler(s.z)) < 2e-3


def test_velocity_direct_theta_rotates_field(disk_grid):
    th = 1.1
    pts = [0.4 + 0.2j, 1.7 - 0.3j]
    plain = velocity_direct(disk_grid, pts, CAUCHY)
    rot = velocity_direct(disk_grid, pts, KernelSpec("cauchy", th))
    for a, b in zip(plain, rot):
        assert abs(b.value - np.exp(1j * th) * a.value) < 1e-12


def test_velocity_direct_empty_blob_field():
    out = velocity_direct([], [1j, 2j], CAUCHY, blob_radius=0.1)
    assert all(s.value == 0 for s in out)


def test_velocity_direct_rejects_nonfinite_blobs(disk_grid):
    blobs = to_blobs(disk_grid)
    blobs[0].omega = float("nan")
    with pytest.raises(ValueError):
        velocity_direct(blobs, [0j], CAUCHY, blob_radius=0.1)


# ---------------------------------------------------------------------------
# blob sums: smooth radial core
# ---------------------------------------------------------------------------

def test_blob_velocity_core_profile():
    # outside the core the blob is a point mass; inside, only the enclosed
    # mass fraction g(s) = 1 - (1 - s)^3, s = (r/delta)^2, acts.
    m, delta = 0.7, 0.2
    for r in (0.05, 0.12, 0.2, 0.5):
        (v,) = blob_velocity(np.array([r + 0j]), np.array([0j]),
                             np.array([m]), CAUCHY, delta)
        s = min((r / delta) ** 2, 1.0)
        g = 1.0 - (1.0 - s) ** 3
        expect = m * g / (2 * math.pi * r)
        assert abs(v - expect) < 1e-14


def test_blob_beurling_core_profile():
    m, delta = 0.9, 0.3
    for r in (0.1, 0.3, 0.8):
        (b,) = blob_beurling(np.array([r + 0j]), np.array([0j]),
                             np.array([m]), delta)
        s = min((r / delta) ** 2, 1.0)
        g = 1.0 - (1.0 - s) ** 3
        expect = -m * g / (math.pi * r ** 2)
        assert abs(b - expect) < 1e-13


def test_blob_velocity_self_term_zero():
    (v,) = blob_velocity(np.array([0.5j]), np.array([0.5j]),
                         np.array([2.0]), CAUCHY, 0.1)
    assert v == 0


def test_blob_lattice_matches_disk_closed_form():
    # ~2e4 blobs tiling the unit disk
    s = 0.0125
    grid = make_indicator(Disk(1.0), 1.0,
                          VorticityGrid.empty_centered(1.05, int(2.1 / s)))
    blobs = to_blobs(grid)
    assert 1.5e4 <= len(blobs) <= 2.5e4
    pts = [0.3 + 0.4j, -0.5j, 1.5 + 0.2j, -2.0 + 1.0j]
    for samp in velocity_direct(blobs, pts, CAUCHY, blob_radius=1.5 * s):
        assert abs(samp.value - disk_velocity_theta0(samp.z)) < 2e-3


# ---------------------------------------------------------------------------
# quadrature oracles on a smooth field
# ---------------------------------------------------------------------------

def test_grid_transform_matches_quadrature_smooth():
    w = lambda z: math.exp(-4.0 * abs(z) ** 2) if abs(z) < 2.5 else 0.0
    grid = VorticityGrid.empty_centered(3.0, 150)
    zz = grid.cell_centers()
    vals = np.exp(-4.0 * np.abs(zz) ** 2)
    vals[np.abs(zz) >= 2.5] = 0.0
    field = VorticityGrid(grid.origin, grid.h, grid.nx, grid.ny, vals)
    for z in (0.2 + 0.1j, 1.0 - 0.5j):
        (s,) = velocity_direct(field, [z], CAUCHY)
        assert abs(s.value - cauchy_transform_quad(w, z, radius=3.0)) < 2e-4


def test_beurling_direct_matches_quadrature():
    from cauchyflow.complexfield import beurling_direct
    grid = make_indicator(Disk(1.0), 1.0, VorticityGrid.empty_centered(2.0, 200))
    for z in (0.5 + 0.2j, 2.0 + 0j):
        (s,) = beurling_direct(grid, [z])
        assert abs(s.value - disk_beurling(z)) < 6e-3


# ---------------------------------------------------------------------------
# divergence and a-priori bounds
# ---------------------------------------------------------------------------

def test_divergence_euler_exactly_zero(disk_grid):
    out = divergence_of_velocity(disk_grid, [0.3 + 0j, 1.4j], EULER)
    assert all(v == 0.0 for v in out)


def test_divergence_cauchy_interior(disk_grid):
    # div v = Re(e^{i theta} S omega); for the disk S = 0 inside, -1/z^2
    # outside, so interior divergence vanishes for every theta.
    (d,) = divergence_of_velocity(disk_grid, [0.2 + 0.1j],
                                  KernelSpec("cauchy", 0.4))
    assert abs(d) < 6e-3
    z = 2.0 + 0j
    (d,) = divergence_of_velocity(disk_grid, [z], CAUCHY)
    assert abs(d - (-1.0 / z ** 2).real) < 6e-3


@st.composite
def blob_clouds(draw):
    n = draw(st.integers(3, 25))
    seed = draw(st.integers(0, 2 ** 31))
    rng = np.random.default_rng(seed)
    pos = rng.uniform(-1.0, 1.0, n) + 1j * rng.uniform(-1.0, 1.0, n)
    omega = rng.uniform(-2.0, 2.0, n)
    return pos, omega


@settings(max_examples=100, deadline=None)
@given(blob_clouds())
def test_linfty_bound_dominates_blob_fields(cloud):
    from cauchyflow.vorticity import VortexBlob
    pos, omega = cloud
    s = 0.05
    blobs = [VortexBlob(position=complex(p), omega=float(o), area0=s * s,
                        jacobian=1.0) for p, o in zip(pos, omega)]
    st_ = stats(blobs, blob_radius=1.5 * s)
    targets = np.array([0j, 0.4 + 0.4j, 1.2 - 0.8j, 2.5 + 0j])
    vmax = max(abs(v.value) for v in velocity_direct(
        blobs, targets, CAUCHY, blob_radius=1.5 * s))
    assert vmax <= linfty_bound(st_, "l1_linf") + 1e-12
    assert vmax <= linfty_bound(st_, "support_linf") + 1e-12
    assert abs(linfty_bound(st_, "l1_linf")
               - velocity_sup_bound(st_.l1, st_.linf)) < 1e-12


def test_linfty_bound_rejects_unknown_mode(disk_grid):
    with pytest.raises(ValueError):
        linfty_bound(stats(disk_grid), "nope")


def test_farfield_constant_disk(disk_grid):
    # limsup |z| |v(z)| = ||omega||_1 / (2 pi) for the disk, and the bound
    # calculator must dominate it on |z| >= 2 * support radius
    st_ = stats(disk_grid)
    c = farfield_constant(st_)
    for r in (2.5, 10.0, 40.0):
        (s,) = velocity_direct(disk_grid, [r + 0j], CAUCHY)
        assert r * abs(s.value) <= c
    (s,) = velocity_direct(disk_grid, [40.0 + 0j], CAUCHY)
    assert abs(40.0 * abs(s.value) - st_.l1 / (2 * math.pi)) < 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_transforms_linear(seed):
    rng = np.random.default_rng(seed)
    geom = VorticityGrid.empty_centered(1.0, 24)
    f = rng.normal(size=(24, 24))
    g = rng.normal(size=(24, 24))
    for arr in (f, g):         # support must stay off the grid boundary
        arr[0, :] = arr[-1, :] = 0.0
        arr[:, 0] = arr[:, -1] = 0.0
    a, b = rng.normal(), rng.normal()
    mk = lambda v: VorticityGrid(geom.origin, geom.h, geom.nx, geom.ny, v)
    targets = [0.2 + 0.1j, 1.5 - 0.4j]
    vf = velocity_direct(mk(f), targets, CAUCHY)
    vg = velocity_direct(mk(g), targets, CAUCHY)
    vc = velocity_direct(mk(a * f + b * g), targets, CAUCHY)
    for sf, sg, sc in zip(vf, vg, vc):
        assert abs(sc.value - (a * sf.value + b * sg.value)) < 1e-9


def test_target_order_irrelevant(disk_grid):
    pts = [0.1 + 0.2j, 1.3 - 0.5j, 2.2 + 0j]
    fwd = velocity_direct(disk_grid, pts, CAUCHY)
    rev = velocity_direct(disk_grid, pts[::-1], CAUCHY)
    for a, b in zip(fwd, rev[::-1]):
        assert a.value == b.value
