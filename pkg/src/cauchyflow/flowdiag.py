"""Quasiconformal diagnostics of the numerical flow map.

A :class:`TracerGrid` (regular lattice plus an optional far-field ring) is
advected passively by ``dynamics``; centered differences on the lattice give
the Beltrami coefficient mu = dbar X / d X, from which every flow-map bound
is measured: distortion K, the pointwise inequality
log((1+|mu|)/(1-|mu|)) <= t |omega_0(z)|, conformality off the support,
area distortion, the far-field normalization X(z) = z + b + c/z + ..., and
quasisymmetry envelopes.

Tracers are tagged at t=0 by sampling |omega_0| on their finite-difference
stencil: nodes whose stencil straddles a jump (max - min above a fraction of
the global sup) are tagged ``NEAR`` and excluded from derivative-based
pass/fail measurements — a centered difference across a Lipschitz kink of
the map mixes the two one-sided derivatives and reports spurious |mu| that
no resolution removes.  Their count is reported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .complexfield import KernelSpec
from .report import ReportEntry, PASS, FAIL, INCONCLUSIVE
from .vorticity import VorticityGrid

__all__ = [
    "INSIDE", "NEAR", "FAR",
    "TracerGrid", "BeltramiField", "FarFieldFit",
    "make_tracers", "beltrami", "distortion_check", "pointwise_bound_check",
    "saturation_stats", "conformal_outside_check", "initial_derivative_check",
    "area_distortion_check", "farfield_fit", "quasisymmetry_sample",
    "NormBoundsObserver", "FlowDiagObserver",
]

INSIDE, NEAR, FAR = 0, 1, 2


@dataclass
class TracerGrid:
    """Flow-map samples X(t, z) on a structured lattice.

    z0/z: initial and current positions, shape (m, n) with axis 1 = x and
    axis 0 = y; tags/local_bound: per-node region tag and stencil-max of
    |omega_0|; ring_z0/ring_z: optional far-field sample points (not part
    of the lattice, used only by :func:`farfield_fit`).
    """

    z0: np.ndarray
    z: np.ndarray
    spacing: float
    tags: np.ndarray
    local_bound: np.ndarray
    ring_z0: np.ndarray
    ring_z: np.ndarray
    ring_radii: tuple = ()
    # Initial distance from each node to the data jump set (inf for smooth
    # data); derivative checks exclude a band that widens with the expected
    # Lagrangian compression of the discretization's smeared interface.
    jump_distance: np.ndarray | None = None

    def all_positions(self) -> np.ndarray:
        return np.concatenate([self.z.ravel(), self.ring_z])

    def with_positions(self, flat: np.ndarray) -> "TracerGrid":
        nlat = self.z.size
        return replace(self, z=flat[:nlat].reshape(self.z.shape),
                       ring_z=flat[nlat:].copy())


@dataclass
class BeltramiField:
    """Centered-difference Beltrami data on the lattice interior.

    All arrays have shape (m-2, n-2) (boundary nodes excluded).  K_local =
    (1+|mu|)/(1-|mu|) is NaN where |mu| >= 1; ``degenerate`` marks nodes
    with |dX| below 1e-12 (derivative estimate meaningless).
    """

    mu: np.ndarray
    k_local: np.ndarray
    jacobian: np.ndarray
    z0: np.ndarray
    tags: np.ndarray
    local_bound: np.ndarray
    spacing: float
    degenerate: np.ndarray
    jump_distance: np.ndarray | None = None

    def measurable(self, exclude_within: float = 0.0) -> np.ndarray:
        """Nodes where the derivative estimator is consistent.

        ``exclude_within`` widens the jump exclusion: nodes initially
        closer than this to the data jump set are also dropped (used to
        skip the blob method's smeared-interface layer, whose width in
        initial coordinates grows with the flow's compression).
        """
        sel = (~self.degenerate) & (self.tags != NEAR)
        if exclude_within > 0.0 and self.jump_distance is not None:
            sel &= self.jump_distance >= exclude_within
        return sel


@dataclass
class FarFieldFit:
    """Least-squares fit of X(t,z) - z against b + c/z over far samples."""

    b: complex
    c: complex
    decay_exponent: float
    residuals: np.ndarray
    radii: tuple


def _sample(grid: VorticityGrid, Z: np.ndarray) -> np.ndarray:
    """Nearest-cell values of ``grid`` at points Z (zero off the grid)."""
    i = np.floor((Z.real - grid.origin.real) / grid.h).astype(int)
    j = np.floor((Z.imag - grid.origin.imag) / grid.h).astype(int)
    ok = (i >= 0) & (i < grid.nx) & (j >= 0) & (j < grid.ny)
    out = np.zeros(Z.shape)
    out[ok] = grid.values[j[ok], i[ok]]
    return out


def make_tracers(omega0: VorticityGrid, extent: float, spacing: float,
                 far_radii=(), far_count: int = 16,
                 near_jump: float = 0.2, center: complex = 0j) -> TracerGrid:
    """Lattice over [-extent, extent]^2 (about ``center``) plus far rings.

    Tags each node from |omega_0|: NEAR when a data jump (grid-neighbor
    difference above near_jump * sup|omega_0|) lies within the node's
    difference-quotient stencil radius (so the quotient would straddle a
    Lipschitz kink of the map), INSIDE when the 5-point stencil maximum is
    positive, FAR otherwise.
    """
    xs = center.real + np.arange(-extent, extent + spacing / 2, spacing)
    ys = center.imag + np.arange(-extent, extent + spacing / 2, spacing)
    z0 = xs[None, :] + 1j * ys[:, None]

    stencil = [z0, z0 + spacing, z0 - spacing, z0 + 1j * spacing,
               z0 - 1j * spacing]
    samples = np.stack([np.abs(_sample(omega0, s)) for s in stencil])
    smax = samples.max(axis=0)
    linf = float(np.abs(omega0.values).max(initial=0.0))
    tags = np.full(z0.shape, FAR, dtype=np.int8)
    tags[smax > 0] = INSIDE
    # Per-node bound |omega_0| near the node: the grid maximum over a window
    # covering the stencil radius plus one cell of sampling slack, so the
    # pointwise right-hand side never under-samples a steep datum.
    win = 2 * int(math.ceil((spacing + omega0.h) / omega0.h)) + 1
    localsup = ndimage.maximum_filter(np.abs(omega0.values), size=win)
    local_bound = _sample(VorticityGrid(omega0.origin, omega0.h, omega0.nx,
                                        omega0.ny, localsup), z0)
    jump_distance = np.full(z0.shape, np.inf)
    if linf > 0:
        # Jump cells detected on the data grid itself (neighbor difference
        # above the threshold); the Euclidean distance transform gives each
        # node its initial distance to the jump set.  Nodes whose difference
        # quotient can straddle the jump (distance below the stencil radius
        # plus one cell of sampling slack) are tagged NEAR, with no
        # quantization holes.
        vals = omega0.values
        jump = np.zeros(vals.shape, dtype=bool)
        dx = np.abs(np.diff(vals, axis=1)) > near_jump * linf
        dy = np.abs(np.diff(vals, axis=0)) > near_jump * linf
        jump[:, :-1] |= dx
        jump[:, 1:] |= dx
        jump[:-1, :] |= dy
        jump[1:, :] |= dy
        if jump.any():
            dist = ndimage.distance_transform_edt(~jump) * omega0.h
            i = np.clip(np.floor((z0.real - omega0.origin.real)
                                 / omega0.h).astype(int), 0, omega0.nx - 1)
            j = np.clip(np.floor((z0.imag - omega0.origin.imag)
                                 / omega0.h).astype(int), 0, omega0.ny - 1)
            jump_distance = dist[j, i]
            tags[jump_distance <= spacing + omega0.h] = NEAR

    ring = []
    radii = tuple(float(r) for r in far_radii)
    for r in radii:
        ang = 2.0 * math.pi * (np.arange(far_count) + 0.5) / far_count
        ring.append(center + r * np.exp(1j * ang))
    ring_z0 = (np.concatenate(ring) if ring
               else np.empty(0, dtype=complex))
    return TracerGrid(z0=z0, z=z0.copy(), spacing=spacing, tags=tags,
                      local_bound=local_bound, ring_z0=ring_z0,
                      ring_z=ring_z0.copy(), ring_radii=radii,
                      jump_distance=jump_distance)


def beltrami(tracers: TracerGrid) -> BeltramiField:
    """mu = dbar X / d X by centered differences; boundary nodes dropped."""
    X = tracers.z
    s = tracers.spacing
    Xx = (X[1:-1, 2:] - X[1:-1, :-2]) / (2.0 * s)
    Xy = (X[2:, 1:-1] - X[:-2, 1:-1]) / (2.0 * s)
    dX = (Xx - 1j * Xy) / 2.0
    dbarX = (Xx + 1j * Xy) / 2.0
    degenerate = np.abs(dX) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(degenerate, np.nan, dbarX / np.where(degenerate, 1.0, dX))
        am = np.abs(mu)
        k_local = np.where(am < 1.0, (1.0 + am) / (1.0 - am), np.nan)
    jac = np.abs(dX) ** 2 - np.abs(dbarX) ** 2
    jd = (tracers.jump_distance[1:-1, 1:-1]
          if tracers.jump_distance is not None else None)
    return BeltramiField(
        mu=mu, k_local=k_local, jacobian=jac,
        z0=tracers.z0[1:-1, 1:-1], tags=tracers.tags[1:-1, 1:-1],
        local_bound=tracers.local_bound[1:-1, 1:-1],
        spacing=s, degenerate=degenerate, jump_distance=jd)


# ---------------------------------------------------------------------------
# Checks (each returns a ReportEntry)
# ---------------------------------------------------------------------------

def distortion_check(field: BeltramiField, t: float, omega0_linf: float,
                     tol_rel: float = 0.05,
                     exclude_within: float = 0.0) -> ReportEntry:
    """K_meas = max local distortion vs the bound e^{|t| sup|omega_0|}."""
    sel = field.measurable(exclude_within)
    bound = math.exp(abs(t) * omega0_linf) * (1.0 + tol_rel)
    if not sel.any():
        return ReportEntry.inconclusive("distortion", t, "no measurable nodes")
    k = field.k_local[sel]
    if np.isnan(k).any():
        return ReportEntry("distortion", t, float("inf"), bound,
                           float("-inf"), FAIL,
                           note="|mu| >= 1 at %d nodes" % int(np.isnan(k).sum()))
    k_meas = float(k.max())
    return ReportEntry.compare("distortion", t, k_meas, bound)


def pointwise_bound_check(field: BeltramiField, t: float,
                          tol_rel: float = 0.02,
                          tol_abs: float = 1e-2,
                          exclude_within: float = 0.0) -> ReportEntry:
    """log((1+|mu|)/(1-|mu|)) <= |t| |omega_0(z)| node-wise.

    measured = worst excess of the left side over the right side inflated
    by tol_rel; passes when below tol_abs.
    """
    sel = field.measurable(exclude_within)
    if not sel.any():
        return ReportEntry.inconclusive("pointwise_bound", t,
                                        "no measurable nodes")
    am = np.abs(field.mu[sel])
    am = np.minimum(am, 1.0 - 1e-15)
    lhs = np.log((1.0 + am) / (1.0 - am))
    rhs = abs(t) * field.local_bound[sel]
    excess = float(np.max(lhs - rhs * (1.0 + tol_rel)))
    return ReportEntry.compare("pointwise_bound", t, excess, tol_abs)


def saturation_stats(field: BeltramiField, t: float, omega0_linf: float,
                     amp_frac: float = 0.999,
                     exclude_within: float = 0.0):
    """Ratio log((1+|mu|)/(1-|mu|)) / (t sup|omega_0|) over full-amplitude
    interior nodes; returns (min, max, count).  The self-similar ellipse
    solution saturates this ratio at exactly 1."""
    sel = (field.measurable(exclude_within) & (field.tags == INSIDE)
           & (field.local_bound >= amp_frac * omega0_linf))
    if t == 0 or omega0_linf == 0 or not sel.any():
        return (float("nan"), float("nan"), 0)
    am = np.minimum(np.abs(field.mu[sel]), 1.0 - 1e-15)
    ratio = np.log((1.0 + am) / (1.0 - am)) / (abs(t) * omega0_linf)
    return (float(ratio.min()), float(ratio.max()), int(sel.sum()))


def conformal_outside_check(field: BeltramiField, t: float,
                            support_centroid: complex, support_radius: float,
                            margin: float = 0.5,
                            tol_abs: float = 1e-2) -> ReportEntry:
    """max |mu| over tracers starting at distance >= margin from the
    support disk; the flow is conformal there for the Cauchy kernel."""
    sel = (field.measurable()
           & (np.abs(field.z0 - support_centroid)
              >= support_radius + margin))
    if not sel.any():
        return ReportEntry.inconclusive(
            "conformal_outside", t,
            "no tracers at distance >= %g from support" % margin)
    measured = float(np.max(np.abs(field.mu[sel])))
    return ReportEntry.compare("conformal_outside", t, measured, tol_abs,
                               note="%d nodes" % int(sel.sum()))


def initial_derivative_check(field: BeltramiField, tau: float,
                             omega0: VorticityGrid, theta: float,
                             tol_rel: float = 0.1) -> ReportEntry:
    """mu(tau, z)/tau should approach e^{i theta} omega_0(z)/2 as tau -> 0;
    measured = max node-wise deviation over interior nodes, expected O(tau).
    """
    sel = field.measurable() & (field.tags == INSIDE)
    if not sel.any() or tau <= 0:
        return ReportEntry.inconclusive("initial_derivative", tau,
                                        "no interior nodes")
    target = (complex(math.cos(theta), math.sin(theta))
              * _sample(omega0, field.z0) / 2.0)
    dev = np.abs(field.mu[sel] / tau - target[sel])
    linf = float(np.abs(omega0.values).max(initial=0.0))
    bound = tol_rel * linf / 2.0
    return ReportEntry.compare("initial_derivative", tau, float(dev.max()),
                               bound, hard=False)


def area_distortion_check(tracers: TracerGrid, t: float, omega0_linf: float,
                          support_centroid: complex, support_radius: float,
                          factor: float = 1.2, tol_rel: float = 0.05,
                          euler: bool = False,
                          tol_euler: float = 0.01):
    """|X(t,E)| / |E| for E = the union of lattice cells inside the disk of
    radius factor * support_radius (a lattice-resolved set containing the
    support).

    The image area is the sum of shoelace areas of the image quadrilaterals
    of the lattice cells — the exact area of the piecewise-bilinear image,
    robust across the Lipschitz kink of the map at the patch boundary
    (unlike summing finite-difference Jacobians through the kink).  Returns
    one entry for the distortion bound, plus an exact-conservation entry in
    Euler mode.
    """
    z0, z = tracers.z0, tracers.z
    rE = factor * support_radius
    corner_in = np.abs(z0 - support_centroid) <= rE
    cell_in = (corner_in[:-1, :-1] & corner_in[:-1, 1:]
               & corner_in[1:, 1:] & corner_in[1:, :-1])
    entries = []
    if not cell_in.any():
        e = ReportEntry.inconclusive("area_distortion", t,
                                     "no lattice cells inside E")
        return [e]
    A = z[:-1, :-1][cell_in]
    B = z[:-1, 1:][cell_in]
    C = z[1:, 1:][cell_in]
    D = z[1:, :-1][cell_in]
    quad = 0.5 * (np.conj(A) * B + np.conj(B) * C
                  + np.conj(C) * D + np.conj(D) * A).imag
    ratio = float(quad.sum() / (cell_in.sum() * tracers.spacing ** 2))
    bound = math.exp(abs(t) * omega0_linf) * (1.0 + tol_rel)
    entries.append(ReportEntry.compare("area_distortion", t, ratio, bound))
    if euler:
        entries.append(ReportEntry.compare("area_conservation", t,
                                           abs(ratio - 1.0), tol_euler))
    return entries


def farfield_fit(tracers: TracerGrid, t: float) -> FarFieldFit:
    """Fit X(t,z) - z = b + c/z over the far-field ring by least squares and
    the decay exponent of |X - z - b| against |z| (expected about -1)."""
    z0, z = tracers.ring_z0, tracers.ring_z
    if z0.size < 8 or len(set(np.round(np.abs(z0), 9))) < 3:
        raise ValueError("far-field fit needs >= 8 samples at >= 3 radii")
    d = z - z0
    A = np.stack([np.ones_like(z0), 1.0 / z0], axis=1)
    coef, *_ = np.linalg.lstsq(A, d, rcond=None)
    b, c = complex(coef[0]), complex(coef[1])
    resid = np.abs(d - (b + c / z0))
    tail = np.abs(d - b)
    if np.all(tail > 0):
        slope = float(np.polyfit(np.log(np.abs(z0)), np.log(tail), 1)[0])
    else:
        slope = float("nan")            # t = 0: X = z exactly
    return FarFieldFit(b=b, c=c, decay_exponent=slope, residuals=resid,
                       radii=tracers.ring_radii)


def quasisymmetry_sample(tracers: TracerGrid, n_triples: int, k_meas: float,
                         seed: int = 0, cap: float = 10.0) -> ReportEntry:
    """Two-sided power-law envelope check on random lattice triples.

    For each triple the image ratio |X(z)-X(z0)| / |X(z)-X(w0)| must lie
    within [r^K / C, C r^{1/K}]-style envelopes of the source ratio r for
    some constant C; measured = the smallest C accommodating every triple,
    passing when <= cap.  Soft check (the modulus constant is not pinned
    down by theory).
    """
    rng = np.random.default_rng(seed)
    flat0 = tracers.z0.ravel()
    flat1 = tracers.z.ravel()
    k = max(float(k_meas), 1.0)
    c_req = 1.0
    used = 0
    while used < n_triples:
        ia, ib, ic = rng.integers(0, flat0.size, size=3)
        if ia == ib or ia == ic or ib == ic:
            continue
        r0n, r0d = abs(flat0[ia] - flat0[ib]), abs(flat0[ia] - flat0[ic])
        r1n, r1d = abs(flat1[ia] - flat1[ib]), abs(flat1[ia] - flat1[ic])
        if min(r0n, r0d, r1n, r1d) == 0:
            continue
        used += 1
        r0, r1 = r0n / r0d, r1n / r1d
        hi = max(r0 ** k, r0 ** (1.0 / k))
        lo = min(r0 ** k, r0 ** (1.0 / k))
        c_req = max(c_req, r1 / hi, lo / r1)
    e = ReportEntry.compare("quasisymmetry", 0.0, c_req, cap, hard=False)
    return e


# ---------------------------------------------------------------------------
# Observers plugged into dynamics.run
# ---------------------------------------------------------------------------

class NormBoundsObserver:
    """Tracks sup/L1 norms of the blob measure and the velocity maximum
    against their growth bounds:

    * sup |omega(t)| == sup |omega_0| (values ride unchanged on blobs)
    * ||omega(t)||_1 <= sup|omega_0| e^{t sup|omega_0|} |supp omega_0|
    * max |v| <= sqrt(2/pi) e^{(t/2) sup|omega_0|} sup|omega_0|
      |supp omega_0|^{1/2}

    The velocity max is probed at blob and tracer positions (dense at the
    resolutions used; the field maximum of the core-regularized sum lives
    on the support to O(h)).
    """

    def __init__(self, linf0: float, support_area0: float,
                 blob_radius: float, tol_rel: float = 0.05):
        self.linf0 = linf0
        self.area0 = support_area0
        self.blob_radius = blob_radius
        self.tol = tol_rel
        self._linf_initial = None

    def __call__(self, state, report):
        from .dynamics import velocity_field
        t = state.t
        # Values ride unchanged on blobs, so sup|omega(t)| must equal its
        # first sampled value exactly (transport invariance, not a bound).
        linf = float(np.max(np.abs(state.omega), initial=0.0))
        if self._linf_initial is None:
            self._linf_initial = linf
        report.add(ReportEntry.compare("norm_linf", t,
                                       abs(linf - self._linf_initial), 0.0,
                                       note="sup|omega| = %r" % linf))
        l1 = float(np.sum(np.abs(state.masses())))
        l1_bound = (self.linf0 * math.exp(abs(t) * self.linf0) * self.area0
                    * (1.0 + self.tol))
        report.add(ReportEntry.compare("norm_l1", t, l1, l1_bound))
        targets = [state.z]
        if state.tracers is not None:
            targets.append(state.tracers.all_positions())
        v = velocity_field(state, np.concatenate(targets), self.blob_radius)
        vmax = float(np.abs(v).max(initial=0.0))
        v_bound = (math.sqrt(2.0 / math.pi)
                   * math.exp(abs(t) / 2.0 * self.linf0) * self.linf0
                   * math.sqrt(self.area0) * (1.0 + self.tol))
        report.add(ReportEntry.compare("velocity_max", t, vmax, v_bound))


class FlowDiagObserver:
    """Runs the flow-map checks at each sample time.

    Pointwise and conformality checks are asserted only for the Cauchy
    kernel (the anti-holomorphic coupling dbar v = e^{i theta} omega/2
    behind them does not hold for the Euler kernel); Euler scenarios get
    inconclusive rows for those and an exact area-conservation check
    instead.
    """

    def __init__(self, omega0: VorticityGrid, kernel: KernelSpec,
                 support_centroid: complex, support_radius: float,
                 tol_rel: float = 0.05, tol_conformal: float = 1e-2,
                 pointwise_tol_rel: float = 0.02,
                 conformal_margin: float = 0.5, area_factor: float = 1.2,
                 farfield_b_zero: bool = True, farfield_b_tol: float = 1e-2,
                 quasi_triples: int = 100, quasi_seed: int = 0,
                 blob_radius: float = 0.0):
        self.omega0 = omega0
        self.kernel = kernel
        self.blob_radius = blob_radius
        self.linf0 = float(np.abs(omega0.values).max(initial=0.0))
        self.centroid = support_centroid
        self.radius = support_radius
        self.tol_rel = tol_rel
        self.tol_conformal = tol_conformal
        self.pointwise_tol_rel = pointwise_tol_rel
        self.conformal_margin = conformal_margin
        self.area_factor = area_factor
        self.farfield_b_zero = farfield_b_zero
        self.farfield_b_tol = farfield_b_tol
        self.quasi_triples = quasi_triples
        self.quasi_seed = quasi_seed

    def __call__(self, state, report):
        tr = state.tracers
        if tr is None:
            return
        t = state.t
        cauchy = not self.kernel.is_euler
        field = beltrami(tr)
        near = int((field.tags == NEAR).sum())
        # Nodes whose trajectories cross the discretization's smeared
        # interface (width ~ blob core radius in current coordinates,
        # amplified by the flow's worst-case compression e^{t sup|omega_0|}
        # back to initial coordinates) measure the smeared dynamics, not
        # the sharp-data flow map; derivative checks skip that band.
        excl = (tr.spacing + self.omega0.h
                + self.blob_radius * math.exp(abs(t) * self.linf0))

        dist = report.add(distortion_check(field, t, self.linf0,
                                           self.tol_rel,
                                           exclude_within=excl))
        if cauchy:
            report.add(pointwise_bound_check(field, t,
                                             self.pointwise_tol_rel,
                                             self.tol_conformal,
                                             exclude_within=excl))
            report.add(conformal_outside_check(
                field, t, self.centroid, self.radius,
                self.conformal_margin, self.tol_conformal))
        else:
            report.add(ReportEntry.inconclusive(
                "pointwise_bound", t, "not asserted for the euler kernel"))
            report.add(ReportEntry.inconclusive(
                "conformal_outside", t, "not asserted for the euler kernel"))

        lo, hi, n_sat = saturation_stats(field, t, self.linf0,
                                         exclude_within=excl)
        if n_sat:
            report.add(ReportEntry("beltrami_saturation", t, hi, 1.0,
                                   1.0 - hi, PASS, hard=False,
                                   note="min %g over %d nodes (%d near-"
                                        "support excluded)" % (lo, n_sat,
                                                               near)))

        report.extend(area_distortion_check(
            tr, t, self.linf0, self.centroid, self.radius,
            factor=self.area_factor, tol_rel=self.tol_rel,
            euler=self.kernel.is_euler))

        if tr.ring_z0.size:
            if t == 0:
                report.add(ReportEntry.inconclusive(
                    "farfield_decay", t, "identity map at t=0"))
            else:
                fit = farfield_fit(tr, t)
                if self.farfield_b_zero:
                    report.add(ReportEntry.compare(
                        "farfield_b", t, abs(fit.b), self.farfield_b_tol))
                else:
                    report.add(ReportEntry(
                        "farfield_b", t, abs(fit.b), float("nan"),
                        float("nan"), PASS, hard=False,
                        note="drift not pinned by symmetry"))
                # X - z - b = c/z + O(1/z^2): decay no slower than 1/z.
                # The exponent lands near -1 when the 1/z coefficient is
                # nonzero and falls below it when c vanishes (e.g. zero net
                # integral), so only the upper edge is asserted.
                report.add(ReportEntry.compare(
                    "farfield_decay", t, fit.decay_exponent, -0.85,
                    note="|c| = %g" % abs(fit.c)))

        if dist.status == PASS and math.isfinite(dist.measured):
            q = quasisymmetry_sample(tr, self.quasi_triples, dist.measured,
                                     self.quasi_seed)
            q.t = t
            report.add(q)
