"""Scalar field representation: initial data, mollification, blobs, norms.

The transported scalar omega lives either on a uniform rectangular grid
(:class:`VorticityGrid`, used by the singular-integral transforms and the
norm trackers) or as a set of Lagrangian particles (:class:`VortexBlob`),
each carrying its scalar value, initial cell area, and the Jacobian
accumulated along its trajectory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .complexfield import FieldStats

__all__ = [
    "VorticityGrid", "VortexBlob", "MollifierSpec",
    "Disk", "Ellipse", "RectUnion",
    "make_indicator", "make_gaussian", "mollify", "to_blobs", "stats",
    "deposit_blobs", "save_grid", "load_grid",
]


@dataclass
class VorticityGrid:
    """Real scalar samples at cell centers of a uniform rectangular grid.

    values has shape (ny, nx), row-major: values[j, i] belongs to the cell
    centered at origin + (i + 1/2) h + 1j (j + 1/2) h.

    Invariant: all values finite; nonzero cells keep a one-cell margin from
    the grid boundary (velocity/divergence transforms assume the support is
    interior).
    """

    origin: complex
    h: float
    nx: int
    ny: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.ny, self.nx):
            raise ValueError("values shape %s != (ny=%d, nx=%d)"
                             % (self.values.shape, self.ny, self.nx))
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")
        nzj, nzi = np.nonzero(self.values)
        if nzj.size and (nzj.min() < 1 or nzj.max() > self.ny - 2
                         or nzi.min() < 1 or nzi.max() > self.nx - 2):
            raise ValueError("support touches the grid boundary; enlarge "
                             "the grid extent")

    @classmethod
    def empty_centered(cls, extent: float, n: int) -> "VorticityGrid":
        """Square grid covering [-extent, extent]^2 with n cells per side."""
        h = 2.0 * extent / n
        return cls(origin=complex(-extent, -extent), h=h, nx=n, ny=n,
                   values=np.zeros((n, n)))

    def cell_centers(self) -> np.ndarray:
        xs = self.origin.real + (np.arange(self.nx) + 0.5) * self.h
        ys = self.origin.imag + (np.arange(self.ny) + 0.5) * self.h
        return xs[None, :] + 1j * ys[:, None]

    def copy(self) -> "VorticityGrid":
        return replace(self, values=self.values.copy())

    def value_at(self, z: complex) -> float:
        """Nearest-cell lookup; zero outside the grid."""
        i = int(math.floor((z.real - self.origin.real) / self.h))
        j = int(math.floor((z.imag - self.origin.imag) / self.h))
        if 0 <= i < self.nx and 0 <= j < self.ny:
            return float(self.values[j, i])
        return 0.0


@dataclass
class VortexBlob:
    """Lagrangian particle: position, carried scalar value (constant along
    the trajectory), initial quadrature area, and accumulated Jacobian
    det DX > 0 (sense-preserving flows)."""

    position: complex
    omega: float
    area0: float
    jacobian: float = 1.0

    def __post_init__(self):
        if self.area0 <= 0:
            raise ValueError("blob area0 must be positive")
        if self.jacobian <= 0:
            raise ValueError("blob jacobian must stay positive")


@dataclass(frozen=True)
class MollifierSpec:
    """Radius-epsilon polynomial bump (1 - (r/epsilon)^2)^2, unit mass."""

    epsilon: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("mollifier radius must be positive")


# ---------------------------------------------------------------------------
# Shapes and initial data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Disk:
    radius: float
    center: complex = 0j


@dataclass(frozen=True)
class Ellipse:
    a: float                     # semiaxis along x
    b: float                     # semiaxis along y
    center: complex = 0j


@dataclass(frozen=True)
class RectUnion:
    """Union of axis-aligned rectangles, each (x0, x1, y0, y1)."""

    rects: tuple


def _inside(shape, zz):
    if isinstance(shape, Disk):
        return np.abs(zz - shape.center) < shape.radius
    if isinstance(shape, Ellipse):
        d = zz - shape.center
        return (d.real / shape.a) ** 2 + (d.imag / shape.b) ** 2 < 1.0
    if isinstance(shape, RectUnion):
        m = np.zeros(zz.shape, dtype=bool)
        for (x0, x1, y0, y1) in shape.rects:
            m |= ((zz.real > x0) & (zz.real < x1)
                  & (zz.imag > y0) & (zz.imag < y1))
        return m
    raise TypeError("unsupported shape %r" % (shape,))


def make_indicator(shape, amplitude: float, grid: VorticityGrid) -> VorticityGrid:
    """Indicator initial datum: amplitude where the cell center lies inside
    the shape, 0 elsewhere.  ``grid`` provides the geometry (its values are
    ignored).  Raises if the shape does not fit with a one-cell margin."""
    zz = grid.cell_centers()
    values = np.where(_inside(shape, zz), float(amplitude), 0.0)
    return VorticityGrid(grid.origin, grid.h, grid.nx, grid.ny, values)


def make_gaussian(amplitude: float, width: float, grid: VorticityGrid,
                  center: complex = 0j, cutoff: float = 1e-4) -> VorticityGrid:
    """Truncated Gaussian amplitude * exp(-|z-center|^2/width^2), set to zero
    below cutoff * |amplitude| so the support is compact."""
    zz = grid.cell_centers()
    values = amplitude * np.exp(-np.abs(zz - center) ** 2 / width ** 2)
    values[np.abs(values) < abs(amplitude) * cutoff] = 0.0
    return VorticityGrid(grid.origin, grid.h, grid.nx, grid.ny, values)


def mollify(data: VorticityGrid, spec: MollifierSpec) -> VorticityGrid:
    """Convolve with the unit-mass radius-epsilon bump.

    Exactly preserves (discretely) the three monotonicity properties:
    linf(out) <= linf(in), l1(out) <= l1(in) (nonnegative unit-sum weights),
    and compact support grown by at most epsilon.  For epsilon < h the
    mollifier is below grid resolution and the data is returned unchanged.
    """
    from scipy.ndimage import convolve

    eps, h = spec.epsilon, data.h
    if eps < h:
        return data.copy()
    r = int(math.floor(eps / h))
    off = np.arange(-r, r + 1) * h
    rr2 = (off[None, :] ** 2 + off[:, None] ** 2) / eps ** 2
    w = np.where(rr2 < 1.0, (1.0 - rr2) ** 2, 0.0)
    w /= w.sum()
    out = convolve(data.values, w, mode="constant", cval=0.0)
    return VorticityGrid(data.origin, data.h, data.nx, data.ny, out)


def to_blobs(data: VorticityGrid, threshold: float = 0.0):
    """One blob per cell with |value| > threshold (position = cell center,
    area0 = h^2, jacobian = 1)."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    zz = data.cell_centers()
    mask = np.abs(data.values) > threshold
    h2 = data.h ** 2
    return [VortexBlob(position=complex(z), omega=float(v), area0=h2)
            for z, v in zip(zz[mask], data.values[mask])]


def stats(field, blob_radius: float = 0.0) -> FieldStats:
    """Norms and support geometry of a grid or a blob list.

    For blobs, l1 = sum |omega| area0 jacobian (the transported measure) and
    support_area = sum area0 jacobian over omega != 0; the support radius
    includes ``blob_radius`` so the union of blob disks is covered.
    """
    if hasattr(field, "values"):
        g = field
        absv = np.abs(g.values)
        h2 = g.h ** 2
        l1 = float(absv.sum() * h2)
        linf = float(absv.max(initial=0.0))
        mask = absv > 0
        area = float(mask.sum() * h2)
        if mask.any():
            centers = g.cell_centers()[mask]
            centroid = complex(centers.mean())
            radius = float(np.abs(centers - centroid).max()
                           + g.h / math.sqrt(2.0))
        else:
            centroid, radius = 0j, 0.0
        return FieldStats(l1, linf, area, radius, centroid)
    blobs = list(field)
    if not blobs:
        return FieldStats(0.0, 0.0, 0.0, 0.0, 0j)
    om = np.array([b.omega for b in blobs])
    w = np.array([b.area0 * b.jacobian for b in blobs])
    z = np.array([b.position for b in blobs])
    nz = om != 0
    l1 = float(np.sum(np.abs(om) * w))
    linf = float(np.max(np.abs(om)))
    area = float(np.sum(w[nz]))
    if nz.any():
        centroid = complex(z[nz].mean())
        radius = float(np.abs(z[nz] - centroid).max() + blob_radius)
    else:
        centroid, radius = 0j, 0.0
    return FieldStats(l1, linf, area, radius, centroid)


def deposit_blobs(blobs, grid: VorticityGrid) -> VorticityGrid:
    """Cloud-in-cell (bilinear) deposit of transported blob masses onto the
    geometry of ``grid``; returns a density field (mass / h^2).  Used to
    compare runs with different particle sets on a common grid."""
    h = grid.h
    values = np.zeros((grid.ny, grid.nx))
    for b in blobs:
        m = b.omega * b.area0 * b.jacobian
        fx = (b.position.real - grid.origin.real) / h - 0.5
        fy = (b.position.imag - grid.origin.imag) / h - 0.5
        i0, j0 = int(math.floor(fx)), int(math.floor(fy))
        ax, ay = fx - i0, fy - j0
        for dj, wy in ((0, 1.0 - ay), (1, ay)):
            for di, wx in ((0, 1.0 - ax), (1, ax)):
                i, j = i0 + di, j0 + dj
                if 0 <= i < grid.nx and 0 <= j < grid.ny:
                    values[j, i] += m * wx * wy
    values /= h * h
    return VorticityGrid(grid.origin, grid.h, grid.nx, grid.ny, values)


# ---------------------------------------------------------------------------
# CSV persistence (header: nx, ny, origin, h; then row-major values)
# ---------------------------------------------------------------------------

def save_grid(data: VorticityGrid, path) -> None:
    with open(path, "w") as f:
        f.write("nx,ny,origin_re,origin_im,h\n")
        f.write("%d,%d,%r,%r,%r\n"
                % (data.nx, data.ny, data.origin.real, data.origin.imag,
                   data.h))
        for row in data.values:
            f.write(",".join(repr(float(v)) for v in row) + "\n")


def load_grid(path) -> VorticityGrid:
    with open(path) as f:
        header = f.readline().strip().split(",")
        if header != ["nx", "ny", "origin_re", "origin_im", "h"]:
            raise ValueError("unrecognized grid CSV header: %r" % (header,))
        nx, ny, ore, oim, h = f.readline().strip().split(",")
        values = np.loadtxt(f, delimiter=",", ndmin=2)
    return VorticityGrid(complex(float(ore), float(oim)), float(h),
                         int(nx), int(ny), values)
