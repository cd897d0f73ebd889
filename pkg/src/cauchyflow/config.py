"""Scenario configuration: a single nested YAML file, strictly validated.

Unknown keys anywhere in the tree are hard errors (a silent typo in a
tolerance or resolution key would invalidate every bound comparison); the
error message carries the key path and the first matching line of the file.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import yaml

__all__ = ["ScenarioConfig", "ConfigError", "load_config"]


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    """Validated scenario parameters (defaults = the moderate disk setup)."""

    name: str = "scenario"
    # kernel
    kernel_kind: str = "cauchy"
    theta: float = 0.0
    # initial data
    shape: str = "disk"               # disk|ellipse|gaussian|rects|two_disks
    amplitude: float = 1.0
    radius: float = 1.0
    a: float = 1.5
    b: float = 0.75
    width: float = 0.5
    center: complex = 0j
    rects: tuple = ()
    centers: tuple = ()               # two_disks
    amplitudes: tuple = ()            # two_disks
    mollify_epsilon: float = 0.0
    # grid
    grid_extent: float = 5.0
    grid_n: int = 250
    # numerics
    blob_spacing: float = 0.04
    blob_radius: float = 0.04
    dt: float = 0.025
    t_end: float = 1.0
    scheme: str = "rk4"
    divergence_mode: str = "fd"
    fd_eta: float | None = None
    # tracers
    tracers_enabled: bool = True
    tracer_extent: float = 2.0
    tracer_spacing: float = 0.02
    far_radii: tuple = ()
    far_count: int = 16
    near_jump: float = 0.2
    # diagnostics
    sample_times: tuple = (1.0,)
    tol_rel: float = 0.05
    tol_conformal: float = 1e-2
    pointwise_tol_rel: float = 0.02
    conformal_margin: float = 0.5
    area_factor: float = 1.2
    farfield_b_zero: bool = True
    quasi_triples: int = 100
    quasi_seed: int = 0
    # velform study (level-0 resolutions default to the run numerics)
    velform_t_mid: float = 0.1
    velform_levels: int = 3
    velform_trim: int = 4
    velform_grid_n: int | None = None
    velform_blob_spacing: float | None = None
    velform_blob_radius: float | None = None
    velform_dt: float | None = None
    # output
    write_checkpoints: bool = False

    def validate(self):
        if self.kernel_kind not in ("cauchy", "euler"):
            raise ConfigError("kernel.kind must be cauchy or euler")
        if self.shape not in ("disk", "ellipse", "gaussian", "rects",
                              "two_disks"):
            raise ConfigError("initial.shape %r not recognized" % self.shape)
        for key in ("blob_spacing", "blob_radius", "dt", "grid_extent",
                    "tracer_spacing"):
            if getattr(self, key) <= 0:
                raise ConfigError("%s must be positive" % key)
        if self.grid_n <= 0:
            raise ConfigError("grid.n must be positive")
        if self.t_end < 0:
            raise ConfigError("numerics.t_end must be >= 0")
        k = self.t_end / self.dt
        if abs(k - round(k)) > 1e-9:
            raise ConfigError("t_end must be an integer multiple of dt")
        for ts in self.sample_times:
            k = ts / self.dt
            if abs(k - round(k)) > 1e-9 or ts < 0 or ts > self.t_end + 1e-12:
                raise ConfigError("sample time %g is not a step multiple "
                                  "within [0, t_end]" % ts)
        r = self._support_radius_hint()
        if self.grid_extent < 4.0 * r - 1e-12:
            raise ConfigError("grid.extent %g must be >= 4x the support "
                              "radius (%g)" % (self.grid_extent, r))
        return self

    def _support_radius_hint(self) -> float:
        if self.shape == "disk":
            return abs(self.center) + self.radius
        if self.shape == "ellipse":
            return abs(self.center) + max(self.a, self.b)
        if self.shape == "gaussian":
            return abs(self.center) + self.width * math.sqrt(math.log(1e4))
        if self.shape == "rects":
            return max(max(abs(x0), abs(x1), abs(y0), abs(y1)) * math.sqrt(2)
                       for (x0, x1, y0, y1) in self.rects)
        if self.shape == "two_disks":
            return max(abs(complex(*c)) for c in self.centers) + self.radius
        return 1.0


def _pair(v, path):
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or not all(isinstance(x, (int, float)) for x in v)):
        raise ConfigError("%s must be a [x, y] pair" % path)
    return complex(float(v[0]), float(v[1]))


# schema: section -> key -> (attribute, converter)
_num = float
_SCHEMA = {
    "scenario": None,       # handled separately (scalar)
    "kernel": {
        "kind": ("kernel_kind", str),
        "theta": ("theta", _num),
    },
    "initial": {
        "shape": ("shape", str),
        "amplitude": ("amplitude", _num),
        "radius": ("radius", _num),
        "a": ("a", _num),
        "b": ("b", _num),
        "width": ("width", _num),
        "center": ("center", _pair),
        "rects": ("rects", lambda v, p: tuple(tuple(map(float, r))
                                              for r in v)),
        "centers": ("centers", lambda v, p: tuple(tuple(map(float, c))
                                                  for c in v)),
        "amplitudes": ("amplitudes", lambda v, p: tuple(map(float, v))),
        "mollify_epsilon": ("mollify_epsilon", _num),
    },
    "grid": {
        "extent": ("grid_extent", _num),
        "n": ("grid_n", int),
    },
    "numerics": {
        "blob_spacing": ("blob_spacing", _num),
        "blob_radius": ("blob_radius", _num),
        "dt": ("dt", _num),
        "t_end": ("t_end", _num),
        "scheme": ("scheme", str),
        # YAML 1.1 reads a bare "off" as boolean False; map it back.
        "divergence_mode": ("divergence_mode",
                            lambda v, _p: "off" if v is False else str(v)),
        "fd_eta": ("fd_eta", _num),
    },
    "tracers": {
        "enabled": ("tracers_enabled", bool),
        "extent": ("tracer_extent", _num),
        "spacing": ("tracer_spacing", _num),
        "far_radii": ("far_radii", lambda v, p: tuple(map(float, v))),
        "far_count": ("far_count", int),
        "near_jump": ("near_jump", _num),
    },
    "diagnostics": {
        "sample_times": ("sample_times", lambda v, p: tuple(map(float, v))),
        "tol_rel": ("tol_rel", _num),
        "tol_conformal": ("tol_conformal", _num),
        "pointwise_tol_rel": ("pointwise_tol_rel", _num),
        "conformal_margin": ("conformal_margin", _num),
        "area_factor": ("area_factor", _num),
        "farfield_b_zero": ("farfield_b_zero", bool),
        "quasi_triples": ("quasi_triples", int),
        "quasi_seed": ("quasi_seed", int),
    },
    "velform": {
        "t_mid": ("velform_t_mid", _num),
        "levels": ("velform_levels", int),
        "trim": ("velform_trim", int),
        "grid_n": ("velform_grid_n", int),
        "blob_spacing": ("velform_blob_spacing", _num),
        "blob_radius": ("velform_blob_radius", _num),
        "dt": ("velform_dt", _num),
    },
    "output": {
        "write_checkpoints": ("write_checkpoints", bool),
    },
}


def _line_of(text: str, key: str) -> int:
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0]
        if key + ":" in stripped:
            return i
    return 0


def load_config(path) -> ScenarioConfig:
    """Parse and validate a scenario file; raises ConfigError with the key
    path and line number on any unknown or invalid entry."""
    with open(path) as f:
        text = f.read()
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("%s: YAML parse error: %s" % (path, exc))
    if tree is None:
        tree = {}
    if not isinstance(tree, dict):
        raise ConfigError("%s: top level must be a mapping" % path)

    cfg = ScenarioConfig()
    for section, content in tree.items():
        if section == "scenario":
            cfg.name = str(content)
            continue
        if section not in _SCHEMA:
            raise ConfigError("%s:%d: unknown section %r"
                              % (path, _line_of(text, section), section))
        keys = _SCHEMA[section]
        if not isinstance(content, dict):
            raise ConfigError("%s:%d: section %r must be a mapping"
                              % (path, _line_of(text, section), section))
        for key, value in content.items():
            if key not in keys:
                raise ConfigError(
                    "%s:%d: unknown key %s.%s"
                    % (path, _line_of(text, key), section, key))
            attr, conv = keys[key]
            try:
                if conv is _pair or (callable(conv)
                                     and getattr(conv, "__name__", "")
                                     == "<lambda>"):
                    converted = conv(value, "%s.%s" % (section, key))
                elif conv is bool:
                    if not isinstance(value, bool):
                        raise ValueError("expected a boolean")
                    converted = value
                else:
                    converted = conv(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError("%s:%d: bad value for %s.%s: %s"
                                  % (path, _line_of(text, key), section,
                                     key, exc))
            setattr(cfg, attr, converted)
    if "sample_times" not in tree.get("diagnostics", {}):
        cfg.sample_times = (cfg.t_end,)      # default: final time only
    try:
        cfg.validate()
    except ConfigError as exc:
        raise ConfigError("%s: %s" % (path, exc))
    return cfg
