"""Experiment configuration: JSON loading, validation and hashing.

Recognised keys (everything else is rejected)::

    k                    wavenumber (required)
    shapes               list of obstacles (required), each
                         {"kind": ..., "center": [x, y], "scale": s, "radius": r,
                          "bc": {"type": "dirichlet"}
                              | {"type": "impedance", "rho": 2.0 | {"mean", "cos", "sin"}}
                              | {"type": "transmission", "n": ..., "lam": ...}}
    M, N                 observation / incident direction counts (default 64)
    nodes                quadrature nodes per obstacle (default: chosen from k)
    z10, z20             reference points of the two stages (required)
    region               large sampling region [a, b, c, d] (required)
    resolution           [nx, ny] on the large region (default: 10 per wavelength)
    fine_resolution      [nx, ny] on the small region (default: 20 per wavelength)
    noise_delta, seed    noise ratio and generator seed (default 0.0, 0)
    noise_mode           "symmetric" or "independent"
    quantile             top fraction kept when thresholding (default 0.10)
    iou_tol              persistence overlap threshold (default 0.3)
    padding              small-region padding relative to the box diagonal (default 0.2)
    min_component        smallest component, in square wavelengths, that may persist (default 0.25)
    spot_wavelengths     radius, in wavelengths, of the disc around the reference point left
                         out when the threshold is computed (default 2.0)
    include_diagonal     keep the j = l terms in the indicator (default false)
    output_dir           where the pipeline writes its products
"""
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, PhaselessError
from ..forward.conditions import Dirichlet, Impedance, Scatterer, Transmission, TrigProfile
from ..geometry import make_shape

_SHAPE_KEYS = {"kind", "center", "scale", "radius", "bc"}


@dataclass(frozen=True)
class ShapeSpec:
    kind: str
    center: tuple = (0.0, 0.0)
    bc: dict = field(default_factory=lambda: {"type": "dirichlet"})
    scale: float = 1.0
    radius: float = None

    def curve(self):
        return make_shape(self.kind, self.center, radius=self.radius, scale=self.scale)

    def condition(self):
        return _make_condition(self.bc)

    def scatterer(self):
        return Scatterer(self.curve(), self.condition())


@dataclass(frozen=True)
class ExperimentConfig:
    k: float
    shapes: tuple
    z10: tuple
    z20: tuple
    region: tuple
    M: int = 64
    N: int = 64
    nodes: int = None
    resolution: tuple = None
    fine_resolution: tuple = None
    noise_delta: float = 0.0
    seed: int = 0
    noise_mode: str = "symmetric"
    quantile: float = 0.10
    iou_tol: float = 0.3
    padding: float = 0.2
    min_component: float = 0.25
    spot_wavelengths: float = 2.0
    include_diagonal: bool = False
    output_dir: str = None

    def __post_init__(self):
        validate(self)

    def scatterers(self):
        return [s.scatterer() for s in self.shapes]

    def curves(self):
        return [s.curve() for s in self.shapes]

    def to_dict(self):
        out = asdict(self)
        out["shapes"] = [_shape_dict(s) for s in self.shapes]
        for key in ("z10", "z20", "region", "resolution", "fine_resolution"):
            if out[key] is not None:
                out[key] = list(out[key])
        return out

    def replace(self, **changes):
        kw = {f: getattr(self, f) for f in self.__dataclass_fields__}
        kw.update(changes)
        return ExperimentConfig(**kw)

    def physics_dict(self):
        """Fields that determine the noise-free far field."""
        d = self.to_dict()
        return {key: d[key] for key in ("k", "shapes", "M", "N", "nodes")}

    def hash(self):
        """Digest of everything except the output location."""
        d = self.to_dict()
        d.pop("output_dir")
        return digest(d)


def digest(obj):
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _shape_dict(s):
    d = {"kind": s.kind, "center": list(s.center), "bc": s.bc, "scale": s.scale}
    if s.radius is not None:
        d["radius"] = s.radius
    return d


def _profile(value):
    if isinstance(value, dict):
        extra = set(value) - {"mean", "cos", "sin"}
        if extra or "mean" not in value:
            raise ConfigError(f"impedance profile needs 'mean' and optional 'cos'/'sin', got {sorted(value)}")
        return TrigProfile(float(value["mean"]), tuple(map(float, value.get("cos", ()))),
                           tuple(map(float, value.get("sin", ()))))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise ConfigError(f"impedance must be a number or a profile object, got {value!r}")


def _make_condition(bc):
    if not isinstance(bc, dict) or "type" not in bc:
        raise ConfigError(f"boundary condition must be an object with a 'type', got {bc!r}")
    kind = bc["type"]
    keys = set(bc) - {"type"}
    if kind == "dirichlet":
        if keys:
            raise ConfigError(f"dirichlet takes no parameters, got {sorted(keys)}")
        return Dirichlet()
    if kind == "impedance":
        if keys != {"rho"}:
            raise ConfigError("impedance needs exactly the key 'rho'")
        return Impedance(_profile(bc["rho"]))
    if kind == "transmission":
        if keys != {"n", "lam"}:
            raise ConfigError("transmission needs exactly the keys 'n' and 'lam'")
        return Transmission(float(bc["n"]), float(bc["lam"]))
    raise ConfigError(f"unknown boundary condition type {kind!r}")


def _pair(value, name):
    try:
        out = tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a pair of numbers, got {value!r}") from None
    if len(out) != 2 or not np.all(np.isfinite(out)):
        raise ConfigError(f"{name} must be a pair of finite numbers, got {value!r}")
    return out


def _resolution(value, name):
    if value is None:
        return None
    out = tuple(value)
    if len(out) != 2 or not all(isinstance(v, int) and v >= 2 for v in out):
        raise ConfigError(f"{name} must be two integers >= 2, got {value!r}")
    return out


def validate(cfg):
    if not (np.isfinite(cfg.k) and cfg.k > 0):
        raise ConfigError(f"k must be positive, got {cfg.k!r}")
    if not cfg.shapes:
        raise ConfigError("at least one shape is required")
    for name in ("M", "N"):
        v = getattr(cfg, name)
        if not isinstance(v, int) or v < 2:
            raise ConfigError(f"{name} must be an integer >= 2, got {v!r}")
    if cfg.N % 2:
        raise ConfigError("N must be even")
    if cfg.nodes is not None and (not isinstance(cfg.nodes, int) or cfg.nodes < 16 or cfg.nodes % 2):
        raise ConfigError(f"nodes must be an even integer >= 16, got {cfg.nodes!r}")
    if np.allclose(cfg.z10, cfg.z20):
        raise ConfigError("z10 and z20 must differ")
    if not 0.0 < cfg.quantile < 0.5:
        raise ConfigError(f"quantile must lie in (0, 0.5), got {cfg.quantile!r}")
    if not 0.0 < cfg.iou_tol < 1.0:
        raise ConfigError(f"iou_tol must lie in (0, 1), got {cfg.iou_tol!r}")
    if cfg.padding < 0:
        raise ConfigError("padding must be non-negative")
    if cfg.min_component < 0 or cfg.spot_wavelengths < 0:
        raise ConfigError("min_component and spot_wavelengths must be non-negative")
    if not 0.0 <= cfg.noise_delta <= 1.0:
        raise ConfigError(f"noise_delta must lie in [0, 1], got {cfg.noise_delta!r}")
    if cfg.noise_mode not in ("symmetric", "independent"):
        raise ConfigError(f"unknown noise_mode {cfg.noise_mode!r}")
    a, b, c, d = cfg.region
    if not (b > a and d > c):
        raise ConfigError(f"degenerate region {cfg.region!r}")
    for s in cfg.shapes:
        try:
            curve = s.curve()
            s.condition()
        except PhaselessError as exc:
            raise ConfigError(f"shape {s.kind!r}: {exc}") from None
        xa, xb, ya, yb = curve.bounding_box()
        if xa < a or xb > b or ya < c or yb > d:
            raise ConfigError(f"region {cfg.region!r} does not contain shape {s.kind!r} at {s.center}")


def _shape_from_dict(raw):
    if not isinstance(raw, dict):
        raise ConfigError(f"shape entries must be objects, got {raw!r}")
    extra = set(raw) - _SHAPE_KEYS
    if extra:
        raise ConfigError(f"unknown shape keys {sorted(extra)}")
    if "kind" not in raw:
        raise ConfigError("shape entry lacks 'kind'")
    radius = raw.get("radius")
    return ShapeSpec(
        kind=str(raw["kind"]),
        center=_pair(raw.get("center", (0.0, 0.0)), "center"),
        bc=raw.get("bc", {"type": "dirichlet"}),
        scale=float(raw.get("scale", 1.0)),
        radius=None if radius is None else float(radius),
    )


_REQUIRED = ("k", "shapes", "z10", "z20", "region")


def config_from_dict(raw):
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown configuration keys {sorted(extra)}")
    missing = [key for key in _REQUIRED if key not in raw]
    if missing:
        raise ConfigError(f"missing configuration keys {missing}")
    kw = dict(raw)
    kw["k"] = float(raw["k"])
    kw["shapes"] = tuple(_shape_from_dict(s) for s in raw["shapes"])
    kw["z10"] = _pair(raw["z10"], "z10")
    kw["z20"] = _pair(raw["z20"], "z20")
    region = raw["region"]
    if not isinstance(region, (list, tuple)) or len(region) != 4:
        raise ConfigError(f"region must be [a, b, c, d], got {region!r}")
    kw["region"] = tuple(float(v) for v in region)
    kw["resolution"] = _resolution(raw.get("resolution"), "resolution")
    kw["fine_resolution"] = _resolution(raw.get("fine_resolution"), "fine_resolution")
    for key in ("noise_delta", "quantile", "iou_tol", "padding", "min_component",
                "spot_wavelengths"):
        if key in raw:
            kw[key] = float(raw[key])
    if "seed" in raw and (not isinstance(raw["seed"], int) or isinstance(raw["seed"], bool)):
        raise ConfigError(f"seed must be an integer, got {raw['seed']!r}")
    return ExperimentConfig(**kw)


def load_config(path):
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(raw)
