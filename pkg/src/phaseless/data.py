"""Measurement synthesis: reference shifts, superposition data, noise, PFD1 files.

PFD1 layout: one line of JSON (the header) terminated by ``\\n``, then the
payload as little-endian float64 in row-major order.  Far-field payloads
store (re, im) pairs, phaseless payloads store real values.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, FormatError
from .forward.solver import FarFieldMatrix
from .geometry import DirectionSet, uniform_directions

FORMAT = "PFD1"
RNG_NAME = "numpy.PCG64"
NOISE_MODES = ("symmetric", "independent")


@dataclass(frozen=True, eq=False)
class PhaselessTensor:
    """``values[i, j, l] = |u_z0(xhat_i; d_j) + u_z0(xhat_i; d_l)|^2``."""

    k: float
    z0: tuple
    obs: DirectionSet
    inc: DirectionSet
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        m, n = self.obs.count, self.inc.count
        if np.shape(self.values) != (m, n, n):
            raise DomainError(f"phaseless values {np.shape(self.values)} do not match ({m}, {n}, {n})")

    def replace(self, **changes):
        kw = dict(k=self.k, z0=self.z0, obs=self.obs, inc=self.inc,
                  values=self.values, meta=dict(self.meta))
        kw.update(changes)
        return PhaselessTensor(**kw)


@dataclass(frozen=True)
class NoiseSpec:
    delta: float
    seed: int = 0
    mode: str = "symmetric"

    def __post_init__(self):
        if not np.isfinite(self.delta) or self.delta < 0:
            raise DomainError(f"noise ratio must be non-negative, got {self.delta!r}")
        if self.delta > 1:
            raise DomainError(f"noise ratio must not exceed 1, got {self.delta!r}")
        if self.mode not in NOISE_MODES:
            raise DomainError(f"noise mode must be one of {NOISE_MODES}")


def shift_to_reference(ff, z0):
    """Re-reference the incident waves to ``exp(ik(x - z0).d)``."""
    z0 = np.asarray(z0, dtype=float)
    delta = z0 - np.asarray(ff.z0, dtype=float)
    phase = np.exp(-1j * ff.k * (ff.inc.vectors @ delta))
    return ff.replace(values=ff.values * phase[None, :], z0=tuple(float(v) for v in z0))


def assemble_phaseless(ff_z0):
    """Phaseless data for every ordered pair of incident directions."""
    f = ff_z0.values
    vals = np.abs(f[:, :, None] + f[:, None, :]) ** 2
    return PhaselessTensor(k=ff_z0.k, z0=tuple(ff_z0.z0), obs=ff_z0.obs, inc=ff_z0.inc,
                           values=vals, meta=dict(ff_z0.meta))


def _noise_meta(meta, spec):
    out = dict(meta)
    out.update(noise_delta=float(spec.delta), rng=RNG_NAME, seed=int(spec.seed), noise_mode=spec.mode)
    return out


def add_noise_farfield(ff, spec):
    """``u + delta (zeta1 + i zeta2) max|u|`` with the maximum over the whole matrix."""
    if spec.delta == 0:
        return ff.replace(meta=_noise_meta(ff.meta, spec))
    rng = np.random.default_rng(spec.seed)
    z1 = rng.standard_normal(ff.values.shape)
    z2 = rng.standard_normal(ff.values.shape)
    scale = spec.delta * np.max(np.abs(ff.values))
    return ff.replace(values=ff.values + scale * (z1 + 1j * z2), meta=_noise_meta(ff.meta, spec))


def phaseless_noise_draws(shape, spec):
    """Standard normal draws used by :func:`add_noise_phaseless`.

    In ``symmetric`` mode one draw serves both orderings of an incident
    pair, so ``draws[i, j, l] == draws[i, l, j]``.
    """
    rng = np.random.default_rng(spec.seed)
    z = rng.standard_normal(shape)
    if spec.mode == "symmetric":
        upper = np.triu(z)
        z = upper + np.swapaxes(np.triu(z, 1), -1, -2)
    return z


def add_noise_phaseless(pt, spec):
    """``|u|^2 + delta zeta3 max|u|^2``; negative results are kept as they are."""
    if spec.delta == 0:
        return pt.replace(meta=_noise_meta(pt.meta, spec))
    z = phaseless_noise_draws(pt.values.shape, spec)
    scale = spec.delta * np.max(pt.values)
    return pt.replace(values=pt.values + scale * z, meta=_noise_meta(pt.meta, spec))


def _header(obj):
    meta = obj.meta
    kind = "farfield" if isinstance(obj, FarFieldMatrix) else "phaseless"
    head = {
        "format": FORMAT,
        "kind": kind,
        "k": float(obj.k),
        "M": int(obj.obs.count),
        "N": int(obj.inc.count),
        "z0": [float(v) for v in obj.z0],
        "noise_delta": float(meta.get("noise_delta", 0.0)),
        "rng": meta.get("rng"),
        "seed": meta.get("seed"),
    }
    if "noise_mode" in meta:
        head["noise_mode"] = meta["noise_mode"]
    return kind, head


def save_dataset(path, obj):
    kind, head = _header(obj)
    if kind == "farfield":
        payload = np.ascontiguousarray(obj.values, dtype="<c16").view("<f8")
    else:
        payload = np.ascontiguousarray(obj.values, dtype="<f8")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(json.dumps(head, separators=(",", ":")).encode("utf-8") + b"\n")
        fh.write(payload.tobytes(order="C"))
    return path


_REQUIRED = ("format", "kind", "k", "M", "N", "z0", "noise_delta", "rng", "seed")


def load_dataset(path, kind=None):
    """Read a PFD1 file; ``kind`` optionally asserts ``farfield`` or ``phaseless``."""
    raw = Path(path).read_bytes()
    newline = raw.find(b"\n")
    if newline < 0:
        raise FormatError(f"{path}: line 1: missing header terminator")
    try:
        head = json.loads(raw[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: line 1: header is not valid JSON ({exc})") from None
    if not isinstance(head, dict):
        raise FormatError(f"{path}: line 1: header must be a JSON object")
    missing = [key for key in _REQUIRED if key not in head]
    if missing:
        raise FormatError(f"{path}: line 1: header lacks keys {missing}")
    if head["format"] != FORMAT:
        raise FormatError(f"{path}: line 1: unsupported format version {head['format']!r}")
    if head["kind"] not in ("farfield", "phaseless"):
        raise FormatError(f"{path}: line 1: unknown kind {head['kind']!r}")
    if kind is not None and head["kind"] != kind:
        raise FormatError(f"{path}: line 1: expected kind {kind!r}, found {head['kind']!r}")
    m, n = head["M"], head["N"]
    if not (isinstance(m, int) and isinstance(n, int) and m > 0 and n > 0):
        raise FormatError(f"{path}: line 1: M and N must be positive integers")
    z0 = head["z0"]
    if not (isinstance(z0, list) and len(z0) == 2):
        raise FormatError(f"{path}: line 1: z0 must be a pair")

    offset = newline + 1
    count = m * n * 2 if head["kind"] == "farfield" else m * n * n
    expected = 8 * count
    actual = len(raw) - offset
    if actual != expected:
        raise FormatError(
            f"{path}: payload at byte offset {offset}: expected {expected} bytes, got {actual}"
        )
    data = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).astype(float)
    meta = {"noise_delta": float(head["noise_delta"]), "rng": head["rng"], "seed": head["seed"]}
    if "noise_mode" in head:
        meta["noise_mode"] = head["noise_mode"]
    obs, inc = uniform_directions(m), uniform_directions(n)
    z0 = (float(z0[0]), float(z0[1]))
    k = float(head["k"])
    if head["kind"] == "farfield":
        values = data.view(np.complex128).reshape(m, n)
        return FarFieldMatrix(k=k, obs=obs, inc=inc, values=values, z0=z0, meta=meta)
    return PhaselessTensor(k=k, z0=z0, obs=obs, inc=inc, values=data.reshape(m, n, n), meta=meta)
