"""Direct imaging functionals for phaseless and full far-field data.

With ``p_j(z) = exp(ik (z - z0).d_j)`` the phaseless functional is the
quadratic form ``|sum_i sum_{j,l} T[i, j, l] p_j conj(p_l)|`` scaled by the
trapezoid weights.  Collapsing the observation index first leaves an
N x N Hermitian matrix, so each sampling point costs one length-N
matrix-vector product regardless of how the tensor was generated.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError
from .forward.solver import FarFieldMatrix
from .geometry import SamplingGrid
from .specfun import bessel_j0

REALNESS_EPS = 1e-300
_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class IndicatorField:
    grid: SamplingGrid
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape:
            raise DomainError(f"field shape {vals.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("indicator values must be finite")

    @property
    def points(self):
        return self.grid.points

    def ravel(self):
        return np.asarray(self.values).ravel()


@dataclass(frozen=True, eq=False)
class DecompositionTriple:
    grid: SamplingGrid
    I1: np.ndarray
    I2: np.ndarray
    I3: np.ndarray

    def combined(self):
        return np.abs(self.I1 + self.I2 + self.I3)


def _require_reference(obj):
    k = getattr(obj, "k", None)
    z0 = getattr(obj, "z0", None)
    if k is None or z0 is None:
        raise ContractError("dataset lacks wavenumber or reference point metadata")
    if not (np.isfinite(k) and k > 0):
        raise ContractError(f"dataset wavenumber must be positive, got {k!r}")
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (2,):
        raise ContractError("reference point must be a pair")
    return float(k), z0


def _chunks(points):
    for start in range(0, len(points), _CHUNK):
        yield points[start:start + _CHUNK]


def _phases(k, pts, z0, dirs):
    """``exp(ik (z - z0).d_j)`` as a (points x directions) matrix."""
    return np.exp(1j * k * ((pts - z0) @ dirs.T))


def collapsed_matrix(pt, include_diagonal=False):
    """``W[j, l] = sum_i T[i, j, l]`` with the diagonal optionally removed."""
    w = np.asarray(pt.values, dtype=float).sum(axis=0)
    if not include_diagonal:
        w = w.copy()
        np.fill_diagonal(w, 0.0)
    return w


def _quadratic_sums(pt, points, include_diagonal):
    k, z0 = _require_reference(pt)
    w = collapsed_matrix(pt, include_diagonal)
    dirs = pt.inc.vectors
    out = np.empty(len(points), dtype=complex)
    pos = 0
    for pts in _chunks(points):
        p = _phases(k, pts, z0, dirs)
        out[pos:pos + len(pts)] = np.einsum("gj,gj->g", p @ w, np.conj(p))
        pos += len(pts)
    m, n = pt.obs.count, pt.inc.count
    return out * (2 * np.pi / m) * (2 * np.pi / n) ** 2


def indicator_phaseless(pt, grid, include_diagonal=False):
    """Phaseless direct-imaging functional on ``grid`` for a reference-point tensor."""
    vals = np.abs(_quadratic_sums(pt, grid.points, include_diagonal))
    prov = {"indicator": "phaseless", "z0": [float(v) for v in pt.z0], "k": float(pt.k),
            "include_diagonal": bool(include_diagonal), "M": pt.obs.count, "N": pt.inc.count}
    prov.update({key: pt.meta[key] for key in ("noise_delta", "seed") if key in pt.meta})
    return IndicatorField(grid, vals.reshape(grid.shape), prov)


def realness_check(pt, z, include_diagonal=False):
    """Relative imaginary part of the inner double sum at the points ``z``.

    A tensor symmetric in its last two indices makes the quadratic form
    Hermitian, so the residual sits at rounding level.
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    s = _quadratic_sums(pt, z, include_diagonal)
    res = np.abs(s.imag) / (np.abs(s) + REALNESS_EPS)
    return float(res[0]) if res.size == 1 else res


def indicator_decomposition(ff_z0, grid, z0=None):
    """Split the diagonal-inclusive functional into its three structural parts.

    ``I1`` and ``I2`` are squared back-propagations with the two phase
    signs; ``I3`` carries the Bessel factor ``2 pi J0(k|z - z0|)``.
    """
    k, ref = _require_reference(ff_z0)
    if z0 is not None and not np.allclose(np.asarray(z0, dtype=float), ref):
        raise ContractError(f"far field is referenced to {tuple(ref)}, not {tuple(z0)}")
    f = ff_z0.values
    m, n = f.shape
    wm, wn = 2 * np.pi / m, 2 * np.pi / n
    power = (np.abs(f) ** 2).sum(axis=0)
    dirs = ff_z0.inc.vectors
    pts = grid.points
    i1 = np.empty(len(pts))
    i2 = np.empty(len(pts))
    i3 = np.empty(len(pts))
    pos = 0
    for chunk in _chunks(pts):
        p = _phases(k, chunk, ref, dirs)
        v = wn * (np.conj(p) @ f.T)
        w = wn * (p @ f.T)
        sl = slice(pos, pos + len(chunk))
        i1[sl] = wm * (np.abs(v) ** 2).sum(axis=1)
        i2[sl] = wm * (np.abs(w) ** 2).sum(axis=1)
        dist = np.linalg.norm(chunk - ref, axis=1)
        i3[sl] = 2 * np.pi * bessel_j0(k * dist) * wm * wn * (2.0 * p.real @ power)
        pos += len(chunk)
    shape = grid.shape
    return DecompositionTriple(grid, i1.reshape(shape), i2.reshape(shape), i3.reshape(shape))


def indicator_fulldata(ff, grid):
    """Full-data comparator ``(2pi/N) sum_j |(2pi/M) sum_i u(xhat_i; d_j) e^{ik z.xhat_i}|^2``.

    Expects the plain far field (incident waves referenced to the origin).
    """
    if not np.allclose(ff.z0, 0.0):
        raise ContractError("full-data imaging expects a far field referenced to the origin")
    k = float(ff.k)
    m, n = ff.values.shape
    xhat = ff.obs.vectors
    pts = grid.points
    out = np.empty(len(pts))
    pos = 0
    for chunk in _chunks(pts):
        e = np.exp(1j * k * (chunk @ xhat.T))
        back = (2 * np.pi / m) * (e @ ff.values)
        out[pos:pos + len(chunk)] = (2 * np.pi / n) * (np.abs(back) ** 2).sum(axis=1)
        pos += len(chunk)
    prov = {"indicator": "fulldata", "z0": [0.0, 0.0], "k": k, "M": m, "N": n}
    return IndicatorField(grid, out.reshape(grid.shape), prov)


def born_point_farfield(k, points, obs, inc, strength=1.0, z0=(0.0, 0.0)):
    """Born far field of point scatterers: ``sum tau e^{ik (d - xhat).y}``.

    Incident waves are referenced to ``z0``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tau = np.broadcast_to(np.asarray(strength, dtype=complex), (len(pts),))
    z0 = np.asarray(z0, dtype=float)
    values = np.zeros((obs.count, inc.count), dtype=complex)
    for y, t in zip(pts, tau):
        out_phase = np.exp(-1j * k * (obs.vectors @ y))
        in_phase = np.exp(1j * k * (inc.vectors @ (y - z0)))
        values += t * np.outer(out_phase, in_phase)
    return FarFieldMatrix(k=float(k), obs=obs, inc=inc, values=values,
                          z0=tuple(float(v) for v in z0))
