"""Cylinder functions of order 0 and 1 and the Funk-Hecke integral.

Two evaluation branches are used:

* ``t < 12``: ascending power series for J0, J1 and the logarithmic
  (Neumann) series for Y0, Y1, summed until the terms drop below 1e-17.
* ``t >= 12``: Hankel asymptotic expansion, split into the P/Q series,
  each truncated at its smallest term with half of that term added.

Both branches agree to about 1e-13 at the crossover.  Arguments above
``MAX_ARGUMENT`` are rejected.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
CROSSOVER = 12.0
MAX_ARGUMENT = 1.0e4

_SERIES_TOL = 1e-17
_ASYMPTOTIC_TERMS = 40


def _as_array(t, *, positive):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("cylinder function argument must be finite")
    if positive and np.any(arr <= 0.0):
        raise DomainError("Hankel functions are defined only for t > 0")
    if np.any(np.abs(arr) > MAX_ARGUMENT):
        raise DomainError(f"argument exceeds supported range |t| <= {MAX_ARGUMENT:g}")
    return arr


def _series(t, with_y):
    """Ascending series on 0 <= t < CROSSOVER."""
    half = 0.5 * t
    x = half * half
    term0 = np.ones_like(t)
    term1 = half.copy()
    j0 = term0.copy()
    j1 = term1.copy()
    # harmonic-number weighted sums for the Neumann series
    s0 = np.zeros_like(t)
    s1 = term1.copy()  # p = 0 weight H_0 + H_1 = 1
    harmonic = 0.0
    p = 0
    while True:
        p += 1
        term0 = term0 * (-x / (p * p))
        term1 = term1 * (-x / (p * (p + 1)))
        j0 += term0
        j1 += term1
        if with_y:
            harmonic += 1.0 / p
            s0 += harmonic * term0
            s1 += (2.0 * harmonic + 1.0 / (p + 1)) * term1
        if p > 2 and np.max(np.abs(term0), initial=0.0) < _SERIES_TOL and \
                np.max(np.abs(term1), initial=0.0) < _SERIES_TOL:
            break
    if not with_y:
        return j0, j1, None, None
    with np.errstate(divide="ignore"):
        log_term = np.log(half) + EULER_GAMMA
        y0 = (2.0 / np.pi) * (log_term * j0 - s0)
        y1 = -2.0 / (np.pi * t) + (2.0 / np.pi) * log_term * j1 - s1 / np.pi
    return j0, j1, y0, y1


def _alternating_sum(terms):
    """Sum along axis 0, truncated at the smallest term plus half of it."""
    mag = np.abs(terms)
    grows = mag[1:] > mag[:-1]
    tiny = mag[:-1] < _SERIES_TOL
    stop_mask = grows | tiny
    has_stop = stop_mask.any(axis=0)
    stop = np.where(has_stop, np.argmax(stop_mask, axis=0), terms.shape[0] - 1)
    partial = np.cumsum(terms, axis=0)
    idx = stop[np.newaxis, :]
    last = np.take_along_axis(terms, idx, axis=0)[0]
    total = np.take_along_axis(partial, idx, axis=0)[0]
    return total - 0.5 * last


def _asymptotic(t, order):
    mu = 4.0 * order * order
    n_coef = 2 * _ASYMPTOTIC_TERMS
    a = np.empty((n_coef,) + t.shape)
    a[0] = 1.0
    for k in range(1, n_coef):
        a[k] = a[k - 1] * (mu - (2 * k - 1) ** 2) / (8.0 * k * t)
    signs = np.where(np.arange(_ASYMPTOTIC_TERMS) % 2 == 0, 1.0, -1.0)[:, np.newaxis]
    p = _alternating_sum(signs * a[0::2])
    q = _alternating_sum(signs * a[1::2])
    chi = t - (0.5 * order + 0.25) * np.pi
    amp = np.sqrt(2.0 / (np.pi * t))
    c, s = np.cos(chi), np.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def cylinder_functions(t, with_y=True):
    """Return ``(J0, J1, Y0, Y1)`` evaluated elementwise at ``t``.

    ``t`` must be non-negative (strictly positive when ``with_y``).  When
    ``with_y`` is false the Y entries are ``None``.
    """
    arr = _as_array(t, positive=with_y)
    if np.any(arr < 0.0):
        raise DomainError("cylinder functions require t >= 0")
    flat = arr.ravel()
    j0 = np.empty_like(flat)
    j1 = np.empty_like(flat)
    y0 = np.empty_like(flat) if with_y else None
    y1 = np.empty_like(flat) if with_y else None

    small = flat < CROSSOVER
    if small.any():
        a, b, c, d = _series(flat[small], with_y)
        j0[small], j1[small] = a, b
        if with_y:
            y0[small], y1[small] = c, d
    large = ~small
    if large.any():
        tl = flat[large]
        j0[large], y0_l = _asymptotic(tl, 0)
        j1[large], y1_l = _asymptotic(tl, 1)
        if with_y:
            y0[large], y1[large] = y0_l, y1_l

    shape = arr.shape
    out = [j0.reshape(shape), j1.reshape(shape)]
    out += [y0.reshape(shape), y1.reshape(shape)] if with_y else [None, None]
    if shape == ():
        out = [None if v is None else float(v) for v in out]
    return tuple(out)


def bessel_j0(t):
    """Bessel function J0 for finite ``t``; J0 is even so negative ``t`` is folded."""
    arr = _as_array(t, positive=False)
    return cylinder_functions(np.abs(arr), with_y=False)[0]


def bessel_j1(t):
    """Bessel function J1 for finite ``t`` (odd extension for ``t < 0``)."""
    arr = _as_array(t, positive=False)
    val = cylinder_functions(np.abs(arr), with_y=False)[1]
    return np.sign(arr) * val if np.ndim(arr) else float(np.sign(arr) * val)


def hankel1_0(t):
    """Hankel function of the first kind, order 0, for ``t > 0``."""
    j0, _, y0, _ = cylinder_functions(t)
    return j0 + 1j * y0


def hankel1_1(t):
    """Hankel function of the first kind, order 1, for ``t > 0``."""
    _, j1, _, y1 = cylinder_functions(t)
    return j1 + 1j * y1


def funk_hecke(k, x):
    """Return ``2*pi*J0(k|x|)``, the integral of ``exp(i k x.d)`` over the unit circle.

    ``x`` may be a single point of shape ``(2,)`` or a stack ``(..., 2)``.
    """
    if not np.isfinite(k) or k <= 0:
        raise DomainError(f"wavenumber must be positive, got {k!r}")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise DomainError("points must have a trailing dimension of size 2")
    r = np.hypot(x[..., 0], x[..., 1])
    return 2.0 * np.pi * bessel_j0(k * r)


@dataclass(frozen=True)
class SpecfunConstants:
    t1: float
    j1_at_t1: float


def _j1_prime(t):
    j0, j1, _, _ = cylinder_functions(t, with_y=False)
    return j0 - j1 / t


def _compute_constants():
    t1 = brentq(_j1_prime, 1.5, 2.2, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return SpecfunConstants(t1=t1, j1_at_t1=bessel_j1(t1))


CONSTANTS = _compute_constants()
