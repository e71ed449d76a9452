"""Separation-of-variables far field for a disc; used to validate the solver.

Modal coefficients rely on scipy's Bessel routines so that the oracle
shares no code with the Nystrom path.
"""
import numpy as np
from scipy import special

from ..errors import DomainError, UnsupportedOracleError
from .conditions import Dirichlet, Impedance, Transmission
from .solver import FarFieldMatrix


def modal_coefficients(bc, k, radius, orders):
    """Scattered-wave coefficients ``a_n`` for ``u^s = sum a_n i^n H_n(kr) e^{in theta}``."""
    kr = k * radius
    n = np.asarray(orders)
    jn, djn = special.jv(n, kr), special.jvp(n, kr)
    hn, dhn = special.hankel1(n, kr), special.h1vp(n, kr)
    if isinstance(bc, Dirichlet):
        return -jn / hn
    if isinstance(bc, Impedance):
        if not bc.is_constant:
            raise UnsupportedOracleError("the disc oracle needs a constant impedance")
        rho = bc.constant()
        return -(djn + 1j * rho * jn) / (dhn + 1j * rho * hn)
    if isinstance(bc, Transmission):
        k2 = k * np.sqrt(bc.n)
        jin, djin = special.jv(n, k2 * radius), special.jvp(n, k2 * radius)
        # continuity: jn + a hn = b jin ; flux: k(djn + a dhn) = lam k2 b djin
        num = bc.lam * k2 * jn * djin - k * djn * jin
        den = k * dhn * jin - bc.lam * k2 * hn * djin
        return num / den
    raise UnsupportedOracleError(f"no disc oracle for {bc!r}")


def analytic_circle_farfield(radius, center, bc, k, obs, inc, series_terms=None):
    if not radius > 0 or not k > 0:
        raise DomainError("radius and wavenumber must be positive")
    scale = k * radius
    if isinstance(bc, Transmission):
        scale *= max(1.0, np.sqrt(bc.n))
    minimum = int(np.ceil(k * radius)) + 20
    if series_terms is None:
        series_terms = int(np.ceil(scale)) + 30
    if series_terms < minimum:
        raise DomainError(f"series_terms must be at least {minimum}")
    orders = np.arange(series_terms + 1)
    a = modal_coefficients(bc, k, radius, orders)
    theta_obs = obs.angles
    theta_inc = inc.angles
    delta = theta_obs[:, None] - theta_inc[None, :]
    # a_{-n} = a_n for all three conditions
    series = a[0] + 2.0 * np.einsum("n,nij->ij", a[1:], np.cos(orders[1:, None, None] * delta))
    values = np.sqrt(2.0 / (np.pi * k)) * np.exp(-0.25j * np.pi) * series
    c = np.asarray(center, dtype=float)
    shift = np.exp(1j * k * (inc.vectors @ c))[None, :] * np.exp(-1j * k * (obs.vectors @ c))[:, None]
    return FarFieldMatrix(k=float(k), obs=obs, inc=inc, values=values * shift)
