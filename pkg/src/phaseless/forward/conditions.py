"""Boundary conditions and the obstacle record that pairs them with a curve."""
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from ..errors import DomainError
from ..geometry import ParametricCurve, reflect_through


@dataclass(frozen=True)
class TrigProfile:
    """Real trigonometric polynomial ``mean + sum cos_n cos(nt) + sin_n sin(nt)``."""

    mean: float
    cos: tuple = ()
    sin: tuple = ()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, float(self.mean))
        for n, a in enumerate(self.cos, start=1):
            out = out + a * np.cos(n * t)
        for n, b in enumerate(self.sin, start=1):
            out = out + b * np.sin(n * t)
        return out

    @property
    def is_constant(self):
        return not any(self.cos) and not any(self.sin)


@dataclass(frozen=True)
class Dirichlet:
    """Sound-soft obstacle: total field vanishes on the boundary."""


@dataclass(frozen=True)
class Impedance:
    """``du/dnu + i k rho u = 0``; ``rho`` is a constant or a function of the parameter t."""

    rho: Union[float, complex, Callable] = 0.0

    def values(self, t):
        t = np.asarray(t, dtype=float)
        if callable(self.rho):
            vals = np.asarray(self.rho(t))
        else:
            vals = np.full(t.shape, self.rho)
        if not np.all(np.isfinite(vals)):
            raise DomainError("impedance must be bounded")
        return vals

    @property
    def is_constant(self):
        if callable(self.rho):
            return bool(getattr(self.rho, "is_constant", False))
        return True

    def constant(self):
        if callable(self.rho):
            return complex(self.rho.mean) if self.is_constant else None
        return self.rho


@dataclass(frozen=True)
class Transmission:
    """Penetrable obstacle with constant index ``n`` and flux ratio ``lam``."""

    n: float
    lam: float

    def __post_init__(self):
        if not (np.isfinite(self.n) and self.n > 0):
            raise DomainError(f"refractive index must be positive, got {self.n!r}")
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"transmission constant must be positive, got {self.lam!r}")


@dataclass(frozen=True)
class Scatterer:
    curve: ParametricCurve
    bc: object = field(default_factory=Dirichlet)

    def reflected(self, z0):
        """Central-symmetric copy through ``z0``.

        Coefficients are attached to the curve parameter, and reflection
        keeps the parametrisation, so ``rho(2 z0 - x)`` comes for free.
        """
        return Scatterer(reflect_through(self.curve, z0), self.bc)
