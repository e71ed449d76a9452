"""Nystrom discretisation of Helmholtz layer operators on smooth closed curves.

Operators use the fundamental solution ``Phi(x, y) = i/4 H0(k|x-y|)``
without the factor 2 common in textbooks, so the exterior traces read

    (D phi)_+ = K phi + phi/2,     d/dnu (S psi)_+ = K' psi - psi/2.

Logarithmic singularities are split off as ``M1 ln(4 sin^2((t-tau)/2)) + M2``
and integrated with trigonometric-interpolation weights; the remaining
smooth part uses the trapezoid rule.  All matrices act on nodal values
and already contain the arc-length factor ``|x'(tau)|``.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..specfun import EULER_GAMMA, cylinder_functions


@dataclass(frozen=True, eq=False)
class Discretization:
    nodes: int
    t: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    ddx: np.ndarray

    @property
    def m(self):
        return self.nodes // 2

    @property
    def speed(self):
        return np.hypot(self.dx[:, 0], self.dx[:, 1])

    @property
    def normal(self):
        """Outward unit normals at the nodes."""
        return np.stack([self.dx[:, 1], -self.dx[:, 0]], axis=-1) / self.speed[:, None]

    @property
    def weight(self):
        return np.pi / self.m

    @property
    def curvature_term(self):
        """``(x2' x1'' - x1' x2'') / |x'|^2``; equals minus the signed curvature times |x'|."""
        dx, ddx = self.dx, self.ddx
        return (dx[:, 1] * ddx[:, 0] - dx[:, 0] * ddx[:, 1]) / self.speed**2


def discretize(curve, nodes):
    if int(nodes) != nodes or nodes < 16 or nodes % 2:
        raise DomainError(f"node count must be even and >= 16, got {nodes!r}")
    nodes = int(nodes)
    t = np.pi * np.arange(nodes) / (nodes // 2)
    x, dx, ddx = curve.evaluate(t)
    return Discretization(nodes, t, x, dx, ddx)


def log_weights(nodes):
    """Circulant matrix ``R[i, j]`` integrating ``ln(4 sin^2((t_i - tau)/2)) f(tau)``.

    Exact for trigonometric polynomials of degree < nodes/2.
    """
    m = nodes // 2
    j = np.arange(nodes)
    ell = np.arange(1, m)
    row = -(2.0 * np.pi / m) * (np.cos(np.outer(j, ell) * np.pi / m) / ell).sum(axis=1)
    row -= (np.pi / m**2) * np.cos(j * np.pi)
    idx = (j[:, None] - j[None, :]) % nodes
    return row[idx]


def _log_kernel(nodes):
    t = np.pi * np.arange(nodes) / (nodes // 2)
    diff = t[:, None] - t[None, :]
    with np.errstate(divide="ignore"):
        out = np.log(4.0 * np.sin(0.5 * diff) ** 2)
    np.fill_diagonal(out, 0.0)
    return out


class SelfOperators:
    """Layer operators of one curve with itself at wavenumber ``k``.

    Cylinder functions are evaluated once per instance and shared by the
    single-layer, double-layer and adjoint operators.
    """

    def __init__(self, disc, k):
        if not k > 0:
            raise DomainError(f"wavenumber must be positive, got {k!r}")
        self.disc = disc
        self.k = float(k)
        n = disc.nodes
        diff = disc.x[:, None, :] - disc.x[None, :, :]
        r = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(r, 1.0)
        self.r = r
        self.diff = diff
        self.R = log_weights(n)
        self.logk = _log_kernel(n)
        self.j0, self.j1, y0, y1 = cylinder_functions(self.k * r)
        self.h0 = self.j0 + 1j * y0
        self.h1 = self.j1 + 1j * y1
        self._diag = np.eye(n, dtype=bool)

    def _assemble(self, m1, m2):
        return self.R * m1 + self.disc.weight * m2

    def single_layer(self):
        d, k = self.disc, self.k
        speed = d.speed
        full = 0.25j * self.h0 * speed[None, :]
        m1 = -self.j0 * speed[None, :] / (4.0 * np.pi)
        m2 = full - m1 * self.logk
        diag = (0.25j - EULER_GAMMA / (2 * np.pi) - np.log(0.5 * k * speed) / (2 * np.pi)) * speed
        m2[self._diag] = diag
        m1[self._diag] = -speed / (4.0 * np.pi)
        return self._assemble(m1, m2)

    def double_layer(self):
        d, k = self.disc, self.k
        nvec = d.normal * d.speed[:, None]
        a = np.einsum("ijc,jc->ij", self.diff, nvec) / self.r
        full = 0.25j * k * self.h1 * a
        m1 = -k * self.j1 * a / (4.0 * np.pi)
        m2 = full - m1 * self.logk
        m1[self._diag] = 0.0
        m2[self._diag] = d.curvature_term / (4.0 * np.pi)
        return self._assemble(m1, m2)

    def adjoint_double_layer(self):
        d, k = self.disc, self.k
        b = np.einsum("ijc,ic->ij", self.diff, d.normal) / self.r
        speed = d.speed[None, :]
        full = -0.25j * k * self.h1 * b * speed
        m1 = k * self.j1 * b * speed / (4.0 * np.pi)
        m2 = full - m1 * self.logk
        m1[self._diag] = 0.0
        m2[self._diag] = d.curvature_term / (4.0 * np.pi)
        return self._assemble(m1, m2)


def hypersingular_difference(ops_k, ops_k2):
    """Matrix of ``T_k - T_k2`` (normal derivative of the double layer).

    The strong singularities are independent of the wavenumber and cancel
    analytically; what remains has a logarithmic singularity handled by
    the same splitting as the other operators.
    """
    d = ops_k.disc
    nu = d.normal
    diff = ops_k.diff
    r = ops_k.r
    a = np.einsum("ijc,jc->ij", diff, nu)
    b = np.einsum("ijc,ic->ij", diff, nu)
    c = nu @ nu.T
    ab = a * b / r**2
    speed = d.speed
    diag = ops_k._diag

    full = np.zeros_like(ops_k.h0)
    m1 = np.zeros(r.shape)
    m2_diag = np.zeros(d.nodes, dtype=complex)
    for sign, ops in ((1.0, ops_k), (-1.0, ops_k2)):
        kap = ops.k
        h1reg = ops.h1 + 2j / (np.pi * kap * r)
        full += sign * 0.25j * kap * ((kap * ops.h0 - 2.0 * h1reg / r) * ab + h1reg * c / r)
        m1 += sign * (-kap / (4.0 * np.pi)) * ((kap * ops.j0 - 2.0 * ops.j1 / r) * ab + ops.j1 * c / r)
        m2_diag += sign * (
            0.125j * kap**2
            - kap**2 / (4.0 * np.pi) * (np.log(0.5 * kap * speed) + EULER_GAMMA - 0.5)
        )
    full = full * speed[None, :]
    m1 = m1 * speed[None, :]
    m2 = full - m1 * ops_k.logk
    m1[diag] = -(ops_k.k**2 - ops_k2.k**2) * speed / (8.0 * np.pi)
    m2[diag] = m2_diag * speed
    return ops_k._assemble(m1, m2)


class CrossOperators:
    """Trapezoid-rule potentials from a source curve evaluated on a disjoint target curve."""

    def __init__(self, target, source, k):
        self.target = target
        self.source = source
        self.k = float(k)
        diff = target.x[:, None, :] - source.x[None, :, :]
        r = np.hypot(diff[..., 0], diff[..., 1])
        self.r = r
        self.diff = diff
        j0, j1, y0, y1 = cylinder_functions(self.k * r)
        self.h0 = j0 + 1j * y0
        self.h1 = j1 + 1j * y1
        self.w = source.weight * source.speed[None, :]

    def single_layer(self):
        return 0.25j * self.h0 * self.w

    def double_layer(self):
        a = np.einsum("ijc,jc->ij", self.diff, self.source.normal) / self.r
        return 0.25j * self.k * self.h1 * a * self.w

    def adjoint_double_layer(self):
        b = np.einsum("ijc,ic->ij", self.diff, self.target.normal) / self.r
        return -0.25j * self.k * self.h1 * b * self.w

    def hypersingular(self):
        k, r = self.k, self.r
        a = np.einsum("ijc,jc->ij", self.diff, self.source.normal)
        b = np.einsum("ijc,ic->ij", self.diff, self.target.normal)
        c = self.target.normal @ self.source.normal.T
        kern = 0.25j * k * ((k * self.h0 - 2.0 * self.h1 / r) * a * b / r**2 + self.h1 * c / r)
        return kern * self.w


def farfield_factor(k):
    """Constant relating the far field of ``Phi`` to ``exp(-i k xhat.y)``."""
    return np.exp(0.25j * np.pi) / np.sqrt(8.0 * np.pi * k)


def farfield_operators(disc, k, xhat):
    """Far-field patterns of the single and double layer: matrices (M x nodes)."""
    phase = np.exp(-1j * k * (xhat @ disc.x.T))
    w = farfield_factor(k) * disc.weight * disc.speed[None, :]
    single = phase * w
    double = -1j * k * (xhat @ disc.normal.T) * phase * w
    return single, double
