"""Boundary curves, direction sets and sampling lattices.

Every curve is a counterclockwise, 2*pi-periodic parametrisation
``x(t) = center + sign * offset(t)``.  Point reflection through ``z0``
maps ``center -> 2 z0 - center`` and flips ``sign``; in the plane this is
a rotation by pi, so orientation and outward normals are preserved.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError

SHAPE_NAMES = ("circle", "apple", "kite", "peanut", "rounded-square", "rounded-triangle")


def _radial(radius_fn):
    """Build an offset function from a radial profile returning (R, R', R'')."""

    def offset(t):
        r, dr, ddr = radius_fn(t)
        c, s = np.cos(t), np.sin(t)
        x = np.stack([r * c, r * s], axis=-1)
        dx = np.stack([dr * c - r * s, dr * s + r * c], axis=-1)
        ddx = np.stack(
            [(ddr - r) * c - 2.0 * dr * s, (ddr - r) * s + 2.0 * dr * c], axis=-1
        )
        return x, dx, ddx

    return offset


def _circle_profile(radius):
    def profile(t):
        one = np.ones_like(t)
        return radius * one, 0.0 * one, 0.0 * one

    return profile


def _apple_profile(t):
    c, s = np.cos(t), np.sin(t)
    num = 0.5 + 0.4 * c + 0.1 * np.sin(2 * t)
    dnum = -0.4 * s + 0.2 * np.cos(2 * t)
    ddnum = -0.4 * c - 0.4 * np.sin(2 * t)
    den = 1.0 + 0.7 * c
    dden = -0.7 * s
    ddden = -0.7 * c
    r = num / den
    q = dnum * den - num * dden
    dr = q / den**2
    # q' = ddnum*den - num*ddden
    ddr = (ddnum * den - num * ddden) / den**2 - 2.0 * dden * q / den**3
    return r, dr, ddr


def _peanut_profile(t):
    g = 0.25 + 0.75 * np.cos(t) ** 2
    dg = -0.75 * np.sin(2 * t)
    ddg = -1.5 * np.cos(2 * t)
    r = np.sqrt(g)
    dr = dg / (2.0 * r)
    ddr = ddg / (2.0 * r) - dg**2 / (4.0 * r**3)
    return r, dr, ddr


def _triangle_profile(t):
    return 2.0 + 0.3 * np.cos(3 * t), -0.9 * np.sin(3 * t), -2.7 * np.cos(3 * t)


def _kite(t):
    c, s = np.cos(t), np.sin(t)
    c2, s2 = np.cos(2 * t), np.sin(2 * t)
    x = np.stack([c + 0.65 * c2 - 0.65, 1.5 * s], axis=-1)
    dx = np.stack([-s - 1.3 * s2, 1.5 * c], axis=-1)
    ddx = np.stack([-c - 2.6 * c2, -1.5 * s], axis=-1)
    return x, dx, ddx


def _rounded_square(t):
    c, s = np.cos(t), np.sin(t)
    x = 1.5 * np.stack([c**3 + c, s**3 + s], axis=-1)
    dx = 1.5 * np.stack([-3 * c**2 * s - s, 3 * s**2 * c + c], axis=-1)
    ddx = 1.5 * np.stack(
        [6 * c * s**2 - 3 * c**3 - c, 6 * s * c**2 - 3 * s**3 - s], axis=-1
    )
    return x, dx, ddx


@dataclass(frozen=True)
class ParametricCurve:
    """Smooth closed curve ``center + sign * scale * offset(t)``."""

    label: str
    center: tuple
    offset: Callable = field(repr=False, compare=False)
    scale: float = 1.0
    sign: float = 1.0

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        x, dx, ddx = self.offset(t)
        f = self.sign * self.scale
        return np.asarray(self.center) + f * x, f * dx, f * ddx

    def point(self, t):
        return self._eval(t)[0]

    def tangent(self, t):
        return self._eval(t)[1]

    def second_derivative(self, t):
        return self._eval(t)[2]

    def evaluate(self, t):
        """Return ``(x, x', x'')`` at parameters ``t`` in one pass."""
        return self._eval(t)

    def normal(self, t):
        """Outward unit normal ``(x2', -x1') / |x'|``."""
        dx = self.tangent(t)
        speed = np.linalg.norm(dx, axis=-1, keepdims=True)
        return np.stack([dx[..., 1], -dx[..., 0]], axis=-1) / speed

    def sample(self, count):
        """Points at ``count`` equispaced parameters."""
        return self.point(2.0 * np.pi * np.arange(count) / count)

    def bounding_box(self, count=2048):
        pts = self.sample(count)
        return (pts[:, 0].min(), pts[:, 0].max(), pts[:, 1].min(), pts[:, 1].max())

    def contains(self, pts, count=1024):
        """Even-odd test of ``pts`` (shape ``(..., 2)``) against a dense polygon."""
        from matplotlib.path import Path

        pts = np.asarray(pts, dtype=float)
        poly = Path(self.sample(count))
        flat = pts.reshape(-1, 2)
        return poly.contains_points(flat).reshape(pts.shape[:-1])


def make_shape(kind, center=(0.0, 0.0), radius=None, scale=1.0):
    """Construct one of the tabulated obstacle shapes.

    ``kind`` accepts the kebab-case names in ``SHAPE_NAMES`` (underscores
    are tolerated).  ``radius`` applies to circles only; ``scale``
    multiplies the offset of every other shape.
    """
    name = str(kind).replace("_", "-").lower()
    center = tuple(float(c) for c in center)
    if len(center) != 2:
        raise ConfigError("center must have two coordinates")
    if not np.isfinite(scale) or scale <= 0:
        raise DomainError(f"scale must be positive, got {scale!r}")
    if name == "circle":
        if radius is None or not np.isfinite(radius) or radius <= 0:
            raise DomainError(f"circle radius must be positive, got {radius!r}")
        offset = _radial(_circle_profile(float(radius)))
    elif radius is not None:
        raise ConfigError(f"radius is only meaningful for circles, not {name!r}")
    elif name == "apple":
        offset = _radial(_apple_profile)
    elif name == "kite":
        offset = _kite
    elif name == "peanut":
        offset = _radial(_peanut_profile)
    elif name == "rounded-square":
        offset = _rounded_square
    elif name == "rounded-triangle":
        offset = _radial(_triangle_profile)
    else:
        raise ConfigError(f"unknown shape {kind!r}; expected one of {SHAPE_NAMES}")
    curve = ParametricCurve(label=name, center=center, offset=offset, scale=float(scale))
    speed = np.linalg.norm(curve.tangent(np.linspace(0, 2 * np.pi, 1024, endpoint=False)), axis=-1)
    if speed.min() <= 0:
        raise DomainError(f"shape {name!r} is not regular")
    return curve


def reflect_through(curve, z0):
    """Point reflection ``x -> 2 z0 - x`` of a curve."""
    z0 = np.asarray(z0, dtype=float)
    center = tuple(2.0 * z0 - np.asarray(curve.center))
    return ParametricCurve(
        label=curve.label,
        center=center,
        offset=curve.offset,
        scale=curve.scale,
        sign=-curve.sign,
    )


@dataclass(frozen=True)
class DirectionSet:
    count: int

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.count) / self.count

    @property
    def vectors(self):
        a = self.angles
        return np.stack([np.cos(a), np.sin(a)], axis=-1)

    def antipode(self):
        """Index map ``j -> index of -d_j``; needs an even count."""
        if self.count % 2:
            raise DomainError("antipodal indexing needs an even direction count")
        return (np.arange(self.count) + self.count // 2) % self.count


def uniform_directions(count):
    if int(count) != count or count < 1:
        raise DomainError(f"direction count must be a positive integer, got {count!r}")
    return DirectionSet(int(count))


@dataclass(frozen=True)
class SamplingGrid:
    """Inclusive rectangular lattice; ``points`` are row-major with x fastest."""

    rect: tuple
    nx: int
    ny: int

    @property
    def xs(self):
        a, b, _, _ = self.rect
        return np.linspace(a, b, self.nx)

    @property
    def ys(self):
        _, _, c, d = self.rect
        return np.linspace(c, d, self.ny)

    @property
    def spacing(self):
        a, b, c, d = self.rect
        return (b - a) / (self.nx - 1), (d - c) / (self.ny - 1)

    @property
    def shape(self):
        return (self.ny, self.nx)

    @property
    def points(self):
        gx, gy = np.meshgrid(self.xs, self.ys)
        return np.stack([gx.ravel(), gy.ravel()], axis=-1)

    def __len__(self):
        return self.nx * self.ny


def make_grid(rect, nx, ny):
    a, b, c, d = (float(v) for v in rect)
    if not (b > a and d > c):
        raise DomainError(f"degenerate sampling rectangle {rect!r}")
    if int(nx) != nx or int(ny) != ny or nx < 2 or ny < 2:
        raise DomainError("grid resolution must be at least 2 x 2")
    return SamplingGrid((a, b, c, d), int(nx), int(ny))


def grid_for_wavenumber(rect, k, points_per_wavelength=10):
    """Lattice with at least ``points_per_wavelength`` samples per 2*pi/k on each axis."""
    a, b, c, d = (float(v) for v in rect)
    h = 2.0 * np.pi / k / points_per_wavelength
    nx = int(np.ceil((b - a) / h)) + 1
    ny = int(np.ceil((d - c) / h)) + 1
    return make_grid((a, b, c, d), nx, ny)


def boundary_distance(points, curves, extra_points=(), samples=4096):
    """Distance from each point to the union of curves and isolated points."""
    from scipy.spatial import cKDTree

    cloud = [c.sample(samples) for c in curves]
    cloud += [np.asarray(p, dtype=float).reshape(1, 2) for p in extra_points]
    if not cloud:
        raise DomainError("distance to an empty set is undefined")
    tree = cKDTree(np.vstack(cloud))
    dist, _ = tree.query(np.asarray(points, dtype=float).reshape(-1, 2))
    return dist
