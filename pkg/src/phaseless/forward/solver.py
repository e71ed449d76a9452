"""Far-field solver for one or several obstacles.

Formulations (operators as in :mod:`.nystrom`):

* Dirichlet: combined ansatz ``u^s = (D - i eta S) phi`` with ``eta = k``,
  giving ``(I/2 + K - i eta S) phi = -u^i``.
* Impedance: Green's representation of the total field,
  ``(I/2 - K - S ik rho) u = u^i``, ``u^s = D u + S(ik rho u)``.
* Transmission: Cauchy data ``f = u``, ``g = du_-/dnu`` combined so the
  hypersingular parts cancel,
  ``f + (K_k2 - K_k) f + (lam S_k - S_k2) g = u^i`` and
  ``(T_k - T_k2) f + (K'_k2 - lam K'_k - (lam+1)/2) g = -du^i/dnu``.

Each body scatters the incident wave plus the fields of the other bodies,
giving a block system whose off-diagonal blocks use the plain trapezoid rule.
"""
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, GeometryError, ResonanceError
from ..geometry import DirectionSet
from .conditions import Dirichlet, Impedance, Scatterer, Transmission
from .nystrom import (
    CrossOperators,
    SelfOperators,
    discretize,
    farfield_operators,
    hypersingular_difference,
)

CONDITION_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class FarFieldMatrix:
    """``values[i, j]`` is the far field at ``obs`` direction i for ``inc`` direction j.

    ``z0`` is the reference point of the incident waves ``exp(ik(x - z0).d)``.
    """

    k: float
    obs: DirectionSet
    inc: DirectionSet
    values: np.ndarray
    z0: tuple = (0.0, 0.0)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (self.obs.count, self.inc.count):
            raise DomainError(
                f"far-field values {vals.shape} do not match directions "
                f"({self.obs.count}, {self.inc.count})"
            )
        if not np.all(np.isfinite(vals)):
            raise DomainError("far-field values must be finite")

    @property
    def shape(self):
        return self.values.shape

    def replace(self, **changes):
        kw = dict(k=self.k, obs=self.obs, inc=self.inc, values=self.values,
                  z0=self.z0, meta=dict(self.meta))
        kw.update(changes)
        return FarFieldMatrix(**kw)


class _Body:
    """Discretised obstacle with its own block of the system."""

    def __init__(self, scatterer, k, nodes):
        self.scatterer = scatterer
        self.bc = scatterer.bc
        self.disc = discretize(scatterer.curve, nodes)
        self.k = k
        n = self.disc.nodes
        eye = np.eye(n)
        ops = SelfOperators(self.disc, k)
        bc = self.bc
        if isinstance(bc, Dirichlet):
            eta = k
            self.size = n
            self.block = 0.5 * eye + ops.double_layer() - 1j * eta * ops.single_layer()
            self.alpha = eye.astype(complex)
            self.beta = -1j * eta * eye
        elif isinstance(bc, Impedance):
            ikrho = 1j * k * bc.values(self.disc.t)
            self.size = n
            self.block = 0.5 * eye - ops.double_layer() - ops.single_layer() * ikrho[None, :]
            self.alpha = eye.astype(complex)
            self.beta = np.diag(ikrho)
        elif isinstance(bc, Transmission):
            lam = bc.lam
            ops2 = SelfOperators(self.disc, k * np.sqrt(bc.n))
            self.size = 2 * n
            top = np.hstack([
                eye + ops2.double_layer() - ops.double_layer(),
                lam * ops.single_layer() - ops2.single_layer(),
            ])
            bottom = np.hstack([
                hypersingular_difference(ops, ops2),
                ops2.adjoint_double_layer() - lam * ops.adjoint_double_layer()
                - 0.5 * (lam + 1.0) * eye,
            ])
            self.block = np.vstack([top, bottom])
            zero = np.zeros((n, n))
            self.alpha = np.hstack([eye, zero]).astype(complex)
            self.beta = np.hstack([zero, -lam * eye]).astype(complex)
        else:
            raise DomainError(f"unsupported boundary condition {bc!r}")

    @property
    def needs_normal(self):
        return isinstance(self.bc, Transmission)

    def rhs_map(self, trace, normal):
        """Map incident trace / normal derivative on this body to its equation rows."""
        if isinstance(self.bc, Dirichlet):
            return -trace
        if isinstance(self.bc, Impedance):
            return trace
        return np.vstack([trace, -normal])


def _check_disjoint(bodies):
    for a in range(len(bodies)):
        for b in range(a + 1, len(bodies)):
            ca, cb = bodies[a].scatterer.curve, bodies[b].scatterer.curve
            pa, pb = ca.sample(512), cb.sample(512)
            gap = np.min(np.linalg.norm(pa[:, None] - pb[None], axis=-1))
            if gap < 1e-8 or ca.contains(pb).any() or cb.contains(pa).any():
                raise GeometryError(f"obstacles {a} and {b} overlap or touch")


def _as_scatterers(obstacles):
    if isinstance(obstacles, Scatterer):
        return [obstacles]
    out = list(obstacles)
    if not out:
        raise DomainError("at least one obstacle is required")
    return out


def assemble_system(obstacles, k, nodes):
    """Return ``(matrix, bodies)`` for the coupled boundary system."""
    bodies = [_Body(s, k, nodes) for s in _as_scatterers(obstacles)]
    _check_disjoint(bodies)
    sizes = [b.size for b in bodies]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    A = np.zeros((offsets[-1], offsets[-1]), dtype=complex)
    for p, tgt in enumerate(bodies):
        rows = slice(offsets[p], offsets[p + 1])
        A[rows, rows] = tgt.block
        for q, src in enumerate(bodies):
            if p == q:
                continue
            cross = CrossOperators(tgt.disc, src.disc, k)
            trace = cross.double_layer() @ src.alpha + cross.single_layer() @ src.beta
            normal = None
            if tgt.needs_normal:
                normal = cross.hypersingular() @ src.alpha + cross.adjoint_double_layer() @ src.beta
            A[rows, offsets[q]:offsets[q + 1]] = -tgt.rhs_map(trace, normal)
    return A, bodies


def _incident(bodies, k, dirs, z0):
    blocks = []
    shift = np.exp(-1j * k * (dirs @ np.asarray(z0, dtype=float)))
    for body in bodies:
        x = body.disc.x
        ui = np.exp(1j * k * (x @ dirs.T)) * shift[None, :]
        dui = 1j * k * (body.disc.normal @ dirs.T) * ui
        blocks.append(body.rhs_map(ui, dui))
    return np.vstack(blocks)


def suggest_nodes(obstacles, k, minimum=128):
    """Node count keeping ``k_eff * max|x'| * 2pi/nodes <= 1.2`` on every body.

    ``k_eff`` is the larger of the exterior and interior wavenumbers.
    The result is a multiple of 32.
    """
    best = minimum
    for s in _as_scatterers(obstacles):
        k_eff = k * max(1.0, np.sqrt(s.bc.n)) if isinstance(s.bc, Transmission) else k
        t = np.linspace(0.0, 2 * np.pi, 2048, endpoint=False)
        vmax = np.max(np.linalg.norm(s.curve.tangent(t), axis=-1))
        need = 2 * np.pi * k_eff * vmax / 1.2
        best = max(best, int(np.ceil(need / 32.0)) * 32)
    return best


def solve_farfield(obstacles, k, obs, inc, nodes=None, z0=(0.0, 0.0), check_condition=True):
    """Far-field matrix for plane waves ``exp(ik(x - z0).d_j)``.

    ``obstacles`` is a :class:`Scatterer` or a sequence of pairwise
    disjoint ones.  ``nodes`` defaults to :func:`suggest_nodes`.  Raises
    :class:`ResonanceError` when the condition estimate of the system
    exceeds ``CONDITION_LIMIT``.
    """
    if not (np.isfinite(k) and k > 0):
        raise DomainError(f"wavenumber must be positive, got {k!r}")
    if nodes is None:
        nodes = suggest_nodes(obstacles, k)
    A, bodies = assemble_system(obstacles, k, nodes)
    if check_condition:
        cond = np.linalg.cond(A)
        if not np.isfinite(cond) or cond > CONDITION_LIMIT:
            raise ResonanceError(k, cond)
    rhs = _incident(bodies, k, inc.vectors, z0)
    sol = np.linalg.solve(A, rhs)

    xhat = obs.vectors
    values = np.zeros((obs.count, inc.count), dtype=complex)
    start = 0
    for body in bodies:
        dens = sol[start:start + body.size]
        start += body.size
        single, double = farfield_operators(body.disc, k, xhat)
        values += double @ (body.alpha @ dens) + single @ (body.beta @ dens)
    return FarFieldMatrix(k=float(k), obs=obs, inc=inc, values=values,
                          z0=tuple(float(v) for v in z0))


def check_reciprocity(ff):
    """Largest ``|u(xhat_i; d_j) - u(-d_j; -xhat_i)|`` over the matrix."""
    if ff.obs.count != ff.inc.count:
        raise DomainError("reciprocity needs identical observation and incident sets")
    anti = ff.obs.antipode()
    if not np.allclose(ff.z0, 0.0):
        # undo the reference phase so the classical relation applies
        d = ff.inc.vectors
        vals = ff.values * np.exp(1j * ff.k * (d @ np.asarray(ff.z0)))[None, :]
    else:
        vals = ff.values
    swapped = vals[np.ix_(anti, anti)].T
    return float(np.max(np.abs(vals - swapped), initial=0.0))
