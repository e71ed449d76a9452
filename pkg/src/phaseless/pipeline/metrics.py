"""Localisation quality of an indicator field against a known geometry."""
import numpy as np

from ..errors import DomainError
from ..geometry import boundary_distance, reflect_through


def top_points(field, fraction):
    vals = np.asarray(field.values).ravel()
    count = max(1, int(round(fraction * vals.size)))
    order = np.argsort(-vals, kind="stable")[:count]
    return field.grid.points[order]


def localization_metrics(field, truth, z0=None, top_fraction=0.02, tolerance=None):
    """Share of the strongest points near ``dD``, its reflection and ``z0``.

    ``truth`` is a sequence of curves.  With ``z0`` given, the reflected
    curves and the point itself join the target set.  The tolerance
    defaults to half a wavelength.
    """
    curves = list(truth)
    if not curves:
        raise DomainError("localisation needs at least one true boundary")
    k = field.provenance.get("k")
    if tolerance is None:
        if k is None:
            raise DomainError("tolerance required when the field carries no wavenumber")
        tolerance = np.pi / k
    extra = ()
    if z0 is not None:
        curves += [reflect_through(c, z0) for c in curves]
        extra = (np.asarray(z0, dtype=float),)
    pts = top_points(field, top_fraction)
    dist = boundary_distance(pts, curves, extra)
    return {
        "fraction": float(np.mean(dist <= tolerance)),
        "median_distance": float(np.median(dist)),
        "tolerance": float(tolerance),
        "points": int(len(pts)),
    }


def has_strong_component(field, factor=3.0):
    """True when some value exceeds ``factor`` times the field median."""
    vals = np.asarray(field.values)
    return bool(vals.max() > factor * np.median(vals))


def pearson(a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    return float(np.corrcoef(a, b)[0, 1])
