"""Two-reference-point localisation followed by a fine reconstruction.

Stage 1 images a large region with data referenced to ``z10`` and to
``z20``.  Each field shows the obstacle, its point reflection through the
reference point and a spot at the reference point itself; only the
obstacle stays put when the reference point moves, so components that
overlap across the two fields define the small region for stage 2.
"""
import hashlib
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .. import __version__
from ..data import (
    NoiseSpec,
    add_noise_phaseless,
    assemble_phaseless,
    load_dataset,
    save_dataset,
    shift_to_reference,
)
from ..errors import DiagnosticError, DisambiguationError, DomainError
from ..forward.solver import solve_farfield, suggest_nodes
from ..geometry import grid_for_wavenumber, make_grid, uniform_directions
from ..imaging import indicator_phaseless
from .config import digest
from .export import export_heatmap
from .metrics import has_strong_component, localization_metrics

STAGES = ("z10", "z20")
COARSE_PPW = 10
FINE_PPW = 20


@dataclass(frozen=True, eq=False)
class Component:
    label: int
    size: int
    bbox: tuple
    centroid: tuple
    peak: float
    mask: np.ndarray = field(repr=False)

    def to_dict(self):
        return {"label": self.label, "size": self.size, "bbox": list(self.bbox),
                "centroid": list(self.centroid), "peak": self.peak}


@dataclass(frozen=True, eq=False)
class StageResult:
    name: str
    z0: tuple
    field: object
    components: list
    threshold: float


def stage_seed(seed, index):
    """Independent per-stage seed derived from the configuration seed."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0])


def _cache_path(cache_dir, key, tag):
    if cache_dir is None:
        return None
    path = Path(cache_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path / f"{tag}-{key[:16]}.pfd1"


def simulate_farfield(cfg, cache_dir=None):
    """Noise-free far field for incident waves referenced to the origin."""
    cached = _cache_path(cache_dir, digest(cfg.physics_dict()), "farfield")
    if cached is not None and cached.exists():
        return load_dataset(cached, kind="farfield")
    obstacles = cfg.scatterers()
    nodes = cfg.nodes if cfg.nodes is not None else suggest_nodes(obstacles, cfg.k)
    ff = solve_farfield(obstacles, cfg.k, uniform_directions(cfg.M), uniform_directions(cfg.N),
                        nodes=nodes)
    if cached is not None:
        save_dataset(cached, ff)
    return ff


def _stage_cache(cfg, which, cache_dir):
    key = digest({"physics": cfg.physics_dict(), "z0": list(getattr(cfg, which)),
                  "delta": cfg.noise_delta, "seed": stage_seed(cfg.seed, STAGES.index(which)),
                  "mode": cfg.noise_mode})
    return _cache_path(cache_dir, key, f"phaseless-{which}")


def stage_dataset(cfg, which, ff=None, cache_dir=None):
    """Phaseless tensor for stage ``which`` (``"z10"`` or ``"z20"``), noise included."""
    if which not in STAGES:
        raise DomainError(f"stage must be one of {STAGES}, got {which!r}")
    z0 = getattr(cfg, which)
    seed = stage_seed(cfg.seed, STAGES.index(which))
    cached = _stage_cache(cfg, which, cache_dir)
    if cached is not None and cached.exists():
        return load_dataset(cached, kind="phaseless")
    if ff is None:
        ff = simulate_farfield(cfg, cache_dir)
    pt = assemble_phaseless(shift_to_reference(ff, z0))
    if cfg.noise_delta > 0:
        pt = add_noise_phaseless(pt, NoiseSpec(cfg.noise_delta, seed, cfg.noise_mode))
    if cached is not None:
        save_dataset(cached, pt)
    return pt


def coarse_grid(cfg):
    if cfg.resolution is not None:
        return make_grid(cfg.region, *cfg.resolution)
    return grid_for_wavenumber(cfg.region, cfg.k, COARSE_PPW)


def extract_components(fld, quantile, exclude=(), radius=0.0):
    """4-connected components of the points at or above the ``1 - quantile`` quantile.

    Points within ``radius`` of any point in ``exclude`` do not enter the
    quantile, so a known bright spot cannot use up the whole top set; they
    are still labelled when they exceed the threshold.
    """
    vals = np.asarray(fld.values)
    if not vals.max() > vals.min():
        raise DiagnosticError("indicator field is constant; no top set can be extracted")
    keep = np.ones(vals.size, dtype=bool)
    pts = fld.grid.points
    for p in exclude:
        keep &= np.linalg.norm(pts - np.asarray(p, dtype=float), axis=1) > radius
    pool = vals.ravel()[keep] if keep.any() else vals.ravel()
    threshold = float(np.quantile(pool, 1.0 - quantile))
    labels, count = ndimage.label(vals >= threshold)
    xs, ys = fld.grid.xs, fld.grid.ys
    comps = []
    for lab in range(1, count + 1):
        mask = labels == lab
        rows, cols = np.nonzero(mask)
        comps.append(Component(
            label=lab,
            size=int(mask.sum()),
            bbox=(float(xs[cols.min()]), float(xs[cols.max()]),
                  float(ys[rows.min()]), float(ys[rows.max()])),
            centroid=(float(xs[cols].mean()), float(ys[rows].mean())),
            peak=float(vals[mask].max()),
            mask=mask,
        ))
    comps.sort(key=lambda c: -c.peak)
    return comps, threshold


def run_stage(cfg, which, ff=None, cache_dir=None, grid=None, dataset=None):
    """Image the large region with the ``which`` dataset and threshold the result."""
    pt = dataset if dataset is not None else stage_dataset(cfg, which, ff, cache_dir)
    grid = grid if grid is not None else coarse_grid(cfg)
    fld = indicator_phaseless(pt, grid, cfg.include_diagonal)
    comps, threshold = extract_components(fld, cfg.quantile, [pt.z0], spot_radius(cfg))
    return StageResult(which, tuple(pt.z0), fld, comps, threshold)


def spot_radius(cfg):
    return cfg.spot_wavelengths * 2 * np.pi / cfg.k


def _iou(a, b):
    union = np.logical_or(a, b).sum()
    return float(np.logical_and(a, b).sum() / union) if union else 0.0


def min_component_pixels(grid, k, area):
    """Lattice points covering ``area`` square wavelengths."""
    hx, hy = grid.spacing
    return int(np.ceil(area * (2 * np.pi / k) ** 2 / (hx * hy)))


def persistent_pairs(stage1, stage2, tol, min_size=1):
    """Component pairs overlapping with IoU above ``tol``; specks below ``min_size`` are skipped."""
    big1 = [c for c in stage1.components if c.size >= min_size]
    big2 = [c for c in stage2.components if c.size >= min_size]
    pairs = []
    for c1 in big1:
        for c2 in big2:
            score = _iou(c1.mask, c2.mask)
            if score > tol:
                pairs.append((c1, c2, score))
    return pairs


def disambiguate(stage1, stage2, tol=0.3, padding=0.2, region=None, min_size=1):
    """Small region around components that persist across both reference points.

    Returns ``(rect, pairs)`` where ``pairs`` lists ``(component1,
    component2, iou)``.  The rectangle is the bounding box of the matched
    components, grown by ``padding`` times its diagonal on every side and
    clipped to ``region``.  Components with fewer than ``min_size``
    lattice points take no part in the matching.
    """
    if stage1.field.grid != stage2.field.grid:
        raise DomainError("stages must share one sampling grid")
    pairs = persistent_pairs(stage1, stage2, tol, min_size)
    if not pairs:
        raise DisambiguationError(
            "no component persists across the two reference points; try a different z20"
        )
    mask = np.zeros(stage1.field.grid.shape, dtype=bool)
    for c1, c2, _ in pairs:
        mask |= c1.mask | c2.mask
    rows, cols = np.nonzero(mask)
    xs, ys = stage1.field.grid.xs, stage1.field.grid.ys
    a, b, c, d = xs[cols.min()], xs[cols.max()], ys[rows.min()], ys[rows.max()]
    pad = padding * np.hypot(b - a, d - c)
    rect = [a - pad, b + pad, c - pad, d + pad]
    if region is not None:
        ra, rb, rc, rd = region
        rect = [max(rect[0], ra), min(rect[1], rb), max(rect[2], rc), min(rect[3], rd)]
    return tuple(float(v) for v in rect), pairs


def fine_grid(cfg, rect):
    if cfg.fine_resolution is not None:
        return make_grid(rect, *cfg.fine_resolution)
    return grid_for_wavenumber(rect, cfg.k, FINE_PPW)


def run_stage2_reconstruction(cfg, omega_s, dataset=None, ff=None, cache_dir=None):
    """Fine indicator over ``omega_s`` from the ``z20`` data."""
    pt = dataset if dataset is not None else stage_dataset(cfg, "z20", ff, cache_dir)
    return indicator_phaseless(pt, fine_grid(cfg, omega_s), cfg.include_diagonal)


def _inside_any(point, stage):
    grid = stage.field.grid
    a, b, c, d = grid.rect
    x, y = point
    if not (a <= x <= b and c <= y <= d):
        return False
    hx, hy = grid.spacing
    col, row = int(round((x - a) / hx)), int(round((y - c) / hy))
    return any(comp.mask[row, col] for comp in stage.components)


def alias_free_radius(cfg, margin=0.9):
    """Distance ``margin * N / k`` up to which the N-term direction sums stay alias free."""
    return margin * cfg.N / cfg.k


def region_reach(cfg):
    """Largest distance from a region corner to a reference point or obstacle centre."""
    a, b, c, d = cfg.region
    corners = np.array([[a, c], [a, d], [b, c], [b, d]])
    anchors = [cfg.z10, cfg.z20] + [s.center for s in cfg.shapes]
    return float(max(np.linalg.norm(corners - np.asarray(p), axis=1).max() for p in anchors))


def _file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_pipeline(cfg, out_dir=None, cache_dir=None):
    """Run both stages and the reconstruction; write heatmaps, report and manifest.

    Returns the report dictionary together with the three fields.
    """
    out = Path(out_dir if out_dir is not None else (cfg.output_dir or "."))
    out.mkdir(parents=True, exist_ok=True)
    cache_dir = cache_dir if cache_dir is not None else out / "cache"

    # one solve serves both stages unless both tensors are cached already
    ff = None
    if not all(_stage_cache(cfg, w, cache_dir).exists() for w in STAGES):
        ff = simulate_farfield(cfg, cache_dir)
    data = {w: stage_dataset(cfg, w, ff, cache_dir) for w in STAGES}

    stage1 = run_stage(cfg, "z10", dataset=data["z10"])
    stage2 = run_stage(cfg, "z20", dataset=data["z20"])
    notes = []
    if _inside_any(cfg.z20, stage1):
        msg = "z20 lies inside a stage-1 component; the artifact may overlap the obstacle"
        warnings.warn(msg)
        notes.append(msg)
    alias = alias_free_radius(cfg)
    if region_reach(cfg) > alias:
        msg = (f"the region extends beyond {alias:.3g} from a reference point or obstacle; "
               "direction sums alias there, consider larger N")
        warnings.warn(msg)
        notes.append(msg)
    min_size = min_component_pixels(stage1.field.grid, cfg.k, cfg.min_component)
    omega_s, pairs = disambiguate(stage1, stage2, cfg.iou_tol, cfg.padding, cfg.region, min_size)
    recon = run_stage2_reconstruction(cfg, omega_s, dataset=data["z20"])
    recon_comps, recon_threshold = extract_components(recon, cfg.quantile)
    if not has_strong_component(recon):
        notes.append("reconstruction has no value above three times its median")

    curves = cfg.curves()
    report = {
        "config_hash": cfg.hash(),
        "stage1": {"z0": list(stage1.z0), "threshold": stage1.threshold,
                   "components": [c.to_dict() for c in stage1.components]},
        "stage2": {"z0": list(stage2.z0), "threshold": stage2.threshold,
                   "components": [c.to_dict() for c in stage2.components]},
        "persistent": [{"stage1": c1.label, "stage2": c2.label, "iou": s,
                        "centroid": list(c1.centroid)} for c1, c2, s in pairs],
        "omega_s": list(omega_s),
        "reconstruction": {"threshold": recon_threshold,
                           "components": [c.to_dict() for c in recon_comps]},
        "metrics": {
            "stage1": localization_metrics(stage1.field, curves, cfg.z10),
            "stage2": localization_metrics(stage2.field, curves, cfg.z20),
            "reconstruction": localization_metrics(recon, curves, cfg.z20),
        },
        "notes": notes,
    }

    files = {}
    for name, fld in (("stage1", stage1.field), ("stage2", stage2.field), ("reconstruction", recon)):
        for path in export_heatmap(fld, out / name):
            files[path.name] = path
    report_path = out / "report.json"
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    files[report_path.name] = report_path

    manifest = {
        "config_hash": cfg.hash(),
        "config": cfg.to_dict(),
        "versions": {"phaseless": __version__, "numpy": np.__version__, "scipy": _scipy_version()},
        "seeds": {"config": cfg.seed, **{w: stage_seed(cfg.seed, i) for i, w in enumerate(STAGES)}},
        "rng": "numpy.PCG64",
        "files": {name: _file_digest(path) for name, path in sorted(files.items())},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return report, stage1, stage2, recon


def _scipy_version():
    import scipy

    return scipy.__version__
