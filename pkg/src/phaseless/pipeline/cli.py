"""Command-line entry point: ``phaseless {simulate,image,pipeline}``.

Coordinates with a leading minus sign need the ``--opt=value`` form,
e.g. ``--z0=-1,-5``.
"""
import argparse
import json
import sys
from pathlib import Path

from ..data import (
    NoiseSpec,
    PhaselessTensor,
    add_noise_farfield,
    add_noise_phaseless,
    assemble_phaseless,
    load_dataset,
    save_dataset,
    shift_to_reference,
)
from ..errors import ConfigError, PhaselessError
from ..geometry import make_grid
from ..imaging import indicator_fulldata, indicator_phaseless
from .config import load_config
from .export import export_heatmap
from .stages import extract_components, run_pipeline, simulate_farfield


def _floats(text, count, name):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{name} must be {count} comma-separated numbers") from None
    if len(vals) != count:
        raise argparse.ArgumentTypeError(f"{name} must be {count} comma-separated numbers")
    return vals


def _ints(text, count, name):
    vals = _floats(text, count, name)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"{name} must be integers")
    return [int(v) for v in vals]


def cmd_simulate(args):
    cfg = load_config(args.config)
    ff = simulate_farfield(cfg)
    if args.kind == "farfield":
        out = ff
        if args.noise:
            out = add_noise_farfield(out, NoiseSpec(args.noise, args.seed))
    else:
        out = assemble_phaseless(shift_to_reference(ff, args.z0))
        if args.noise:
            out = add_noise_phaseless(out, NoiseSpec(args.noise, args.seed, args.noise_mode))
    save_dataset(args.out, out)
    print(f"wrote {args.kind} dataset to {args.out}")


def cmd_image(args):
    data = load_dataset(args.data)
    grid = make_grid(args.region, *args.res)
    if args.full_data:
        if isinstance(data, PhaselessTensor):
            raise ConfigError("--full-data needs a far-field dataset")
        fld = indicator_fulldata(data, grid)
    else:
        if not isinstance(data, PhaselessTensor):
            data = assemble_phaseless(data)
        fld = indicator_phaseless(data, grid, args.include_diagonal)
    paths = export_heatmap(fld, args.out)
    comps, threshold = extract_components(fld, args.quantile)
    summary = {"threshold": threshold, "components": [c.to_dict() for c in comps]}
    comp_path = Path(str(args.out) + "_components.json")
    comp_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for p in (*paths, comp_path):
        print(f"wrote {p}")


def cmd_pipeline(args):
    cfg = load_config(args.config)
    if args.quantile is not None:
        cfg = cfg.replace(quantile=args.quantile)
    report, *_ = run_pipeline(cfg, args.out)
    print(f"omega_s = {report['omega_s']}")
    print(f"reconstruction fraction = {report['metrics']['reconstruction']['fraction']:.3f}")
    for note in report["notes"]:
        print(f"note: {note}")


def build_parser():
    parser = argparse.ArgumentParser(prog="phaseless",
                                     description="Direct imaging from phaseless far-field data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="forward solve and dataset assembly")
    p.add_argument("--config", required=True)
    p.add_argument("--z0", type=lambda s: _floats(s, 2, "--z0"), default=[0.0, 0.0])
    p.add_argument("--out", required=True)
    p.add_argument("--kind", choices=("phaseless", "farfield"), default="phaseless")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-mode", choices=("symmetric", "independent"), default="symmetric")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("image", help="indicator evaluation and heatmap export")
    p.add_argument("--data", required=True)
    p.add_argument("--region", type=lambda s: _floats(s, 4, "--region"), required=True)
    p.add_argument("--res", type=lambda s: _ints(s, 2, "--res"), required=True)
    p.add_argument("--full-data", action="store_true")
    p.add_argument("--include-diagonal", action="store_true")
    p.add_argument("--quantile", type=float, default=0.10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_image)

    p = sub.add_parser("pipeline", help="two-stage localisation and reconstruction")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--quantile", type=float, default=None)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (PhaselessError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
