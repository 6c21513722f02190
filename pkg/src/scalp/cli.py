"""Command-line entry point: ``scalp {decompose,metrics,prcurve,prior,bench}``."""

from __future__ import annotations

import argparse
import csv
import io as _io
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io, metrics
from .clustering import available_backends, decompose
from .core import LabelMap, ScalpError, ScalpParams
from .render import MODES, fallback_prior, render


def fmt(v: float) -> str:
    # %-formatting ignores the locale
    return "%.6f" % v


def _params(args, k: int) -> ScalpParams:
    return ScalpParams(k=k, iterations=args.iters, lambda_=args.lambda_, sigma=args.sigma,
                       gamma_factor=args.gamma_factor, m=args.m)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    d = ScalpParams(k=1)
    p.add_argument("--lambda", dest="lambda_", type=float, default=d.lambda_, help="pixel/path color blend")
    p.add_argument("--sigma", type=float, default=d.sigma, help="contour sensitivity")
    p.add_argument("--gamma-factor", type=float, default=d.gamma_factor, help="contour weight, as a multiple of r")
    p.add_argument("--m", type=float, default=d.m, help="compactness")
    p.add_argument("--iters", type=int, default=d.iterations, help="clustering iterations")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", choices=available_backends(), default=None)


def _run_decompose(args, rgb, contour, k: int) -> LabelMap:
    labels, _ = decompose(rgb, contour, _params(args, k), workers=args.workers, backend=args.backend)
    # canonical on-disk form: ids by first appearance
    return LabelMap.from_array(labels.labels)


def _load_contour(path, rgb):
    return None if path is None else io.load_contour_map(path, rgb.shape[:2])


def cmd_decompose(args) -> int:
    rgb = io.load_image(args.image)
    contour = _load_contour(args.contour, rgb)
    labels = _run_decompose(args, rgb, contour, args.k)
    if args.out:
        io.save_label_map(args.out, labels)
    if args.render:
        io.save_image(args.render_out, render(labels, rgb, args.render))
    print(f"superpixels {len(np.unique(labels.labels))}")
    return 0


def _metric_lines(report: metrics.MetricReport) -> list[str]:
    return [f"{name} {fmt(value)}" for name, value in report.as_dict().items()]


def cmd_metrics(args) -> int:
    labels = io.load_label_map(args.labels)
    gts = [io.load_label_map(g) for g in args.gt]
    report = metrics.evaluate(labels, gts, args.epsilon)
    print("\n".join(_metric_lines(report)))
    return 0


def parse_scales(text: str) -> list[int]:
    """``"6..600x12"`` -> 12 geometric steps from 6 to 600; ``"6,50,600"`` -> explicit list."""
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*x\s*(\d+)\s*", text)
    if m:
        lo, hi, n = (int(g) for g in m.groups())
        if lo < 1 or hi < lo or n < 1:
            raise argparse.ArgumentTypeError(f"bad scale range {text!r}")
        return metrics.scale_ladder(lo, hi, n)
    try:
        scales = [int(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad scales {text!r}; use LO..HIxN or a comma list") from None
    if any(s < 1 for s in scales):
        raise argparse.ArgumentTypeError("scales must be positive")
    return scales


def _map_ordered(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def cmd_prcurve(args) -> int:
    rgb = io.load_image(args.image)
    contour = _load_contour(args.contour, rgb)
    gts = [io.load_label_map(g) for g in args.gt]
    n = rgb.shape[0] * rgb.shape[1]
    scales = [min(s, n) for s in args.scales]
    maps = _map_ordered(lambda k: _run_decompose(args, rgb, contour, k), scales, args.jobs)
    confidence = metrics.average_boundary_map(maps)
    points = metrics.pr_curve(confidence, gts, epsilon=args.epsilon)

    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["threshold", "precision", "recall"])
    for pt in points:
        w.writerow([fmt(pt.threshold), fmt(pt.precision), fmt(pt.recall)])
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    best, at = metrics.max_f_measure(points)
    print("scales " + ",".join(str(s) for s in scales))
    print(f"co {fmt(float(np.mean([metrics.compactness(m) for m in maps])))}")
    print(f"max_f {fmt(best)}")
    if at is not None:
        print(f"max_f_threshold {fmt(at.threshold)}")
    return 0


def cmd_prior(args) -> int:
    rgb = io.load_image(args.image)
    io.save_gray16(args.out, fallback_prior(rgb))
    return 0


BENCH_FIELDS = ["image", "superpixels", "br", "asa", "ue", "co"]


def cmd_bench(args) -> int:
    entries = io.parse_manifest(args.manifest)

    def run(entry):
        rgb = io.load_image(entry.image)
        contour = _load_contour(entry.contour, rgb)
        labels = _run_decompose(args, rgb, contour, args.k)
        row = {"image": str(entry.image), "superpixels": str(len(np.unique(labels.labels)))}
        if entry.ground_truths:
            gts = [io.load_label_map(g) for g in entry.ground_truths]
            report = metrics.evaluate(labels, gts, args.epsilon)
            row.update({k: fmt(v) for k, v in report.as_dict().items()})
        else:
            row.update(br="", asa="", ue="", co=fmt(metrics.compactness(labels)))
        return row

    rows = _map_ordered(run, entries, args.jobs)
    buf = _io.StringIO()
    w = csv.DictWriter(buf, BENCH_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scalp", description="SCALP superpixels and superpixel metrics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="compute a superpixel decomposition")
    p.add_argument("--image", required=True)
    p.add_argument("--k", type=int, required=True, help="requested number of superpixels")
    p.add_argument("--contour", help="contour prior map (grayscale PNG/PGM)")
    _add_param_flags(p)
    p.add_argument("--out", help="label map output (16-bit PNG)")
    p.add_argument("--render", choices=MODES)
    p.add_argument("--render-out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("metrics", help="BR, ASA, UE and CO of a label map")
    p.add_argument("--labels", required=True)
    p.add_argument("--gt", action="append", required=True)
    p.add_argument("--epsilon", type=float, default=metrics.DEFAULT_EPSILON)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("prcurve", help="boundary precision/recall over a ladder of scales")
    p.add_argument("--image", required=True)
    p.add_argument("--contour", help="contour prior map (grayscale PNG/PGM)")
    p.add_argument("--gt", action="append", required=True)
    p.add_argument("--scales", type=parse_scales, default=metrics.scale_ladder())
    p.add_argument("--out", help="CSV output (default: stdout)")
    p.add_argument("--epsilon", type=float, default=metrics.DEFAULT_EPSILON)
    p.add_argument("--jobs", type=int, default=1, help="scales decomposed concurrently")
    _add_param_flags(p)
    p.set_defaults(func=cmd_prcurve)

    p = sub.add_parser("prior", help="gradient-magnitude fallback contour map")
    p.add_argument("--image", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_prior)

    p = sub.add_parser("bench", help="decompose and evaluate every entry of a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--k", type=int, default=200)
    p.add_argument("--out", help="CSV report (default: stdout)")
    p.add_argument("--epsilon", type=float, default=metrics.DEFAULT_EPSILON)
    p.add_argument("--jobs", type=int, default=1, help="entries processed concurrently")
    _add_param_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "decompose" and bool(args.render) != bool(args.render_out):
        parser.error("--render and --render-out go together")
    try:
        return args.func(args)
    except (ScalpError, OSError) as exc:
        print(f"scalp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
