"""``mfebin`` command-line entry point."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .binarize import ThresholdParams, binarize
from . import losses, metrics
from .dataset import (AugmentConfig, augment_global_set, augment_patch_set, ingest_manifest,
                      load_split_file, make_folds)
from .errors import MfeBinError
from .mfe import STRATEGIES, NormalizationSpec, hwt_forward, mfe_extract
from .pipeline import (QUANTIZE_MODES, PipelineConfig, compare_resizers, emit_report,
                       run_pipeline)
from .raster import load_image, load_mask, save_image, save_mask, to_grayscale
from .resize import METHODS, resize
from .synthetic import degraded_page

log = logging.getLogger("mfebin")


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def _fmt(v) -> str:
    if v is None:
        return "--"
    if math.isinf(v):
        return "inf"
    return f"{v:.2f}"


def cmd_binarize(args) -> int:
    gray = to_grayscale(load_image(args.input))
    params = ThresholdParams(args.method, window=args.window, k=args.k, R=args.R)
    save_mask(binarize(gray, params), args.output)
    return 0


def cmd_evaluate(args) -> int:
    cfg = metrics.MetricsConfig()
    report = metrics.evaluate_pair(args.pred, args.gt, cfg)
    if args.csv:
        writer = csv.writer(sys.stdout)
        writer.writerow(["file", "fm", "pfm", "psnr_db", "drd", "asm"])
        writer.writerow([report.name, _fmt(report.fm), _fmt(report.pfm), _fmt(report.psnr),
                         _fmt(report.drd), _fmt(report.asm)])
    else:
        print(f"FM     {_fmt(report.fm)}")
        print(f"p-FM   {_fmt(report.pfm)}")
        print(f"PSNR   {_fmt(report.psnr)} dB")
        print(f"DRD    {_fmt(report.drd)}")
        print(f"ASM    {_fmt(report.asm)}")
        for flag in report.flags:
            print(f"note: {flag}")
    return 0


def cmd_resize(args) -> int:
    img = load_image(args.input)
    w, h = args.size
    px = img.pixels.astype(np.float64)
    if px.ndim == 2:
        out = resize(px, args.method, w, h, clamp=args.clamp)
    else:
        out = np.stack([resize(px[..., c], args.method, w, h, clamp=args.clamp) for c in range(3)], -1)
    save_image(out, args.output)
    return 0


def cmd_mfe(args) -> int:
    gray = to_grayscale(load_image(args.input))
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    sb = hwt_forward(gray)
    for name in ("ll", "lh", "hl", "hh"):
        save_image(getattr(sb, name), out / f"{name}.png")
    save_image(mfe_extract(gray, NormalizationSpec(args.norm)), out / "ll_norm.png")
    return 0


def _probmap(path, text_is_dark: bool = True) -> np.ndarray:
    g = to_grayscale(load_image(path)) / 255.0
    return 1.0 - g if text_is_dark else g


def cmd_loss(args) -> int:
    pred = _probmap(args.pred)
    gt = load_mask(args.gt).astype(np.float64)
    cfg = losses.LossConfig(baseline=args.baseline)
    critic = losses.CRITICS[args.critic]
    if args.kind == "bce":
        value = losses.bce(pred, gt)[0]
    elif args.kind == "dice":
        value = losses.soft_dice(pred, gt)[0]
    elif args.kind == "gen":
        value = losses.generator_objective(critic, lambda x: losses.as_probmap(pred), gt, gt, cfg)
    else:
        value = losses.discriminator_objective(critic, gt, pred, gt, args.eps, cfg)
    print(f"{args.kind} {value:.6f}")
    return 0


def cmd_gradcheck(args) -> int:
    rng = np.random.default_rng(args.seed)
    worst = {"bce": 0.0, "dice": 0.0}
    for _ in range(args.trials):
        p = rng.uniform(0.05, 0.95, (args.size, args.size))
        y = (rng.random((args.size, args.size)) < 0.5).astype(np.float64)
        worst["bce"] = max(worst["bce"], losses.check_grad(lambda z: losses.bce(z, y), p))
        worst["dice"] = max(worst["dice"], losses.check_grad(lambda z: losses.soft_dice(z, y), p))
    for name, err in worst.items():
        print(f"{name} max relative error {err:.3e}")
    return 0 if max(worst.values()) < 1e-5 else 1


def cmd_dataset(args) -> int:
    if args.action == "ingest":
        m = ingest_manifest(args.root)
        for inp, gt, pid in m.pairs:
            print(f"{pid},{inp},{gt}")
        return 0
    if args.action == "folds":
        m = ingest_manifest(args.root, check_dims=False)
        split = load_split_file(args.split) if args.split else None
        folds = make_folds(m, args.k or len(m), args.seed, split)
        for pid in m.page_ids:
            print(f"{pid},{folds.assignment[pid]}")
        return 0
    m = ingest_manifest(args.root)
    cfg = AugmentConfig()
    out = Path(args.out)
    if args.mode in ("patch", "both"):
        n = augment_patch_set(m, cfg, out / "patches")
        print(f"patches: {n}")
    if args.mode in ("global", "both"):
        n = augment_global_set(m, cfg, out / "global")
        print(f"global images: {n}")
    return 0


def cmd_synth(args) -> int:
    out = Path(args.out)
    (out / "inputs").mkdir(parents=True, exist_ok=True)
    (out / "gt").mkdir(parents=True, exist_ok=True)
    w, h = args.size
    for i in range(args.pages):
        img, gt = degraded_page(args.seed + i, w, h, rgb=args.rgb)
        save_image(img, out / "inputs" / f"page{i:03d}.png")
        save_mask(gt, out / "gt" / f"page{i:03d}.png")
    print(f"wrote {args.pages} pages to {out}")
    return 0


def _pipeline_config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    if args.norm:
        d = cfg.to_dict()
        d["norm"] = args.norm
        cfg = PipelineConfig.from_dict(d)
    return cfg


def cmd_pipeline(args) -> int:
    if args.action == "run":
        cfg = _pipeline_config(args)
        m = ingest_manifest(args.data)
        reports, timing, failures = run_pipeline(m, cfg, args.out)
        emit_report(reports, timing, "csv", Path(args.out) / "report.csv")
        emit_report(reports, timing, "text", Path(args.out) / "report.txt")
        print((Path(args.out) / "report.txt").read_text(), end="")
        for pid, err in failures:
            print(f"failed: {pid}: {err}", file=sys.stderr)
        return 1 if failures else 0
    if args.action == "compare-resizers":
        manifests = [ingest_manifest(d) for d in args.data]
        quantize = "none" if args.no_quantize else args.overflow
        table = compare_resizers(manifests, out=args.out, quantize=quantize, unit=args.unit)
        print(Path(args.out).read_text(), end="")
        log.debug("table: %s", json.dumps(table))
        return 0
    # report
    m = ingest_manifest(args.data, check_dims=False)
    reports = []
    for _, gt_path, pid in m.pairs:
        pred = Path(args.masks) / f"{pid}.png"
        reports.append(metrics.evaluate_masks(load_mask(pred), load_mask(gt_path), name=pid))
    emit_report(reports, None, args.format, args.out)
    print(Path(args.out).read_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfebin", description="Document binarization toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("binarize", help="threshold an image into a DIBCO-style mask")
    p.add_argument("--method", choices=("otsu", "niblack", "sauvola"), default="otsu")
    p.add_argument("--window", type=int, default=25)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--R", type=float, default=128.0)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_binarize)

    p = sub.add_parser("evaluate", help="score a predicted mask against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--csv", action="store_true", help="print a CSV row instead of text")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("resize", help="resample an image")
    p.add_argument("--method", choices=METHODS, default="bilinear")
    p.add_argument("--size", type=_size, required=True, metavar="WxH")
    p.add_argument("--clamp", action="store_true")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_resize)

    p = sub.add_parser("mfe", help="export Haar sub-bands and the normalized LL band")
    p.add_argument("--norm", choices=STRATEGIES, default="minmax")
    p.add_argument("input")
    p.add_argument("outdir")
    p.set_defaults(func=cmd_mfe)

    p = sub.add_parser("loss", help="evaluate a training loss on a prediction/GT pair")
    p.add_argument("--kind", choices=("bce", "dice", "gen", "disc"), required=True)
    p.add_argument("--pred", required=True, help="gray image; darker means more likely text")
    p.add_argument("--gt", required=True)
    p.add_argument("--baseline", action="store_true", help="generator loss without the Dice term")
    p.add_argument("--critic", choices=sorted(losses.CRITICS), default="zero")
    p.add_argument("--eps", type=float, default=0.5, help="interpolation weight for the penalty")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("gradcheck", help="compare analytic loss gradients with finite differences")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--size", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("dataset", help="ingest, split or augment a dataset directory")
    p.add_argument("action", choices=("ingest", "folds", "augment"))
    p.add_argument("root", help="directory holding inputs/ and gt/")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", help="page_id,fold CSV with a fixed partition")
    p.add_argument("--out", default="augmented")
    p.add_argument("--mode", choices=("patch", "global", "both"), default="both")
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("synth", help="write a synthetic degraded-page dataset")
    p.add_argument("out")
    p.add_argument("--pages", type=int, default=20)
    p.add_argument("--size", type=_size, default=(256, 256), metavar="WxH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rgb", action="store_true")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", help="run the three-stage pipeline or its benchmarks")
    psub = p.add_subparsers(dest="action", required=True)
    r = psub.add_parser("run")
    r.add_argument("--config", help="JSON file with PipelineConfig fields")
    r.add_argument("--data", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--norm", choices=STRATEGIES)
    c = psub.add_parser("compare-resizers")
    c.add_argument("--data", nargs="+", required=True, help="one dataset directory per column")
    c.add_argument("--out", required=True)
    c.add_argument("--no-quantize", action="store_true", help="rescale instead of 8-bit storage")
    c.add_argument("--overflow", choices=[m for m in QUANTIZE_MODES if m != "none"], default="clamp")
    c.add_argument("--unit", choices=("page", "patch"), default="page")
    rep = psub.add_parser("report")
    rep.add_argument("--masks", required=True)
    rep.add_argument("--data", required=True)
    rep.add_argument("--format", choices=("csv", "text"), default="text")
    rep.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except MfeBinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
