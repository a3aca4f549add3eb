"""Command-line interface.

Subcommands map one-to-one onto the pipeline stages: synth, score, evaluate,
sweep, correlate, norm-compare. Progress and timing go to the log (stderr or
--log), never into result files, so outputs stay byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import dataset_io, pipeline, report, synth
from .blocks import BlockSpec
from .errors import BlockGEError, ParseError
from .metrics import EvalReport
from .report import PlotSpec, write_curve_plot, write_report, write_sweep_plot
from .scoring import FusionWeights, NormalizationMode

log = logging.getLogger("blockge")


def _run_config(args) -> pipeline.RunConfig:
    return pipeline.RunConfig(
        exponent=args.exponent,
        block=BlockSpec(args.block[0], args.block[1]),
        radius=args.radius,
        mode=NormalizationMode.DATASET if args.norm == "dataset" else NormalizationMode.PER_VIDEO,
        weights=tuple(args.weights) if args.weights else None,
        seed=args.seed,
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--block", nargs=2, type=int, default=[30, 30],
                        metavar=("H", "W"), help="block height and width (default 30 30)")
    parser.add_argument("--exponent", type=int, choices=(1, 2), default=2,
                        help="per-pixel error exponent (default 2)")
    parser.add_argument("--radius", type=int, default=15,
                        help="median filter radius in frames (default 15)")
    parser.add_argument("--norm", choices=("dataset", "video"), default="dataset",
                        help="normalization scope (default dataset)")
    parser.add_argument("--weights", nargs="+", type=float, default=None,
                        help="fusion weights, one per manifest (default all 1)")
    parser.add_argument("--seed", type=int, default=None, help="seed echoed into reports")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--log", default=None, help="side log file (default stderr)")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_score(args) -> None:
    config = _run_config(args)
    out = _out_dir(args)
    t0 = time.perf_counter()
    files = []
    for i, manifest_path in enumerate(args.manifest):
        manifest = dataset_io.load_manifest(manifest_path)
        save_dir = out / f"ge{i:02d}" if args.save_ge else None
        result = pipeline.score_manifest(
            manifest, Path(manifest_path).parent, config,
            with_frame_level=args.emit_frame_level, save_ge_dir=save_dir,
        )
        suffix = "" if len(args.manifest) == 1 else f"_{i:02d}"
        dataset_io.write_scores(result.block, out / f"scores_block{suffix}.json")
        files.append(result.block)
        if result.frame is not None:
            dataset_io.write_scores(result.frame, out / f"scores_frame{suffix}.json")
        log.info("scored %s (%d frames)", manifest_path, len(result.block.scores))
        if args.plot:
            labels = manifest.label_series()
            series = [("block-level GE", result.block.ge)]
            if result.frame is not None:
                series.insert(0, ("frame-level GE", result.frame.ge))
            spec = PlotSpec(series=tuple(series), labels=labels,
                            title=f"GE curves: {manifest.name}")
            write_curve_plot(spec, out / f"curves{suffix}.svg")
    if len(files) > 1:
        weights = None
        if config.weights is not None:
            weights = FusionWeights(
                tuple((f"modality{i}", w) for i, w in enumerate(config.weights))
            )
        fused = pipeline.fuse_score_files(files, config, weights)
        dataset_io.write_scores(fused, out / "scores_fused.json")
        log.info("fused %d modalities", len(files))
    log.info("score done in %.2fs", time.perf_counter() - t0)


def cmd_evaluate(args) -> None:
    config = _run_config(args)
    out = _out_dir(args)
    manifest = dataset_io.load_manifest(args.manifest[0])
    labels = manifest.label_series()
    score_files = [dataset_io.read_scores(p) for p in args.scores]
    rep = pipeline.evaluate_report(score_files, labels, config)
    write_report(rep, out / "report.json", "json")
    write_report(rep, out / "report.tsv", "table")
    for row in rep.rows:
        log.info("%s: auc=%s saliency=%s", row.name, row.auc, row.saliency)


def cmd_sweep(args) -> None:
    config = _run_config(args)
    out = _out_dir(args)
    manifest = dataset_io.load_manifest(args.manifest[0])
    t0 = time.perf_counter()
    rep = pipeline.sweep_sizes(manifest, Path(args.manifest[0]).parent, args.sizes, config)
    write_report(rep, out / "sweep.json", "json")
    write_report(rep, out / "sweep.tsv", "table")
    curve = tuple(p.auc for p in rep.sweep)
    try:
        write_sweep_plot(tuple(args.sizes), ((manifest.name, curve),), out / "sweep.svg")
    except BlockGEError as exc:
        log.warning("sweep plot skipped: %s: %s", type(exc).__name__, exc)
    log.info("sweep done in %.2fs, argmax=%s", time.perf_counter() - t0,
             rep.config.get("sweep_argmax"))


def cmd_correlate(args) -> None:
    config = _run_config(args)
    out = _out_dir(args)
    manifest = dataset_io.load_manifest(args.manifest[0])
    rep = pipeline.correlate_report(manifest, Path(args.manifest[0]).parent, config)
    write_report(rep, out / "correlation.json", "json")
    write_report(rep, out / "correlation.tsv", "table")
    for row in rep.rows:
        log.info("%s: r=%s", row.name, row.correlation)


def cmd_norm_compare(args) -> None:
    config = _run_config(args)
    out = _out_dir(args)
    manifest = dataset_io.load_manifest(args.manifest[0])
    rep = pipeline.norm_compare_report(manifest, Path(args.manifest[0]).parent, config)
    write_report(rep, out / "norm_compare.json", "json")
    write_report(rep, out / "norm_compare.tsv", "table")
    log.info("norm1 mixed-population degradation: %s",
             rep.config.get("norm1_mixed_degradation"))


def cmd_synth(args) -> None:
    out = _out_dir(args)
    try:
        data = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise ParseError(f"{args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.config}: line {exc.lineno}: {exc.msg}") from exc
    config = synth.SynthConfig.from_dict(data)
    t0 = time.perf_counter()
    dataset = synth.generate(config)
    manifest_path = dataset_io.save_dataset(dataset, out)
    log.info("generated %d frames in %.2fs -> %s",
             len(dataset.maps), time.perf_counter() - t0, manifest_path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockge",
        description="Block-level generation-error anomaly scoring and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a dataset (GE -> filter -> normalize)")
    p.add_argument("--manifest", nargs="+", required=True,
                   help="dataset manifest(s); several manifests are fused")
    p.add_argument("--emit-frame-level", action="store_true",
                   help="also score the frame-level mean baseline")
    p.add_argument("--save-ge", action="store_true",
                   help="store GE maps computed from prediction/ground-truth pairs")
    p.add_argument("--plot", action="store_true", help="emit GE curve SVGs")
    _add_common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("evaluate", help="compute metrics for existing score files")
    p.add_argument("--manifest", nargs=1, required=True)
    p.add_argument("--scores", nargs="+", required=True, help="score file(s) to evaluate")
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="AUC over a grid of square block sizes")
    p.add_argument("--manifest", nargs=1, required=True)
    p.add_argument("--sizes", nargs="+", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("correlate", help="foreground-count correlation and level ratios")
    p.add_argument("--manifest", nargs=1, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("norm-compare", help="dataset-wide vs per-video normalization")
    p.add_argument("--manifest", nargs=1, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_norm_compare)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--config", required=True, help="synth config JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--log", default=None)
    p.set_defaults(func=cmd_synth)
    return parser


def _setup_logging(args) -> None:
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if getattr(args, "log", None):
        handlers.append(logging.FileHandler(args.log))
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        handlers=handlers,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args)
    try:
        args.func(args)
    except BlockGEError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
