"""Command line interface: detect / train / eval subcommands.

detect  classify images (optional), segment the positives, write masks,
        per-image threshold curves, and a summary CSV
train   fit the classifier on a positive/ + negative/ directory tree
eval    score predicted masks against ground truth at image or pixel level
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import cnn, image_io
from .errors import CrackDetError
from .evaluation import (
    ConfusionCounts,
    accumulate_image,
    accumulate_pixels,
    compute_metrics,
)
from .errors import (
    DimensionMismatchError,
    EmptyDatasetError,
    MissingPairError,
    SingleClassDatasetError,
)
from .filtering import BilateralParams
from .pipeline import PipelineConfig, segment_gray
from .thresholding import remove_small_components

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def _fmt(value):
    """Deterministic CSV cell: shortest float repr, empty for None."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def _collect_images(root):
    root = Path(root)
    if root.is_dir():
        return sorted(p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    return [root]


def _add_pipeline_flags(parser):
    parser.add_argument("--method", choices=("adaptive", "otsu"), default="adaptive")
    parser.add_argument("--tau", type=int, default=1,
                        help="neighborhood radius for the 2D histogram (1..4)")
    parser.add_argument("--bins", type=int, default=256)
    parser.add_argument("--sigma-s", type=float, default=300.0)
    parser.add_argument("--sigma-c", type=float, default=0.1)
    parser.add_argument("--rho", type=int, default=5)
    parser.add_argument("--min-component", type=int, default=100,
                        help="foreground components below this pixel area are dropped")


def cmd_detect(args):
    files = _collect_images(args.input)
    if not files:
        print(f"no images found under {args.input}", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = PipelineConfig(
        bilateral=BilateralParams(args.sigma_s, args.sigma_c, args.rho),
        tau=args.tau,
        bins=args.bins,
        min_component=args.min_component,
        method=args.method,
        model_path=args.model,
    )
    model = None
    if args.model and not args.no_classifier:
        model = cnn.load_checkpoint(args.model)

    rows = []
    failures = 0
    for path in files:
        label, p_positive, delta, mask_name, error = "skipped", None, None, None, None
        try:
            rgb = image_io.load_image(path)
            if model is not None:
                result = cnn.classify(model, rgb)
                label = result.label
                p_positive = float(result.probabilities[1])
            if label != "negative":
                gray = image_io.to_grayscale(rgb)
                outcome = segment_gray(gray, cfg)
                delta = outcome.delta
                mask_name = f"{path.stem}_mask.png"
                image_io.save_mask(outcome.mask, out_dir / mask_name)
                if outcome.threshold is not None:
                    _write_csv(
                        out_dir / f"{path.stem}_wcss.csv",
                        ["delta", "wcss"],
                        zip(
                            outcome.threshold.candidates.tolist(),
                            outcome.threshold.wcss_curve.tolist(),
                        ),
                    )
            status = "ok"
        except (CrackDetError, OSError) as exc:
            status = "error"
            error = f"{type(exc).__name__}: {exc}"
            failures += 1
        rows.append((path.name, status, label, p_positive, delta, mask_name, error))

    _write_csv(
        out_dir / "summary.csv",
        ["filename", "status", "label", "p_positive", "delta", "mask", "error"],
        rows,
    )
    print(f"processed {len(files)} image(s), {failures} failed; summary at "
          f"{out_dir / 'summary.csv'}")
    return 1 if failures == len(files) else 0


def _load_split_dir(root, input_size):
    """Read positive/ and negative/ subtrees into model-ready arrays."""
    root = Path(root)
    xs, ys = [], []
    present = []
    for label_index, name in enumerate(cnn.LABELS):
        sub = root / name
        if not sub.is_dir():
            continue
        files = sorted(p for p in sub.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
        if files:
            present.append(name)
        for path in files:
            xs.append(cnn.preprocess(image_io.load_image(path), input_size))
            ys.append(label_index)
    if not xs:
        raise EmptyDatasetError(f"no images under {root}/positive or {root}/negative")
    if len(present) < 2:
        raise SingleClassDatasetError(
            f"only {present[0]!r} images found under {root}; need both classes"
        )
    return np.stack(xs), np.array(ys, dtype=np.int64)


def cmd_train(args):
    widths = tuple(int(w) for w in args.widths.split(","))
    x, y = _load_split_dir(args.dataset, args.input_size)
    rng = np.random.default_rng(args.seed)
    order = rng.permutation(len(x))
    n_val = int(round(len(x) * args.val_fraction))
    val_idx, train_idx = order[:n_val], order[n_val:]

    arch = cnn.ArchConfig.default(args.input_size, x.shape[1], widths)
    model = cnn.CrackClassifier(arch, rng=np.random.default_rng(args.seed))
    cfg = cnn.TrainConfig(
        learning_rate=args.lr,
        max_epochs=args.epochs,
        validation_frequency=args.val_frequency,
        momentum=args.momentum,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    log = cnn.train(
        model,
        x[train_idx],
        y[train_idx],
        cfg,
        x_val=x[val_idx] if n_val else None,
        y_val=y[val_idx] if n_val else None,
    )

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    cnn.save_checkpoint(model, out)
    log_path = Path(args.log) if args.log else out.with_suffix(".log.csv")
    _write_csv(
        log_path,
        ["iteration", "split", "loss", "accuracy"],
        [(r.iteration, r.split, r.loss, r.accuracy) for r in log],
    )
    final_train = [r for r in log if r.split == "train"][-1]
    print(f"trained {cfg.max_epochs} epoch(s) on {len(train_idx)} images; "
          f"final train accuracy {final_train.accuracy:.4f}; "
          f"checkpoint at {out}, log at {log_path}")
    return 0


def _mask_stems(root):
    root = Path(root)
    return {p.stem: p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES}


def cmd_eval(args):
    pred = _mask_stems(args.pred_dir)
    truth = _mask_stems(args.truth_dir)
    if set(pred) != set(truth):
        odd = sorted(set(pred) ^ set(truth))
        raise MissingPairError(f"unmatched stems: {', '.join(odd[:5])}")
    if not pred:
        raise MissingPairError("no mask pairs found")

    counts = ConfusionCounts()
    for stem in sorted(pred):
        p = image_io.load_mask(pred[stem])
        t = image_io.load_mask(truth[stem])
        if args.level == "image":
            counts = accumulate_image(bool(p.any()), bool(t.any()), counts)
        else:
            if p.shape != t.shape:
                raise DimensionMismatchError(
                    f"{stem}: prediction {p.shape} vs truth {t.shape}"
                )
            p = remove_small_components(p, args.min_component)
            counts = accumulate_pixels(p, t, counts)

    report = compute_metrics(counts)
    cells = {
        "precision": report.precision,
        "recall": report.recall,
        "accuracy": report.accuracy,
        "f1": report.f1,
    }
    print(f"level={args.level} tp={counts.n_tp} fp={counts.n_fp} "
          f"fn={counts.n_fn} tn={counts.n_tn}")
    for name, value in cells.items():
        print(f"  {name:9s} {'undefined' if value is None else f'{value:.4f}'}")
    if args.out:
        _write_csv(
            args.out,
            ["level", "min_component", "n_tp", "n_fp", "n_fn", "n_tn",
             "precision", "recall", "accuracy", "f1"],
            [(args.level, args.min_component, counts.n_tp, counts.n_fp,
              counts.n_fn, counts.n_tn, report.precision, report.recall,
              report.accuracy, report.f1)],
        )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="crackdet",
        description="Road crack detection: classify, segment, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="segment cracks in images")
    detect.add_argument("input", help="image file or directory")
    detect.add_argument("--out", required=True, help="output directory")
    detect.add_argument("--model", help="classifier checkpoint; gates segmentation")
    detect.add_argument("--no-classifier", action="store_true",
                        help="segment every image, even with --model")
    _add_pipeline_flags(detect)

    trainp = sub.add_parser("train", help="train the patch classifier")
    trainp.add_argument("dataset", help="directory with positive/ and negative/")
    trainp.add_argument("--out", required=True, help="checkpoint path")
    trainp.add_argument("--log", help="training log CSV (default: <out>.log.csv)")
    trainp.add_argument("--lr", type=float, default=0.01)
    trainp.add_argument("--epochs", type=int, default=16)
    trainp.add_argument("--batch-size", type=int, default=64)
    trainp.add_argument("--momentum", type=float, default=0.9)
    trainp.add_argument("--val-frequency", type=int, default=60)
    trainp.add_argument("--val-fraction", type=float, default=0.25)
    trainp.add_argument("--seed", type=int, default=0)
    trainp.add_argument("--input-size", type=int, default=227)
    trainp.add_argument("--widths", default="16,32,64",
                        help="comma-separated conv block widths")

    evalp = sub.add_parser("eval", help="score masks against ground truth")
    evalp.add_argument("pred_dir")
    evalp.add_argument("truth_dir")
    evalp.add_argument("--level", choices=("image", "pixel"), default="pixel")
    evalp.add_argument("--min-component", type=int, default=100)
    evalp.add_argument("--out", help="metrics CSV path")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {"detect": cmd_detect, "train": cmd_train, "eval": cmd_eval}
    try:
        return handlers[args.command](args)
    except (CrackDetError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
