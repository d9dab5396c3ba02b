"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import core, data, evaluation, pdbx
from ._io import atomic_write_text
from .exceptions import BoltzmannError, ParameterError
from .metrics import DeltaProbStats

log = logging.getLogger("boltzmann_classifier")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not np.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive real, got {text!r}")
    return value


def _fraction(text):
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text!r}")
    return value


def _folds(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 folds, got {text!r}")
    return value


def _grid(text):
    try:
        values = [_positive_float(t) for t in text.split(",") if t.strip()]
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"bad kT grid: {exc}") from None
    if not values or any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("kT grid must be strictly increasing")
    return values


def _add_dataset_args(p, required=True):
    g = p.add_argument_group("dataset")
    g.add_argument("--data", type=Path, required=required,
                   help="input table (CSV or UCI wdbc.data)")
    g.add_argument("--format", choices=("csv", "wdbc"), default="csv",
                   help="'wdbc' reads the UCI breast-cancer layout: id, "
                        "diagnosis, 30 features, no header (default: csv)")
    g.add_argument("--label", default="label",
                   help="label column name, or 0-based index with --no-header "
                        "(default: label)")
    g.add_argument("--ignore", action="append", default=[], metavar="COL",
                   help="column to drop; repeatable")
    g.add_argument("--delimiter", default=",", help="field delimiter (default: ,)")
    g.add_argument("--no-header", action="store_true",
                   help="file has no header row; columns are referenced by index")


def _add_model_args(p):
    p.add_argument("--kt", type=_positive_float, default=1.0,
                   help="temperature kT > 0 (default: 1.0)")
    p.add_argument("--metric", choices=("l1", "l2"), default="l1",
                   help="energy metric (default: l1)")


def _add_split_args(p):
    p.add_argument("--seed", type=int, default=42,
                   help="seed for every split and shuffle (default: 42)")
    p.add_argument("--test-fraction", type=_fraction, default=0.2,
                   help="hold-out fraction (default: 0.2)")


def build_parser():
    parser = _Parser(prog="boltzmann-classifier",
                     description="Boltzmann (energy-based nearest-centroid) "
                                 "classifier: fit, predict, evaluate, sweep kT, "
                                 "and extract Co-ligand features from PDB files.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="more logging; repeat for debug output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a model and write it as JSON")
    _add_dataset_args(p)
    _add_model_args(p)
    p.add_argument("--out", type=Path, required=True, help="model JSON path")

    p = sub.add_parser("predict", help="label rows with a fitted model")
    p.add_argument("--model", type=Path, required=True, help="model JSON path")
    p.add_argument("--data", type=Path, required=True,
                   help="CSV with a header containing the model's feature "
                        "columns (or a wdbc.data file with --format wdbc)")
    p.add_argument("--format", choices=("csv", "wdbc"), default="csv")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--kt", type=_positive_float, default=None,
                   help="override the model's kT (labels are unaffected)")
    p.add_argument("--out", type=Path, required=True,
                   help="output CSV: row, label, one probability column per class")

    p = sub.add_parser("evaluate", help="cross-validate or hold-out evaluate")
    _add_dataset_args(p)
    _add_model_args(p)
    _add_split_args(p)
    p.add_argument("--mode", choices=("cv", "holdout"), default="cv",
                   help="stratified k-fold CV or a single hold-out (default: cv)")
    p.add_argument("--folds", type=_folds, default=5,
                   help="fold count for --mode cv (default: 5)")
    p.add_argument("--baselines", action="store_true",
                   help="holdout only: add nearest-centroid, k-NN and "
                        "logistic-regression baselines")
    p.add_argument("--knn-k", type=int, default=5,
                   help="neighbours for the k-NN baseline (default: 5)")
    p.add_argument("--out", type=Path, help="report JSON path")
    p.add_argument("--histogram-out", type=Path,
                   help="CSV of the delta-probability histogram (binary data)")

    p = sub.add_parser("sweep", help="mean |delta p| and accuracy over a kT grid")
    _add_dataset_args(p)
    _add_split_args(p)
    p.add_argument("--metric", choices=("l1", "l2"), default="l1")
    p.add_argument("--grid", type=_grid, default=list(evaluation.DEFAULT_KT_GRID),
                   help="comma-separated increasing kT values "
                        "(default: 10 log-spaced points in [0.05, 5])")
    p.add_argument("--out", type=Path, required=True, help="sweep CSV path")

    p = sub.add_parser("extract", help="Co-ligand distance features from PDB files")
    p.add_argument("--pdb-dir", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="feature CSV path")
    p.add_argument("--cutoff", type=_positive_float, default=pdbx.DEFAULT_CUTOFF,
                   help="ligand search radius in angstrom (default: 3.0)")
    p.add_argument("--include-hydrogens", action="store_true",
                   help="allow H atoms as ligand candidates")
    p.add_argument("--label-from-filename", action="store_true",
                   help="add a label column parsed from '<id>_<oxstate>.pdb'")
    p.add_argument("--label-column", default="oxstate",
                   help="name of that column (default: oxstate)")

    p = sub.add_parser("export-bcw",
                       help="write the bundled Breast Cancer Wisconsin data "
                            "in UCI wdbc.data layout")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("synth-cobalt",
                       help="write a synthetic octahedral Co(II)/Co(III) PDB corpus")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--per-class", type=int, default=30)
    p.add_argument("--seed", type=int, default=42)
    return parser


def _load_dataset(args):
    if args.format == "wdbc":
        return data.load_wdbc(args.data)
    label = args.label
    ignored = tuple(args.ignore)
    if args.no_header:
        try:
            label = int(label)
            ignored = tuple(int(c) for c in ignored)
        except ValueError:
            raise UsageError("--no-header needs integer column indices") from None
    spec = data.DatasetSpec(args.data, label, ignored, args.delimiter,
                            has_header=not args.no_header)
    return data.load_csv(spec)


def cmd_fit(args):
    dataset = _load_dataset(args)
    model = core.fit(dataset, kT=args.kt, metric=args.metric)
    core.save_model(model, args.out)
    log.info("fitted %d classes x %d features -> %s",
             model.n_classes, model.n_features, args.out)


def cmd_predict(args):
    model = core.load_model(args.model)
    if args.kt is not None:
        model = model.with_kt(args.kt)
    if args.format == "wdbc":
        X = data.load_wdbc(args.data).features
    else:
        X = data.load_feature_matrix(args.data, model.feature_names, args.delimiter)
    labels, probs = core.predict_batch(model, X)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "label", *(f"p_{c}" for c in model.class_names)])
    for i, (lab, p) in enumerate(zip(labels, probs)):
        w.writerow([i, model.class_names[lab], *(repr(float(v)) for v in p)])
    atomic_write_text(args.out, buf.getvalue())


def _write_histogram(path, delta):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_lo", "bin_hi", "correct", "misclassified"])
    for lo, hi, c, m in delta.histogram_rows():
        w.writerow([repr(lo), repr(hi), c, m])
    atomic_write_text(path, buf.getvalue())


def cmd_evaluate(args):
    dataset = _load_dataset(args)
    if args.mode == "cv":
        plan = data.stratified_folds(dataset.labels, args.folds, args.seed,
                                     dataset.class_names)
        result = evaluation.cross_validate(dataset, plan, args.kt, args.metric)
        doc = {"mode": "cv", "kT": args.kt, "metric": args.metric, **result.to_dict()}
        text = result.to_text()
        delta = None
        if dataset.n_classes == 2:
            # pool out-of-fold predictions for the histogram
            probs = np.vstack([f.probabilities for f in result.folds])
            preds = np.concatenate([f.predictions for f in result.folds])
            truth = np.concatenate([dataset.labels[idx] for _, idx in plan.folds()])
            delta = DeltaProbStats.from_probabilities(probs, truth, preds)
            doc["pooled_delta_probability"] = delta.to_dict()
    else:
        train, test = data.split_train_test(dataset, args.test_fraction, args.seed)
        if args.baselines:
            reports = evaluation.compare_methods(train, test, args.kt, args.metric,
                                                 knn_k=args.knn_k)
        else:
            model = core.fit(train, kT=args.kt, metric=args.metric)
            reports = {"boltzmann": evaluation.evaluate(model, test)}
        main = reports["boltzmann"]
        delta = main.delta
        doc = {"mode": "holdout", "seed": args.seed,
               "test_fraction": args.test_fraction,
               "reports": {k: r.to_dict() for k, r in reports.items()}}
        text = main.to_text()
        if args.baselines:
            doc["svm_reported_not_recomputed"] = evaluation.PAPER_SVM_ACCURACY
            text += "\n\n" + evaluation.comparison_text(reports)
    print(text)
    if args.out:
        atomic_write_text(args.out, evaluation.report_json(doc))
    if args.histogram_out:
        if delta is None:
            raise UsageError("--histogram-out needs a two-class dataset")
        _write_histogram(args.histogram_out, delta)


def cmd_sweep(args):
    dataset = _load_dataset(args)
    train, test = data.split_train_test(dataset, args.test_fraction, args.seed)
    result = evaluation.kt_sweep(train, test, args.grid, args.metric)
    atomic_write_text(args.out, result.to_csv())
    for kT, dp, acc in result.rows():
        print(f"kT={kT:<10.4g} mean|dp|={dp:.6f} accuracy={acc:.4f}")


def cmd_extract(args):
    rows, skipped = pdbx.extract_directory(args.pdb_dir, args.cutoff,
                                           args.include_hydrogens,
                                           args.label_from_filename)
    label_col = args.label_column if args.label_from_filename else None
    atomic_write_text(args.out, pdbx.features_csv(rows, label_col))
    for s in skipped:
        print(f"skipped: {s}", file=sys.stderr)
    print(f"{len(rows)} record(s), {len(skipped)} skipped -> {args.out}")


def cmd_export_bcw(args):
    data.export_bundled_wdbc(args.out)
    print(f"wrote {args.out}")


def cmd_synth_cobalt(args):
    if args.per_class < 1:
        raise UsageError("--per-class must be positive")
    paths = pdbx.write_synthetic_corpus(args.out_dir, args.per_class, args.seed)
    print(f"wrote {len(paths)} PDB files to {args.out_dir}")


COMMANDS = {"fit": cmd_fit, "predict": cmd_predict, "evaluate": cmd_evaluate,
            "sweep": cmd_sweep, "extract": cmd_extract,
            "export-bcw": cmd_export_bcw, "synth-cobalt": cmd_synth_cobalt}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BoltzmannError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
