"""Command line entry point: ``elt bench|train|predict|surface``.

Exit codes: 0 success, 2 input or parse error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .harness import (
    BenchmarkError,
    export_decision_surface,
    export_leaf_structure,
    iris_path,
    load_config,
    load_csv,
    load_features,
    make_estimator,
    run_benchmark,
)
from .persistence import load_model, save_model

EXIT_INPUT = 2
EXIT_NUMERIC = 3


def _add_data_args(p):
    p.add_argument("--data", default=None,
                   help="CSV file (default: bundled Iris)")
    p.add_argument("--label-col", default="-1",
                   help="label column name or index (default: last)")
    p.add_argument("--no-header", action="store_true")


def _dataset(args):
    path = args.data or iris_path()
    return load_csv(path, args.label_col, header=not args.no_header)


def cmd_bench(args):
    dataset = _dataset(args)
    config = load_config(args.config)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        make_estimator(m, 0, config)
    report = run_benchmark(
        dataset, methods, args.reps, args.seed,
        stratify=not args.no_stratify, config=config,
    )
    Path(args.out).write_text(report.to_csv())
    if args.runs_out:
        Path(args.runs_out).write_text(report.runs_to_csv())
    for m in methods:
        print(f"{m:<6} {report.mean(m):6.2f} +- {report.std(m):.2f}")


def cmd_train(args):
    dataset = _dataset(args)
    model = make_estimator(args.method, args.seed, load_config(args.config))
    model.fit(dataset.x, dataset.labels)
    save_model(model, args.out, metadata={
        "class_names": dataset.class_names,
        "feature_names": dataset.feature_names,
    })


def _model_inputs(args):
    model, meta = load_model(args.model)
    x = load_features(args.data, meta.get("feature_names"), header=not args.no_header)
    return model, meta, x


def cmd_predict(args):
    model, meta, x = _model_inputs(args)
    pred = model.predict(x)
    names = meta.get("class_names")
    with open(args.out, "w") as f:
        f.write("predicted_class\n")
        for p in pred:
            f.write(f"{names[p] if names else p}\n")


def cmd_surface(args):
    model, _, x = _model_inputs(args)
    try:
        pair = tuple(int(v) for v in args.features.split(","))
    except ValueError:
        raise ValueError(f"--features must be two integers like 0,1, got {args.features!r}")
    if len(pair) != 2:
        raise ValueError("--features needs exactly two indices")
    export = export_leaf_structure if args.leaves else export_decision_surface
    export(model, x, pair, args.res, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="repeated random-split accuracy benchmark")
    _add_data_args(p)
    p.add_argument("--methods", default="elt,ridge,elm,cart")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-stratify", action="store_true")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--runs-out", default=None, help="optional per-run accuracy CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("train", help="fit one model on a whole CSV and save it")
    _add_data_args(p)
    p.add_argument("--method", default="elt", choices=["elt", "ridge", "elm", "cart"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict classes with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("surface", help="export a decision-surface grid")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--features", default="0,1")
    p.add_argument("--res", type=int, default=200)
    p.add_argument("--leaves", action="store_true",
                   help="write leaf indices instead of classes (ELT only)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_surface)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except BenchmarkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        numeric = isinstance(exc.__cause__, (np.linalg.LinAlgError, FloatingPointError))
        return EXIT_NUMERIC if numeric else EXIT_INPUT
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
