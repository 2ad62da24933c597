"""Command-line harness.

Subcommands: ``feature-curve``, ``reconstruct``, ``missing-labels``, ``sweep``.
Options can come from a flat ``key = value`` config file (``--config``); flags
given on the command line override file values. Exit codes: 0 success,
2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from . import datasets, evaluation, experiments, linalg, model, pca

_DATA_ERRORS = (
    OSError,
    datasets.ArffSyntaxError,
    datasets.UnknownLabelNameError,
    datasets.MissingValueError,
    datasets.NonBinaryLabelError,
    datasets.MalformedXmlError,
    datasets.EmptyLabelSetError,
    datasets.SchemaMismatchError,
    datasets.OutOfRangeError,
    evaluation.TooFewInstancesError,
    pca.DegenerateDataError,
    model.ZeroInputError,
)

_NUMERIC_ERRORS = (
    linalg.SingularPencilError,
    linalg.SingularSystemError,
    linalg.NotPositiveDefiniteError,
    linalg.NotSymmetricError,
    linalg.NotSquareError,
    linalg.TooLargeError,
    linalg.ConvergenceError,
)


def parse_count_list(text: str) -> tuple[int, ...]:
    """Parse "1..100" ranges and comma lists like "1,5,10" (mixes allowed)."""
    counts: set[int] = set()
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if ".." in token:
            lo_text, hi_text = token.split("..", 1)
            lo, hi = int(lo_text), int(hi_text)
            if lo > hi:
                raise ValueError(f"empty range {token!r}")
            counts.update(range(lo, hi + 1))
        else:
            counts.add(int(token))
    if not counts:
        raise ValueError("no feature counts given")
    return tuple(sorted(counts))


def parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` file; '#' lines are comments, keys mirror flag names."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip().lower().replace("-", "_")] = value.strip()
    return values


# (dest, config-file key, parser) for every shared option; CLI flags override
# config-file entries, which override the per-command defaults.
_OPTION_PARSERS = {
    "train": str,
    "test": str,
    "labels_xml": str,
    "lam": str,          # single float or comma list (sweep); resolved per command
    "max_iter": str,
    "objective_tolerance": float,
    "pca_variance": float,
    "standardize": parse_bool,
    "features": parse_count_list,
    "seeds": parse_int_list,
    "missing": parse_float_list,
    "k_neighbors": int,
    "out": str,
    "format": str,
}


def _add_common_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file; flags override it")
    sub.add_argument("--train", help="training ARFF file")
    sub.add_argument("--test", help="test ARFF file")
    sub.add_argument("--labels-xml", dest="labels_xml", help="XML label header")
    sub.add_argument("--lambda", dest="lam",
                     help="soft-constraint weight (comma list for sweep)")
    sub.add_argument("--max-iter", dest="max_iter",
                     help="optimizer iteration cap (comma list for sweep)")
    sub.add_argument("--objective-tolerance", dest="objective_tolerance",
                     help="relative early-stop threshold; 0 disables")
    sub.add_argument("--pca-variance", dest="pca_variance",
                     help="variance retained by PCA; 0 disables PCA")
    sub.add_argument("--standardize", dest="standardize",
                     help="standardize features before PCA (true/false)")
    sub.add_argument("--features", help="feature counts: comma list or a..b range")
    sub.add_argument("--seed", "--seeds", dest="seeds", help="comma list of seeds")
    sub.add_argument("--missing", help="comma list of missing-label proportions")
    sub.add_argument("--k-neighbors", dest="k_neighbors", help="ML-KNN neighbor count")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--format", help="results table format: csv or json")


_COMMAND_DEFAULTS = {
    "feature-curve": {"features": "1..100", "pca_variance": "0.95", "seeds": "0"},
    "reconstruct": {"features": "100", "pca_variance": "0", "seeds": "0"},
    "missing-labels": {
        "features": "100",
        "pca_variance": "0.95",
        "seeds": "0,1,2,3,4",
        "missing": "0.2,0.4,0.6,0.8",
    },
    "sweep": {"features": "1..100", "pca_variance": "0.95", "seeds": "0"},
}

_SHARED_DEFAULTS = {
    "lam": "1.0",
    "max_iter": "100",
    "objective_tolerance": "1e-6",
    "standardize": "false",
    "k_neighbors": "10",
    "out": "results",
    "format": "csv",
    "missing": "",
    "seeds": "0",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ldfm",
        description="Multi-label feature selection experiments (LDFM + ML-KNN)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in _COMMAND_DEFAULTS:
        command_parser = sub.add_parser(command)
        _add_common_options(command_parser)
    return parser


def _resolve_options(args: argparse.Namespace) -> dict:
    file_values = read_config_file(args.config) if args.config else {}
    defaults = {**_SHARED_DEFAULTS, **_COMMAND_DEFAULTS[args.command]}
    resolved = {}
    for key, parse in _OPTION_PARSERS.items():
        raw = getattr(args, key, None)
        if raw is None:
            raw = file_values.get(key)
        if raw is None:
            raw = defaults.get(key)
        if raw is None or raw == "":
            resolved[key] = None
        else:
            resolved[key] = parse(raw)
    for required in ("train", "test", "labels_xml"):
        if not resolved[required]:
            raise ValueError(f"missing required option --{required.replace('_', '-')}")
    return resolved


def _build_config(options: dict, lam: float, max_iterations: int) -> experiments.ExperimentConfig:
    return experiments.ExperimentConfig(
        train_path=options["train"],
        test_path=options["test"],
        xml_path=options["labels_xml"],
        lam=lam,
        max_iterations=max_iterations,
        objective_tolerance=options["objective_tolerance"],
        pca_variance=options["pca_variance"],
        standardize=options["standardize"],
        feature_counts=options["features"],
        seeds=options["seeds"] or (0,),
        missing_proportions=options["missing"] or (),
        k_neighbors=options["k_neighbors"],
        output_dir=options["out"],
        output_format=options["format"],
    )


def _dispatch(args: argparse.Namespace) -> int:
    options = _resolve_options(args)

    if args.command == "sweep":
        lambda_grid = parse_float_list(options["lam"])
        iteration_grid = parse_int_list(options["max_iter"])
        if len(lambda_grid) == 1 and len(iteration_grid) == 1:
            lambda_grid = experiments.DEFAULT_LAMBDA_GRID
            iteration_grid = experiments.DEFAULT_ITERATION_GRID
        config = _build_config(options, lambda_grid[0], iteration_grid[0])
        records = experiments.run_sweep(config, lambda_grid, iteration_grid)
    else:
        lam_values = parse_float_list(options["lam"])
        iter_values = parse_int_list(options["max_iter"])
        if len(lam_values) != 1 or len(iter_values) != 1:
            raise ValueError("--lambda/--max-iter take a single value outside 'sweep'")
        config = _build_config(options, lam_values[0], iter_values[0])
        if args.command == "feature-curve":
            records = [experiments.run_feature_curve(config)]
        elif args.command == "reconstruct":
            records = [experiments.run_reconstruction(config)]
        else:
            records = [experiments.run_missing_labels(config)]

    written = experiments.emit_results(records, config.output_format, config.output_dir)
    for record in records:
        print(f"{record.experiment_id}: done")
    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
