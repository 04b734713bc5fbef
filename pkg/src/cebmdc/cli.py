"""Command-line surface: dataset prep, single-algorithm runs, the full
pipeline, evaluation, threshold sweeps, and view comparison.

Run configuration lives in a flat `key = value` file (one key per line, `#`
comments); unknown keys are rejected and relative paths resolve against the
config file's directory. Flags override config keys. All outputs are
deterministic: identical invocations write byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .data import (
    AttributeKind,
    DataError,
    MissingPolicy,
    MixedDataset,
    apply_missing_policy,
    class_map,
    load_csv,
    load_schema,
    minmax_rescale,
)
from .evaluate import (
    EvalError,
    accuracy,
    compare_views,
    default_sweep_grid,
    sweep_ensemble_threshold,
)
from .fetch import FetchError, fetch_cleve, fetch_credit
from .kmeans import KMeansError, NumericClustererConfig, kmeans
from .pipeline import PipelineConfig, PipelineError, RunReport, run_cebmdc
from .squeezer import Partition, SqueezerConfig, SqueezerError, WeightVector, squeezer
from .synthetic import write_standins


class ConfigError(ValueError):
    pass


_CONFIG_KEYS = {
    "data",
    "schema",
    "class_column",
    "labels_out",
    "report_out",
    "categorical_threshold",
    "ensemble_threshold_norm",
    "numeric_k",
    "numeric_seed",
    "numeric_max_iterations",
    "numeric_convergence_tol",
    "missing_policy",
    "missing_target",
    "missing_fill_value",
    "missing_fill_token",
    "ensemble_weight_categorical",
    "ensemble_weight_numeric",
}

_REQUIRED_KEYS = ("data", "schema", "categorical_threshold", "ensemble_threshold_norm", "numeric_k")


@dataclass(frozen=True)
class RunConfig:
    data: Path
    schema: Path
    class_column: Optional[str]
    labels_out: Path
    report_out: Path
    pipeline: PipelineConfig


def _parse_key_values(path: Path) -> dict[str, str]:
    pairs: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected `key = value`, got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key in pairs:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            pairs[key] = value
    return pairs


def _missing_policy_from(pairs: dict[str, str]) -> Optional[MissingPolicy]:
    action = pairs.get("missing_policy")
    if action is None or action == "none":
        return None
    target_tok = pairs.get("missing_target", "numeric")
    if target_tok == "any":
        target = None
    else:
        try:
            target = AttributeKind(target_tok)
        except ValueError:
            raise ConfigError(
                f"missing_target must be numeric, categorical, or any; got {target_tok!r}"
            ) from None
    if action == "drop_rows":
        return MissingPolicy.drop_rows(target)
    if action == "fill_numeric":
        return MissingPolicy.fill_numeric(float(pairs.get("missing_fill_value", "0")))
    if action == "fill_categorical":
        return MissingPolicy.fill_categorical(pairs.get("missing_fill_token", "?"))
    if action == "treat_as_category":
        return MissingPolicy.treat_as_category()
    raise ConfigError(f"unknown missing_policy {action!r}")


def load_run_config(path: str | Path, overrides: Optional[dict[str, str]] = None) -> RunConfig:
    path = Path(path)
    pairs = _parse_key_values(path)
    unknown = set(pairs) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {sorted(unknown)}")
    if overrides:
        pairs.update({k: v for k, v in overrides.items() if v is not None})
    missing = [k for k in _REQUIRED_KEYS if k not in pairs]
    if missing:
        raise ConfigError(f"{path}: missing required keys: {missing}")

    base = path.parent

    def resolve(p: str) -> Path:
        q = Path(p)
        return q if q.is_absolute() else base / q

    ensemble_weights = None
    if "ensemble_weight_categorical" in pairs or "ensemble_weight_numeric" in pairs:
        if not ("ensemble_weight_categorical" in pairs and "ensemble_weight_numeric" in pairs):
            raise ConfigError("ensemble weight overrides must be given as a pair")
        ensemble_weights = (
            float(pairs["ensemble_weight_categorical"]),
            float(pairs["ensemble_weight_numeric"]),
        )

    try:
        pipeline = PipelineConfig(
            categorical_threshold=float(pairs["categorical_threshold"]),
            numeric=NumericClustererConfig(
                k=int(pairs["numeric_k"]),
                seed=int(pairs.get("numeric_seed", "0")),
                max_iterations=int(pairs.get("numeric_max_iterations", "100")),
                convergence_tol=float(pairs.get("numeric_convergence_tol", "1e-9")),
            ),
            ensemble_threshold_norm=float(pairs["ensemble_threshold_norm"]),
            missing_policy=_missing_policy_from(pairs),
            ensemble_weights=ensemble_weights,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    return RunConfig(
        data=resolve(pairs["data"]),
        schema=resolve(pairs["schema"]),
        class_column=pairs.get("class_column"),
        labels_out=resolve(pairs.get("labels_out", "labels.csv")),
        report_out=resolve(pairs.get("report_out", "report")),
        pipeline=pipeline,
    )


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def write_labels(part: Partition, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("tid,cluster\n")
        for tid in sorted(part.labels):
            fh.write(f"{tid},{part.labels[tid]}\n")


def read_labels(path: Path) -> Partition:
    labels: dict[int, int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["tid", "cluster"]:
            raise DataError(f"{path}: expected header `tid,cluster`")
        for rownum, rec in enumerate(reader, start=1):
            if len(rec) != 2:
                raise DataError(f"{path}: row {rownum}: expected 2 fields")
            tid, cluster = int(rec[0]), int(rec[1])
            if tid in labels:
                raise DataError(f"{path}: duplicate tid {tid}")
            labels[tid] = cluster
    if not labels:
        raise DataError(f"{path}: no labels")
    return Partition(labels, max(labels.values()))


def write_report(report: RunReport, base: Path) -> tuple[Path, Path]:
    base.parent.mkdir(parents=True, exist_ok=True)
    txt = base.with_suffix(".txt")
    js = base.with_suffix(".json")
    with open(txt, "w", encoding="utf-8") as fh:
        for key, value in report.to_key_values():
            fh.write(f"{key}={value}\n")
    with open(js, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    return txt, js


def _load_dataset(data: Path, schema: Path, class_column: Optional[str]):
    ds = load_csv(data, load_schema(schema))
    classes = None
    if class_column:
        ds, extracted = ds.drop_column(class_column)
        classes = {tid: str(v) for tid, v in extracted.items() if v is not None}
    return ds, classes


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_cluster(args: argparse.Namespace) -> int:
    overrides = {
        "data": args.data,
        "schema": args.schema,
        "class_column": args.class_column,
        "labels_out": args.labels_out,
        "report_out": args.report_out,
        "categorical_threshold": args.categorical_threshold,
        "ensemble_threshold_norm": args.ensemble_threshold_norm,
        "numeric_k": args.numeric_k,
        "numeric_seed": args.seed,
    }
    cfg = load_run_config(args.config, overrides)
    ds, _ = _load_dataset(cfg.data, cfg.schema, cfg.class_column)
    part, report = run_cebmdc(ds, cfg.pipeline)
    write_labels(part, cfg.labels_out)
    txt, js = write_report(report, cfg.report_out)
    print(f"labels: {cfg.labels_out}")
    print(f"report: {txt} {js}")
    for key, value in report.to_key_values():
        print(f"{key}={value}")
    return 0


def cmd_squeezer(args: argparse.Namespace) -> int:
    ds, _ = _load_dataset(Path(args.data), Path(args.schema), args.class_column)
    if any(k != AttributeKind.CATEGORICAL for k in ds.schema.kinds):
        raise SqueezerError(
            "squeezer needs an all-categorical dataset; use `cluster` for mixed data"
        )
    ds = apply_missing_policy(ds, MissingPolicy.treat_as_category())
    weights = (
        WeightVector(tuple(float(w) for w in args.weights.split(",")))
        if args.weights
        else WeightVector.unit(ds.schema.m)
    )
    part = squeezer(ds, SqueezerConfig(args.threshold, weights))
    write_labels(part, Path(args.labels_out))
    print(f"n={part.n}")
    print(f"k={part.k}")
    print(f"labels: {args.labels_out}")
    return 0


def cmd_kmeans(args: argparse.Namespace) -> int:
    ds, _ = _load_dataset(Path(args.data), Path(args.schema), args.class_column)
    if any(k != AttributeKind.NUMERIC for k in ds.schema.kinds):
        raise KMeansError(
            "kmeans needs an all-numeric dataset; use `cluster` for mixed data"
        )
    if not args.no_rescale:
        ds = minmax_rescale(ds)
    cfg = NumericClustererConfig(
        k=args.k,
        seed=args.seed,
        max_iterations=args.max_iterations,
        convergence_tol=args.tol,
    )
    part = kmeans(ds, cfg)
    write_labels(part, Path(args.labels_out))
    print(f"n={part.n}")
    print(f"k={part.k}")
    print(f"labels: {args.labels_out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    part = read_labels(Path(args.labels))
    full = load_csv(Path(args.data), load_schema(Path(args.schema)))
    classes = class_map(full, args.class_column)
    unknown = [tid for tid in part.labels if tid not in classes]
    if unknown:
        raise EvalError(
            f"labels reference tids not in the data: {sorted(unknown)[:10]}"
        )
    report = accuracy(part, classes)
    lines = report.to_lines()
    for line in lines:
        print(line)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def _parse_grid(spec: str) -> list[float]:
    if ":" not in spec:
        return [float(tok) for tok in spec.split(",")]
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid spec must be start:stop:step, got {spec!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ConfigError(f"bad grid spec {spec!r}")
    n = int(round((stop - start) / step))
    grid = [round(start + i * step, 12) for i in range(n + 1)]
    return [g for g in grid if g <= stop + 1e-12]


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    if not cfg.class_column:
        raise ConfigError("sweep needs class_column in the config")
    ds, classes = _load_dataset(cfg.data, cfg.schema, cfg.class_column)
    grid = _parse_grid(args.grid) if args.grid else default_sweep_grid()
    report = sweep_ensemble_threshold(ds, cfg.pipeline, grid, classes)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("s_norm,k,r,e,fingerprint\n")
        for row in report.to_csv_rows():
            fh.write(",".join(row) + "\n")
    print(f"sweep: {out} ({len(report.points)} rows)")
    if args.plateau:
        lo, hi, fp = report.widest_plateau()
        print(f"plateau: s_norm {lo!r}..{hi!r} width {hi - lo!r} fingerprint {fp}")
    return 0


def _parse_k_values(spec: str) -> list[int]:
    if ":" in spec:
        lo, _, hi = spec.partition(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in spec.split(",")]


def cmd_compare_views(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    if not cfg.class_column:
        raise ConfigError("compare-views needs class_column in the config")
    ds, classes = _load_dataset(cfg.data, cfg.schema, cfg.class_column)
    rows = compare_views(ds, cfg.pipeline, _parse_k_values(args.k), classes)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("k,e_categorical,e_numeric,e_final\n")
        for r in rows:
            fh.write(
                f"{r.k},{r.error_categorical!r},{r.error_numeric!r},{r.error_final!r}\n"
            )
    for r in rows:
        print(
            f"k={r.k} e_categorical={r.error_categorical!r} "
            f"e_numeric={r.error_numeric!r} e_final={r.error_final!r}"
        )
    print(f"table: {out}")
    return 0


def cmd_fetch_data(args: argparse.Namespace) -> int:
    dest = Path(args.dest)
    if args.synthetic:
        paths = write_standins(dest)
        for p in paths:
            print(f"wrote {p}")
        return 0
    fetchers = {"credit": fetch_credit, "cleve": fetch_cleve}
    names = list(fetchers) if args.dataset == "all" else [args.dataset]
    for name in names:
        csv_path, schema_path = fetchers[name](dest)
        print(f"wrote {csv_path}")
        print(f"wrote {schema_path}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cebmdc",
        description=(
            "Cluster mixed numeric and categorical data by splitting it into "
            "pure views, clustering each, and consolidating the label vectors "
            "with weighted one-pass categorical clustering."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True, help="run config file (key = value lines)")
    p.add_argument("--data", help="override: data CSV path")
    p.add_argument("--schema", help="override: schema sidecar path")
    p.add_argument("--class-column", dest="class_column", help="override: class column name")
    p.add_argument("--labels-out", dest="labels_out", help="override: labels output path")
    p.add_argument("--report-out", dest="report_out", help="override: report output base path")
    p.add_argument(
        "--categorical-threshold",
        dest="categorical_threshold",
        help="override: raw similarity threshold for the categorical view",
    )
    p.add_argument(
        "--ensemble-threshold-norm",
        dest="ensemble_threshold_norm",
        help="override: normalized [0,1] threshold for the ensemble stage",
    )
    p.add_argument("--numeric-k", dest="numeric_k", help="override: numeric-view cluster count")
    p.add_argument("--seed", help="override: numeric clusterer seed")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("squeezer", help="one-pass clustering of a categorical CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--class-column", dest="class_column")
    p.add_argument("--threshold", type=float, required=True, help="raw similarity threshold")
    p.add_argument("--weights", help="comma-separated per-attribute weights (default: all 1)")
    p.add_argument("--labels-out", dest="labels_out", default="labels.csv")
    p.set_defaults(func=cmd_squeezer)

    p = sub.add_parser("kmeans", help="deterministic k-means on a numeric CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--class-column", dest="class_column")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterations", dest="max_iterations", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument(
        "--no-rescale",
        dest="no_rescale",
        action="store_true",
        help="skip the default min-max rescale of numeric columns",
    )
    p.add_argument("--labels-out", dest="labels_out", default="labels.csv")
    p.set_defaults(func=cmd_kmeans)

    p = sub.add_parser("eval", help="clustering accuracy of a labels file against a class column")
    p.add_argument("--labels", required=True, help="labels CSV (tid,cluster)")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--class-column", dest="class_column", required=True)
    p.add_argument("--out", help="also write the report to this path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="ensemble-threshold sweep with fixed base views")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", help="start:stop:step or comma list (default 0:1:0.05)")
    p.add_argument("--out", default="sweep.csv")
    p.add_argument(
        "--plateau",
        action="store_true",
        help="print the widest contiguous interval of identical partitions",
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "compare-views", help="per-k error of each view vs the final output"
    )
    p.add_argument("--config", required=True)
    p.add_argument("--k", default="2:10", help="k range lo:hi or comma list")
    p.add_argument("--out", default="compare.csv")
    p.set_defaults(func=cmd_compare_views)

    p = sub.add_parser("fetch-data", help="download the UCI benchmark files (or write stand-ins)")
    p.add_argument("--dest", default="data")
    p.add_argument("--dataset", choices=["credit", "cleve", "all"], default="all")
    p.add_argument(
        "--synthetic",
        action="store_true",
        help="write the deterministic offline stand-ins instead of downloading",
    )
    p.set_defaults(func=cmd_fetch_data)

    return parser


_EXPECTED_ERRORS = (
    ConfigError,
    DataError,
    SqueezerError,
    KMeansError,
    PipelineError,
    EvalError,
    FetchError,
    OSError,
    ValueError,
)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _EXPECTED_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
