"""Deterministic stand-in datasets for the two benchmark experiments.

The build environment cannot always reach the UCI archive, so the repository
ships synthetic stand-ins that reproduce the published structural facts of
the credit-approval and cleve heart-disease datasets: row counts, numeric and
categorical attribute counts, class balance, and the exact number of rows or
cells with missing numeric values. Rows are drawn from a small number of
latent profiles correlated with the class label, so the clustering
experiments behave like real mixed data rather than noise.

Everything is driven by fixed seeds: regeneration is byte-identical.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .data import Attribute, AttributeKind, Schema

CREDIT_SEED = 20130921
CLEVE_SEED = 19980303


@dataclass(frozen=True)
class _CatAttr:
    name: str
    vocab: tuple[str, ...]
    dominance: float = 0.85
    # dominant vocab index per profile; default cycles through the vocab
    dominants: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class _NumAttr:
    name: str
    lo: float
    hi: float
    decimals: int
    sigma: float = 0.16


@dataclass(frozen=True)
class _Model:
    name: str
    attrs: tuple[Union[_CatAttr, _NumAttr], ...]
    class_column: str
    class_counts: tuple[tuple[str, int], ...]
    # class label -> per-profile weights
    profile_weights: dict[str, tuple[float, ...]]
    n_missing_numeric_rows: int
    n_question_rows: int
    seed: int
    # how many numeric cells to blank per missing row (drawn uniformly)
    missing_cell_choices: tuple[int, ...] = (1, 1, 2)

    @property
    def n(self) -> int:
        return sum(c for _, c in self.class_counts)


CREDIT_MODEL = _Model(
    name="credit",
    attrs=(
        _CatAttr("a1", ("a", "b")),
        _NumAttr("a2", 13.75, 80.25, 2),
        _NumAttr("a3", 0.0, 28.0, 3),
        _CatAttr("a4", ("u", "y", "l")),
        _CatAttr("a5", ("g", "p", "gg")),
        _CatAttr(
            "a6",
            ("c", "d", "cc", "i", "j", "k", "m", "r", "q", "w", "x", "e", "aa", "ff"),
        ),
        _CatAttr("a7", ("v", "h", "bb", "j", "n", "z", "dd", "ff", "o")),
        _NumAttr("a8", 0.0, 28.5, 3),
        _CatAttr("a9", ("t", "f")),
        _CatAttr("a10", ("t", "f")),
        _NumAttr("a11", 0.0, 67.0, 0),
        _CatAttr("a12", ("t", "f")),
        _CatAttr("a13", ("g", "p", "s")),
        _NumAttr("a14", 0.0, 2000.0, 0),
        _NumAttr("a15", 0.0, 100000.0, 0),
    ),
    class_column="class",
    class_counts=(("+", 307), ("-", 383)),
    profile_weights={
        "+": (0.55, 0.35, 0.06, 0.04),
        "-": (0.04, 0.06, 0.35, 0.55),
    },
    n_missing_numeric_rows=24,
    n_question_rows=13,
    seed=CREDIT_SEED,
)

# profiles 0-1 lean healthy, 2-3 lean sick; dominant values are assigned so
# profile pairs that share them never straddle the class boundary (merging at
# coarse thresholds then respects class structure)
CLEVE_MODEL = _Model(
    name="cleve",
    attrs=(
        _NumAttr("age", 29.0, 77.0, 0),
        _CatAttr("sex", ("male", "female"), dominants=(0, 0, 1, 1)),
        _CatAttr(
            "chest_pain",
            ("typical", "atypical", "nonanginal", "asymptomatic"),
            dominants=(0, 1, 2, 3),
        ),
        _NumAttr("resting_bp", 94.0, 200.0, 0),
        _NumAttr("cholesterol", 126.0, 564.0, 0),
        _CatAttr("sugar_high", ("t", "f"), dominants=(0, 0, 1, 1)),
        _CatAttr("rest_ecg", ("normal", "stt_wave", "hypertrophy"), dominants=(0, 0, 1, 2)),
        _NumAttr("max_heart_rate", 71.0, 202.0, 0),
        _CatAttr("exercise_angina", ("yes", "no"), dominants=(0, 0, 1, 1)),
        _NumAttr("st_depression", 0.0, 6.2, 1),
        _CatAttr("st_slope", ("up", "flat", "down"), dominants=(0, 1, 2, 2)),
        _NumAttr("vessel_count", 0.0, 3.0, 0),
        _CatAttr("thal_defect", ("normal", "fixed", "reversible"), dominants=(0, 1, 2, 2)),
        _CatAttr("prior_mi", ("no", "yes"), dominants=(0, 0, 1, 1)),
    ),
    class_column="diagnosis",
    class_counts=(("buff", 164), ("sick", 139)),
    profile_weights={
        "buff": (0.62, 0.32, 0.03, 0.03),
        "sick": (0.03, 0.03, 0.35, 0.59),
    },
    n_missing_numeric_rows=5,
    n_question_rows=0,
    seed=CLEVE_SEED,
    missing_cell_choices=(1,),
)

MODELS = {m.name: m for m in (CREDIT_MODEL, CLEVE_MODEL)}


def model_schema(model: _Model) -> Schema:
    attrs = [
        Attribute(
            a.name,
            AttributeKind.CATEGORICAL if isinstance(a, _CatAttr) else AttributeKind.NUMERIC,
        )
        for a in model.attrs
    ]
    attrs.append(Attribute(model.class_column, AttributeKind.CATEGORICAL))
    return Schema(tuple(attrs))


def _format_numeric(v: float, decimals: int) -> str:
    if decimals == 0:
        return str(int(round(v)))
    return f"{v:.{decimals}f}"


def generate(model: _Model) -> tuple[Schema, list[list[str]]]:
    """Synthesize the full record table (including the class column) as CSV
    field strings; deterministic for a fixed model."""
    rng = random.Random(model.seed)
    n_profiles = len(next(iter(model.profile_weights.values())))
    profile_ids = list(range(n_profiles))

    # per-(profile, numeric attr) means, drawn once
    num_attrs = [a for a in model.attrs if isinstance(a, _NumAttr)]
    mu = {
        (p, a.name): rng.uniform(0.15, 0.85)
        for p in profile_ids
        for a in num_attrs
    }

    classes: list[str] = []
    for label, count in model.class_counts:
        classes.extend([label] * count)
    rng.shuffle(classes)

    records: list[list[str]] = []
    for label in classes:
        profile = rng.choices(profile_ids, weights=model.profile_weights[label])[0]
        fields: list[str] = []
        for a in model.attrs:
            if isinstance(a, _CatAttr):
                if a.dominants is not None:
                    dominant = a.vocab[a.dominants[profile]]
                else:
                    dominant = a.vocab[profile % len(a.vocab)]
                if rng.random() < a.dominance:
                    fields.append(dominant)
                else:
                    others = [v for v in a.vocab if v != dominant]
                    fields.append(rng.choice(others))
            else:
                z = min(1.0, max(0.0, rng.gauss(mu[(profile, a.name)], a.sigma)))
                fields.append(_format_numeric(a.lo + z * (a.hi - a.lo), a.decimals))
        fields.append(label)
        records.append(fields)

    numeric_idx = [i for i, a in enumerate(model.attrs) if isinstance(a, _NumAttr)]
    cat_idx = [i for i, a in enumerate(model.attrs) if isinstance(a, _CatAttr)]
    marked = rng.sample(range(model.n), model.n_missing_numeric_rows + model.n_question_rows)
    for row_i in marked[: model.n_missing_numeric_rows]:
        for col in rng.sample(numeric_idx, rng.choice(model.missing_cell_choices)):
            records[row_i][col] = ""
    for row_i in marked[model.n_missing_numeric_rows :]:
        records[row_i][rng.choice(cat_idx)] = "?"

    return model_schema(model), records


def write_dataset(
    dest: Union[str, Path], name: str, schema: Schema, records: Sequence[Sequence[str]]
) -> tuple[Path, Path]:
    """Write name.csv and name.schema under dest; returns the two paths."""
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    csv_path = dest / f"{name}.csv"
    schema_path = dest / f"{name}.schema"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(schema.names) + "\n")
        for rec in records:
            fh.write(",".join(rec) + "\n")
    with open(schema_path, "w", encoding="utf-8") as fh:
        for a in schema.attributes:
            fh.write(f"{a.name},{a.kind.value}\n")
    return csv_path, schema_path


def write_standins(dest: Union[str, Path]) -> list[Path]:
    """Write both stand-in datasets (csv + schema sidecar) under dest."""
    out = []
    for model in MODELS.values():
        schema, records = generate(model)
        out.extend(write_dataset(dest, model.name, schema, records))
    return out
