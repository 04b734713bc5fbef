"""Mixed-attribute dataset model: schema, CSV ingestion, missing values, rescaling, split.

Cells are plain Python values: ``float`` for numeric, ``str`` for categorical,
``None`` for missing. The schema says which reading applies per column. All
types are immutable after construction and every operation returns a new
dataset; row order and tids are preserved everywhere (the downstream one-pass
clusterer is order-dependent by design).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from operator import itemgetter
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Optional, Union

Cell = Union[float, str, None]

#: Reserved token used when missing categorical cells are kept as a category.
MISSING_TOKEN = "?"


class DataError(ValueError):
    """Raised for malformed files, schema violations, or kind mismatches."""


class AttributeKind(str, Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: AttributeKind


@dataclass(frozen=True)
class Schema:
    """Ordered attribute list. May be empty (degenerate split output); CSV
    ingestion requires at least one attribute."""

    attributes: tuple[Attribute, ...]

    def __post_init__(self) -> None:
        names = [a.name for a in self.attributes]
        if any(not n for n in names):
            raise DataError("attribute names must be non-empty")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DataError(f"duplicate attribute names: {dupes}")

    @property
    def m(self) -> int:
        return len(self.attributes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    @property
    def kinds(self) -> tuple[AttributeKind, ...]:
        return tuple(a.kind for a in self.attributes)

    def indices_of_kind(self, kind: AttributeKind) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.attributes) if a.kind == kind)

    @property
    def m_categorical(self) -> int:
        return len(self.indices_of_kind(AttributeKind.CATEGORICAL))

    @property
    def m_numeric(self) -> int:
        return len(self.indices_of_kind(AttributeKind.NUMERIC))

    def index_of(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise DataError(f"no attribute named {name!r}")

    def select(self, indices: Iterable[int]) -> "Schema":
        return Schema(tuple(self.attributes[i] for i in indices))


class Row(NamedTuple):
    tid: int
    values: tuple[Cell, ...]


@dataclass(frozen=True)
class MixedDataset:
    schema: Schema
    rows: tuple[Row, ...]

    def __post_init__(self) -> None:
        m = self.schema.m
        if len({r.tid for r in self.rows}) != len(self.rows):
            raise DataError("tids must be unique")
        for r in self.rows:
            if len(r.values) != m:
                raise DataError(
                    f"row tid={r.tid} has {len(r.values)} cells, schema has {m}"
                )

    @classmethod
    def _unchecked(cls, schema: Schema, rows: tuple[Row, ...]) -> "MixedDataset":
        # for operations that preserve the invariants by construction;
        # skips __post_init__ so the n*m validation cost is paid once at
        # ingestion instead of on every derived dataset
        ds = object.__new__(cls)
        object.__setattr__(ds, "schema", schema)
        object.__setattr__(ds, "rows", rows)
        return ds

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def tids(self) -> tuple[int, ...]:
        return tuple(r.tid for r in self.rows)

    def column(self, name: str) -> tuple[Cell, ...]:
        i = self.schema.index_of(name)
        return tuple(r.values[i] for r in self.rows)

    def validate_cells(self) -> None:
        """Full kind check of every cell (O(n*m)); run at ingestion, not in the
        pipeline hot path where datasets are well-formed by construction."""
        kinds = self.schema.kinds
        for r in self.rows:
            for i, v in enumerate(r.values):
                if v is None:
                    continue
                if kinds[i] == AttributeKind.NUMERIC:
                    if not isinstance(v, float):
                        raise DataError(
                            f"row tid={r.tid}, column {self.schema.names[i]!r}: "
                            f"expected numeric cell, got {v!r}"
                        )
                elif not isinstance(v, str):
                    raise DataError(
                        f"row tid={r.tid}, column {self.schema.names[i]!r}: "
                        f"expected categorical cell, got {v!r}"
                    )

    def has_missing(self, kind: Optional[AttributeKind] = None) -> bool:
        idxs = (
            range(self.schema.m) if kind is None else self.schema.indices_of_kind(kind)
        )
        idxs = tuple(idxs)
        return any(r.values[i] is None for r in self.rows for i in idxs)

    def drop_column(self, name: str) -> tuple["MixedDataset", dict[int, Cell]]:
        """Split off one column (typically the class column): returns the
        dataset without it plus a tid -> value map of the removed column."""
        drop = self.schema.index_of(name)
        keep = tuple(i for i in range(self.schema.m) if i != drop)
        extracted = {r.tid: r.values[drop] for r in self.rows}
        return _project(self, keep), extracted


def _project(ds: MixedDataset, indices: tuple[int, ...]) -> MixedDataset:
    schema = ds.schema.select(indices)
    if indices:
        get = itemgetter(*indices)
        if len(indices) == 1:
            rows = tuple(Row(r.tid, (get(r.values),)) for r in ds.rows)
        else:
            rows = tuple(Row(r.tid, get(r.values)) for r in ds.rows)
    else:
        rows = tuple(Row(r.tid, ()) for r in ds.rows)
    return MixedDataset._unchecked(schema, rows)


# ---------------------------------------------------------------------------
# Missing-value policies
# ---------------------------------------------------------------------------


class MissingAction(str, Enum):
    DROP_ROWS = "drop_rows"
    FILL_NUMERIC = "fill_numeric"
    FILL_CATEGORICAL = "fill_categorical"
    TREAT_AS_CATEGORY = "treat_as_category"


@dataclass(frozen=True)
class MissingPolicy:
    """What to do with missing cells.

    ``drop_rows`` removes every row with a missing cell in the targeted
    columns (``target`` = numeric, categorical, or None for any). The fill
    variants replace missing cells in place and only ever touch cells of
    their own kind. ``treat_as_category`` is a fill with the reserved token.
    """

    action: MissingAction
    target: Optional[AttributeKind] = None
    fill_value: float = 0.0
    fill_token: str = MISSING_TOKEN

    @classmethod
    def drop_rows(cls, target: Optional[AttributeKind] = AttributeKind.NUMERIC) -> "MissingPolicy":
        return cls(MissingAction.DROP_ROWS, target=target)

    @classmethod
    def fill_numeric(cls, value: float) -> "MissingPolicy":
        return cls(MissingAction.FILL_NUMERIC, fill_value=float(value))

    @classmethod
    def fill_categorical(cls, token: str) -> "MissingPolicy":
        return cls(MissingAction.FILL_CATEGORICAL, fill_token=token)

    @classmethod
    def treat_as_category(cls) -> "MissingPolicy":
        return cls(MissingAction.TREAT_AS_CATEGORY, fill_token=MISSING_TOKEN)


def apply_missing_policy(ds: MixedDataset, policy: MissingPolicy) -> MixedDataset:
    """Apply one missing-value policy; row order and surviving tids unchanged.

    A fill policy whose kind has no missing cells is a no-op, not an error.
    """
    if policy.action == MissingAction.DROP_ROWS:
        if policy.target is None:
            idxs = tuple(range(ds.schema.m))
        else:
            idxs = ds.schema.indices_of_kind(policy.target)
        if not idxs:
            return ds
        if len(idxs) == 1:
            i = idxs[0]
            rows = tuple(r for r in ds.rows if r.values[i] is not None)
        else:
            pick = itemgetter(*idxs)
            rows = tuple(r for r in ds.rows if None not in pick(r.values))
        return MixedDataset._unchecked(ds.schema, rows)

    if policy.action == MissingAction.FILL_NUMERIC:
        idxs = set(ds.schema.indices_of_kind(AttributeKind.NUMERIC))
        fill: Cell = float(policy.fill_value)
    else:  # FILL_CATEGORICAL / TREAT_AS_CATEGORY
        idxs = set(ds.schema.indices_of_kind(AttributeKind.CATEGORICAL))
        fill = policy.fill_token

    rows = tuple(
        Row(
            r.tid,
            tuple(
                fill if (v is None and i in idxs) else v
                for i, v in enumerate(r.values)
            ),
        )
        if (None in r.values and any(r.values[i] is None for i in idxs))
        else r
        for r in ds.rows
    )
    return MixedDataset._unchecked(ds.schema, rows)


# ---------------------------------------------------------------------------
# Split and rescale
# ---------------------------------------------------------------------------


def _picker(indices: tuple[int, ...]):
    if not indices:
        return lambda values: ()
    if len(indices) == 1:
        i = indices[0]
        return lambda values: (values[i],)
    return itemgetter(*indices)


def split_dataset(ds: MixedDataset) -> tuple[MixedDataset, MixedDataset]:
    """Split into the pure categorical and pure numeric sub-datasets.

    Both outputs keep the input's row order and tids. If one kind is absent
    the corresponding output has an empty schema (the pipeline then degrades
    to a single-view run).
    """
    cat_idx = ds.schema.indices_of_kind(AttributeKind.CATEGORICAL)
    num_idx = ds.schema.indices_of_kind(AttributeKind.NUMERIC)
    pick_c, pick_n = _picker(cat_idx), _picker(num_idx)
    rows_c = []
    rows_n = []
    for tid, values in ds.rows:
        rows_c.append(Row(tid, pick_c(values)))
        rows_n.append(Row(tid, pick_n(values)))
    return (
        MixedDataset._unchecked(ds.schema.select(cat_idx), tuple(rows_c)),
        MixedDataset._unchecked(ds.schema.select(num_idx), tuple(rows_n)),
    )


def minmax_rescale(ds: MixedDataset) -> MixedDataset:
    """Map every numeric column independently onto [0, 1] by (x-min)/(max-min).

    Constant columns map to 0. Categorical cells are untouched. Missing
    numeric cells are an error: apply a MissingPolicy first.
    """
    num_idx = set(ds.schema.indices_of_kind(AttributeKind.NUMERIC))
    if not num_idx or not ds.rows:
        return ds

    columns = list(zip(*(r.values for r in ds.rows)))
    for i in sorted(num_idx):
        col = columns[i]
        if None in col:
            tid = ds.rows[col.index(None)].tid
            raise DataError(
                f"missing numeric cell at tid={tid}, column "
                f"{ds.schema.names[i]!r}: apply a MissingPolicy before rescaling"
            )
        lo = min(col)
        span = max(col) - lo
        if span == 0.0:
            columns[i] = (0.0,) * len(col)
        else:
            columns[i] = tuple((v - lo) / span for v in col)

    rows = tuple(
        Row(r.tid, vals) for r, vals in zip(ds.rows, zip(*columns))
    )
    return MixedDataset._unchecked(ds.schema, rows)


# ---------------------------------------------------------------------------
# CSV + schema sidecar I/O
# ---------------------------------------------------------------------------

PathLike = Union[str, Path]


def load_schema(path: PathLike) -> Schema:
    """Read a schema sidecar: one `name,numeric` or `name,categorical` line
    per attribute, lowercase kinds."""
    attrs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected `name,kind`, got {line!r}")
            name, kind = parts
            try:
                attrs.append(Attribute(name, AttributeKind(kind)))
            except ValueError:
                raise DataError(
                    f"{path}:{lineno}: kind must be `numeric` or `categorical`, got {kind!r}"
                ) from None
    if not attrs:
        raise DataError(f"{path}: schema file declares no attributes")
    return Schema(tuple(attrs))


def load_csv(path: PathLike, schema: Schema) -> MixedDataset:
    """Load a UTF-8 CSV whose header matches the schema names in order.

    tids are assigned 1..n in file order. Empty fields become missing cells.
    A non-numeric token in a numeric column is an error reported with its row
    number.
    """
    if schema.m < 1:
        raise DataError("schema must declare at least one attribute")
    kinds = schema.kinds
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file (missing header row)") from None
        header = tuple(h.strip() for h in header)
        if header != schema.names:
            raise DataError(
                f"{path}: header {header} does not match schema names {schema.names}"
            )
        for rownum, record in enumerate(reader, start=1):
            if len(record) != schema.m:
                raise DataError(
                    f"{path}: row {rownum} has {len(record)} fields, expected {schema.m}"
                )
            values: list[Cell] = []
            for i, raw in enumerate(record):
                tok = raw.strip()
                if tok == "":
                    values.append(None)
                elif kinds[i] == AttributeKind.NUMERIC:
                    try:
                        values.append(float(tok))
                    except ValueError:
                        raise DataError(
                            f"{path}: row {rownum}, column {schema.names[i]!r}: "
                            f"non-numeric token {tok!r}"
                        ) from None
                else:
                    values.append(tok)
            rows.append(Row(rownum, tuple(values)))
    ds = MixedDataset(schema, tuple(rows))
    ds.validate_cells()
    return ds


def format_cell(v: Cell) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if not v.is_integer() else str(int(v))
    return v


def dump_csv(ds: MixedDataset, path: PathLike) -> None:
    """Debug facility: write the dataset back out in the same CSV dialect."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ds.schema.names)
        for r in ds.rows:
            writer.writerow([format_cell(v) for v in r.values])


def dump_schema(schema: Schema, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in schema.attributes:
            fh.write(f"{a.name},{a.kind.value}\n")


def class_map(ds: MixedDataset, class_column: str) -> Mapping[int, str]:
    """tid -> class label for an evaluation column; labels must be present."""
    col = ds.column(class_column)
    out = {}
    for r, v in zip(ds.rows, col):
        if v is None:
            raise DataError(f"tid={r.tid} has no class label in column {class_column!r}")
        out[r.tid] = str(v)
    return out
