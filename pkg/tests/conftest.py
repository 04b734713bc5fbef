import random
from pathlib import Path

import pytest

from cebmdc import (
    Attribute,
    AttributeKind,
    MissingPolicy,
    MixedDataset,
    Row,
    Schema,
    load_csv,
    load_schema,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def make_categorical(rows, names=None, start_tid=1):
    """Build an all-categorical dataset from tuples of strings."""
    m = len(rows[0]) if rows else 0
    names = names or [f"c{i + 1}" for i in range(m)]
    schema = Schema(tuple(Attribute(n, AttributeKind.CATEGORICAL) for n in names))
    return MixedDataset(
        schema, tuple(Row(start_tid + i, tuple(vals)) for i, vals in enumerate(rows))
    )


def _num(v):
    return None if v is None else float(v)


def make_numeric(rows, names=None, start_tid=1):
    """Build an all-numeric dataset from tuples of floats (None = missing)."""
    m = len(rows[0]) if rows else 0
    names = names or [f"x{i + 1}" for i in range(m)]
    schema = Schema(tuple(Attribute(n, AttributeKind.NUMERIC) for n in names))
    return MixedDataset(
        schema,
        tuple(Row(start_tid + i, tuple(map(_num, vals))) for i, vals in enumerate(rows)),
    )


def make_mixed(cat_rows, num_rows, start_tid=1):
    """Interleave categorical then numeric columns into one mixed dataset."""
    m_c = len(cat_rows[0])
    m_n = len(num_rows[0])
    attrs = [Attribute(f"c{i + 1}", AttributeKind.CATEGORICAL) for i in range(m_c)]
    attrs += [Attribute(f"x{i + 1}", AttributeKind.NUMERIC) for i in range(m_n)]
    rows = tuple(
        Row(start_tid + i, tuple(c) + tuple(map(_num, n)))
        for i, (c, n) in enumerate(zip(cat_rows, num_rows))
    )
    return MixedDataset(Schema(tuple(attrs)), rows)


def random_categorical(rng: random.Random, max_n=10, max_m=3, max_domain=3, min_n=1):
    n = rng.randint(min_n, max_n)
    m = rng.randint(1, max_m)
    rows = [
        tuple(f"v{rng.randint(1, max_domain)}" for _ in range(m)) for _ in range(n)
    ]
    return make_categorical(rows)


class BenchmarkData:
    """One benchmark dataset with its class labels and missing policy."""

    def __init__(self, name, class_column, policy):
        self.name = name
        schema = load_schema(DATA_DIR / f"{name}.schema")
        full = load_csv(DATA_DIR / f"{name}.csv", schema)
        self.full = full
        self.dataset, extracted = full.drop_column(class_column)
        self.classes = {tid: str(v) for tid, v in extracted.items()}
        self.class_column = class_column
        self.policy = policy


@pytest.fixture(scope="session")
def credit():
    return BenchmarkData(
        "credit", "class", MissingPolicy.drop_rows(AttributeKind.NUMERIC)
    )


@pytest.fixture(scope="session")
def cleve():
    return BenchmarkData("cleve", "diagnosis", MissingPolicy.fill_numeric(0.0))
