"""Dataset loading, class balancing and seeded train/test splitting.

Loaders accept MoleculeNet-style CSVs (header row, UTF-8).  Rows whose
SMILES cannot be parsed are skipped with a logged count that is carried on
the dataset and surfaced in every experiment report, so the effective
dataset size is always visible.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DataError,
    DimensionMismatch,
    EmptyTrainSet,
    MissingColumn,
    NonBinaryLabel,
    SingleClass,
    SmilesParseError,
    UnknownId,
    UnreadableFile,
)
from .rng import generator
from .smiles import parse_smiles

__all__ = [
    "Dataset",
    "DatasetSchema",
    "SplitPlan",
    "SCHEMA_PRESETS",
    "UNDERSAMPLE_BY_DATASET",
    "load_dataset",
    "load_embeddings",
    "undersample",
    "make_split",
    "subsample_fraction",
]

logger = logging.getLogger(__name__)

EMBEDDING_DIM = 512


@dataclass(frozen=True)
class DatasetSchema:
    smiles_col: str
    label_col: str
    id_col: str | None = None


SCHEMA_PRESETS: dict[str, DatasetSchema] = {
    "bace": DatasetSchema(smiles_col="mol", label_col="Class"),
    "bbbp": DatasetSchema(smiles_col="smiles", label_col="p_np"),
    "hiv": DatasetSchema(smiles_col="smiles", label_col="HIV_active"),
}

# Class balancing is applied where the source data is strongly imbalanced.
UNDERSAMPLE_BY_DATASET: dict[str, bool] = {"bace": False, "bbbp": True, "hiv": True}


@dataclass
class Dataset:
    ids: list[str]
    smiles: list[str] | None
    labels: np.ndarray
    features: np.ndarray | None = None
    skipped_rows: int = 0

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        lengths = {len(self.ids), len(self.labels)}
        if self.smiles is not None:
            lengths.add(len(self.smiles))
        if self.features is not None:
            lengths.add(self.features.shape[0])
        if len(lengths) != 1:
            raise DataError("dataset columns have inconsistent lengths")
        if self.smiles is None and self.features is None:
            raise DataError("dataset needs SMILES or a feature matrix")
        bad = set(np.unique(self.labels)) - {0, 1}
        if bad:
            raise NonBinaryLabel(f"labels outside {{0,1}}: {sorted(bad)}")

    def __len__(self) -> int:
        return len(self.ids)

    def take(self, indices: np.ndarray) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            ids=[self.ids[i] for i in idx],
            smiles=None if self.smiles is None else [self.smiles[i] for i in idx],
            labels=self.labels[idx],
            features=None if self.features is None else self.features[idx],
            skipped_rows=self.skipped_rows,
        )

    def with_features(self, features: np.ndarray) -> "Dataset":
        features = np.asarray(features, dtype=np.float64)
        if features.shape[0] != len(self):
            raise DataError("feature matrix row count does not match dataset")
        return replace(self, features=features)


@dataclass(frozen=True)
class SplitPlan:
    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int
    train_fraction: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "train_indices", np.asarray(self.train_indices, dtype=np.int64))
        object.__setattr__(self, "test_indices", np.asarray(self.test_indices, dtype=np.int64))
        overlap = np.intersect1d(self.train_indices, self.test_indices)
        if overlap.size:
            raise DataError(f"train/test overlap at indices {overlap[:5]}")
        if len(set(self.train_indices.tolist())) != self.train_indices.size:
            raise DataError("duplicate train indices")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _coerce_label(text: str, row: int) -> int:
    try:
        value = float(text.strip())
    except (ValueError, AttributeError):
        raise NonBinaryLabel(f"row {row}: label {text!r} is not numeric") from None
    if value == 0.0:
        return 0
    if value == 1.0:
        return 1
    raise NonBinaryLabel(f"row {row}: label {text!r} is not 0 or 1")


def load_dataset(path: str, schema: DatasetSchema) -> Dataset:
    """Read a CSV of molecules; unparseable SMILES rows are skipped and counted."""
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise UnreadableFile(f"cannot open {path}: {exc}") from exc

    ids: list[str] = []
    smiles: list[str] = []
    labels: list[int] = []
    skipped = 0
    with handle:
        try:
            reader = csv.DictReader(handle)
            header = reader.fieldnames
            if header is None:
                raise UnreadableFile(f"{path} has no header row")
            for col in (schema.smiles_col, schema.label_col, schema.id_col):
                if col is not None and col not in header:
                    raise MissingColumn(f"{path} lacks column {col!r}")
            for row_number, row in enumerate(reader):
                text = (row[schema.smiles_col] or "").strip()
                label = _coerce_label(row[schema.label_col], row_number)
                try:
                    parse_smiles(text)
                except SmilesParseError:
                    skipped += 1
                    continue
                ids.append(row[schema.id_col] if schema.id_col else str(row_number))
                smiles.append(text)
                labels.append(label)
        except UnicodeDecodeError as exc:
            raise UnreadableFile(f"{path} is not valid UTF-8: {exc}") from exc

    if skipped:
        logger.info("skipped %d unparseable SMILES rows in %s", skipped, path)
    return Dataset(ids=ids, smiles=smiles, labels=np.array(labels), skipped_rows=skipped)


def load_embeddings(path: str, ids: list[str]) -> np.ndarray:
    """Read an `id,e0,...,e511` CSV and align rows to the given id order.

    The id sets must match exactly; anything missing or extra raises
    UnknownId rather than silently reordering or dropping rows.
    """
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise UnreadableFile(f"cannot open {path}: {exc}") from exc

    rows: dict[str, np.ndarray] = {}
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise UnreadableFile(f"{path} has no header row")
        if len(header) - 1 != EMBEDDING_DIM:
            raise DimensionMismatch(
                f"{path}: expected {EMBEDDING_DIM} embedding columns, got {len(header) - 1}"
            )
        for row in reader:
            if len(row) - 1 != EMBEDDING_DIM:
                raise DimensionMismatch(
                    f"{path}: expected {EMBEDDING_DIM} embedding columns, got {len(row) - 1}"
                )
            key = row[0]
            if key in rows:
                raise UnknownId(f"{path}: duplicate id {key!r}")
            try:
                rows[key] = np.array([float(v) for v in row[1:]], dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"{path}: non-numeric embedding for id {key!r}") from exc

    extra = set(rows) - set(ids)
    if extra:
        raise UnknownId(f"{path}: ids not present in dataset: {sorted(extra)[:5]}")
    out = np.empty((len(ids), EMBEDDING_DIM), dtype=np.float64)
    for i, key in enumerate(ids):
        if key not in rows:
            raise UnknownId(f"{path}: dataset id {key!r} missing from embeddings")
        out[i] = rows[key]
    return out


def undersample(data: Dataset, seed: int) -> Dataset:
    """Randomly reduce the majority class to the minority count (no replacement)."""
    positive = np.flatnonzero(data.labels == 1)
    negative = np.flatnonzero(data.labels == 0)
    if positive.size == 0 or negative.size == 0:
        raise SingleClass("undersampling needs both classes present")
    minority, majority = sorted((positive, negative), key=lambda a: a.size)
    rng = generator(seed)
    chosen = rng.choice(majority, size=minority.size, replace=False)
    keep = np.sort(np.concatenate([minority, chosen]))
    return data.take(keep)


def make_split(data: Dataset, seed: int, train_fraction: float = 0.8) -> SplitPlan:
    """Seeded unstratified split; train gets round(train_fraction * rows)."""
    total = len(data)
    n_train = _round_half_up(train_fraction * total)
    perm = generator(seed).permutation(total)
    return SplitPlan(
        train_indices=np.sort(perm[:n_train]),
        test_indices=np.sort(perm[n_train:]),
        seed=seed,
        train_fraction=train_fraction,
    )


def subsample_fraction(plan: SplitPlan, fraction: float, seed: int) -> SplitPlan:
    """Keep a seeded random fraction of the training indices; tests untouched."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    keep = _round_half_up(fraction * plan.train_indices.size)
    if keep == 0:
        raise EmptyTrainSet(f"fraction {fraction} of {plan.train_indices.size} rows rounds to zero")
    rng = generator(seed)
    chosen = rng.choice(plan.train_indices, size=keep, replace=False)
    return SplitPlan(
        train_indices=np.sort(chosen),
        test_indices=plan.test_indices.copy(),
        seed=seed,
        train_fraction=plan.train_fraction,
    )
