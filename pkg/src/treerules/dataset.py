"""Labeled tabular data: CSV loading, stratified folds, majority class.

CSV input is RFC-4180-style UTF-8 with a mandatory header row. Categorical
cells hold category strings mapped through the feature schema; continuous
cells hold decimals. Missing cells are rejected, not imputed.

Fold shuffling uses splitmix64 + Fisher-Yates so fold plans are reproducible
across machines and library versions, not just across runs.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import (MissingLabel, ParseError, TooFewInstances, UnknownCategory)
from .model import CATEGORICAL, Ensemble, Feature


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray            # (n, m) float64; categorical cells hold codes
    y: np.ndarray            # (n,) int64
    features: tuple[Feature, ...]
    n_classes: int

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.X[idx], self.y[idx], self.features, self.n_classes)


@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: tuple[tuple[int, ...], ...]
    seed: int

    def train_indices(self, i: int) -> tuple[int, ...]:
        out: list[int] = []
        for j, fold in enumerate(self.folds):
            if j != i:
                out.extend(fold)
        return tuple(sorted(out))


def load_csv(text: str, features: tuple[Feature, ...], label_column: str,
             n_classes: int | None = None) -> Dataset:
    """Parse a CSV document against a feature schema."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty document, header row required") from None
    header = [h.strip() for h in header]
    if label_column not in header:
        raise MissingLabel(f"label column {label_column!r} not in header {header}")
    label_pos = header.index(label_column)
    col_pos = []
    for feat in features:
        if feat.name not in header:
            raise ParseError(f"feature column {feat.name!r} not in header")
        col_pos.append(header.index(feat.name))

    rows: list[list[float]] = []
    labels: list[int] = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != len(header):
            raise ParseError(f"line {lineno}: expected {len(header)} fields, got {len(rec)}")
        vals = []
        for feat, pos in zip(features, col_pos):
            cell = rec[pos].strip()
            if cell == "":
                raise ParseError(f"line {lineno}: missing value for {feat.name!r}")
            if feat.kind == CATEGORICAL:
                code = feat.code(cell)
                if code is None:
                    raise UnknownCategory(
                        f"line {lineno}: {cell!r} not a known category of {feat.name!r}")
                vals.append(float(code))
            else:
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"line {lineno}: bad number {cell!r} for {feat.name!r}")
                if np.isnan(v):
                    raise ParseError(f"line {lineno}: missing value for {feat.name!r}")
                vals.append(v)
        cell = rec[label_pos].strip()
        try:
            label = int(cell)
        except ValueError:
            raise MissingLabel(f"line {lineno}: label {cell!r} is not an integer")
        if label < 0:
            raise MissingLabel(f"line {lineno}: label {label} is negative")
        rows.append(vals)
        labels.append(label)

    if not rows:
        raise ParseError("no data rows (n=0 disallowed)")
    y = np.asarray(labels, dtype=np.int64)
    if n_classes is None:
        n_classes = int(y.max()) + 1 if y.size else 2
        n_classes = max(n_classes, 2)
    elif int(y.max()) >= n_classes:
        raise MissingLabel(f"label {int(y.max())} out of range for {n_classes} classes")
    return Dataset(np.asarray(rows, dtype=np.float64), y, tuple(features), n_classes)


def load_csv_for_ensemble(text: str, ensemble: Ensemble, label_column: str) -> Dataset:
    return load_csv(text, ensemble.features, label_column, ensemble.n_classes)


def dataset_to_csv(dataset: Dataset, label_column: str = "y") -> str:
    """Inverse of load_csv (round-trip exact for the values load_csv accepts)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([f.name for f in dataset.features] + [label_column])
    for row, label in zip(dataset.X, dataset.y):
        cells = []
        for v, feat in zip(row, dataset.features):
            if feat.kind == CATEGORICAL:
                cells.append(feat.categories[int(v)])
            else:
                cells.append(repr(float(v)))
        writer.writerow(cells + [int(label)])
    return out.getvalue()


class SplitMix64:
    """splitmix64 sequence; fixed reference algorithm so folds never drift."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        # reject to stay unbiased
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            v = self.next()
            if v < limit:
                return v % bound

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def stratified_kfold(dataset: Dataset, k: int, seed: int) -> FoldPlan:
    """Split indices into k stratified folds, deterministic for a fixed seed.

    Per class, indices are shuffled and dealt round-robin; a rolling fold
    pointer carries across classes to balance fold sizes. Per fold, each
    class count is within one instance of n_c / k.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    counts = np.bincount(dataset.y, minlength=dataset.n_classes)
    for c, cnt in enumerate(counts):
        if 0 < cnt < k:
            raise TooFewInstances(f"class {c} has {cnt} instances, fewer than k={k}")
    rng = SplitMix64(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    pointer = 0
    for c in range(dataset.n_classes):
        idx = [int(i) for i in np.flatnonzero(dataset.y == c)]
        rng.shuffle(idx)
        for i in idx:
            folds[pointer % k].append(i)
            pointer += 1
    return FoldPlan(k=k, folds=tuple(tuple(sorted(f)) for f in folds), seed=seed)


def majority_class(dataset: Dataset) -> int:
    """Most common label; ties go to the lowest class index."""
    counts = np.bincount(dataset.y, minlength=dataset.n_classes)
    return int(np.argmax(counts))
