"""Dataset loading, label encoding, synthetic generation and stratified folds.

All randomness goes through numpy's PCG64 generator so that fold assignments
and synthetic datasets are reproducible from a single integer seed.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadFoldCount,
    BadParams,
    EmptyDataset,
    NonFiniteFeature,
    ParseError,
    SingleClass,
    TooManyFolds,
)


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix with integer-encoded labels.

    features: (n, d) float64, labels: (n,) int codes in 0..s-1 encoded by
    first appearance, class_names: original label strings per code.
    """

    features: np.ndarray
    labels: np.ndarray
    s: int
    class_names: list

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    def __post_init__(self):
        if self.n < 2:
            raise EmptyDataset(f"need at least 2 rows, got {self.n}")
        if self.d < 1:
            raise EmptyDataset("need at least 1 feature column")
        if self.s < 2:
            raise SingleClass(f"need at least 2 classes, got {self.s}")
        if not np.all(np.isfinite(self.features)):
            r, c = np.argwhere(~np.isfinite(self.features))[0]
            raise NonFiniteFeature(int(r), int(c))
        counts = np.bincount(self.labels, minlength=self.s)
        if np.any(counts == 0):
            raise SingleClass("some class code in 0..s-1 never appears")
        self.features.setflags(write=False)
        self.labels.setflags(write=False)


@dataclass(frozen=True)
class FoldAssignment:
    """Per-row fold index in 0..f-1, stratified by class."""

    fold_of: np.ndarray
    f: int
    fold_sizes: np.ndarray = field(default=None)

    def __post_init__(self):
        sizes = np.bincount(self.fold_of, minlength=self.f)
        if self.fold_sizes is None:
            object.__setattr__(self, "fold_sizes", sizes)
        if np.any(self.fold_sizes == 0):
            raise BadFoldCount("every fold must be non-empty")
        self.fold_of.setflags(write=False)
        self.fold_sizes.setflags(write=False)

    @property
    def n(self):
        return self.fold_of.shape[0]

    @property
    def k_max(self):
        """Largest neighbor depth evaluable for every row."""
        return self.n - int(self.fold_sizes.max())


def load_csv(path, label_column):
    """Load a headered CSV into a Dataset.

    label_column is a header name or a 0-based column index. Labels are
    integer-encoded in order of first appearance; feature cells must parse
    as finite floats.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset(f"{path}: no header row")
        header = [h.strip() for h in header]

        if isinstance(label_column, int) or (
            isinstance(label_column, str) and label_column not in header
            and label_column.lstrip("-").isdigit()
        ):
            label_idx = int(label_column)
            if label_idx < 0 or label_idx >= len(header):
                raise ParseError(0, label_column, "label column index out of range")
        else:
            if label_column not in header:
                raise ParseError(0, label_column, "label column not found in header")
            label_idx = header.index(label_column)

        feature_cols = [i for i in range(len(header)) if i != label_idx]
        if not feature_cols:
            raise EmptyDataset(f"{path}: no feature columns")

        rows = []
        raw_labels = []
        for rownum, record in enumerate(reader, start=1):
            if len(record) != len(header):
                raise ParseError(rownum, "<row>", f"expected {len(header)} fields, got {len(record)}")
            label = record[label_idx].strip()
            if not label:
                raise ParseError(rownum, header[label_idx], "empty label")
            vals = []
            for c in feature_cols:
                cell = record[c].strip()
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(rownum, header[c], f"cannot parse {cell!r} as a real number")
                if not math.isfinite(v):
                    raise NonFiniteFeature(rownum, header[c])
                vals.append(v)
            rows.append(vals)
            raw_labels.append(label)

    if len(rows) < 2:
        raise EmptyDataset(f"{path}: need at least 2 data rows, got {len(rows)}")

    class_names = []
    code_of = {}
    codes = np.empty(len(raw_labels), dtype=np.int64)
    for i, name in enumerate(raw_labels):
        if name not in code_of:
            code_of[name] = len(class_names)
            class_names.append(name)
        codes[i] = code_of[name]
    if len(class_names) < 2:
        raise SingleClass(f"{path}: only one distinct label {class_names[0]!r}")

    features = np.asarray(rows, dtype=np.float64)
    return Dataset(features=features, labels=codes, s=len(class_names),
                   class_names=class_names)


def stratified_folds(dataset, f, seed):
    """Deterministic stratified fold assignment.

    Rows of each class (code ascending) are shuffled with PCG64(seed) and
    dealt round-robin onto folds; the round-robin pointer carries over
    between classes so all folds are non-empty whenever f <= n.
    """
    n = dataset.n
    if f < 2:
        raise BadFoldCount(f"fold count must be >= 2, got {f}")
    if f > n:
        raise TooManyFolds(f"fold count {f} exceeds dataset size {n}")

    rng = np.random.Generator(np.random.PCG64(seed))
    fold_of = np.empty(n, dtype=np.int64)
    pointer = 0
    for c in range(dataset.s):
        members = np.flatnonzero(dataset.labels == c)
        members = members[rng.permutation(len(members))]
        for idx in members:
            fold_of[idx] = pointer
            pointer = (pointer + 1) % f
    return FoldAssignment(fold_of=fold_of, f=f)


def generate_synthetic(n, d, s, spread, seed):
    """Gaussian-mixture dataset: class c centered on a distinct lattice point.

    Class centers sit on an integer grid with unit spacing; each point is its
    class center plus isotropic N(0, spread^2) noise. Class sizes differ by
    at most one. Deterministic given seed (PCG64).
    """
    if s < 2 or n < s or d < 1 or not (spread > 0):
        raise BadParams(
            f"need n >= s >= 2, d >= 1, spread > 0; got n={n}, d={d}, s={s}, spread={spread}"
        )

    # class c -> lattice point: digits of c in base ceil(s**(1/d))
    base = max(2, math.ceil(s ** (1.0 / d)))
    while base ** d < s:
        base += 1
    centers = np.zeros((s, d), dtype=np.float64)
    for c in range(s):
        v = c
        for j in range(d):
            centers[c, j] = v % base
            v //= base

    labels = np.arange(n, dtype=np.int64) % s
    rng = np.random.Generator(np.random.PCG64(seed))
    features = centers[labels] + rng.normal(0.0, spread, size=(n, d))
    class_names = [f"c{c}" for c in range(s)]
    return Dataset(features=features, labels=labels, s=s, class_names=class_names)
