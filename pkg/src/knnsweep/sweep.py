"""Single ascending pass over the sorted matrix: accuracy for every k at once.

Per-row class counters (and a shadow of summed distances for tie-breaking)
are grown one neighbor at a time; after each depth k the prediction for every
row is compared against ground truth and tallied per fold. Counters are never
reset, so the whole 1..k_max range costs one traversal of the matrix.
"""

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyNeighborhood, InconsistentInputs, IoError

TIE_POLICIES = ("smallest_code", "shadow_min")


def check_policy(policy):
    if policy not in TIE_POLICIES:
        raise ValueError(f"unknown tie policy {policy!r}; choose from {TIE_POLICIES}")
    return policy


def classify_at_k(counts_row, shadow_row, policy="smallest_code"):
    """Predicted class from one row of the counting and shadow matrices.

    Argmax of counts; ties go to the smallest class code, or under
    shadow_min to the tied class with the smallest summed distance
    (further ties again to the smallest code).
    """
    check_policy(policy)
    counts_row = np.asarray(counts_row)
    if not counts_row.any():
        raise EmptyNeighborhood("all-zero counts row")
    if policy == "smallest_code":
        return int(np.argmax(counts_row))
    tied = counts_row == counts_row.max()
    masked = np.where(tied, np.asarray(shadow_row, dtype=np.float64), np.inf)
    return int(np.argmin(masked))


def vote_batch(counts, shadow, policy):
    """Vectorized classify_at_k over a (rows, s) counts/shadow block."""
    if policy == "smallest_code":
        return np.argmax(counts, axis=1)
    tied = counts == counts.max(axis=1, keepdims=True)
    masked = np.where(tied, shadow, np.inf)
    return np.argmin(masked, axis=1)


@dataclass(frozen=True)
class AccuracyMatrix:
    """correct[k-1][i] = correct classifications of fold i at depth k."""

    correct: np.ndarray
    fold_sizes: np.ndarray
    k_max: int
    f: int

    def __post_init__(self):
        self.correct.setflags(write=False)

    def per_fold_accuracy(self):
        """(k_max, f) accuracies using actual fold sizes as denominators."""
        return self.correct / self.fold_sizes[None, :].astype(np.float64)


@dataclass(frozen=True)
class KSearchReport:
    best_k_per_fold: list
    k_star: int
    curve: list  # [{"k", "mean_accuracy", "std_accuracy"}, ...]
    evaluated_k: list
    timing: dict = field(default_factory=dict)

    def to_json(self, indent=2):
        payload = {
            "best_k_per_fold": self.best_k_per_fold,
            "k_star": self.k_star,
            "curve": self.curve,
            "evaluated_k": self.evaluated_k,
            "timing": self.timing,
        }
        return json.dumps(payload, indent=indent)


def sweep(matrix, folds, truth, policy="smallest_code"):
    """Fill the accuracy matrix for every k = 1..k_max in one pass.

    At step k each row's counters take in its k-th nearest cross-fold
    neighbor; predictions are recomputed and matches accumulate into
    correct[k-1][fold_of[row]]. k_max = n - max fold size guarantees every
    row has a k-th neighbor throughout.
    """
    check_policy(policy)
    n = matrix.n
    truth = np.asarray(truth)
    if folds.n != n or truth.shape[0] != n:
        raise InconsistentInputs(
            f"sizes disagree: matrix n={n}, folds n={folds.n}, truth n={truth.shape[0]}"
        )
    k_max = matrix.k_max
    if k_max < 1:
        raise InconsistentInputs("k_max < 1: some fold covers all but 0 rows")

    s = int(truth.max()) + 1
    fold_of = folds.fold_of
    rows = np.arange(n)

    counts = np.zeros((n, s), dtype=np.int64)
    shadow = np.zeros((n, s), dtype=np.float64)
    correct = np.zeros((k_max, folds.f), dtype=np.int64)

    neigh_labels = matrix.labels[:, :k_max]
    neigh_dists = matrix.distances[:, :k_max]

    for k in range(1, k_max + 1):
        lab_k = neigh_labels[:, k - 1]
        counts[rows, lab_k] += 1
        shadow[rows, lab_k] += neigh_dists[:, k - 1]
        pred = vote_batch(counts, shadow, policy)
        hits = np.flatnonzero(pred == truth)
        correct[k - 1] = np.bincount(fold_of[hits], minlength=folds.f)

    return AccuracyMatrix(correct=correct, fold_sizes=folds.fold_sizes.copy(),
                          k_max=k_max, f=folds.f)


def select_k(acc, evaluated_k=None, timing=None):
    """Pick per-fold best k and the averaged k*.

    Per fold: the smallest k maximizing that fold's correct count. k* is the
    round-half-up mean of those, clamped to the evaluated range. The curve
    carries mean and population std of per-fold accuracies for each k.
    """
    if acc.correct.size == 0:
        raise ValueError("empty accuracy matrix")
    if evaluated_k is None:
        evaluated_k = list(range(1, acc.k_max + 1))
    evaluated_k = list(evaluated_k)

    per_fold = acc.per_fold_accuracy()  # rows follow evaluated_k order
    best_rows = np.argmax(acc.correct, axis=0)  # first max = smallest k
    best_k_per_fold = [int(evaluated_k[r]) for r in best_rows]

    mean_best = sum(best_k_per_fold) / len(best_k_per_fold)
    k_star = int(math.floor(mean_best + 0.5))
    k_star = max(1, min(k_star, max(evaluated_k)))

    curve = []
    for row, k in enumerate(evaluated_k):
        accs = per_fold[row]
        curve.append({
            "k": int(k),
            "mean_accuracy": float(np.mean(accs)),
            "std_accuracy": float(np.std(accs)),  # population std
        })

    return KSearchReport(best_k_per_fold=best_k_per_fold, k_star=k_star,
                         curve=curve, evaluated_k=[int(k) for k in evaluated_k],
                         timing=dict(timing or {}))


def accuracy_curve_export(report, path):
    """Write the accuracy curve as CSV: k,mean_accuracy,std_accuracy."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("k,mean_accuracy,std_accuracy\n")
            for point in report.curve:
                fh.write("%d,%.6f,%.6f\n" % (
                    point["k"], point["mean_accuracy"], point["std_accuracy"]))
    except OSError as exc:
        raise IoError(f"cannot write curve to {path}: {exc}") from exc
