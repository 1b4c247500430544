import dataclasses
import json

import numpy as np
import pytest

from conftest import random_instance
from knnsweep.dataset import FoldAssignment, generate_synthetic, stratified_folds
from knnsweep.distance import SortedDistanceMatrix, build_sorted_matrix
from knnsweep.errors import EmptyNeighborhood, InconsistentInputs, IoError
from knnsweep.sweep import (
    AccuracyMatrix,
    accuracy_curve_export,
    classify_at_k,
    select_k,
    sweep,
)


def make_matrix(distances, labels, sources, f, fold_sizes_max):
    distances = np.asarray(distances, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int32)
    sources = np.asarray(sources, dtype=np.int32)
    n = distances.shape[0]
    return SortedDistanceMatrix(
        distances=distances, labels=labels, sources=sources,
        valid_len=np.full(n, distances.shape[1]),
        k_max=n - fold_sizes_max, n=n, f=f, metric="euclidean",
        build_seconds={})


class TestClassifyAtK:
    def test_strict_majority(self):
        assert classify_at_k([2, 1], [0.0, 0.0]) == 0
        assert classify_at_k([1, 3], [0.0, 0.0], "shadow_min") == 1

    def test_tie_smallest_code(self):
        assert classify_at_k([1, 1], [10.0, 1.0], "smallest_code") == 0

    def test_tie_shadow_min(self):
        assert classify_at_k([1, 1], [10.0, 1.0], "shadow_min") == 1

    def test_shadow_tie_falls_back_to_code(self):
        assert classify_at_k([2, 2, 1], [3.0, 3.0, 9.0], "shadow_min") == 0

    def test_empty_neighborhood(self):
        with pytest.raises(EmptyNeighborhood):
            classify_at_k([0, 0], [0.0, 0.0])

    def test_unknown_policy(self):
        with pytest.raises(ValueError):
            classify_at_k([1, 0], [0.0, 0.0], "coin_flip")


class TestSweep:
    def test_toy_golden(self, toy):
        # values confirmed against the brute-force oracle (see test_oracle)
        ds, fa = toy
        acc = sweep(build_sorted_matrix(ds, fa), fa, ds.labels)
        assert acc.correct.tolist() == [[1, 2], [1, 1]]

    def test_single_label_everywhere(self):
        # hand-built matrix whose neighbors all carry label 0
        m = make_matrix(distances=[[1.0, 2.0]] * 4,
                        labels=[[0, 0]] * 4,
                        sources=[[1, 3], [0, 2], [3, 1], [2, 0]],
                        f=2, fold_sizes_max=2)
        fa = FoldAssignment(fold_of=np.array([0, 1, 0, 1]), f=2)
        acc = sweep(m, fa, truth=np.zeros(4, dtype=int))
        for k in range(m.k_max):
            assert acc.correct[k].tolist() == fa.fold_sizes.tolist()

    def test_two_rows_two_folds(self):
        ds = generate_synthetic(2, 1, 2, 0.5, seed=0)
        fa = stratified_folds(ds, 2, seed=0)
        m = build_sorted_matrix(ds, fa)
        assert m.k_max == 1
        acc = sweep(m, fa, ds.labels)
        assert acc.correct.shape == (1, 2)
        # prediction is the sole cross-fold neighbor's label
        expected = [int(m.row(r)[1][0] == ds.labels[r]) for r in range(2)]
        assert acc.correct.sum() == sum(expected)

    def test_prefix_property(self):
        rng = np.random.default_rng(17)
        ds, fa = random_instance(rng, n_range=(20, 60))
        m = build_sorted_matrix(ds, fa)
        full = sweep(m, fa, ds.labels)
        shorter = dataclasses.replace(m, k_max=m.k_max // 2)
        part = sweep(shorter, fa, ds.labels)
        np.testing.assert_array_equal(full.correct[: shorter.k_max], part.correct)

    def test_inconsistent_inputs(self, toy):
        ds, fa = toy
        m = build_sorted_matrix(ds, fa)
        with pytest.raises(InconsistentInputs):
            sweep(m, fa, ds.labels[:3])

    def test_policies_agree_without_ties(self):
        # distinct per-pair distances and odd k majorities rarely tie, but the
        # guarantee tested is pointwise: same prediction when counts are untied
        rng = np.random.default_rng(23)
        for _ in range(200):
            s = int(rng.integers(2, 5))
            counts = rng.integers(0, 6, size=s)
            if (counts == counts.max()).sum() != 1 or counts.sum() == 0:
                continue
            shadow = rng.uniform(0, 10, size=s)
            assert (classify_at_k(counts, shadow, "smallest_code")
                    == classify_at_k(counts, shadow, "shadow_min"))


class TestSelectK:
    def test_spec_shaped_accuracy_matrix(self):
        acc = AccuracyMatrix(correct=np.array([[2, 1], [2, 2]]),
                             fold_sizes=np.array([2, 2]), k_max=2, f=2)
        report = select_k(acc)
        assert report.best_k_per_fold == [1, 2]
        assert report.k_star == 2  # round-half-up of 1.5
        assert report.curve[0] == {"k": 1, "mean_accuracy": 0.75, "std_accuracy": 0.25}
        assert report.curve[1] == {"k": 2, "mean_accuracy": 1.0, "std_accuracy": 0.0}

    def test_argmax_tie_prefers_smallest_k(self):
        correct = np.array([[1], [2], [1], [1], [1], [1], [2]])
        acc = AccuracyMatrix(correct=correct, fold_sizes=np.array([3]), k_max=7, f=1)
        report = select_k(acc, evaluated_k=range(1, 8))
        assert report.best_k_per_fold == [2]
        # ties between k=3 and k=7 resolve to 3
        correct2 = np.array([[0], [0], [2], [1], [1], [1], [2]])
        acc2 = AccuracyMatrix(correct=correct2, fold_sizes=np.array([3]), k_max=7, f=1)
        assert select_k(acc2).best_k_per_fold == [3]

    def test_identical_best_ks(self):
        acc = AccuracyMatrix(correct=np.array([[2, 2], [1, 1]]),
                             fold_sizes=np.array([2, 2]), k_max=2, f=2)
        assert select_k(acc).k_star == 1

    def test_report_json_fields(self):
        acc = AccuracyMatrix(correct=np.array([[2, 1], [2, 2]]),
                             fold_sizes=np.array([2, 2]), k_max=2, f=2)
        report = select_k(acc, timing={"sweep": 0.1})
        payload = json.loads(report.to_json())
        assert set(payload) == {"best_k_per_fold", "k_star", "curve",
                                "evaluated_k", "timing"}
        assert payload["evaluated_k"] == [1, 2]


class TestCurveExport:
    def test_exact_rows(self, tmp_path):
        acc = AccuracyMatrix(correct=np.array([[2, 1], [2, 2]]),
                             fold_sizes=np.array([2, 2]), k_max=2, f=2)
        report = select_k(acc)
        out = tmp_path / "curve.csv"
        accuracy_curve_export(report, out)
        lines = out.read_text().splitlines()
        assert lines == ["k,mean_accuracy,std_accuracy",
                         "1,0.750000,0.250000",
                         "2,1.000000,0.000000"]

    def test_reexport_identical(self, tmp_path):
        acc = AccuracyMatrix(correct=np.array([[2, 1], [2, 2]]),
                             fold_sizes=np.array([2, 2]), k_max=2, f=2)
        report = select_k(acc)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        accuracy_curve_export(report, a)
        accuracy_curve_export(report, b)
        assert a.read_bytes() == b.read_bytes()

    def test_missing_directory(self, tmp_path):
        acc = AccuracyMatrix(correct=np.array([[1]]), fold_sizes=np.array([1]),
                             k_max=1, f=1)
        with pytest.raises(IoError):
            accuracy_curve_export(select_k(acc), tmp_path / "nope" / "curve.csv")
