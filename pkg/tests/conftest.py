import numpy as np
import pytest

from knnsweep.dataset import Dataset, FoldAssignment, generate_synthetic, stratified_folds


@pytest.fixture
def toy():
    """4-point 1-D instance: features 0,1,2,10; labels 0,0,1,1; folds 0,1,0,1."""
    ds = Dataset(features=np.array([[0.0], [1.0], [2.0], [10.0]]),
                 labels=np.array([0, 0, 1, 1]), s=2, class_names=["A", "B"])
    fa = FoldAssignment(fold_of=np.array([0, 1, 0, 1]), f=2)
    return ds, fa


def random_instance(rng, n_range=(10, 200), d_range=(1, 5), s_range=(2, 4),
                    f_choices=(3, 5)):
    """Seeded random dataset + folds for property-style tests."""
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    d = int(rng.integers(d_range[0], d_range[1] + 1))
    s = int(rng.integers(s_range[0], s_range[1] + 1))
    f = int(rng.choice(f_choices))
    ds = generate_synthetic(n, d, s, float(rng.uniform(0.2, 2.0)),
                            int(rng.integers(2**32)))
    fa = stratified_folds(ds, f, int(rng.integers(2**32)))
    return ds, fa
