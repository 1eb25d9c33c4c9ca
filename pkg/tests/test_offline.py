import itertools

import numpy as np
import pytest

from fairdiv.core import InfeasibleError, InputError, Metric, diversity, pairwise_matrix
from fairdiv.offline import brute_force_opt, gmm
from fairdiv.verify import random_instance

from helpers import line_dataset

E = Metric.EUCLIDEAN


def test_gmm_line():
    ds = line_dataset([0, 1, 2, 10])
    assert [e.id for e in gmm(ds, E, 3)] == [0, 3, 2]


def test_gmm_k_bounds():
    ds = line_dataset([0, 1])
    with pytest.raises(InputError):
        gmm(ds, E, 3)
    assert [e.id for e in gmm(ds, E, 1)] == [0]


def test_oracle_fair_example():
    ds = line_dataset([0, 10, 4, 6], [0, 0, 1, 1])
    res = brute_force_opt(ds, E, 2, [1, 1])
    assert res.opt_value == 6 and res.fair
    assert res.ids == [0, 3]
    assert brute_force_opt(ds, E, 2).opt_value == 10


def test_oracle_errors():
    ds = line_dataset([0, 1, 2], [0, 0, 1])
    with pytest.raises(InfeasibleError):
        brute_force_opt(ds, E, 3, [1, 2])
    with pytest.raises(InputError):
        brute_force_opt(ds, E, 2, [1, 0, 1])
    with pytest.raises(InputError):
        brute_force_opt(line_dataset(list(range(40))), E, 2)


def naive(ds, metric, k, caps=None):
    D = pairwise_matrix(metric, ds.features)
    best = -np.inf
    for S in itertools.combinations(range(ds.n), k):
        if caps is not None and np.bincount(ds.groups[list(S)], minlength=ds.m).tolist() != list(caps):
            continue
        val = min(D[i, j] for i, j in itertools.combinations(S, 2)) if k > 1 else np.inf
        best = max(best, val)
    return best


def test_oracle_matches_naive(rng):
    for _ in range(60):
        m = int(rng.integers(1, 4))
        k = int(rng.integers(max(2, m), 5))
        ds, caps, metric = random_instance(rng, m, k, 12)
        assert brute_force_opt(ds, metric, k).opt_value == naive(ds, metric, k)
        assert brute_force_opt(ds, metric, k, caps).opt_value == naive(ds, metric, k, caps)


def test_fair_never_beats_unconstrained(rng):
    for _ in range(60):
        m = int(rng.integers(1, 4))
        k = int(rng.integers(max(2, m), 6))
        ds, caps, metric = random_instance(rng, m, k, 25)
        fair = brute_force_opt(ds, metric, k, caps)
        assert fair.opt_value <= brute_force_opt(ds, metric, k).opt_value
        assert diversity(metric, fair.best_set) == fair.opt_value
        assert np.bincount([e.group for e in fair.best_set], minlength=m).tolist() == caps


def test_gmm_half_approx(rng):
    for _ in range(60):
        k = int(rng.integers(2, 6))
        ds, _, metric = random_instance(rng, 2, k, 25)
        assert diversity(metric, gmm(ds, metric, k)) >= brute_force_opt(ds, metric, k).opt_value / 2
