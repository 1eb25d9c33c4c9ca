import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairdiv.core import (
    GroupedDataset,
    InputError,
    Metric,
    distance,
    diversity,
    extremal_distances,
    make_element,
    set_distance,
)

from helpers import line, line_dataset

E, M, A = Metric.EUCLIDEAN, Metric.MANHATTAN, Metric.ANGULAR


def el(i, *xs):
    return make_element(i, xs)


class TestDistance:
    def test_euclidean_345(self):
        assert distance(E, el(0, 0, 0), el(1, 3, 4)) == 5.0

    def test_manhattan(self):
        assert distance(M, el(0, 1, 2), el(1, 4, 0)) == 5.0

    def test_angular_orthogonal(self):
        assert distance(A, el(0, 1, 0), el(1, 0, 1)) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_angular_clamps_parallel(self):
        # cosine may round past 1 for parallel vectors of different length
        d = distance(A, el(0, 0.1, 0.3), el(1, 0.3, 0.9))
        assert 0.0 <= d < 1e-7

    def test_metric_given_as_string(self):
        assert distance("euclidean", el(0, 0), el(1, 2)) == 2.0

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            distance(E, el(0, 0, 0), el(1, 1))

    def test_zero_vector_angular(self):
        with pytest.raises(InputError):
            distance(A, el(0, 0, 0), el(1, 1, 1))

    def test_unknown_metric(self):
        with pytest.raises(InputError):
            distance("cosine", el(0, 0), el(1, 1))


class TestSetDistanceAndDiversity:
    def test_nearest(self):
        x, a, b = line([4, 0, 10])
        assert set_distance(E, x, [a, b]) == 4.0

    def test_empty_set_is_inf(self):
        assert set_distance(E, line([4])[0], []) == math.inf

    def test_member(self):
        x, a, b = line([0, 0, 7])
        assert set_distance(E, x, [x, b]) == 0.0

    def test_diversity_pair(self):
        assert diversity(E, [el(0, 0, 0), el(1, 3, 4)]) == 5.0

    def test_diversity_line(self):
        assert diversity(E, line([0, 1, 5])) == 1.0

    def test_singleton_and_empty(self):
        assert diversity(E, line([3])) == math.inf
        assert diversity(E, []) == math.inf


class TestExtremalDistances:
    def test_line(self):
        assert extremal_distances(line_dataset([0, 1, 10]), E) == (1.0, 10.0)

    def test_duplicates_skipped(self):
        assert extremal_distances(line_dataset([0, 0, 5]), E) == (5.0, 5.0)

    def test_triangle(self):
        ds = GroupedDataset.from_arrays([[0, 0], [3, 4], [0, 8]])
        assert extremal_distances(ds, E) == (5.0, 8.0)

    def test_too_small(self):
        with pytest.raises(InputError):
            extremal_distances(line_dataset([1]), E)

    def test_all_zero(self):
        with pytest.raises(InputError):
            extremal_distances(line_dataset([2, 2, 2]), E)

    @pytest.mark.parametrize("metric", list(Metric))
    def test_matches_enumeration(self, rng, metric):
        for _ in range(20):
            n = int(rng.integers(2, 200))
            pts = rng.uniform(0.1, 5, size=(n, int(rng.integers(1, 4))))
            if rng.random() < 0.3:
                pts[rng.integers(n)] = pts[0]
            ds = GroupedDataset.from_arrays(pts)
            elems = list(ds)
            dists = [distance(metric, x, y) for x, y in itertools.combinations(elems, 2)]
            expect = (min(d for d in dists if d > 0), max(dists))
            assert extremal_distances(ds, metric) == expect

    @pytest.mark.parametrize("metric", [E, M])
    def test_fast_path_matches_brute(self, monkeypatch, rng, metric):
        import fairdiv.core as core

        pts = np.round(rng.standard_normal((3000, 2)) * 3, 3)  # rounding forces duplicates
        ds = GroupedDataset.from_arrays(pts)
        brute = core._brute_extremes(metric, pts)
        monkeypatch.setattr(core, "BRUTE_FORCE_LIMIT", 100)
        assert extremal_distances(ds, metric) == brute


class TestDataset:
    def test_group_counts_include_empty_groups(self):
        ds = GroupedDataset.from_arrays([[0], [1], [2]], groups=[0, 2, 0], m=4)
        assert ds.group_counts == [2, 0, 1, 0]
        assert sum(ds.group_counts) == ds.n

    def test_group_out_of_range(self):
        with pytest.raises(InputError):
            GroupedDataset.from_arrays([[0], [1]], groups=[0, 2], m=2)

    def test_duplicate_ids(self):
        with pytest.raises(InputError):
            GroupedDataset(np.array([1, 1]), np.zeros((2, 1)), np.zeros(2), 1)

    def test_ragged_elements(self):
        with pytest.raises(InputError):
            GroupedDataset.from_elements([make_element(0, [1]), make_element(1, [1, 2])])

    def test_permuted_keeps_elements(self, rng):
        ds = line_dataset([0, 1, 2, 3, 4], [0, 1, 0, 1, 0])
        p = ds.permuted(rng)
        assert sorted(p.ids.tolist()) == list(range(5))
        for e in p:
            assert e.features[0] == e.id and e.group == ds.groups[e.id]


vec = st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=3)


@pytest.mark.parametrize("metric", list(Metric))
def test_metric_axioms_random_triples(metric):
    rng = np.random.default_rng(7)
    pts = rng.uniform(-10, 10, size=(10_000, 3, 4))
    for x, y, z in pts[:10_000]:
        ex, ey, ez = make_element(0, x), make_element(1, y), make_element(2, z)
        dxy, dyx = distance(metric, ex, ey), distance(metric, ey, ex)
        assert dxy == dyx
        assert dxy >= 0
        assert distance(metric, ex, ex) == 0.0
        assert distance(metric, ex, ez) <= dxy + distance(metric, ey, ez) + 1e-9


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=8), st.floats(-50, 50))
def test_diversity_non_increasing_under_insertion(values, extra):
    S = line(values)
    x = make_element(len(values), [extra])
    assert diversity(E, S + [x]) <= diversity(E, S)


@settings(max_examples=50)
@given(vec, vec)
def test_symmetry_hypothesis(a, b):
    for metric in (E, M):
        assert distance(metric, make_element(0, a), make_element(1, b)) == \
            distance(metric, make_element(1, b), make_element(0, a))
