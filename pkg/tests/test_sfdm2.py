import numpy as np
import pytest

from fairdiv.core import InfeasibleError, InputError, Metric, diversity, extremal_distances, make_element
from fairdiv.guesses import StreamingDiversity, build_ladder
from fairdiv.sfdm2 import SFDM2, build_clusters, initial_partial_solution
from fairdiv.verify import clustering_violations, random_instance

from helpers import line, line_dataset

E = Metric.EUCLIDEAN


def run(values, groups, caps, ladder, metric=E):
    algo = SFDM2(caps, ladder, metric)
    for x in line(values, groups):
        algo.process(x)
    return algo


class TestTrace:
    def setup_method(self):
        self.algo = run([0, 1, 10], [0, 1, 0], (1, 1), build_ladder(3, 3, 0.5))

    def test_candidates(self):
        (blind, (s0, s1)), = self.algo.candidates()
        assert [e.id for e in blind.members] == [0, 2]
        assert [e.id for e in s0.members] == [0, 2]
        assert [e.id for e in s1.members] == [1]

    def test_outcome(self):
        out, = self.algo.post_process()
        # threshold 3/3 = 1 and the join is strict, so 0 and 1 stay apart
        assert out.clustering.labels.tolist() == [0, 1, 2]
        assert out.sources == {"blind": [0, 2], "group0": [0, 2], "group1": [1]}
        sol = self.algo.finalize()
        assert sol.ids == [0, 1]
        assert sol.diversity == 1 == sol.mu / 3


def test_clusters_chain_transitively():
    pool = line([0, 0.9, 1.8, 5])
    c = build_clusters(pool, E, 3, 2)
    assert c.threshold == 1
    assert c.labels.tolist() == [0, 0, 0, 1]
    assert [[e.id for e in cl] for cl in c.clusters] == [[0, 1, 2], [3]]


def test_clusters_empty_pool():
    with pytest.raises(InputError):
        build_clusters([], E, 1, 1)


def test_initial_partial_solution():
    blind = line([0, 1, 2, 3, 4], [1, 1, 0, 1, 2])
    assert [e.id for e in initial_partial_solution(blind, [1, 2, 1])] == [0, 1, 2, 4]
    assert [e.id for e in initial_partial_solution(blind, [0, 1, 0])] == [0]


def test_single_group_matches_unconstrained(rng):
    for _ in range(40):
        k = int(rng.integers(1, 6))
        ds, _, metric = random_instance(rng, 1, k, 30)
        lad = build_ladder(*extremal_distances(ds, metric), 0.1)
        a, b = SFDM2([k], lad, metric), StreamingDiversity(lad, k, metric)
        for x in ds:
            a.process(x)
            b.process(x)
        assert a.finalize().diversity == diversity(metric, b.finalize())


def test_outcomes_fair_clustered_and_bounded(rng):
    for t in range(60):
        m = 2 + t % 3
        k = int(rng.integers(m, 7))
        ds, caps, metric = random_instance(rng, m, k, 30)
        lad = build_ladder(*extremal_distances(ds, metric), 0.1)
        algo = SFDM2(caps, lad, metric)
        for x in ds:
            algo.process(x)
        for out in algo.post_process():
            assert clustering_violations(out, m, metric) == []
            if out.solution is not None:
                assert out.solution.group_counts(m) == caps
                assert out.solution.diversity >= out.mu / (m + 1)
        assert algo.stored_elements() <= (m + 1) * k * len(lad)


def test_errors():
    with pytest.raises(InputError):
        SFDM2([], build_ladder(1, 2, 0.5), E)
    algo = SFDM2([1, 1], build_ladder(1, 2, 0.5), E)
    with pytest.raises(InputError):
        algo.process(make_element(0, [0.0], 5))
    with pytest.raises(InfeasibleError):
        algo.finalize()
    algo.process(make_element(0, [0.0], 0))
    with pytest.raises(InputError):
        algo.process(make_element(1, [0.0, 1.0], 1))


def test_missing_group_reports_sizes():
    algo = run([0, 4, 9], [0, 0, 0], (2, 1), build_ladder(1, 9, 0.5))
    with pytest.raises(InfeasibleError) as info:
        algo.finalize()
    assert "sizes" in info.value.diagnostics
