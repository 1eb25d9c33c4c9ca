import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairdiv.core import InfeasibleError, InputError, Metric, diversity, extremal_distances, make_element, set_distance
from fairdiv.guesses import Candidate, CandidateBank, StreamingDiversity, build_ladder, sdm_finalize
from fairdiv.offline import brute_force_opt
from fairdiv.verify import candidate_violations, random_instance

from helpers import line, line_dataset

E = Metric.EUCLIDEAN


class TestLadder:
    def test_powers_of_two(self):
        assert build_ladder(1, 4, 0.5).values == (1.0, 2.0, 4.0)

    def test_degenerate(self):
        assert build_ladder(1, 1, 0.5).values == (1.0,)

    def test_next_guess_past_dmax(self):
        assert build_ladder(2, 3, 0.5).values == (2.0,)

    @pytest.mark.parametrize("args", [(0, 1, 0.1), (2, 1, 0.1), (1, 2, 0), (1, 2, 1), (1, math.inf, 0.1)])
    def test_bad_input(self, args):
        with pytest.raises(InputError):
            build_ladder(*args)

    @given(st.floats(1e-4, 10), st.floats(1, 1e4), st.floats(0.01, 0.9))
    def test_invariants(self, d_min, factor, eps):
        lad = build_ladder(d_min, d_min * factor, eps)
        assert lad.values[0] == d_min
        assert all(v <= lad.d_max for v in lad)
        for a, b in zip(lad.values, lad.values[1:]):
            assert b / a == pytest.approx(1 / (1 - eps), rel=1e-9)
        assert len(lad) <= math.log(factor) / -math.log(1 - eps) + 2


def offer_all(values, mu, cap, group_filter=None, groups=None):
    c = Candidate(mu, cap, group_filter)
    for x in line(values, groups):
        c.offer(x, E)
    return [e.features[0] for e in c.members]


class TestCandidateOffer:
    def test_full_and_close_rejected(self):
        assert offer_all([0, 1, 10, 4], 5, 2) == [0, 10]

    def test_mid_accepted(self):
        assert offer_all([0, 1, 10, 4], 3, 3) == [0, 10, 4]

    def test_small_mu(self):
        assert offer_all([0, 1], 0.5, 2) == [0, 1]

    def test_group_filter(self):
        assert offer_all([0, 5, 10], 1, 3, group_filter=1, groups=[0, 1, 1]) == [5, 10]

    def test_duplicate_offer_is_noop(self):
        c = Candidate(1.0, 3)
        x = make_element(0, [0.0])
        assert c.offer(x, E) and not c.offer(x, E)
        assert len(c) == 1


class TestFinalize:
    def test_line_example(self):
        # OPT over 2-subsets of {0,1,10,4} is 10 ({0,10})
        ds = line_dataset([0, 1, 10, 4])
        assert brute_force_opt(ds, E, 2).opt_value == 10
        algo = StreamingDiversity(build_ladder(1, 10, 0.5), 2, E)
        for x in ds:
            algo.process(x)
        out = algo.finalize()
        assert sorted(e.features[0] for e in out) == [0, 10]
        assert diversity(E, out) >= 0.25 * 10

    def test_k1_first_element(self):
        algo = StreamingDiversity(build_ladder(1, 10, 0.5), 1, E)
        for x in line([3, 0, 10]):
            algo.process(x)
        assert [e.id for e in algo.finalize()] == [0]

    def test_k_above_n(self):
        algo = StreamingDiversity(build_ladder(1, 10, 0.5), 5, E)
        for x in line([0, 1, 10]):
            algo.process(x)
        with pytest.raises(InfeasibleError):
            algo.finalize()

    def test_tie_goes_to_smaller_guess(self):
        a = Candidate(1.0, 2, members=line([0, 5]))
        b = Candidate(2.0, 2, members=line([0, 5], start=10))
        assert [e.id for e in sdm_finalize([b, a], 2, E)] == [0, 1]


def test_bank_matches_scalar_candidates(rng):
    """The vectorised bank must replay the one-guess-at-a-time trace exactly."""
    for metric in Metric:
        for _ in range(10):
            n, dim, cap = int(rng.integers(5, 60)), int(rng.integers(1, 4)), int(rng.integers(1, 7))
            pts = rng.uniform(0.1, 10, size=(n, dim))
            groups = rng.integers(0, 2, size=n)
            mus = build_ladder(0.05, 12, 0.2).values
            gf = None if rng.random() < 0.5 else 1
            bank = CandidateBank(mus, cap, dim, metric, group_filter=gf)
            scalars = [Candidate(mu, cap, gf) for mu in mus]
            for i in range(n):
                x = make_element(i, pts[i], int(groups[i]))
                acc = set(bank.offer(x.features, x.id, x.group, i).tolist())
                got = {j for j, c in enumerate(scalars) if c.offer(x, metric)}
                assert acc == got
            for j, c in enumerate(scalars):
                assert [e.id for e in bank.members(j)] == [e.id for e in c.members]


def test_candidate_invariant_every_prefix(rng):
    for metric in Metric:
        ds, _, _ = random_instance(rng, 1, 4, 30, metric)
        lad = build_ladder(*extremal_distances(ds, metric), 0.1)
        algo = StreamingDiversity(lad, 4, metric)
        for x in ds:
            algo.process(x)
            for c in algo.candidates():
                assert candidate_violations(c, metric) == []


def test_unfilled_candidate_covers_stream(rng):
    for _ in range(30):
        ds, _, metric = random_instance(rng, 1, 5, 30)
        algo = StreamingDiversity(build_ladder(*extremal_distances(ds, metric), 0.1), 5, metric)
        for x in ds:
            algo.process(x)
        for c in algo.candidates():
            if len(c) < 5:
                assert all(set_distance(metric, x, c.members) < c.mu
                           for x in ds if x not in c.members)


def test_streaming_ratio_and_memory(rng):
    for t in range(200):
        k = int(rng.integers(2, 7))
        eps = (0.1, 0.25)[t % 2]
        ds, _, metric = random_instance(rng, 1, k, 40)
        lad = build_ladder(*extremal_distances(ds, metric), eps)
        algo = StreamingDiversity(lad, k, metric)
        for x in ds:
            algo.process(x)
        opt = brute_force_opt(ds, metric, k, max_n=40).opt_value
        assert diversity(metric, algo.finalize()) >= (1 - eps) / 2 * opt
        assert algo.stored_elements() <= k * len(lad)
