"""Streaming fair diversity for two groups, balanced by swaps after the pass."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .core import (
    Element,
    FairSolution,
    InfeasibleError,
    InputError,
    Metric,
    diversity,
    set_distance,
)
from .guesses import Candidate, CandidateBank, GuessLadder


def balance(blind: Sequence[Element], spec: Sequence[Element], caps: Sequence[int],
            metric: Metric, arrival: dict[int, int]) -> list[Element]:
    """Make a full group-blind candidate meet both quotas.

    First pull the farthest elements of the under-filled group's candidate
    in until that group reaches its quota, then drop the over-filled group's
    members closest to the under-filled group until the size is back to k.
    ``spec`` is the under-filled group's candidate. Ties go to the earliest
    arrival.
    """
    k = sum(caps)
    counts = [0, 0]
    for e in blind:
        counts[e.group] += 1
    under = [i for i in (0, 1) if counts[i] < caps[i]]
    if not under:
        return list(blind)
    iu = under[0]

    S = list(blind)
    in_S = {e.id for e in S}
    target = [e for e in S if e.group == iu]
    while len(target) < caps[iu]:
        # members of spec already in S sit at distance 0 and cannot win
        pool = [x for x in spec if x.id not in in_S]
        best, best_d = None, -math.inf
        for x in pool:
            d = set_distance(metric, x, target)
            if d > best_d:
                best, best_d = x, d
        S.append(best)
        in_S.add(best.id)
        target.append(best)

    while len(S) > k:
        worst, worst_d = None, math.inf
        for x in sorted((e for e in S if e.group != iu), key=lambda e: arrival[e.id]):
            d = set_distance(metric, x, target)
            if d < worst_d:
                worst, worst_d = x, d
        S.remove(worst)
    return sorted(S, key=lambda e: arrival[e.id])


class SFDM1:
    """One blind and two group-specific candidates per guess; ``m`` must be 2.

    >>> from fairdiv.core import make_element
    >>> from fairdiv.guesses import build_ladder
    >>> algo = SFDM1((1, 1), build_ladder(1.0, 10.0, 0.5), "euclidean")
    >>> for i, (v, g) in enumerate([(0, 0), (10, 0), (4, 1)]):
    ...     algo.process(make_element(i, [v], g))
    >>> algo.finalize().ids
    [1, 2]
    """

    def __init__(self, caps: Sequence[int], ladder: GuessLadder, metric: Metric):
        caps = [int(c) for c in caps]
        if len(caps) != 2:
            raise InputError(f"SFDM1 handles exactly two groups, got {len(caps)} quotas")
        if min(caps) < 1:
            raise InputError("every group quota must be positive")
        self.caps = caps
        self.k = sum(caps)
        self.ladder = ladder
        self.metric = Metric.parse(metric)
        self.blind: CandidateBank | None = None
        self.spec: list[CandidateBank] = []
        self.n_seen = 0

    def _init_banks(self, dim: int) -> None:
        mus = self.ladder.values
        self.blind = CandidateBank(mus, self.k, dim, self.metric)
        self.spec = [CandidateBank(mus, self.caps[i], dim, self.metric, group_filter=i)
                     for i in (0, 1)]

    def process(self, x: Element) -> None:
        if x.group not in (0, 1):
            raise InputError(f"element {x.id} has group {x.group}; SFDM1 needs groups 0 and 1")
        if self.blind is None:
            self._init_banks(len(x.features))
        elif len(x.features) != self.blind.dim:
            raise InputError("feature dimension changed mid-stream")
        self.blind.offer(x.features, x.id, x.group, self.n_seen)
        self.spec[x.group].offer(x.features, x.id, x.group, self.n_seen)
        self.n_seen += 1

    # -- inspection -------------------------------------------------------

    def candidates(self) -> list[tuple[Candidate, Candidate, Candidate]]:
        """Per guess: (blind, group-0 candidate, group-1 candidate)."""
        if self.blind is None:
            return [(Candidate(mu, self.k), Candidate(mu, self.caps[0], 0),
                     Candidate(mu, self.caps[1], 1)) for mu in self.ladder.values]
        return [(self.blind.candidate(j), self.spec[0].candidate(j), self.spec[1].candidate(j))
                for j in range(len(self.ladder))]

    def stored_elements(self) -> int:
        if self.blind is None:
            return 0
        ids = np.concatenate([self.blind.stored_ids()] + [b.stored_ids() for b in self.spec])
        return len(np.unique(ids))

    def feasible_guesses(self) -> list[int]:
        if self.blind is None:
            return []
        ok = ((self.blind.counts == self.k)
              & (self.spec[0].counts == self.caps[0])
              & (self.spec[1].counts == self.caps[1]))
        return np.flatnonzero(ok).tolist()

    # -- post-processing --------------------------------------------------

    def post_process(self) -> list[FairSolution]:
        """Balanced candidate for every feasible guess, in ascending guess order."""
        out = []
        for j in self.feasible_guesses():
            arrival = self.blind.arrival_map(j)
            blind = self.blind.members(j)
            counts = [sum(e.group == i for e in blind) for i in (0, 1)]
            iu = 0 if counts[0] < self.caps[0] else 1
            arrival.update(self.spec[iu].arrival_map(j))
            S = balance(blind, self.spec[iu].members(j), self.caps, self.metric, arrival)
            out.append(FairSolution(tuple(S), diversity(self.metric, S), float(self.ladder[j])))
        return out

    def finalize(self) -> FairSolution:
        best = None
        for sol in self.post_process():
            if best is None or sol.diversity > best.diversity:
                best = sol
        if best is None:
            sizes = None
            if self.blind is not None:
                sizes = {float(mu): (int(self.blind.counts[j]), int(self.spec[0].counts[j]),
                                     int(self.spec[1].counts[j]))
                         for j, mu in enumerate(self.ladder.values)}
            raise InfeasibleError(
                "no guess has a full blind candidate and full group candidates",
                {"sizes": sizes, "caps": self.caps},
            )
        return best
