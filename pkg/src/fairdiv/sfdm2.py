"""Streaming fair diversity for any number of groups.

After the pass, each feasible guess pools its candidates, clusters the pool
by single linkage at ``mu / (m + 1)``, and completes a fair subset of the
blind candidate by matroid intersection (group quotas x one-per-cluster).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import (
    Element,
    FairSolution,
    InfeasibleError,
    InputError,
    Metric,
    diversity,
    pairwise_matrix,
)
from .guesses import Candidate, CandidateBank, GuessLadder
from .matroid import ClusterMatroid, PartitionMatroid, matroid_intersection


@dataclass
class Clustering:
    pool: list[Element]
    labels: np.ndarray
    threshold: float

    @property
    def cluster_of(self) -> dict[int, int]:
        return {e.id: int(c) for e, c in zip(self.pool, self.labels)}

    @property
    def clusters(self) -> list[list[Element]]:
        out: list[list[Element]] = [[] for _ in range(int(self.labels.max()) + 1)] if len(self.pool) else []
        for e, c in zip(self.pool, self.labels):
            out[c].append(e)
        return out


def build_clusters(pool: Sequence[Element], metric: Metric, mu: float, m: int) -> Clustering:
    """Connected components of the graph joining pairs closer than ``mu/(m+1)``."""
    pool = list(pool)
    if not pool:
        raise InputError("cannot cluster an empty pool")
    threshold = mu / (m + 1)
    D = pairwise_matrix(Metric.parse(metric), np.stack([e.features for e in pool]))
    adj = D < threshold
    np.fill_diagonal(adj, False)
    _, raw = connected_components(csr_matrix(adj), directed=False)
    # relabel by first appearance in pool order
    remap: dict[int, int] = {}
    labels = np.array([remap.setdefault(int(r), len(remap)) for r in raw], dtype=np.int64)
    return Clustering(pool, labels, threshold)


def initial_partial_solution(blind: Sequence[Element], caps: Sequence[int]) -> list[Element]:
    """Earliest ``min(k_i, count_i)`` blind members of every group, in blind order."""
    taken = [0] * len(caps)
    out = []
    for e in blind:
        if taken[e.group] < caps[e.group]:
            taken[e.group] += 1
            out.append(e)
    return out


@dataclass
class GuessOutcome:
    """Post-processing record for one feasible guess."""

    mu: float
    solution: FairSolution | None
    size: int
    clustering: Clustering
    sources: dict[str, list[int]] = field(default_factory=dict)


class SFDM2:
    """One blind and ``m`` group-specific candidates (each capped at k) per guess."""

    def __init__(self, caps: Sequence[int], ladder: GuessLadder, metric: Metric):
        caps = [int(c) for c in caps]
        if not caps or min(caps) < 1:
            raise InputError("need at least one group and positive quotas")
        self.caps = caps
        self.m = len(caps)
        self.k = sum(caps)
        self.ladder = ladder
        self.metric = Metric.parse(metric)
        self.blind: CandidateBank | None = None
        self.spec: list[CandidateBank] = []
        self.n_seen = 0

    def process(self, x: Element) -> None:
        if not 0 <= x.group < self.m:
            raise InputError(f"element {x.id} has group {x.group} outside [0, {self.m - 1}]")
        if self.blind is None:
            dim = len(x.features)
            mus = self.ladder.values
            self.blind = CandidateBank(mus, self.k, dim, self.metric)
            self.spec = [CandidateBank(mus, self.k, dim, self.metric, group_filter=i)
                         for i in range(self.m)]
        elif len(x.features) != self.blind.dim:
            raise InputError("feature dimension changed mid-stream")
        self.blind.offer(x.features, x.id, x.group, self.n_seen)
        self.spec[x.group].offer(x.features, x.id, x.group, self.n_seen)
        self.n_seen += 1

    def candidates(self) -> list[tuple[Candidate, list[Candidate]]]:
        """Per guess: (blind candidate, [group candidates])."""
        if self.blind is None:
            return [(Candidate(mu, self.k), [Candidate(mu, self.k, i) for i in range(self.m)])
                    for mu in self.ladder.values]
        return [(self.blind.candidate(j), [b.candidate(j) for b in self.spec])
                for j in range(len(self.ladder))]

    def stored_elements(self) -> int:
        if self.blind is None:
            return 0
        ids = np.concatenate([self.blind.stored_ids()] + [b.stored_ids() for b in self.spec])
        return len(np.unique(ids))

    def feasible_guesses(self) -> list[int]:
        if self.blind is None:
            return []
        ok = self.blind.counts == self.k
        for i, b in enumerate(self.spec):
            ok &= b.counts >= self.caps[i]
        return np.flatnonzero(ok).tolist()

    def _post_process_guess(self, j: int) -> GuessOutcome:
        mu = float(self.ladder[j])
        arrival = self.blind.arrival_map(j)
        blind = self.blind.members(j)
        pool = {e.id: e for e in blind}
        sources = {"blind": [e.id for e in blind]}
        for i, b in enumerate(self.spec):
            arrival.update(b.arrival_map(j))
            members = b.members(j)
            sources[f"group{i}"] = [e.id for e in members]
            for e in members:
                pool.setdefault(e.id, e)
        ordered = sorted(pool.values(), key=lambda e: arrival[e.id])

        S0 = initial_partial_solution(blind, self.caps)
        clustering = build_clusters(ordered, self.metric, mu, self.m)
        m1 = PartitionMatroid(ordered, self.caps)
        m2 = ClusterMatroid(ordered, clustering.cluster_of)
        S = matroid_intersection(m1, m2, self.metric, S0)
        sol = None
        if len(S) == self.k:
            sol = FairSolution(tuple(S), diversity(self.metric, S), mu)
        return GuessOutcome(mu, sol, len(S), clustering, sources)

    def post_process(self) -> list[GuessOutcome]:
        return [self._post_process_guess(j) for j in self.feasible_guesses()]

    def finalize(self) -> FairSolution:
        outcomes = self.post_process()
        best = None
        for out in outcomes:
            sol = out.solution
            if sol is not None and (best is None or sol.diversity > best.diversity):
                best = sol
        if best is None:
            diag = {"caps": self.caps,
                    "augmented_sizes": {o.mu: o.size for o in outcomes}}
            if self.blind is not None:
                diag["sizes"] = {
                    float(mu): (int(self.blind.counts[j]), [int(b.counts[j]) for b in self.spec])
                    for j, mu in enumerate(self.ladder.values)}
            msg = ("no guess passed the candidate-size test" if not outcomes
                   else "no guess could be completed to a fair size-k solution")
            raise InfeasibleError(msg, diag)
        return best
