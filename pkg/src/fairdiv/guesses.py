"""Geometric guess ladder and threshold-candidate maintenance.

A ladder holds guesses ``d_min / (1 - eps)**j`` for the unknown optimum.
For every guess one candidate set is grown online: an arriving element is
kept if the candidate still has room and the element is at least ``mu``
away from everything already kept.

:class:`Candidate` is the plain one-guess object. :class:`CandidateBank`
keeps one candidate per guess in a single array and checks an element
against all open guesses at once; the result equals running the
candidates one at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    Element,
    InfeasibleError,
    InputError,
    Metric,
    diversity,
    distances_to,
    set_distance,
)


@dataclass(frozen=True)
class GuessLadder:
    eps: float
    d_min: float
    d_max: float
    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, j: int) -> float:
        return self.values[j]

    @property
    def spread(self) -> float:
        return self.d_max / self.d_min


def build_ladder(d_min: float, d_max: float, eps: float) -> GuessLadder:
    if not (0 < eps < 1):
        raise InputError(f"eps must lie in (0, 1), got {eps}")
    if not (0 < d_min <= d_max) or math.isinf(d_max):
        raise InputError(f"need 0 < d_min <= d_max < inf, got {d_min}, {d_max}")
    values = []
    j = 0
    while True:
        mu = d_min / (1 - eps) ** j
        if mu > d_max:
            break
        values.append(mu)
        j += 1
    return GuessLadder(eps, d_min, d_max, tuple(values))


@dataclass
class Candidate:
    """Size-capped set whose members are pairwise at least ``mu`` apart."""

    mu: float
    cap: int
    group_filter: int | None = None
    members: list[Element] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def full(self) -> bool:
        return len(self.members) >= self.cap

    def offer(self, x: Element, metric: Metric) -> bool:
        if self.group_filter is not None and x.group != self.group_filter:
            return False
        if len(self.members) >= self.cap:
            return False
        if set_distance(metric, x, self.members) < self.mu:
            return False
        self.members.append(x)
        return True


class CandidateBank:
    """One candidate per guess, stored as ``(guesses, cap, dim)`` arrays.

    Slots fill left to right so a row's members stay in arrival order.
    ``arrivals`` records the stream position at which each member was kept.
    """

    def __init__(self, mus: Sequence[float], cap: int, dim: int, metric: Metric,
                 group_filter: int | None = None):
        if cap < 1:
            raise InputError(f"candidate cap must be positive, got {cap}")
        self.mus = np.asarray(mus, dtype=np.float64)
        self.cap = int(cap)
        self.dim = int(dim)
        self.metric = Metric.parse(metric)
        self.group_filter = group_filter
        L = len(self.mus)
        self.points = np.zeros((L, cap, dim))
        self.ids = np.full((L, cap), -1, dtype=np.int64)
        self.groups = np.full((L, cap), -1, dtype=np.int64)
        self.arrivals = np.full((L, cap), -1, dtype=np.int64)
        self.counts = np.zeros(L, dtype=np.int64)
        self._open = np.arange(L)
        self._slots = np.arange(cap)
        self.offers = 0

    def __len__(self) -> int:
        return len(self.mus)

    def offer(self, features: np.ndarray, id: int, group: int, arrival: int) -> np.ndarray:
        """Offer one element to every guess; returns the accepting row indices."""
        if self.group_filter is not None and group != self.group_filter:
            return self._open[:0]
        self.offers += 1
        rows = self._open
        if len(rows) == 0:
            return rows
        counts = self.counts[rows]
        width = int(counts.max())
        if width == 0:
            accepted = rows
        else:
            d = distances_to(self.metric, self.points[rows, :width], features)
            d[self._slots[None, :width] >= counts[:, None]] = np.inf
            accepted = rows[d.min(axis=1) >= self.mus[rows]]
        if len(accepted):
            slot = self.counts[accepted]
            self.points[accepted, slot] = features
            self.ids[accepted, slot] = id
            self.groups[accepted, slot] = group
            self.arrivals[accepted, slot] = arrival
            self.counts[accepted] += 1
            if (self.counts[accepted] >= self.cap).any():
                self._open = self._open[self.counts[self._open] < self.cap]
        return accepted

    def members(self, j: int) -> list[Element]:
        c = self.counts[j]
        return [Element(int(self.ids[j, s]), self.points[j, s].copy(), int(self.groups[j, s]))
                for s in range(c)]

    def arrival_map(self, j: int) -> dict[int, int]:
        c = self.counts[j]
        return dict(zip(self.ids[j, :c].tolist(), self.arrivals[j, :c].tolist()))

    def candidate(self, j: int) -> Candidate:
        return Candidate(float(self.mus[j]), self.cap, self.group_filter, self.members(j))

    def candidates(self) -> list[Candidate]:
        return [self.candidate(j) for j in range(len(self.mus))]

    def stored_ids(self) -> np.ndarray:
        return self.ids[self.ids >= 0]


def sdm_finalize(candidates: Sequence[Candidate], k: int, metric: Metric) -> list[Element]:
    """Best full candidate by diversity; ties go to the smaller guess."""
    best, best_div = None, -math.inf
    for c in sorted(candidates, key=lambda c: c.mu):
        if len(c.members) != k:
            continue
        div = diversity(metric, c.members)
        if div > best_div:
            best, best_div = c, div
    if best is None:
        raise InfeasibleError(
            f"no candidate reached size k={k}",
            {"sizes": {c.mu: len(c.members) for c in candidates}},
        )
    return list(best.members)


class StreamingDiversity:
    """Unconstrained one-pass max-min diversity over a guess ladder."""

    def __init__(self, ladder: GuessLadder, k: int, metric: Metric):
        if k < 1:
            raise InputError("k must be positive")
        self.ladder = ladder
        self.k = k
        self.metric = Metric.parse(metric)
        self.bank: CandidateBank | None = None
        self.n_seen = 0

    def process(self, x: Element) -> None:
        if self.bank is None:
            self.bank = CandidateBank(self.ladder.values, self.k, len(x.features), self.metric)
        elif len(x.features) != self.bank.dim:
            raise InputError("feature dimension changed mid-stream")
        self.bank.offer(x.features, x.id, x.group, self.n_seen)
        self.n_seen += 1

    def candidates(self) -> list[Candidate]:
        if self.bank is None:
            return [Candidate(mu, self.k) for mu in self.ladder.values]
        return self.bank.candidates()

    def stored_elements(self) -> int:
        return 0 if self.bank is None else len(np.unique(self.bank.stored_ids()))

    def finalize(self) -> list[Element]:
        return sdm_finalize(self.candidates(), self.k, self.metric)
