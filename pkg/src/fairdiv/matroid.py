"""Partition and cluster matroids and their maximum-cardinality intersection.

Both matroids here are "at most ``cap(label)`` members per label" systems:
the partition matroid labels elements by group with quota caps, the cluster
matroid labels them by cluster with cap 1. Independence of a set, and of a
set after a one-in/one-out exchange, is decided by counting labels.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .core import Element, InputError, Metric, distances_to

SOURCE = "a"
SINK = "b"


class LabelMatroid:
    """Independent iff every label occurs at most ``cap(label)`` times."""

    def __init__(self, ground: Sequence[Element]):
        self.ground = list(ground)
        self._by_id = {e.id: e for e in self.ground}
        if len(self._by_id) != len(self.ground):
            raise InputError("ground set has duplicate element ids")

    def label(self, x: Element) -> Hashable:
        raise NotImplementedError

    def cap(self, label: Hashable) -> int:
        raise NotImplementedError

    def counts(self, S: Iterable[Element]) -> Counter:
        return Counter(self.label(x) for x in S)

    def is_independent(self, S: Iterable[Element]) -> bool:
        S = list(S)
        for x in S:
            if x.id not in self._by_id:
                raise InputError(f"element {x.id} is not in the ground set")
        return all(n <= self.cap(lab) for lab, n in self.counts(S).items())

    def can_add(self, counts: Counter, x: Element) -> bool:
        """Is ``S + x`` independent, given the label counts of an independent S."""
        lab = self.label(x)
        return counts[lab] + 1 <= self.cap(lab)

    def can_exchange(self, counts: Counter, x: Element, y: Element) -> bool:
        """Is ``S + x - y`` independent (x outside S, y inside S)."""
        lab = self.label(x)
        return counts[lab] + 1 - (self.label(y) == lab) <= self.cap(lab)


class PartitionMatroid(LabelMatroid):
    def __init__(self, ground: Sequence[Element], caps: Sequence[int]):
        super().__init__(ground)
        self.caps = [int(c) for c in caps]
        for x in self.ground:
            if not 0 <= x.group < len(self.caps):
                raise InputError(f"element {x.id} has group {x.group} without a quota")

    def label(self, x: Element) -> int:
        return x.group

    def cap(self, label: int) -> int:
        return self.caps[label]


class ClusterMatroid(LabelMatroid):
    def __init__(self, ground: Sequence[Element], cluster_of: Mapping[int, int]):
        super().__init__(ground)
        missing = [x.id for x in self.ground if x.id not in cluster_of]
        if missing:
            raise InputError(f"elements without a cluster: {missing[:5]}")
        self.cluster_of = dict(cluster_of)

    def label(self, x: Element) -> int:
        return self.cluster_of[x.id]

    def cap(self, label: int) -> int:
        return 1


def is_independent_1(m1: PartitionMatroid, S: Iterable[Element]) -> bool:
    return m1.is_independent(S)


def is_independent_2(m2: ClusterMatroid, S: Iterable[Element]) -> bool:
    return m2.is_independent(S)


@dataclass
class AugmentationGraph:
    """Exchange digraph over the ground set plus a source and a sink node.

    Nodes are element ids plus ``SOURCE``/``SINK``. Successor lists are in
    ascending id order with the sink last.
    """

    edges: dict[Hashable, list[Hashable]]

    def shortest_path(self) -> list[Hashable] | None:
        parent: dict[Hashable, Hashable] = {SOURCE: None}
        queue = deque([SOURCE])
        while queue:
            u = queue.popleft()
            for v in self.edges.get(u, ()):
                if v in parent:
                    continue
                parent[v] = u
                if v == SINK:
                    path = [v]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return path[::-1]
                queue.append(v)
        return None


def build_augmentation_graph(m1: LabelMatroid, m2: LabelMatroid,
                             S: Sequence[Element]) -> AugmentationGraph:
    in_S = {x.id for x in S}
    outside = sorted((x for x in m1.ground if x.id not in in_S), key=lambda e: e.id)
    inside = sorted(S, key=lambda e: e.id)
    c1, c2 = m1.counts(S), m2.counts(S)
    edges: dict[Hashable, list[Hashable]] = {SOURCE: []}
    for x in outside:
        edges.setdefault(x.id, [])
    for y in inside:
        edges.setdefault(y.id, [])
    for x in outside:
        if m1.can_add(c1, x):
            edges[SOURCE].append(x.id)
        else:
            for y in inside:
                if m1.can_exchange(c1, x, y):
                    edges[y.id].append(x.id)
        if not m2.can_add(c2, x):
            for y in inside:
                if m2.can_exchange(c2, x, y):
                    edges[x.id].append(y.id)
    for u in edges:
        edges[u].sort()
    for x in outside:
        if m2.can_add(c2, x):
            edges[x.id].append(SINK)
    return AugmentationGraph(edges)


def augment_once(m1: LabelMatroid, m2: LabelMatroid,
                 S: Sequence[Element]) -> list[Element] | None:
    """Apply one shortest augmenting path; None when S is already maximum."""
    path = build_augmentation_graph(m1, m2, S).shortest_path()
    if path is None:
        return None
    toggled = set(path[1:-1])
    in_S = {x.id for x in S}
    kept = [x for x in S if x.id not in toggled]
    added = [m1._by_id[i] for i in path[1:-1] if i not in in_S]
    return kept + added


def greedy_fill(m1: LabelMatroid, m2: LabelMatroid, metric: Metric,
                S: Sequence[Element]) -> list[Element]:
    """Add elements addable to both matroids, farthest from S first.

    Ties go to the element appearing first in the ground order.
    """
    S = list(S)
    in_S = {x.id for x in S}
    ground = m1.ground
    c1, c2 = m1.counts(S), m2.counts(S)
    cand = [i for i, x in enumerate(ground)
            if x.id not in in_S and m1.can_add(c1, x) and m2.can_add(c2, x)]
    if not cand:
        return S
    pts = np.stack([x.features for x in ground])
    near = np.full(len(ground), math.inf)
    for y in S:
        near = np.minimum(near, distances_to(metric, pts, y.features))
    while cand:
        best = max(cand, key=lambda i: (near[i], -i))
        x = ground[best]
        S.append(x)
        c1[m1.label(x)] += 1
        c2[m2.label(x)] += 1
        near = np.minimum(near, distances_to(metric, pts, x.features))
        cand = [i for i in cand if i != best and m1.can_add(c1, ground[i])
                and m2.can_add(c2, ground[i])]
    return S


def matroid_intersection(m1: LabelMatroid, m2: LabelMatroid, metric: Metric,
                         S0: Iterable[Element]) -> list[Element]:
    """Grow ``S0`` to a maximum-cardinality common independent set.

    A greedy phase first adds elements that keep both matroids independent,
    farthest-first; shortest augmenting paths then finish the job.
    """
    metric = Metric.parse(metric)
    if [x.id for x in m1.ground] != [x.id for x in m2.ground]:
        raise InputError("both matroids must share one ground set")
    S0 = list(S0)
    if not (m1.is_independent(S0) and m2.is_independent(S0)):
        raise InputError("initial set is not independent in both matroids")
    if len({x.id for x in S0}) != len(S0):
        raise InputError("initial set has duplicate elements")
    S = greedy_fill(m1, m2, metric, S0)
    while True:
        nxt = augment_once(m1, m2, S)
        if nxt is None:
            break
        S = nxt
    order = {x.id: i for i, x in enumerate(m1.ground)}
    return sorted(S, key=lambda x: order[x.id])
