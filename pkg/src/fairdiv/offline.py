"""Offline references: farthest-point greedy and an exact enumeration oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Element,
    GroupedDataset,
    InfeasibleError,
    InputError,
    Metric,
    distances_to,
    diversity,
    pairwise_matrix,
)

ORACLE_MAX_N = 30


def gmm(dataset: GroupedDataset, metric: Metric, k: int) -> list[Element]:
    """Farthest-point greedy seeded with the first element; ties to earliest."""
    metric = Metric.parse(metric)
    n = dataset.n
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= k <= n, got k={k}, n={n}")
    pts = dataset.features
    chosen = [0]
    near = distances_to(metric, pts, pts[0])
    for _ in range(k - 1):
        near[chosen] = -1.0
        nxt = int(np.argmax(near))  # argmax returns the first maximum
        chosen.append(nxt)
        near = np.minimum(near, distances_to(metric, pts, pts[nxt]))
    return [dataset.element(i) for i in chosen]


@dataclass(frozen=True)
class OracleResult:
    best_set: tuple[Element, ...]
    opt_value: float
    fair: bool

    @property
    def ids(self) -> list[int]:
        return sorted(e.id for e in self.best_set)


def brute_force_opt(dataset: GroupedDataset, metric: Metric, k: int,
                    caps: Sequence[int] | None = None,
                    max_n: int = ORACLE_MAX_N) -> OracleResult:
    """Exact max-min diversity over size-k subsets, optionally with group quotas.

    Subsets are visited depth-first in lexicographic order of element id and
    a branch is cut once its running minimum cannot beat the incumbent, so
    the lexicographically smallest optimal subset is returned.
    """
    metric = Metric.parse(metric)
    n = dataset.n
    if n > max_n:
        raise InputError(f"oracle limited to n <= {max_n} (got {n}); raise max_n to override")
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= k <= n, got k={k}, n={n}")
    fair = caps is not None
    if fair:
        caps = [int(c) for c in caps]
        if len(caps) != dataset.m or sum(caps) != k or min(caps) < 0:
            raise InputError(f"quotas {caps} must cover {dataset.m} groups and sum to k={k}")
        have = dataset.group_counts
        short = [i for i in range(dataset.m) if have[i] < caps[i]]
        if short:
            raise InfeasibleError(f"groups {short} have fewer elements than their quota",
                                  {"group_counts": have, "caps": caps})

    order = np.argsort(dataset.ids, kind="stable")
    pts = dataset.features[order]
    groups = dataset.groups[order].tolist()
    D = pairwise_matrix(metric, pts)
    m = dataset.m
    # suffix[i][g]: elements of group g at positions >= i
    suffix = np.zeros((n + 1, m), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1]
        suffix[i, groups[i]] += 1

    best_val = -math.inf
    best: list[int] = []
    chosen: list[int] = []
    counts = [0] * m

    def feasible_after(i: int) -> bool:
        if not fair:
            return n - i >= k - len(chosen)
        return all(suffix[i, g] >= caps[g] - counts[g] for g in range(m))

    def dfs(start: int, cur: float) -> None:
        nonlocal best_val, best
        if len(chosen) == k:
            if cur > best_val:
                best_val, best = cur, list(chosen)
            return
        for i in range(start, n):
            g = groups[i]
            if fair and counts[g] >= caps[g]:
                continue
            new = min(cur, float(D[i, chosen].min())) if chosen else cur
            if new <= best_val:
                continue
            chosen.append(i)
            counts[g] += 1
            if feasible_after(i + 1):
                dfs(i + 1, new)
            chosen.pop()
            counts[g] -= 1
            if not fair and n - i - 1 < k - len(chosen):
                break

    dfs(0, math.inf)
    if not best:
        raise InfeasibleError("no feasible subset found", {"caps": caps})
    elements = tuple(dataset.element(int(order[i])) for i in best)
    return OracleResult(elements, diversity(metric, elements), fair)
