"""Randomised invariant and approximation-ratio checks against the exact oracle.

Each ``check_*`` function runs a seeded batch of small instances and returns
a :class:`CheckResult` listing every violation it found. The ``verify`` CLI
subcommand and the acceptance tests both run these.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import GroupedDataset, Metric, diversity, distance, extremal_distances
from .guesses import Candidate, build_ladder
from .matroid import ClusterMatroid, PartitionMatroid, matroid_intersection
from .offline import brute_force_opt, gmm
from .sfdm1 import SFDM1
from .sfdm2 import SFDM2, GuessOutcome

METRICS = (Metric.EUCLIDEAN, Metric.MANHATTAN, Metric.ANGULAR)


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    violations: list[str] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.violations

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = "".join(f" {k}={v}" for k, v in self.stats.items())
        return f"[{status}] {self.name}: {self.checked} checked, {len(self.violations)} violations{extra}"


def random_caps(rng: np.random.Generator, k: int, m: int) -> list[int]:
    """Uniformly random composition of k into m positive parts."""
    cuts = np.sort(rng.choice(np.arange(1, k), size=m - 1, replace=False)) if m > 1 else []
    bounds = [0, *cuts, k]
    return [int(b - a) for a, b in zip(bounds, bounds[1:])]


def random_instance(rng: np.random.Generator, m: int, k: int, n_max: int = 30,
                    metric: Metric | None = None) -> tuple[GroupedDataset, list[int], Metric]:
    """Small random instance where every group can meet its quota."""
    metric = metric or METRICS[rng.integers(len(METRICS))]
    caps = random_caps(rng, k, m)
    n = int(rng.integers(max(k + 2, 2 * m), n_max + 1))
    groups = np.concatenate([np.repeat(np.arange(m), caps),
                             rng.integers(0, m, size=n - k)])
    rng.shuffle(groups)
    dim = int(rng.integers(1, 4))
    kind = rng.integers(3)
    if kind == 0:
        pts = rng.uniform(0, 10, size=(n, dim))
    elif kind == 1:
        centers = rng.uniform(-10, 10, size=(3, dim))
        pts = centers[rng.integers(3, size=n)] + rng.standard_normal((n, dim))
    else:
        pts = rng.exponential(1.0, size=(n, dim)) * rng.choice([1, 5, 25], size=(n, 1))
    if metric is Metric.ANGULAR:
        if dim == 1:
            pts = np.hstack([pts, rng.uniform(0.1, 1, size=(n, 1))])
        pts = np.where(np.abs(pts) < 1e-9, 1e-3, pts)
    ds = GroupedDataset(np.arange(n), pts, groups, m)
    return ds, caps, metric


def candidate_violations(c: Candidate, metric: Metric) -> list[str]:
    out = []
    if len(c.members) > c.cap:
        out.append(f"mu={c.mu}: {len(c.members)} members exceed cap {c.cap}")
    if c.group_filter is not None and any(e.group != c.group_filter for e in c.members):
        out.append(f"mu={c.mu}: member outside group {c.group_filter}")
    for x, y in itertools.combinations(c.members, 2):
        d = distance(metric, x, y)
        if d < c.mu:
            out.append(f"mu={c.mu}: members {x.id},{y.id} at {d} < mu")
    return out


def clustering_violations(out: GuessOutcome, m: int, metric: Metric) -> list[str]:
    """Exhaustive scan of the three cluster properties for one guess."""
    mu, cl = out.mu, out.clustering
    thr = mu / (m + 1)
    diam = m * mu / (m + 1)
    bad = []
    labels = cl.cluster_of
    for x, y in itertools.combinations(cl.pool, 2):
        d = distance(metric, x, y)
        if labels[x.id] != labels[y.id] and d < thr:
            bad.append(f"mu={mu}: cross-cluster pair {x.id},{y.id} at {d} < {thr}")
        if labels[x.id] == labels[y.id] and not d < diam:
            bad.append(f"mu={mu}: cluster diameter pair {x.id},{y.id} at {d} >= {diam}")
    for source, ids in out.sources.items():
        seen: dict[int, int] = {}
        for i in ids:
            c = labels[i]
            if c in seen:
                bad.append(f"mu={mu}: cluster {c} holds {seen[c]} and {i} from {source}")
            seen[c] = i
    return bad


def _stream(algo, ds: GroupedDataset):
    for x in ds:
        algo.process(x)
    return algo


def check_sfdm1(n_instances: int = 200, seed: int = 0, eps_values: Sequence[float] = (0.1, 0.25),
                n_max: int = 30, k_range: tuple[int, int] = (2, 6)) -> dict[str, CheckResult]:
    """Ratio, fairness, candidate invariants, per-guess bound and memory for SFDM1."""
    rng = np.random.default_rng(seed)
    res = {name: CheckResult(f"sfdm1 {name}") for name in
           ("ratio", "fairness", "candidates", "balanced_bound", "memory")}
    worst = np.inf
    for t in range(n_instances):
        k = int(rng.integers(k_range[0], k_range[1] + 1))
        eps = float(eps_values[t % len(eps_values)])
        ds, caps, metric = random_instance(rng, 2, k, n_max)
        tag = f"instance {t} (k={k}, caps={caps}, eps={eps}, {metric.value})"
        ladder = build_ladder(*extremal_distances(ds, metric), eps)
        algo = _stream(SFDM1(caps, ladder, metric), ds)

        res["candidates"].checked += 1
        for triple in algo.candidates():
            for c in triple:
                res["candidates"].violations += [f"{tag}: {v}" for v in candidate_violations(c, metric)]

        res["balanced_bound"].checked += 1
        for sol in algo.post_process():
            div = diversity(metric, sol.elements)
            if div < sol.mu / 2:
                res["balanced_bound"].violations.append(f"{tag}: mu={sol.mu} balanced diversity {div}")

        sol = algo.finalize()
        res["fairness"].checked += 1
        if sol.group_counts(2) != caps:
            res["fairness"].violations.append(f"{tag}: counts {sol.group_counts(2)}")

        opt = brute_force_opt(ds, metric, k, caps).opt_value
        bound = (1 - eps) / 4 * opt
        res["ratio"].checked += 1
        worst = min(worst, sol.diversity / opt)
        if sol.diversity < bound:
            res["ratio"].violations.append(f"{tag}: {sol.diversity} < {bound} (OPT_f={opt})")

        res["memory"].checked += 1
        limit = 2 * k * len(ladder)
        if algo.stored_elements() > limit:
            res["memory"].violations.append(f"{tag}: stored {algo.stored_elements()} > {limit}")
    res["ratio"].stats["worst_ratio"] = round(float(worst), 4)
    return res


def check_sfdm2(n_instances: int = 200, seed: int = 0, m_values: Sequence[int] = (2, 3, 4),
                eps_values: Sequence[float] = (0.1, 0.25), n_max: int = 30,
                k_range: tuple[int, int] = (2, 6)) -> dict[str, CheckResult]:
    """Ratio, fairness, candidate invariants, clustering properties, per-guess bound, memory for SFDM2."""
    rng = np.random.default_rng(seed)
    res = {name: CheckResult(f"sfdm2 {name}") for name in
           ("ratio", "fairness", "candidates", "clustering", "winner_bound", "memory", "touches")}
    worst = np.inf
    for t in range(n_instances):
        m = int(m_values[t % len(m_values)])
        k = int(rng.integers(max(k_range[0], m), k_range[1] + 1))
        eps = float(eps_values[(t // len(m_values)) % len(eps_values)])
        ds, caps, metric = random_instance(rng, m, k, n_max)
        tag = f"instance {t} (m={m}, k={k}, caps={caps}, eps={eps}, {metric.value})"
        ladder = build_ladder(*extremal_distances(ds, metric), eps)
        algo = _stream(SFDM2(caps, ladder, metric), ds)

        res["candidates"].checked += 1
        for blind, spec in algo.candidates():
            for c in (blind, *spec):
                res["candidates"].violations += [f"{tag}: {v}" for v in candidate_violations(c, metric)]

        # every element is offered to the blind candidate and exactly one group candidate
        res["touches"].checked += 1
        offers = algo.blind.offers + sum(b.offers for b in algo.spec)
        if offers != 2 * ds.n:
            res["touches"].violations.append(f"{tag}: {offers} bank offers for {ds.n} elements")

        res["clustering"].checked += 1
        for out in algo.post_process():
            res["clustering"].violations += [f"{tag}: {v}" for v in clustering_violations(out, m, metric)]

        sol = algo.finalize()
        res["fairness"].checked += 1
        if sol.group_counts(m) != caps:
            res["fairness"].violations.append(f"{tag}: counts {sol.group_counts(m)}")

        res["winner_bound"].checked += 1
        if sol.diversity < sol.mu / (m + 1):
            res["winner_bound"].violations.append(f"{tag}: {sol.diversity} < mu/(m+1) for mu={sol.mu}")

        opt = brute_force_opt(ds, metric, k, caps).opt_value
        bound = (1 - eps) / (3 * m + 2) * opt
        res["ratio"].checked += 1
        worst = min(worst, sol.diversity / opt)
        if sol.diversity < bound:
            res["ratio"].violations.append(f"{tag}: {sol.diversity} < {bound} (OPT_f={opt})")

        res["memory"].checked += 1
        limit = (m + 1) * k * len(ladder)
        if algo.stored_elements() > limit:
            res["memory"].violations.append(f"{tag}: stored {algo.stored_elements()} > {limit}")
    res["ratio"].stats["worst_ratio"] = round(float(worst), 4)
    return res


def check_gmm(n_instances: int = 200, seed: int = 0, n_max: int = 30) -> dict[str, CheckResult]:
    rng = np.random.default_rng(seed)
    half = CheckResult("gmm half-approximation")
    upper = CheckResult("gmm upper bound on OPT_f")
    for t in range(n_instances):
        m = int(rng.integers(1, 4))
        k = int(rng.integers(max(2, m), 7))
        ds, caps, metric = random_instance(rng, m, k, n_max)
        div = diversity(metric, gmm(ds, metric, k))
        opt = brute_force_opt(ds, metric, k).opt_value
        opt_f = brute_force_opt(ds, metric, k, caps).opt_value
        half.checked += 1
        if div < opt / 2:
            half.violations.append(f"instance {t}: gmm {div} < OPT/2 = {opt / 2}")
        upper.checked += 1
        if 2 * div < opt_f or opt_f > opt:
            upper.violations.append(f"instance {t}: 2*gmm={2 * div}, OPT_f={opt_f}, OPT={opt}")
    return {"half": half, "upper": upper}


def max_common_independent(m1: PartitionMatroid, m2: ClusterMatroid) -> int:
    """Largest common independent set size by enumerating every subset."""
    ground = m1.ground
    for size in range(len(ground), -1, -1):
        for S in itertools.combinations(ground, size):
            if m1.is_independent(S) and m2.is_independent(S):
                return size
    return 0


def random_matroid_instance(rng: np.random.Generator, max_ground: int = 12):
    from .core import make_element

    n = int(rng.integers(1, max_ground + 1))
    m = int(rng.integers(1, 5))
    ground = [make_element(i, rng.uniform(0, 10, size=2), int(rng.integers(m))) for i in range(n)]
    caps = [int(c) for c in rng.integers(0, 4, size=m)]
    n_clusters = int(rng.integers(1, n + 1))
    cluster_of = {e.id: int(rng.integers(n_clusters)) for e in ground}
    m1, m2 = PartitionMatroid(ground, caps), ClusterMatroid(ground, cluster_of)
    # random common-independent seed
    S0 = []
    for e in rng.permutation(n):
        x = ground[int(e)]
        if rng.random() < 0.5 and m1.is_independent(S0 + [x]) and m2.is_independent(S0 + [x]):
            S0.append(x)
    return m1, m2, S0


def check_matroid(n_instances: int = 200, seed: int = 0, max_ground: int = 12) -> dict[str, CheckResult]:
    rng = np.random.default_rng(seed)
    opt = CheckResult("matroid intersection optimality")
    indep = CheckResult("matroid intersection independence")
    for t in range(n_instances):
        m1, m2, S0 = random_matroid_instance(rng, max_ground)
        S = matroid_intersection(m1, m2, Metric.EUCLIDEAN, S0)
        indep.checked += 1
        if not (m1.is_independent(S) and m2.is_independent(S)):
            indep.violations.append(f"instance {t}: output not common-independent")
        best = max_common_independent(m1, m2)
        opt.checked += 1
        if len(S) != best:
            opt.violations.append(f"instance {t}: size {len(S)} != optimum {best}")
    return {"optimality": opt, "independence": indep}


def run_all(n_instances: int = 200, seed: int = 0) -> list[CheckResult]:
    out: list[CheckResult] = []
    out += check_sfdm1(n_instances, seed).values()
    out += check_sfdm2(n_instances, seed + 1).values()
    out += check_gmm(n_instances, seed + 2).values()
    out += check_matroid(n_instances, seed + 3).values()
    return out
