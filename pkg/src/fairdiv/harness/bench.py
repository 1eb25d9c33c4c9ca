"""Benchmark runs: configuration, per-permutation timing, result records."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from ..core import GroupedDataset, InfeasibleError, InputError, Metric, diversity, extremal_distances
from ..guesses import GuessLadder, build_ladder
from ..offline import brute_force_opt, gmm
from ..sfdm1 import SFDM1
from ..sfdm2 import SFDM2
from .allocation import allocate_caps

ALGORITHMS = ("sfdm1", "sfdm2", "gmm", "oracle")

CSV_COLUMNS = ["algorithm", "dataset", "m", "k", "eps", "permutation", "diversity",
               "update_time_s", "post_time_s", "stored_elements"]

TIMING_FIELDS = ("update_time_s", "post_time_s")


@dataclass
class RunConfig:
    algorithm: str = "sfdm2"
    k: int = 20
    allocation: str | list[int] = "equal"
    eps: float = 0.1
    metric: str = "euclidean"
    d_min: float | None = None
    d_max: float | None = None
    permutations: int = 1
    seed: int = 0
    workers: int = 1
    dataset: str = "data"

    def validate(self, m: int | None = None) -> None:
        if self.algorithm not in ALGORITHMS:
            raise InputError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.k < 1:
            raise InputError("k must be positive")
        if not 0 < self.eps < 1:
            raise InputError("eps must lie in (0, 1)")
        Metric.parse(self.metric)
        if self.permutations < 1 or self.workers < 1:
            raise InputError("permutations and workers must be positive")
        if (self.d_min is None) != (self.d_max is None):
            raise InputError("give both d_min and d_max, or neither")
        if m is not None and self.algorithm == "sfdm1" and m != 2:
            raise InputError(f"sfdm1 requires exactly 2 groups, dataset has m={m}")


_CONFIG_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _coerce(key: str, value: str) -> Any:
    value = value.strip()
    if key in ("k", "permutations", "seed", "workers"):
        return int(value)
    if key == "eps":
        return float(value)
    if key in ("d_min", "d_max"):
        return None if value.lower() in ("", "none") else float(value)
    if key == "allocation":
        if "," in value or value.isdigit():
            return [int(v) for v in value.split(",") if v.strip()]
        return value
    return value


def parse_config(text: str) -> dict[str, Any]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_TYPES:
            raise InputError(f"config line {lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError:
            raise InputError(f"config line {lineno}: bad value for {key}: {value!r}") from None
    return out


def load_config(path: str | Path, **overrides: Any) -> RunConfig:
    values = parse_config(Path(path).read_text(encoding="utf-8"))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


@dataclass
class PermutationResult:
    permutation: int
    diversity: float
    update_time_s: float
    post_time_s: float
    stored_elements: int
    solution_ids: list[int]
    group_counts: list[int]
    mu: float | None = None


@dataclass
class RunReport:
    config: RunConfig
    n: int
    m: int
    caps: list[int]
    d_min: float | None
    d_max: float | None
    ladder_size: int
    runs: list[PermutationResult] = field(default_factory=list)

    @property
    def diversity(self) -> float:
        return float(np.mean([r.diversity for r in self.runs]))

    @property
    def avg_update_time(self) -> float:
        return float(np.mean([r.update_time_s for r in self.runs]))

    @property
    def postprocess_time(self) -> float:
        return float(np.mean([r.post_time_s for r in self.runs]))

    @property
    def stored_elements(self) -> float:
        return float(np.mean([r.stored_elements for r in self.runs]))

    @property
    def stored_bound(self) -> int | None:
        k = self.config.k
        if self.config.algorithm == "sfdm1":
            return 2 * k * self.ladder_size
        if self.config.algorithm == "sfdm2":
            return (self.m + 1) * k * self.ladder_size
        return None

    def to_record(self, timing: bool = True) -> dict[str, Any]:
        runs = []
        for r in self.runs:
            row = dataclasses.asdict(r)
            if not timing:
                for f in TIMING_FIELDS:
                    row.pop(f)
            runs.append(row)
        rec = {
            "config": dataclasses.asdict(self.config),
            "n": self.n, "m": self.m, "caps": self.caps,
            "d_min": self.d_min, "d_max": self.d_max,
            "ladder_size": self.ladder_size, "stored_bound": self.stored_bound,
            "mean": {"diversity": self.diversity, "stored_elements": self.stored_elements},
            "runs": runs,
        }
        if timing:
            rec["mean"].update(update_time_s=self.avg_update_time,
                               post_time_s=self.postprocess_time)
        return rec

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_record(timing), sort_keys=True)

    def csv_rows(self) -> list[dict[str, Any]]:
        c = self.config
        return [{"algorithm": c.algorithm, "dataset": c.dataset, "m": self.m, "k": c.k,
                 "eps": c.eps, "permutation": r.permutation, "diversity": r.diversity,
                 "update_time_s": r.update_time_s, "post_time_s": r.post_time_s,
                 "stored_elements": r.stored_elements} for r in self.runs]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        if header:
            w.writeheader()
        w.writerows(self.csv_rows())
        return buf.getvalue()


def _run_permutation(config: RunConfig, dataset: GroupedDataset, caps: list[int],
                     ladder: GuessLadder | None, p: int) -> PermutationResult:
    rng = np.random.default_rng([config.seed, p])
    ds = dataset.permuted(rng)
    metric = Metric.parse(config.metric)
    algo_name = config.algorithm
    try:
        if algo_name in ("sfdm1", "sfdm2"):
            algo = (SFDM1 if algo_name == "sfdm1" else SFDM2)(caps, ladder, metric)
            t0 = time.perf_counter()
            for x in ds:
                algo.process(x)
            t1 = time.perf_counter()
            sol = algo.finalize()
            t2 = time.perf_counter()
            elements, mu = sol.elements, sol.mu
            update, post, stored = (t1 - t0) / ds.n, t2 - t1, algo.stored_elements()
        else:
            t0 = time.perf_counter()
            if algo_name == "gmm":
                elements = gmm(ds, metric, config.k)
            else:
                elements = brute_force_opt(ds, metric, config.k, caps).best_set
            update, post, stored, mu = (time.perf_counter() - t0) / ds.n, 0.0, ds.n, None
    except InfeasibleError as exc:
        raise InfeasibleError(f"permutation {p}: {exc}",
                              {**exc.diagnostics, "permutation": p}) from exc
    counts = [0] * dataset.m
    for e in elements:
        counts[e.group] += 1
    return PermutationResult(p, diversity(metric, elements), update, post, stored,
                             sorted(e.id for e in elements), counts, mu)


def run_benchmark(config: RunConfig, dataset: GroupedDataset) -> RunReport:
    config.validate(dataset.m)
    caps = ([] if config.algorithm == "gmm"
            else allocate_caps(config.allocation, config.k, dataset.group_counts))
    d_min, d_max, ladder = config.d_min, config.d_max, None
    if config.algorithm in ("sfdm1", "sfdm2"):
        if d_min is None:
            # permutation-invariant, so computed once
            d_min, d_max = extremal_distances(dataset, config.metric)
        ladder = build_ladder(d_min, d_max, config.eps)
    report = RunReport(config, dataset.n, dataset.m, caps, d_min, d_max,
                       len(ladder) if ladder else 0)
    perms = range(config.permutations)
    if config.workers > 1 and config.permutations > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_run_permutation, config, dataset, caps, ladder, p)
                       for p in perms]
            report.runs = [f.result() for f in futures]
    else:
        report.runs = [_run_permutation(config, dataset, caps, ladder, p) for p in perms]
    return report
