"""Elements, metrics and the max-min diversity objective."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

log = logging.getLogger(__name__)

INF = math.inf

# Above this many elements extremal_distances stops scanning all pairs.
BRUTE_FORCE_LIMIT = 20_000


class InputError(ValueError):
    """Malformed input: bad dimensions, out-of-range groups, bad parameters."""


class InfeasibleError(RuntimeError):
    """No feasible solution could be produced for the requested constraints."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class Metric(str, Enum):
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"
    ANGULAR = "angular"

    @classmethod
    def parse(cls, value: "Metric | str") -> "Metric":
        try:
            return cls(value)
        except ValueError:
            raise InputError(f"unknown metric {value!r}; expected one of "
                             f"{[m.value for m in cls]}") from None


def distances_to(metric: Metric, points: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Distances from every vector along the last axis of ``points`` to ``y``.

    ``points`` may have any number of leading axes. Every distance in the
    package goes through this kernel so that values are bit-identical no
    matter which code path asked for them.
    """
    if metric is Metric.EUCLIDEAN:
        diff = points - y
        return np.sqrt((diff * diff).sum(axis=-1))
    if metric is Metric.MANHATTAN:
        return np.abs(points - y).sum(axis=-1)
    if metric is Metric.ANGULAR:
        with np.errstate(invalid="ignore", divide="ignore"):
            dot = (points * y).sum(axis=-1)
            # sqrt(a*b) keeps d(x, x) == 0 exactly and the kernel symmetric
            norm = np.sqrt((points * points).sum(axis=-1) * (y * y).sum())
            cos = np.clip(dot / norm, -1.0, 1.0)
        return np.arccos(cos)
    raise InputError(f"unsupported metric {metric!r}")


def pairwise_matrix(metric: Metric, points: np.ndarray) -> np.ndarray:
    """Full symmetric distance matrix of the rows of ``points``."""
    n = len(points)
    out = np.zeros((n, n))
    for i in range(n):
        out[i] = distances_to(metric, points, points[i])
    return out


@dataclass(frozen=True, eq=False)
class Element:
    """One stream item. Identity (equality, hashing) is the id alone."""

    id: int
    features: np.ndarray
    group: int

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Element) and other.id == self.id

    def __hash__(self) -> int:
        return hash(self.id)

    def __repr__(self) -> str:
        return f"Element(id={self.id}, group={self.group}, features={self.features.tolist()})"


def make_element(id: int, features: Sequence[float], group: int = 0) -> Element:
    return Element(int(id), np.asarray(features, dtype=np.float64).reshape(-1), int(group))


def _check_pair(metric: Metric, x: Element, y: Element) -> None:
    if x.features.shape != y.features.shape:
        raise InputError(f"dimension mismatch: {x.features.shape} vs {y.features.shape}")
    if metric is Metric.ANGULAR:
        for e in (x, y):
            if not np.any(e.features):
                raise InputError(f"element {e.id} is the zero vector; angular distance undefined")


def distance(metric: Metric, x: Element, y: Element) -> float:
    metric = Metric.parse(metric)
    _check_pair(metric, x, y)
    return float(distances_to(metric, x.features[None, :], y.features)[0])


def set_distance(metric: Metric, x: Element, S: Iterable[Element]) -> float:
    """Distance from ``x`` to its nearest neighbour in ``S``; +inf for empty S."""
    S = list(S)
    if not S:
        return INF
    metric = Metric.parse(metric)
    for y in S:
        _check_pair(metric, x, y)
    pts = np.stack([y.features for y in S])
    return float(distances_to(metric, pts, x.features).min())


def diversity(metric: Metric, S: Iterable[Element]) -> float:
    """Minimum pairwise distance of ``S``; +inf when ``|S| <= 1``."""
    S = list(S)
    if len(S) <= 1:
        return INF
    metric = Metric.parse(metric)
    pts = np.stack([e.features for e in S])
    best = INF
    for i in range(len(S) - 1):
        best = min(best, float(distances_to(metric, pts[i + 1:], pts[i]).min()))
    return best


@dataclass(frozen=True, eq=False)
class GroupedDataset:
    """An ordered collection of elements (order = arrival order) in ``m`` groups."""

    ids: np.ndarray
    features: np.ndarray
    groups: np.ndarray
    m: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64)
        feats = np.asarray(self.features, dtype=np.float64)
        groups = np.asarray(self.groups, dtype=np.int64)
        if feats.ndim != 2:
            raise InputError("features must be a 2-D array (n, dim)")
        if not (len(ids) == len(feats) == len(groups)):
            raise InputError("ids, features and groups must have equal length")
        if self.m < 1:
            raise InputError("group count m must be >= 1")
        if len(groups) and (groups.min() < 0 or groups.max() >= self.m):
            raise InputError(f"group labels must lie in [0, {self.m - 1}]")
        if len(ids) and (ids.min() < 0 or len(np.unique(ids)) != len(ids)):
            raise InputError("ids must be unique non-negative integers")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "groups", groups)

    @classmethod
    def from_elements(cls, elements: Sequence[Element], m: int | None = None) -> "GroupedDataset":
        elements = list(elements)
        if not elements:
            raise InputError("empty dataset")
        dims = {e.features.shape for e in elements}
        if len(dims) != 1:
            raise InputError(f"inconsistent feature dimensions {sorted(dims)}")
        groups = [e.group for e in elements]
        return cls(
            ids=np.array([e.id for e in elements]),
            features=np.stack([e.features for e in elements]),
            groups=np.array(groups),
            m=m if m is not None else max(groups) + 1,
        )

    @classmethod
    def from_arrays(cls, features, groups=None, m: int | None = None) -> "GroupedDataset":
        feats = np.asarray(features, dtype=np.float64)
        if feats.ndim == 1:
            feats = feats[:, None]
        groups = np.zeros(len(feats), dtype=np.int64) if groups is None else np.asarray(groups)
        if m is None:
            m = int(groups.max()) + 1 if len(groups) else 1
        return cls(np.arange(len(feats)), feats, groups, m)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def group_counts(self) -> list[int]:
        return np.bincount(self.groups, minlength=self.m).tolist()

    def element(self, i: int) -> Element:
        return Element(int(self.ids[i]), self.features[i], int(self.groups[i]))

    def __getitem__(self, i: int) -> Element:
        return self.element(i)

    def __iter__(self) -> Iterator[Element]:
        for i in range(len(self.ids)):
            yield Element(int(self.ids[i]), self.features[i], int(self.groups[i]))

    def take(self, index) -> "GroupedDataset":
        index = np.asarray(index)
        return GroupedDataset(self.ids[index], self.features[index], self.groups[index], self.m,
                              self.labels)

    def permuted(self, rng: np.random.Generator) -> "GroupedDataset":
        return self.take(rng.permutation(self.n))


# ---------------------------------------------------------------------------
# extremal distances


def _brute_extremes(metric: Metric, pts: np.ndarray) -> tuple[float, float]:
    d_min, d_max = INF, 0.0
    for i in range(len(pts) - 1):
        row = distances_to(metric, pts[i + 1:], pts[i])
        d_max = max(d_max, float(row.max()))
        pos = row[row > 0]
        if len(pos):
            d_min = min(d_min, float(pos.min()))
    return d_min, d_max


def _tree_min(metric: Metric, pts: np.ndarray) -> float:
    from scipy.spatial import cKDTree

    uniq = np.unique(pts, axis=0)
    if len(uniq) < 2:
        return INF
    p = 2 if metric is Metric.EUCLIDEAN else 1
    dist, idx = cKDTree(uniq).query(uniq, k=2, p=p)
    nn = dist[:, 1]
    # re-evaluate near-minimal pairs with the package kernel for exactness
    close = np.flatnonzero(nn <= nn.min() * (1 + 1e-9) + 1e-300)
    return min(
        float(distances_to(metric, uniq[idx[i, 1]][None, :], uniq[i])[0]) for i in close
    )


def _extreme_candidates(metric: Metric, pts: np.ndarray) -> np.ndarray | None:
    """Points guaranteed to contain a farthest pair, or None if unavailable."""
    dim = pts.shape[1]
    if metric is Metric.EUCLIDEAN and dim <= 3:
        from scipy.spatial import ConvexHull
        from scipy.spatial import QhullError

        try:
            return pts[ConvexHull(pts).vertices]
        except (QhullError, ValueError):
            return None
    if metric is Metric.MANHATTAN and dim <= 12:
        # the l1 diameter is attained at an extreme point of some sign direction
        signs = np.array(np.meshgrid(*[[1.0, -1.0]] * dim)).reshape(dim, -1).T
        proj = pts @ signs.T
        idx = np.unique(np.concatenate([proj.argmax(axis=0), proj.argmin(axis=0)]))
        return pts[idx]
    return None


def extremal_distances(dataset: GroupedDataset, metric: Metric) -> tuple[float, float]:
    """Exact ``(d_min, d_max)`` over pairs; zero-distance pairs are skipped for d_min."""
    metric = Metric.parse(metric)
    if dataset.n < 2:
        raise InputError("need at least 2 elements to compute distance bounds")
    pts = dataset.features
    if metric is Metric.ANGULAR and not np.all(np.any(pts, axis=1)):
        raise InputError("zero vector present; angular distance undefined")

    if dataset.n <= BRUTE_FORCE_LIMIT or metric is Metric.ANGULAR:
        d_min, d_max = _brute_extremes(metric, pts)
    else:
        d_min = _tree_min(metric, pts)
        cand = _extreme_candidates(metric, np.unique(pts, axis=0))
        if cand is None:
            log.warning("no fast diameter path for %s in dim %d; scanning all pairs",
                        metric.value, pts.shape[1])
            d_max = _brute_extremes(metric, pts)[1]
        else:
            d_max = _brute_extremes(metric, cand)[1]
    if d_max <= 0 or math.isinf(d_min):
        raise InputError("all pairwise distances are zero")
    return d_min, d_max


@dataclass(frozen=True)
class FairSolution:
    """A size-k selection meeting every group quota, with its diversity."""

    elements: tuple[Element, ...]
    diversity: float
    mu: float | None = None

    @property
    def ids(self) -> list[int]:
        return sorted(e.id for e in self.elements)

    def group_counts(self, m: int) -> list[int]:
        counts = [0] * m
        for e in self.elements:
            counts[e.group] += 1
        return counts
