"""CSV ingestion and synthetic blob generation."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import numpy as np

from ..core import GroupedDataset, InputError

N_BLOBS = 10
BLOB_BOX = 10.0


def load_csv(path: str | Path, feature_columns: Sequence[str] | None = None,
             group_column: str = "group", normalize: bool = False) -> GroupedDataset:
    """Read a dataset; row order is arrival order.

    Group labels are arbitrary strings mapped to 0, 1, ... by first
    appearance. ``feature_columns=None`` takes every column except the
    group column.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if group_column not in header:
            raise InputError(f"{path}: unknown group column {group_column!r}")
        if feature_columns is None:
            feature_columns = [h for h in header if h != group_column]
        unknown = [c for c in feature_columns if c not in header]
        if unknown:
            raise InputError(f"{path}: unknown feature columns {unknown}")
        if not feature_columns:
            raise InputError(f"{path}: no feature columns")
        fidx = [header.index(c) for c in feature_columns]
        gidx = header.index(group_column)

        labels: dict[str, int] = {}
        rows, groups = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(row[i]) for i in fidx])
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-numeric feature value") from None
            groups.append(labels.setdefault(row[gidx].strip(), len(labels)))

    if not rows:
        raise InputError(f"{path}: no data rows")
    feats = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(feats)):
        raise InputError(f"{path}: non-finite feature values")
    if normalize:
        std = feats.std(axis=0)
        flat = [feature_columns[i] for i in np.flatnonzero(std == 0)]
        if flat:
            raise InputError(f"{path}: cannot normalize constant columns {flat}")
        feats = (feats - feats.mean(axis=0)) / std
    return GroupedDataset(np.arange(len(rows)), feats, np.array(groups), len(labels),
                          tuple(labels))


def write_csv(dataset: GroupedDataset, path: str | Path) -> None:
    path = Path(path)
    labels = dataset.labels
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{j}" for j in range(dataset.dim)] + ["group"])
        for row, g in zip(dataset.features, dataset.groups):
            w.writerow([repr(float(v)) for v in row] + [labels[g] if labels else str(int(g))])


def generate_blobs(n: int, m: int, seed: int, dim: int = 2) -> GroupedDataset:
    """Ten isotropic unit-variance Gaussian blobs with centres uniform in
    ``[-10, 10]^dim``; group labels uniform over ``m``; rows shuffled."""
    if n < 1 or m < 1:
        raise InputError("need n >= 1 and m >= 1")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-BLOB_BOX, BLOB_BOX, size=(N_BLOBS, dim))
    sizes = np.full(N_BLOBS, n // N_BLOBS)
    sizes[: n % N_BLOBS] += 1
    which = np.repeat(np.arange(N_BLOBS), sizes)
    feats = centers[which] + rng.standard_normal((n, dim))
    feats = feats[rng.permutation(n)]
    groups = rng.integers(0, m, size=n)
    return GroupedDataset(np.arange(n), feats, groups, m)
