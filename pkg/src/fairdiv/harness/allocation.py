"""Per-group quota allocation."""

from __future__ import annotations

from typing import Sequence

from ..core import InputError


def allocate_caps(kind: str | Sequence[int], k: int, group_counts: Sequence[int]) -> list[int]:
    """Quotas k_i summing to k, each at least 1.

    ``equal`` gives the first ``k mod m`` groups one extra; ``proportional``
    apportions ``k * |X_i| / n`` by largest remainder. A sequence is taken
    as explicit quotas and only validated.
    """
    m = len(group_counts)
    if m < 1:
        raise InputError("no groups")
    if not isinstance(kind, str):
        caps = [int(c) for c in kind]
        if len(caps) != m:
            raise InputError(f"got {len(caps)} explicit quotas for {m} groups")
        if min(caps) < 1 or sum(caps) != k:
            raise InputError(f"explicit quotas {caps} must be positive and sum to k={k}")
        return caps
    if k < m:
        raise InputError(f"k={k} is smaller than the number of groups m={m}")
    if kind == "equal":
        q, r = divmod(k, m)
        return [q + 1 if i < r else q for i in range(m)]
    if kind == "proportional":
        n = sum(group_counts)
        if n <= 0:
            raise InputError("empty dataset")
        quota = [k * c / n for c in group_counts]
        caps = [max(1, int(q)) for q in quota]
        # ties on remainder go to the earlier group
        while sum(caps) < k:
            i = max(range(m), key=lambda g: (quota[g] - caps[g], -g))
            caps[i] += 1
        while sum(caps) > k:
            i = min((g for g in range(m) if caps[g] > 1), key=lambda g: (quota[g] - caps[g], g))
            caps[i] -= 1
        return caps
    raise InputError(f"unknown allocation {kind!r}; expected equal, proportional or a list")
