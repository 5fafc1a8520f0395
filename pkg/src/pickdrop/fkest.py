"""(1 +- eps) frequency-moment estimation built on the heavy-element finder.

A standard subsample-and-recover scheme: nested random substreams at rates
2^-j, one recovered candidate per level charged at its shallowest recovery
level, and an exact small-support tail once the substream is narrow enough.
This is an engineering substitution for a recursive-sketch composition; its
accuracy is validated empirically, not proven.
"""

from __future__ import annotations

import math
import statistics

import numpy as np

from . import _kernel_py as _scalar
from .heavy import HeavyHitterConfig, find_heavy
from .stream import SENTINEL

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _hash64_array(items: np.ndarray, seed: int) -> np.ndarray:
    """Vectorized twin of the scalar splitmix mix used in level_substream."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed & ((1 << 64) - 1)) + items.astype(np.uint64) * _GOLDEN
        z = z ^ (z >> np.uint64(30))
        z = z * _M1
        z = z ^ (z >> np.uint64(27))
        z = z * _M2
        z = z ^ (z >> np.uint64(31))
    return z


def _hash64(item: int, seed: int) -> int:
    return _scalar._mix((seed + item * 0x9E3779B97F4A7C15) & ((1 << 64) - 1))


def level_substream(item: int, level: int, seed: int) -> bool:
    """Deterministic per-(id, seed) inclusion at rate 2^-level.

    Inclusion thresholds are nested prefixes of one 64-bit hash, so inclusion
    at level j implies inclusion at every shallower level.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    if level == 0:
        return True
    if level >= 64:
        return False
    return _hash64(item, seed) < (1 << (64 - level))


def tail_budget(n: int, k: int, scale: int = 32) -> int:
    """Distinct-id budget for the exact tail estimate."""
    return max(64, scale * math.ceil(n ** (1.0 - 2.0 / k)))


def _one_estimate(items: np.ndarray, n: int, k: int, eps: float,
                  seed: int, max_levels: int, budget: int) -> float:
    if items.size == 0:
        return 0.0
    hashes = _hash64_array(items, seed)
    eps_hh = eps / (2.0 * k)
    recovered: dict[int, tuple[int, int]] = {}  # id -> (level, count bound)
    sub = items
    sub_h = hashes
    level = 0
    while True:
        if recovered:
            dead = np.isin(sub, np.fromiter(recovered, dtype=np.uint32))
            live = sub[~dead]
        else:
            live = sub
        distinct = int(np.unique(live).size)
        if distinct <= budget or level >= max_levels or live.size == 0:
            break
        cfg = HeavyHitterConfig(
            n=n, k=k, eps=eps_hh, length=int(live.size),
            seed=_scalar.derive_seed(seed, 7000 + level),
        )
        cand = find_heavy(iter(live.tolist()), cfg)
        if cand.element != SENTINEL and cand.element not in recovered:
            recovered[cand.element] = (level, cand.count)
        level += 1
        keep = sub_h < np.uint64(1 << (64 - level))
        sub = sub[keep]
        sub_h = sub_h[keep]

    total = 0.0
    for _, (lev, count) in recovered.items():
        total += float(2**lev) * float(count) ** k
    if live.size:
        _, tail_counts = np.unique(live, return_counts=True)
        total += float(2**level) * float(np.sum(tail_counts.astype(float) ** k))
    return total


def estimate_fk(items, n: int, k: int, eps: float, seed: int = 0,
                levels: int | None = None, trials: int = 5,
                budget_scale: int = 32) -> float:
    """Median-of-trials estimate of the k-th frequency moment in one logical
    pass per trial over a buffered copy of the source."""
    if k < 3:
        raise ValueError("k must be >= 3")
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    arr = np.fromiter((int(v) for v in items), dtype=np.uint32)
    max_levels = levels if levels is not None else max(1, math.ceil(math.log2(max(2, n))))
    budget = tail_budget(n, k, budget_scale)
    estimates = [
        _one_estimate(arr, n, k, eps, _scalar.derive_seed(seed, 31 + trial),
                      max_levels, budget)
        for trial in range(trials)
    ]
    return float(statistics.median(estimates))
