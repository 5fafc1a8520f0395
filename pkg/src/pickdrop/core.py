"""Pick-and-drop sampling: one-pass runs with constant state.

The hot loops live in a compiled extension (``pickdrop._kernel``) when it is
available; otherwise a pure-Python twin (``pickdrop._kernel_py``) is used.
Both produce bit-identical results for the same seed.  Set
``PICKDROP_FORCE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .stream import SENTINEL, MatrixOverlay

if os.environ.get("PICKDROP_FORCE_PYTHON"):
    from . import _kernel_py as _impl
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as _impl

KERNEL_NAME: str = _impl.KERNEL_NAME


@dataclass(frozen=True)
class PickDropConfig:
    r: int
    t: int
    lam: int
    seed: int = 0

    def __post_init__(self):
        if self.r < 1 or self.t < 1 or self.lam < 1:
            raise ValueError("r, t and lambda must all be >= 1")


@dataclass(frozen=True)
class Estimate:
    """(element, frequency lower bound) produced by a run or an orchestrator."""

    element: int
    count: int

    @property
    def is_sentinel(self) -> bool:
        return self.element == SENTINEL

    def better_than(self, other: "Estimate") -> bool:
        """Max by count, ties broken towards the smaller element id."""
        if self.is_sentinel:
            return False
        if other.is_sentinel:
            return True
        return (self.count, -self.element) > (other.count, -other.element)


SENTINEL_ESTIMATE = Estimate(element=SENTINEL, count=0)


class PickDropState:
    """Incremental run state: a fixed set of counters, two ids and an RNG.

    Feeding items one by one reproduces the array-based kernels exactly for
    the same seed.  The slot list is the whole state; nothing here grows with
    the stream length or the universe size.
    """

    __slots__ = ("r", "t", "lam", "_state", "_row", "_col",
                 "S", "C", "q", "_I", "_s", "_c", "_g")

    def __init__(self, cfg: PickDropConfig):
        self.r = cfg.r
        self.t = cfg.t
        self.lam = cfg.lam
        self._state = _impl.derive_seed(cfg.seed, 0)
        self._row = 0
        self._col = 0
        self.S = 0
        self.C = 0
        self.q = 0
        self._begin_row()

    def _begin_row(self):
        from ._kernel_py import _bounded  # scalar draw shared with the fallback

        self._state, self._I = _bounded(self._state, self.t)
        self._s = -1
        self._c = 0
        self._g = 0

    def update(self, item: int) -> None:
        if self._row >= self.r:
            raise ValueError("run already consumed r*t items")
        v = int(item)
        if v != 0 and v == self.S:
            self._g += 1
        if self._col == self._I:
            self._s = v
            self._c = 1 if v != 0 else 0
        elif self._col > self._I and v == self._s and v != 0:
            self._c += 1
        self._col += 1
        if self._col == self.t:
            self._end_row()

    def _end_row(self):
        if self._row == 0 or self.C < max(self.lam * self.q, self._c):
            self.S, self.C, self.q = self._s, self._c, 1
        else:
            self.C += self._g
            self.q += 1
        self._row += 1
        self._col = 0
        if self._row < self.r:
            self._begin_row()

    @property
    def complete(self) -> bool:
        return self._row == self.r

    def result(self) -> Estimate:
        if not self.complete:
            raise ValueError("source ended before r*t items were seen")
        if self.S <= 0:
            return SENTINEL_ESTIMATE
        return Estimate(element=self.S, count=self.C)


def run(ov: MatrixOverlay, cfg: PickDropConfig) -> Estimate:
    """One run over a materialized overlay; output (S_r, C_r)."""
    if ov.r != cfg.r or ov.t != cfg.t:
        raise ValueError(
            f"overlay is {ov.r}x{ov.t} but config says {cfg.r}x{cfg.t}"
        )
    S, C = _impl.pd_run(ov.padded, cfg.r, cfg.t, cfg.lam, cfg.seed)
    if S <= 0:
        return SENTINEL_ESTIMATE
    return Estimate(element=int(S), count=int(C))


def run_streaming(items, cfg: PickDropConfig) -> Estimate:
    """Pull-based run over a one-pass item source; identical to `run` for the
    same seed.  The source must yield exactly r*t items."""
    state = PickDropState(cfg)
    seen = 0
    for item in items:
        seen += 1
        if seen > cfg.r * cfg.t:
            raise ValueError(f"source longer than r*t = {cfg.r * cfg.t}")
        state.update(item)
    return state.result()


def run_with_indices(ov: MatrixOverlay, lam: int, indices) -> Estimate:
    """Deterministic run with injected 0-based column indices."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.shape != (ov.r,):
        raise ValueError(f"need exactly {ov.r} indices")
    S, C = _impl.pd_run_indices(ov.padded, ov.r, ov.t, lam, idx)
    if S <= 0:
        return SENTINEL_ESTIMATE
    return Estimate(element=int(S), count=int(C))


def precompute_tables(items: np.ndarray, r: int, t: int):
    """Suffix counts per cell and per-row frequency tables for fast batch runs.

    Returns (d, uniq, cnt, off): d[idx] is the suffix count of cell idx with 0
    on padding cells; uniq/cnt/off is a CSR layout of row frequency maps.
    """
    items = np.ascontiguousarray(items, dtype=np.uint32)
    if items.size != r * t:
        raise ValueError(f"expected {r * t} cells, got {items.size}")
    d = np.zeros(r * t, dtype=np.int64)
    uniq_parts = []
    cnt_parts = []
    off = np.zeros(r + 1, dtype=np.int64)
    for i in range(r):
        row = items[i * t : (i + 1) * t]
        seen: Counter = Counter()
        for j in range(t - 1, -1, -1):
            v = int(row[j])
            if v != 0:
                seen[v] += 1
                d[i * t + j] = seen[v]
        keys = np.fromiter(sorted(seen), dtype=np.uint32, count=len(seen))
        uniq_parts.append(keys)
        cnt_parts.append(
            np.fromiter((seen[int(k)] for k in keys), dtype=np.int64, count=len(keys))
        )
        off[i + 1] = off[i] + len(keys)
    uniq = np.concatenate(uniq_parts) if uniq_parts else np.zeros(0, dtype=np.uint32)
    cnt = np.concatenate(cnt_parts) if cnt_parts else np.zeros(0, dtype=np.int64)
    return d, uniq, cnt, off


def run_many(ov: MatrixOverlay, lam: int, n_runs: int, seed: int,
             tables=None) -> tuple[np.ndarray, np.ndarray]:
    """n_runs independent runs; run u uses the stream derived from (seed, u).

    Returns (S, C) arrays; S == 0 marks runs that ended on a padding cell.
    """
    if tables is None:
        tables = precompute_tables(ov.padded, ov.r, ov.t)
    d, uniq, cnt, off = tables
    return _impl.pd_run_many(
        ov.padded, d, uniq, cnt, off, ov.r, ov.t, lam, n_runs, seed
    )


def winning_count(u, w) -> int:
    return _impl.winning_count(np.asarray(u), np.asarray(w))


def lemma_sweep(max_len: int, max_entry: int) -> tuple[int, int, int]:
    return _impl.lemma_sweep(max_len, max_entry)
