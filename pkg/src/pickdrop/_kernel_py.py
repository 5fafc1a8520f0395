"""Pure-Python kernel: pick-and-drop runs and the winning-pairs sweep.

Bit-compatible with the compiled kernel in ``_kernel.pyx``: both use the same
splitmix64 generator and the same rejection method for bounded draws, so a
given seed produces identical outputs on either backend.
"""

from __future__ import annotations

import numpy as np

KERNEL_NAME = "python"

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z &= _MASK
    z ^= z >> 30
    z = (z * _MIX1) & _MASK
    z ^= z >> 27
    z = (z * _MIX2) & _MASK
    z ^= z >> 31
    return z


def derive_seed(seed: int, run_index: int) -> int:
    """Decorrelated stream state for an independent run."""
    return _mix((seed + (run_index + 1) * _GOLDEN) & _MASK)


def _next(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN) & _MASK
    return state, _mix(state)


def _bounded(state: int, t: int) -> tuple[int, int]:
    """Unbiased draw from [0, t) by rejection."""
    rem = (1 << 64) % t
    accept = (1 << 64) - rem
    while True:
        state, z = _next(state)
        if z < accept:
            return state, z % t


def pd_run(items: np.ndarray, r: int, t: int, lam: int, seed: int) -> tuple[int, int]:
    """One pick-and-drop run over an r x t row-major matrix.

    Scans every cell once; the column index for a row is drawn lazily when the
    row starts.  Returns the surviving (sample, counter) pair; sample 0 means
    the run ended on a padding cell.
    """
    state = derive_seed(seed, 0)
    S = 0
    C = 0
    q = 0
    for i in range(r):
        state, I = _bounded(state, t)
        s = -1
        c = 0
        g = 0
        base = i * t
        for j in range(t):
            v = int(items[base + j])
            if v != 0 and v == S:
                g += 1
            if j == I:
                s = v
                c = 1 if v != 0 else 0
            elif j > I and v == s and v != 0:
                c += 1
        if i == 0 or C < max(lam * q, c):
            S, C, q = s, c, 1
        else:
            C += g
            q += 1
    return S, C


def pd_run_indices(
    items: np.ndarray, r: int, t: int, lam: int, indices: np.ndarray
) -> tuple[int, int]:
    """Same recurrence with injected 0-based column indices (for tests)."""
    S = 0
    C = 0
    q = 0
    for i in range(r):
        I = int(indices[i])
        s = -1
        c = 0
        g = 0
        base = i * t
        for j in range(t):
            v = int(items[base + j])
            if v != 0 and v == S:
                g += 1
            if j == I:
                s = v
                c = 1 if v != 0 else 0
            elif j > I and v == s and v != 0:
                c += 1
        if i == 0 or C < max(lam * q, c):
            S, C, q = s, c, 1
        else:
            C += g
            q += 1
    return S, C


def _vec_bounded(states: np.ndarray, t: int) -> np.ndarray:
    """Vectorized bounded draw; each lane consumes draws independently."""
    rem = (1 << 64) % t
    golden = np.uint64(_GOLDEN)
    m1 = np.uint64(_MIX1)
    m2 = np.uint64(_MIX2)

    def mix(z):
        z = z ^ (z >> np.uint64(30))
        z = z * m1
        z = z ^ (z >> np.uint64(27))
        z = z * m2
        return z ^ (z >> np.uint64(31))

    states += golden
    z = mix(states.copy())
    if rem:
        accept = np.uint64((1 << 64) - rem)
        bad = np.nonzero(z >= accept)[0]
        while bad.size:
            states[bad] += golden
            z[bad] = mix(states[bad].copy())
            bad = bad[z[bad] >= accept]
    return z % np.uint64(t)


def pd_run_many(
    items: np.ndarray,
    d: np.ndarray,
    uniq: np.ndarray,
    cnt: np.ndarray,
    off: np.ndarray,
    r: int,
    t: int,
    lam: int,
    n_runs: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """n_runs independent runs using precomputed suffix counts and row tables.

    ``d[idx]`` is the suffix count of cell idx (0 on padding cells), and
    ``uniq/cnt/off`` is a per-row CSR table of element frequencies.  Per-run
    cost is O(r) instead of O(r*t).
    """
    with np.errstate(over="ignore"):
        states = np.array(
            [derive_seed(seed, u) for u in range(n_runs)], dtype=np.uint64
        )
        S = np.zeros(n_runs, dtype=np.int64)
        C = np.zeros(n_runs, dtype=np.int64)
        q = np.zeros(n_runs, dtype=np.int64)
        for i in range(r):
            I = _vec_bounded(states, t).astype(np.int64)
            idx = i * t + I
            s = items[idx].astype(np.int64)
            c = d[idx].astype(np.int64)
            lo, hi = int(off[i]), int(off[i + 1])
            row_uniq = uniq[lo:hi]
            row_cnt = cnt[lo:hi]
            if hi > lo:
                pos = np.searchsorted(row_uniq, S).clip(max=hi - lo - 1)
                found = (row_uniq[pos] == S) & (S > 0)
                g = np.where(found, row_cnt[pos], 0)
            else:
                g = np.zeros(n_runs, dtype=np.int64)
            if i == 0:
                S, C, q = s, c, np.ones(n_runs, dtype=np.int64)
            else:
                drop = C < np.maximum(lam * q, c)
                S = np.where(drop, s, S)
                C = np.where(drop, c, C + g)
                q = np.where(drop, 1, q + 1)
    return S.astype(np.uint32), C.astype(np.int64)


def winning_count(u, w) -> int:
    """Number of winning pairs via the suffix-minimum closed form.

    A pair (i, j), j <= u_i, is winning iff j <= min over h >= i of the
    running sum of (u_s - w_s) from i to h; clamping that minimum to [0, u_i]
    counts the winning j for row i.
    """
    L = len(u)
    total = 0
    ms_next = None
    for i in range(L - 1, -1, -1):
        dv = int(u[i]) - int(w[i])
        ms = dv if ms_next is None else dv + min(0, ms_next)
        total += max(0, min(int(u[i]), ms))
        ms_next = ms
    return total


def lemma_sweep(max_len: int, max_entry: int) -> tuple[int, int, int]:
    """Exhaustive winning-pairs lower-bound check.

    Iterates every pair of sequences (U, W) with lengths 1..max_len and
    entries 0..max_entry; whenever sum(U - W) > 0 verifies that the winning
    count reaches it.  Returns (cases, positive_cases, violations).
    """
    base = max_entry + 1
    cases = 0
    positive = 0
    violations = 0
    for L in range(1, max_len + 1):
        digits = [0] * (2 * L)  # u digits then w digits
        while True:
            cases += 1
            tot = sum(digits[:L]) - sum(digits[L:])
            if tot > 0:
                positive += 1
                if winning_count(digits[:L], digits[L:]) < tot:
                    violations += 1
            # odometer increment
            pos = 0
            while pos < 2 * L:
                digits[pos] += 1
                if digits[pos] < base:
                    break
                digits[pos] = 0
                pos += 1
            else:
                break
    return cases, positive, violations
