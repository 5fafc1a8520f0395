# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: pick-and-drop runs and the winning-pairs sweep.

Mirrors ``_kernel_py`` exactly, including the splitmix64 stream and the
rejection method for bounded draws, so seeds are portable across backends.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()

KERNEL_NAME = "cython"

ctypedef unsigned long long u64
ctypedef long long i64

cdef u64 GOLDEN = 0x9E3779B97F4A7C15ULL
cdef u64 MIX1 = 0xBF58476D1CE4E5B9ULL
cdef u64 MIX2 = 0x94D049BB133111EBULL


cdef inline u64 _mix(u64 z) nogil:
    z ^= z >> 30
    z *= MIX1
    z ^= z >> 27
    z *= MIX2
    z ^= z >> 31
    return z


cdef inline u64 _derive_seed(u64 seed, u64 run_index) nogil:
    return _mix(seed + (run_index + 1) * GOLDEN)


def derive_seed(seed, run_index):
    return _derive_seed(<u64> seed, <u64> run_index)


cdef inline u64 _bounded(u64 *state, u64 t) nogil:
    # accept z < 2^64 - (2^64 mod t); rem == 0 means no rejection needed
    cdef u64 rem = (0 - t) % t
    cdef u64 z
    while True:
        state[0] += GOLDEN
        z = _mix(state[0])
        if rem == 0 or z < (0 - rem):
            return z % t


cdef void _scan_run(const unsigned int[::1] items, i64 r, i64 t, i64 lam,
                    u64 state, const i64[::1] indices, bint use_indices,
                    i64 *out_S, i64 *out_C) nogil:
    cdef i64 S = 0, C = 0, q = 0
    cdef i64 i, j, base, I, s, c, g, v, cond
    for i in range(r):
        if use_indices:
            I = indices[i]
        else:
            I = <i64> _bounded(&state, <u64> t)
        s = -1
        c = 0
        g = 0
        base = i * t
        for j in range(t):
            v = <i64> items[base + j]
            if v != 0 and v == S:
                g += 1
            if j == I:
                s = v
                c = 1 if v != 0 else 0
            elif j > I and v == s and v != 0:
                c += 1
        cond = lam * q
        if cond < c:
            cond = c
        if i == 0 or C < cond:
            S = s
            C = c
            q = 1
        else:
            C += g
            q += 1
    out_S[0] = S
    out_C[0] = C


def pd_run(items, r, t, lam, seed):
    """One pick-and-drop run over an r x t row-major matrix."""
    cdef const unsigned int[::1] view = np.ascontiguousarray(items, dtype=np.uint32)
    cdef i64 S = 0, C = 0
    cdef i64[::1] dummy = np.zeros(1, dtype=np.int64)
    _scan_run(view, r, t, lam, _derive_seed(<u64> seed, 0), dummy, False, &S, &C)
    return int(S), int(C)


def pd_run_indices(items, r, t, lam, indices):
    """Same recurrence with injected 0-based column indices (for tests)."""
    cdef const unsigned int[::1] view = np.ascontiguousarray(items, dtype=np.uint32)
    cdef i64[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef i64 S = 0, C = 0
    _scan_run(view, r, t, lam, 0, idx, True, &S, &C)
    return int(S), int(C)


def pd_run_many(items, d, uniq, cnt, off, r, t, lam, n_runs, seed):
    """n_runs independent runs using precomputed suffix counts and row tables."""
    cdef const unsigned int[::1] it = np.ascontiguousarray(items, dtype=np.uint32)
    cdef const i64[::1] dv = np.ascontiguousarray(d, dtype=np.int64)
    cdef const unsigned int[::1] uq = np.ascontiguousarray(uniq, dtype=np.uint32)
    cdef const i64[::1] ct = np.ascontiguousarray(cnt, dtype=np.int64)
    cdef const i64[::1] of = np.ascontiguousarray(off, dtype=np.int64)
    cdef i64 rr = r, tt = t, ll = lam, nr = n_runs
    cdef u64 sd = <u64> seed
    out_S = np.zeros(nr, dtype=np.uint32)
    out_C = np.zeros(nr, dtype=np.int64)
    cdef unsigned int[::1] oS = out_S
    cdef i64[::1] oC = out_C
    cdef i64 u, i, I, s, c, g, S, C, q, lo, hi, mid, cond
    cdef u64 state
    with nogil:
        for u in range(nr):
            state = _derive_seed(sd, <u64> u)
            S = 0
            C = 0
            q = 0
            for i in range(rr):
                I = <i64> _bounded(&state, <u64> tt)
                s = <i64> it[i * tt + I]
                c = dv[i * tt + I]
                g = 0
                if S > 0:
                    lo = of[i]
                    hi = of[i + 1]
                    while lo < hi:
                        mid = (lo + hi) >> 1
                        if <i64> uq[mid] < S:
                            lo = mid + 1
                        else:
                            hi = mid
                    if lo < of[i + 1] and <i64> uq[lo] == S:
                        g = ct[lo]
                cond = ll * q
                if cond < c:
                    cond = c
                if i == 0 or C < cond:
                    S = s
                    C = c
                    q = 1
                else:
                    C += g
                    q += 1
            oS[u] = <unsigned int> S
            oC[u] = C
    return out_S, out_C


def winning_count(u, w):
    """Number of winning pairs via the suffix-minimum closed form."""
    cdef i64[::1] uu = np.ascontiguousarray(u, dtype=np.int64)
    cdef i64[::1] ww = np.ascontiguousarray(w, dtype=np.int64)
    cdef i64 L = uu.shape[0]
    cdef i64 i, dv, ms, total = 0, clipped
    cdef bint first = True
    cdef i64 ms_next = 0
    for i in range(L - 1, -1, -1):
        dv = uu[i] - ww[i]
        if first:
            ms = dv
            first = False
        else:
            ms = dv + (ms_next if ms_next < 0 else 0)
        clipped = ms
        if clipped > uu[i]:
            clipped = uu[i]
        if clipped > 0:
            total += clipped
        ms_next = ms
    return int(total)


def lemma_sweep(max_len, max_entry):
    """Exhaustive winning-pairs lower-bound check over a bounded grid.

    Returns (cases, positive_cases, violations).
    """
    cdef i64 ml = max_len, base = max_entry + 1
    cdef i64 cases = 0, positive = 0, violations = 0
    cdef i64 L, pos, tot, i, dv, ms, ms_next, clipped, wcount
    cdef bint done, first
    cdef i64 *digits = <i64 *> malloc(2 * ml * sizeof(i64))
    if digits == NULL:
        raise MemoryError()
    try:
        with nogil:
            for L in range(1, ml + 1):
                for pos in range(2 * L):
                    digits[pos] = 0
                done = False
                while not done:
                    cases += 1
                    tot = 0
                    for i in range(L):
                        tot += digits[i] - digits[L + i]
                    if tot > 0:
                        positive += 1
                        wcount = 0
                        first = True
                        ms_next = 0
                        for i in range(L - 1, -1, -1):
                            dv = digits[i] - digits[L + i]
                            if first:
                                ms = dv
                                first = False
                            else:
                                ms = dv + (ms_next if ms_next < 0 else 0)
                            clipped = ms
                            if clipped > digits[i]:
                                clipped = digits[i]
                            if clipped > 0:
                                wcount += clipped
                            ms_next = ms
                        if wcount < tot:
                            violations += 1
                    pos = 0
                    while True:
                        digits[pos] += 1
                        if digits[pos] < base:
                            break
                        digits[pos] = 0
                        pos += 1
                        if pos == 2 * L:
                            done = True
                            break
    finally:
        free(digits)
    return int(cases), int(positive), int(violations)
