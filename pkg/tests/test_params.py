"""Parameter derivation: skewness scale, matrix shape, drop threshold, and
repetition counts."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pickdrop.params import (
    DegenerateStreamError,
    delta_bound,
    delta_grid,
    derive_params,
    derive_params_from_stats,
    repetitions,
    sanity_inequalities,
    snap_delta,
)
from pickdrop.stream import ExactStats, StreamView


class TestSnapDelta:
    def test_known_values(self):
        assert snap_delta(1.0) == 1
        assert snap_delta(2.0) == 2
        assert snap_delta(16.0) == 4
        assert snap_delta(0.5) == 1
        assert snap_delta(0.01) == 1  # floors at 1

    def test_rejects_nonpositive(self):
        with pytest.raises(DegenerateStreamError):
            snap_delta(0.0)

    @given(st.floats(min_value=1e-6, max_value=1e9))
    def test_within_factor_two_of_sqrt(self, psi):
        d = snap_delta(psi)
        assert d >= 1
        if psi >= 1:
            # 2^ceil(0.5 log2 psi) is within [sqrt(psi), 2 sqrt(psi))
            assert math.sqrt(psi) / 2 < d < 2 * math.sqrt(psi)


class TestDeriveParams:
    def test_flat_rest_example(self):
        # n=256, k=3, heavy id with f=95 over a rest of 255 ids x 8 each
        p = derive_params(n=256, k=3, F1=2135, Gk=255 * 8**3)
        assert p.delta == 1
        assert p.t == 337
        assert p.lam == 9
        assert p.r == 7
        assert p.T == 102
        assert abs(p.psi - 0.958) < 0.001

    def test_from_stats_matches_manual(self):
        items = np.concatenate([
            np.full(95, 1, dtype=np.uint32),
            np.tile(np.arange(2, 257, dtype=np.uint32), 8),
        ])
        stats = ExactStats.from_view(StreamView(items=items, n=256))
        p = derive_params_from_stats(stats, 3)
        q = derive_params(256, 3, 2135, 255 * 8**3)
        assert p == q

    def test_delta_clamped_to_valid_range(self):
        # an extremely skewed rest forces psi above the cap
        p = derive_params(n=64, k=3, F1=100, Gk=10**9)
        assert p.delta <= delta_bound(64, 3)

    def test_degenerate_stream_raises(self):
        with pytest.raises(DegenerateStreamError):
            derive_params(n=16, k=3, F1=100, Gk=0)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            derive_params(n=1, k=3, F1=10, Gk=1)
        with pytest.raises(ValueError):
            derive_params(n=16, k=2, F1=10, Gk=1)
        with pytest.raises(ValueError):
            derive_params(n=16, k=3, F1=0, Gk=1)

    def test_describe_keys(self):
        p = derive_params(256, 3, 2135, 255 * 8**3)
        assert set(p.describe()) == {
            "psi", "delta", "t", "lambda", "r", "repetitions",
        }

    @given(
        st.integers(min_value=4, max_value=4096),
        st.integers(min_value=3, max_value=6),
        st.integers(min_value=2, max_value=10**5),
        st.integers(min_value=1, max_value=10**7),
    )
    def test_shape_covers_stream(self, n, k, F1, Gk):
        p = derive_params(n, k, F1, Gk)
        assert p.r * p.t >= F1  # padding only ever extends the matrix
        assert p.t >= 1 and p.lam >= 1 and p.T >= 1
        assert p.delta >= 1 and p.delta & (p.delta - 1) == 0  # power of two


class TestGrid:
    def test_grid_for_256(self):
        assert delta_grid(256, 3) == [1, 2, 4, 8]

    def test_grid_grows_with_n(self):
        assert len(delta_grid(2**12, 3)) >= len(delta_grid(2**6, 3))

    def test_repetitions_known_value(self):
        assert repetitions(256, 3, 0.25, 1) == 102
        assert repetitions(256, 3, 0.25, 2) == 51

    def test_repetitions_validation(self):
        with pytest.raises(ValueError):
            repetitions(256, 3, 0.0, 1)
        with pytest.raises(ValueError):
            repetitions(256, 3, 1.5, 1)

    @given(st.integers(min_value=2, max_value=2**14),
           st.integers(min_value=3, max_value=8))
    def test_grid_is_ascending_powers(self, n, k):
        grid = delta_grid(n, k)
        assert grid[0] == 1
        assert all(b == 2 * a for a, b in zip(grid, grid[1:]))
        assert grid[-1] <= delta_bound(n, k)


class TestSanityInequalities:
    def test_reported_on_flat_instance(self):
        items = np.concatenate([
            np.full(95, 1, dtype=np.uint32),
            np.tile(np.arange(2, 257, dtype=np.uint32), 8),
        ])
        stats = ExactStats.from_view(StreamView(items=items, n=256))
        p = derive_params_from_stats(stats, 3)
        report = sanity_inequalities(stats, p, 3)
        assert set(report) == {"lambda_r", "g2_over_t", "g3_over_lambda_t",
                               "all_hold"}
        for name in ("g2_over_t", "g3_over_lambda_t"):
            assert report[name]["holds"]
