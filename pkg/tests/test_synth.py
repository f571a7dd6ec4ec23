import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qunfold import fixtures as fx
from qunfold.errors import BadRange, DimensionMismatch
from qunfold.synth import (
    Histogram,
    IntegerSample,
    clipped_normal_integers,
    distort_histogram,
    histogram,
    read_histogram_csv,
    read_sample,
    round_half_away,
    threshold_noise,
    tridiagonal_response,
    unit_edges,
    write_histogram_csv,
    write_sample,
)

RANGE = (-10, 10)


def _sample(values):
    return IntegerSample(np.asarray(values), RANGE)


class TestClippedNormal:
    def test_tiny_sigma_gives_zeros(self):
        s = clipped_normal_integers(1000, 1e-9, seed=0)
        assert np.all(s.values == 0)

    def test_within_clip(self):
        s = clipped_normal_integers(5000, 20.0, seed=3)
        assert s.values.min() >= -10 and s.values.max() <= 10
        assert s.values.min() == -10 and s.values.max() == 10

    def test_moments(self):
        # se of the mean is 0.03 and of the sd about 0.02 at N = 1e4
        for seed in range(5):
            v = clipped_normal_integers(10**4, 3.0, seed=seed).values
            assert abs(v.mean()) < 0.09
            assert 2.8 <= v.std() <= 3.1

    def test_reproducible(self):
        assert clipped_normal_integers(100, 3, seed=4) == clipped_normal_integers(100, 3, seed=4)

    def test_rounding_rule(self):
        assert round_half_away([0.5, -0.5, 1.5, -2.5, 2.4]).tolist() == [1, -1, 2, -3, 2]

    def test_printed_rounding_matches(self):
        assert np.array_equal(round_half_away(fx.TRUE_DATA), fx.TRUE_DATA_INT)


class TestThresholdNoise:
    def test_hand_trace(self):
        out = threshold_noise(_sample(fx.HAND_TRACE_TRUTH), draws=fx.HAND_TRACE_DRAWS)
        assert out.values.tolist() == fx.HAND_TRACE_RESULT.tolist()

    def test_pass_branch(self):
        assert threshold_noise(_sample([0]), draws=[0.95]).values.tolist() == [0]

    def test_printed_stream(self):
        out = threshold_noise(_sample(fx.TRUE_DATA_INT), draws=fx.RANDNOISE)
        assert np.array_equal(out.values, fx.RECO_DATA_INT)

    @pytest.mark.parametrize("v,u,expected", [
        (-10, 0.1, -9), (-10, 0.5, -10), (10, 0.25, 9), (10, 0.35, 10),
        (3, 0.1, 2), (3, 0.5, 4), (3, 0.9, 3), (-9, 0.19, -10), (9, 0.79, 10),
    ])
    def test_branches(self, v, u, expected):
        assert threshold_noise(_sample([v]), draws=[u]).values[0] == expected

    def test_high_draws_change_nothing(self):
        values = np.arange(-10, 11)
        out = threshold_noise(_sample(values), draws=np.full(values.size, 0.85))
        assert np.array_equal(out.values, values)

    def test_bad_range(self):
        with pytest.raises(BadRange):
            threshold_noise(IntegerSample(np.array([0]), (-5, 5)), seed=0)

    def test_draw_length(self):
        with pytest.raises(DimensionMismatch):
            threshold_noise(_sample([1, 2]), draws=[0.5])

    @settings(max_examples=100)
    @given(st.lists(st.integers(-10, 10), max_size=200), st.integers(0, 2**32 - 1))
    def test_moves_at_most_one_and_stays_in_range(self, values, seed):
        truth = _sample(values)
        out = threshold_noise(truth, seed)
        assert np.all(np.abs(out.values - truth.values) <= 1)
        assert out.values.size == 0 or (out.values.min() >= -10 and out.values.max() <= 10)
        edges = unit_edges()
        assert histogram(out, edges).total() == histogram(truth, edges).total() == len(values)


class TestTridiagonal:
    def test_b4(self):
        expected = [[0.75, 0.25, 0, 0], [0.25, 0.5, 0.25, 0], [0, 0.25, 0.5, 0.25], [0, 0, 0.25, 0.75]]
        assert np.array_equal(tridiagonal_response(4), expected)

    def test_b15_first_row(self):
        row = tridiagonal_response(15)[0]
        assert row[:2].tolist() == [0.75, 0.25] and not row[2:].any()

    @pytest.mark.parametrize("b", range(2, 65))
    def test_columns_sum_to_one(self, b):
        assert np.array_equal(tridiagonal_response(b).sum(axis=0), np.ones(b))

    def test_too_small(self):
        with pytest.raises(ValueError):
            tridiagonal_response(1)


class TestHistogram:
    def test_empty(self):
        h = histogram(_sample([]), unit_edges())
        assert h.counts.size == 21 and not h.counts.any()

    def test_total_conserved(self):
        s = clipped_normal_integers(10**4, 3, seed=1)
        assert histogram(s, np.linspace(-10.5, 10.5, 22)).total() == 10**4

    def test_last_bin_closed(self):
        h = histogram(np.array([0, 1, 2]), [0, 1, 2])
        assert h.counts.tolist() == [1, 2]

    def test_fixture_total(self):
        assert fx.TRUTH_HIST_21.sum() == 10**4

    def test_fifteen_bin_layout(self):
        h = histogram(_sample(fx.TRUE_DATA_INT), np.linspace(-10.5, 10.5, 16))
        assert h.total() == 100

    def test_bad_edges(self):
        with pytest.raises(ValueError):
            Histogram(np.array([0.0, 0.0, 1.0]), np.zeros(2))


class TestDistort:
    def test_identity_resamples(self):
        t = np.array([5.0, 0.0, 12.0])
        m = distort_histogram(t, np.eye(3), seed=0)
        assert m.sum() == 17 and m[1] == 0
        assert np.array_equal(m, np.random.default_rng(0).multinomial(17, t / 17))

    def test_total(self):
        m = distort_histogram(fx.TRUTH_HIST_21, tridiagonal_response(21), seed=3)
        assert m.sum() == 10**4

    def test_dimension(self):
        with pytest.raises(DimensionMismatch):
            distort_histogram([1, 2], np.eye(3))


class TestFiles:
    def test_sample_round_trip(self, tmp_path):
        s = _sample([3, -2, 0, 10])
        assert read_sample(write_sample(tmp_path / "s.txt", s)) == s

    def test_histogram_round_trip(self, tmp_path):
        h = Histogram(unit_edges(), fx.TRUTH_HIST_21)
        back = read_histogram_csv(write_histogram_csv(tmp_path / "h.csv", h))
        assert np.array_equal(back.edges, h.edges) and np.array_equal(back.counts, h.counts)
