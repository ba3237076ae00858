"""Sources, comparator gates, bitstream arithmetic, affine maps."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smurf.core import (
    AffineMap,
    RngSource,
    ThetaGate,
    bitstream_mean,
    check_probability,
    counter_draw,
    derive_seed,
    generate_bitstream,
    map_from_unit,
    map_to_unit,
    rng_next,
    sc_multiply,
    sc_scaled_add,
    theta_bit,
    theta_sample,
)


class TestRngSource:
    def test_same_parameters_reproduce_sequence(self):
        a = RngSource.independent(1234, stream=5)
        b = RngSource.independent(1234, stream=5)
        assert [a.next() for _ in range(1000)] == [b.next() for _ in range(1000)]

    def test_distinct_streams_differ(self):
        a = RngSource.independent(1234, stream=0)
        b = RngSource.independent(1234, stream=1)
        assert [a.next() for _ in range(10)] != [b.next() for _ in range(10)]

    def test_lagged_source_shifts_master_sequence(self):
        master = RngSource.lagged(99, lag=0)
        delayed = RngSource.lagged(99, lag=3)
        ref = [master.next() for _ in range(20)]
        got = [delayed.next() for _ in range(23)]
        assert got[3:] == ref[:20]

    @given(lag=st.integers(0, 64), seed=st.integers(0, 2**64 - 1))
    @settings(max_examples=50, deadline=None)
    def test_lag_relation_holds_generally(self, lag, seed):
        master = RngSource.lagged(seed, lag=0)
        delayed = RngSource.lagged(seed, lag=lag)
        assert delayed.draw_at(lag + 7) == master.draw_at(7)

    def test_draws_in_unit_interval(self):
        for kind in ("independent", "lagged", "lowdisc"):
            src = RngSource(kind, 7, stream=2, lag=2)
            block = src.draw_block(10_000)
            assert block.min() >= 0.0 and block.max() < 1.0

    def test_mean_of_million_draws(self):
        # Law-of-large-numbers bound 4*sigma/sqrt(n) with sigma^2 = 1/12.
        src = RngSource.independent(2024)
        mean = src.draw_block(10**6).mean()
        assert abs(mean - 0.5) <= 4.0 * math.sqrt(1.0 / 12.0 / 10**6)

    def test_block_and_scalar_draws_agree(self):
        src = RngSource.independent(31337, stream=3)
        block = src.draw_block(50)
        src2 = RngSource.independent(31337, stream=3)
        assert [src2.next() for _ in range(50)] == list(block)

    def test_rng_next_alias(self):
        src = RngSource.independent(5)
        twin = RngSource.independent(5)
        assert rng_next(src) == twin.next()

    def test_lowdisc_is_stratified(self):
        # Over a power-of-two window the bit-reversed counter is exactly
        # equidistributed: a threshold stream's mean is within 1/L of p.
        src = RngSource.lowdisc(11, stream=0)
        bits = generate_bitstream(0.7, src, 64)
        assert abs(bits.mean() - 0.7) <= 1.0 / 64

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            RngSource("weird", 1)


class TestThetaGate:
    def test_known_draw_below_threshold_fires(self):
        assert theta_bit(0.65, 0.7) == 1
        assert theta_bit(0.7, 0.7) == 0

    def test_sample_consumes_one_draw(self):
        src = RngSource.independent(8, stream=1)
        peek = src.draw_at(0)
        gate = ThetaGate(0.5, src)
        assert theta_sample(gate) == (1 if peek < 0.5 else 0)
        assert src.draw_at(src._index - 1) == peek

    def test_threshold_zero_never_fires(self):
        gate = ThetaGate(0.0, RngSource.independent(9))
        assert all(gate.sample() == 0 for _ in range(200))

    def test_threshold_one_always_fires(self):
        gate = ThetaGate(1.0, RngSource.independent(10))
        assert all(gate.sample() == 1 for _ in range(200))

    def test_invalid_threshold_rejected(self):
        with pytest.raises(ValueError):
            ThetaGate(1.5, RngSource.independent(1))


class TestBitstreams:
    def test_generate_rejects_empty(self):
        with pytest.raises(ValueError):
            generate_bitstream(0.5, RngSource.independent(1), 0)

    def test_generate_matches_binomial_bound_small(self):
        bits = generate_bitstream(0.5, RngSource.independent(77), 64)
        assert abs(bits.mean() - 0.5) <= 4.0 * math.sqrt(0.25 / 64)

    def test_all_ones_for_threshold_one(self):
        bits = generate_bitstream(1.0, RngSource.independent(3), 100)
        assert bits.all()

    def test_fixed_seed_reproduces_pattern(self):
        a = generate_bitstream(0.7, RngSource.independent(123), 16)
        b = generate_bitstream(0.7, RngSource.independent(123), 16)
        assert np.array_equal(a, b)

    def test_bitstream_mean_basics(self):
        assert bitstream_mean([1, 1, 1, 1]) == 1.0
        assert bitstream_mean([1, 0, 1, 0]) == 0.5
        with pytest.raises(ValueError):
            bitstream_mean([])

    def test_mean_calibration_long_stream(self):
        src = RngSource.independent(555)
        bits = generate_bitstream(0.25, src, 10**6)
        assert abs(bits.mean() - 0.25) <= 4.0 * math.sqrt(0.25 * 0.75 / 10**6)

    def test_calibration_across_thresholds(self):
        length = 10**6
        for k in range(1, 10):
            p = k / 10.0
            src = RngSource.independent(9000, stream=k)
            mean = generate_bitstream(p, src, length).mean()
            assert abs(mean - p) <= 4.0 * math.sqrt(p * (1 - p) / length), p

    def test_calibration_lagged_mode(self):
        length = 10**6
        src = RngSource.lagged(4242, lag=5)
        mean = generate_bitstream(0.3, src, length).mean()
        assert abs(mean - 0.3) <= 4.0 * math.sqrt(0.3 * 0.7 / length)

    def test_multiply_identities(self):
        y = generate_bitstream(0.6, RngSource.independent(42), 256)
        ones = np.ones(256, dtype=np.uint8)
        zeros = np.zeros(256, dtype=np.uint8)
        assert np.array_equal(sc_multiply(ones, y), y)
        assert not sc_multiply(zeros, y).any()

    def test_multiply_mean_is_product(self):
        length = 10**6
        x = generate_bitstream(0.5, RngSource.independent(1000, stream=0), length)
        y = generate_bitstream(0.5, RngSource.independent(1000, stream=1), length)
        z = sc_multiply(x, y)
        assert abs(bitstream_mean(z) - 0.25) <= 4.0 * math.sqrt(0.25 * 0.75 / length)

    def test_multiply_sweep_within_5_sigma(self):
        length = 10**5
        rng = np.random.RandomState(7)
        for k in range(200):
            px, py = rng.uniform(0.05, 0.95, 2)
            x = generate_bitstream(px, RngSource.independent(2_000 + k, stream=0), length)
            y = generate_bitstream(py, RngSource.independent(2_000 + k, stream=1), length)
            mean = bitstream_mean(sc_multiply(x, y))
            p = px * py
            assert abs(mean - p) <= 5.0 * math.sqrt(p * (1 - p) / length)

    def test_multiply_length_mismatch(self):
        with pytest.raises(ValueError):
            sc_multiply(np.ones(4, np.uint8), np.ones(5, np.uint8))

    def test_scaled_add_identical_inputs(self):
        x = generate_bitstream(0.3, RngSource.independent(5), 512)
        s = generate_bitstream(0.5, RngSource.independent(6), 512)
        assert bitstream_mean(sc_scaled_add(x, x, s)) == bitstream_mean(x)

    def test_scaled_add_halves_sum(self):
        length = 10**6
        ones = np.ones(length, dtype=np.uint8)
        zeros = np.zeros(length, dtype=np.uint8)
        s = generate_bitstream(0.5, RngSource.independent(99), length)
        mean = bitstream_mean(sc_scaled_add(ones, zeros, s))
        assert abs(mean - 0.5) <= 4.0 * math.sqrt(0.25 / length)

    def test_scaled_add_select_all_ones_passes_x(self):
        x = generate_bitstream(0.2, RngSource.independent(1), 128)
        y = generate_bitstream(0.9, RngSource.independent(2), 128)
        out = sc_scaled_add(x, y, np.ones(128, np.uint8))
        assert np.array_equal(out, x)


class TestAffineMap:
    def test_endpoints(self):
        m = AffineMap(-2.0, 3.0)
        assert map_to_unit(-2.0, m) == 0.0
        assert map_to_unit(3.0, m) == 1.0

    def test_backward_midpoint(self):
        m = AffineMap(-2.0, 4.0)
        assert map_from_unit(0.5, m) == 1.0

    def test_out_of_range_rejected(self):
        m = AffineMap(-2.0, 3.0)
        with pytest.raises(ValueError):
            m.forward(3.0001)
        with pytest.raises(ValueError):
            m.backward(-0.01)

    def test_degenerate_interval_rejected(self):
        with pytest.raises(ValueError):
            AffineMap(1.0, 1.0)

    @given(
        lo=st.floats(-100.0, 99.0),
        span=st.floats(1e-3, 200.0),
        frac=st.floats(0.0, 1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, lo, span, frac):
        m = AffineMap(lo, lo + span)
        x = lo + frac * span
        x = min(max(x, lo), lo + span)
        assert abs(m.backward(m.forward(x)) - x) <= 1e-12

    def test_vectorized(self):
        m = AffineMap(0.0, 10.0)
        xs = np.linspace(0, 10, 11)
        np.testing.assert_allclose(m.backward(m.forward(xs)), xs, atol=1e-12)


class TestHelpers:
    def test_check_probability(self):
        assert check_probability(0.5) == 0.5
        with pytest.raises(ValueError):
            check_probability(-0.001)
        with pytest.raises(ValueError):
            check_probability(1.001)

    def test_derive_seed_order_sensitive(self):
        assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
        assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)

    def test_counter_draw_stable_address(self):
        src = RngSource.independent(17, stream=4)
        assert src.draw_at(12) == counter_draw(src._key, 12)
