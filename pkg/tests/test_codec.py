import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hcce import codec
from hcce.errors import CodecDomainError, InvalidNormalizerError
from oracles import binary_digits, tent_levels

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestNormalizer:
    def test_corners(self):
        n = codec.BoundingNormalizer([1.0, -2.0, 0.5], [2.0, 4.0, 1.0])
        np.testing.assert_array_equal(codec.normalize(n.min_corner, n), [0, 0, 0])
        np.testing.assert_array_equal(codec.normalize(n.max_corner, n), [1, 1, 1])

    def test_center(self):
        n = codec.BoundingNormalizer([-1, -1, -1], [2, 2, 2])
        np.testing.assert_array_equal(codec.normalize([0, 0, 0], n), [0.5, 0.5, 0.5])

    def test_denormalize_corners(self):
        n = codec.BoundingNormalizer([1.0, -2.0, 0.5], [2.0, 4.0, 1.0])
        np.testing.assert_array_equal(codec.denormalize([0, 0, 0], n), n.min_corner)
        np.testing.assert_array_equal(codec.denormalize([1, 1, 1], n), n.max_corner)

    @pytest.mark.parametrize("extent", [[1, 0, 1], [1, 1, -2]])
    def test_bad_extent(self, extent):
        with pytest.raises(InvalidNormalizerError):
            codec.BoundingNormalizer([0, 0, 0], extent)

    def test_out_of_box_is_clamped(self):
        n = codec.BoundingNormalizer([0, 0, 0], [1, 1, 1])
        np.testing.assert_array_equal(codec.normalize([-0.5, 2.0, 0.5], n), [0, 1, 0.5])

    @given(st.lists(st.floats(-10, 10), min_size=3, max_size=3))
    def test_inverse(self, p):
        n = codec.BoundingNormalizer([-10, -10, -10], [20, 20, 20])
        np.testing.assert_allclose(codec.denormalize(codec.normalize(p, n), n), p, atol=1e-12)


class TestHBCE:
    def test_quarter(self):
        assert codec.hbce_encode(0.25).tolist() == [0, 1, 0, 0, 0, 0, 0, 0]

    def test_zero(self):
        assert codec.hbce_encode(0.0).tolist() == [0] * 8

    def test_ninth_bit_truncates(self):
        assert codec.hbce_encode(0.5 + 2 ** -9).tolist() == [1, 0, 0, 0, 0, 0, 0, 0]

    def test_one_goes_to_top_bin(self):
        assert codec.hbce_encode(1.0).tolist() == [1] * 8

    @pytest.mark.parametrize("x", [-1e-12, 1.0 + 1e-12, np.nan])
    def test_domain(self, x):
        with pytest.raises(CodecDomainError):
            codec.hbce_encode(x)

    @given(unit)
    def test_matches_exact_expansion(self, x):
        assert codec.hbce_encode(x).tolist() == binary_digits(x)

    def test_vectorized_shape(self):
        assert codec.hbce_encode(np.zeros((4, 3))).shape == (4, 3, 8)


class TestHCCE:
    def test_zero(self):
        assert codec.hcce_encode(0.0).tolist() == [0.0] * 8

    def test_quarter(self):
        assert codec.hcce_encode(0.25).tolist()[:4] == [0.25, 0.5, 1.0, 0.0]

    def test_one(self):
        assert codec.hcce_encode(1.0).tolist() == [1.0] + [0.0] * 7

    @given(unit)
    def test_matches_literal_recursion(self, x):
        # dyadic arithmetic is exact, so the fold must agree bit for bit
        assert codec.hcce_encode(x).tolist() == tent_levels(x)

    @given(unit)
    def test_codes_stay_in_unit_interval(self, x):
        c = codec.hcce_encode(x)
        assert np.all((c >= 0) & (c <= 1))

    @pytest.mark.parametrize("x", [-0.1, 1.5])
    def test_domain(self, x):
        with pytest.raises(CodecDomainError):
            codec.hcce_encode(x)


class TestConversion:
    def test_quarter(self):
        assert codec.hcce_to_binary(codec.hcce_encode(0.25)).tolist() == [0, 1, 0, 0, 0, 0, 0, 0]

    def test_zeros(self):
        assert codec.hcce_to_binary(np.zeros(8)).tolist() == [0] * 8

    def test_point_three(self):
        bits = codec.hcce_to_binary(codec.hcce_encode(0.3)).tolist()
        assert bits == [0, 1, 0, 0, 1, 1, 0, 0] == codec.hbce_encode(0.3).tolist()

    @given(unit.filter(lambda x: x * 256 != int(x * 256)))
    def test_agrees_with_hbce_off_the_grid(self, x):
        assert codec.hcce_to_binary(codec.hcce_encode(x)).tolist() == binary_digits(x)

    def test_ties_on_the_level8_grid(self):
        # codes hitting exactly 0.5 after a fold are rounded up by g(0.5) = 1,
        # which flips the cascade; this happens only on multiples of 2^-8
        grid = np.arange(257) / 256
        bad = np.any(codec.hcce_to_binary(codec.hcce_encode(grid)) != codec.hbce_encode(grid), axis=1)
        assert bad.sum() == 127
        assert np.all(grid[bad] * 256 == np.round(grid[bad] * 256))
        odd = (2 * np.arange(256) + 1) / 512
        assert np.array_equal(codec.hcce_to_binary(codec.hcce_encode(odd)), codec.hbce_encode(odd))

    def test_tie_still_decodes_within_a_bin(self):
        grid = np.arange(257) / 256
        assert np.max(np.abs(codec.roundtrip(grid) - grid)) <= 2 ** -8


class TestDecode:
    def test_quarter(self):
        assert codec.binary_decode([0, 1, 0, 0, 0, 0, 0, 0]) == 0.25

    def test_zeros_and_midpoint(self):
        assert codec.binary_decode([0] * 8) == 0.0
        assert codec.binary_decode([0] * 8, midpoint=True) == 0.001953125

    def test_ones(self):
        assert codec.binary_decode([1] * 8) == 0.99609375

    @given(unit)
    def test_roundtrip_bound(self, x):
        assert abs(codec.roundtrip(x) - x) <= 2 ** -8
        assert abs(codec.roundtrip(x, midpoint=True) - x) <= 2 ** -8

    @settings(max_examples=50)
    @given(st.integers(1, 12), unit)
    def test_roundtrip_other_depths(self, levels, x):
        assert abs(codec.roundtrip(x, levels) - x) <= 2.0 ** -levels


class TestQuantizePoints:
    def test_error_bounded_by_half_bin(self):
        rng = np.random.default_rng(0)
        n = codec.BoundingNormalizer([-0.05, -0.02, 0.0], [0.1, 0.04, 0.03])
        pts = n.min_corner + rng.random((1000, 3)) * n.extent
        err = np.abs(codec.quantize_points(pts, n) - pts)
        assert np.all(err <= n.extent * 2 ** -9 * (1 + 1e-12))
