import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hcce import codec
from hcce import loss_math as lm
from hcce.errors import ShapeMismatchError, UndefinedHistogramError


class TestErrorRates:
    def test_exact_predictions(self):
        x = np.random.default_rng(0).random(50)
        assert np.all(lm.level_error_rates(codec.hcce_encode(x), codec.hbce_encode(x)) == 0)

    def test_half_flipped(self):
        x = np.full(10, 0.3)
        pred = codec.hcce_encode(x)
        gt = codec.hbce_encode(x)
        # mirror levels 3 and 4: bit 3 flips, the cascade restores bit 4 onwards
        pred[:5, 2] = 1.0 - pred[:5, 2]
        pred[:5, 3] = 1.0 - pred[:5, 3]
        rates = lm.level_error_rates(pred, gt)
        assert rates[2] == 0.5
        assert np.all(np.delete(rates, 2) == 0)

    def test_three_of_four_wrong(self):
        x = np.full(4, 0.3)
        gt = codec.hbce_encode(x)
        pred = codec.hcce_encode(x)
        # move level 2 across 0.5 and mirror level 3 so the cascade stays put
        pred[:3, 1] = 1.0 - pred[:3, 1]
        pred[:3, 2] = 1.0 - pred[:3, 2]
        r = lm.level_error_rates(pred, gt)
        assert r[1] == 0.75
        assert np.all(np.delete(r, 1) == 0)

    def test_empty(self):
        with pytest.raises(UndefinedHistogramError):
            lm.level_error_rates(np.zeros((0, 8)), np.zeros((0, 8)))

    def test_shape(self):
        with pytest.raises(ShapeMismatchError):
            lm.level_error_rates(np.zeros((2, 8)), np.zeros((3, 8)))


class TestIntensity:
    def test_endpoints(self):
        assert lm.histogram_intensity(0.0, 4.0) == 1.0
        assert lm.histogram_intensity(0.5, 4.0) == 1.0

    def test_peak(self):
        assert lm.histogram_intensity(0.25, 4.0) == pytest.approx(math.e, abs=1e-12)

    def test_peak_is_maximum(self):
        r = np.linspace(0, 1, 100001)
        h = lm.histogram_intensity(r, 4.0)
        assert r[np.argmax(h)] == 0.25

    @given(st.floats(0, 1), st.floats(0.1, 20))
    def test_symmetric_about_quarter_below_half(self, r, sigma):
        if r <= 0.5:
            assert lm.histogram_intensity(r, sigma) == pytest.approx(lm.histogram_intensity(0.5 - r, sigma))


class TestWeights:
    def test_uniform(self):
        np.testing.assert_array_equal(lm.level_weights(np.ones(8)), np.full(8, 0.125))

    def test_one_peak(self):
        w = lm.level_weights([math.e] + [1.0] * 7)
        assert w[0] == pytest.approx(math.e / (math.e + 7), abs=1e-12)
        assert w[0] == pytest.approx(0.2797, abs=1e-4)

    @given(st.lists(st.floats(1e-6, 1e6), min_size=8, max_size=8))
    def test_sum_to_one(self, h):
        assert abs(lm.level_weights(h).sum() - 1.0) <= 1e-9

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            lm.level_weights([1, 0, 1, 1, 1, 1, 1, 1])


class TestLosses:
    def test_component_zero(self):
        c = codec.hcce_encode(np.random.default_rng(1).random(5))
        assert lm.hierarchical_component_loss(c, c, np.full(8, 0.125)) == 0.0

    def test_component_single_deviation(self):
        gt = np.zeros((1, 8))
        pred = gt.copy()
        pred[0, 0] = 0.1
        assert lm.hierarchical_component_loss(pred, gt, np.full(8, 0.125)) == pytest.approx(0.0125, abs=1e-15)

    def test_component_shape(self):
        with pytest.raises(ShapeMismatchError):
            lm.hierarchical_component_loss(np.zeros((2, 8)), np.zeros((2, 7)), np.full(8, 0.125))
        with pytest.raises(ShapeMismatchError):
            lm.hierarchical_component_loss(np.zeros((2, 8)), np.zeros((2, 8)), np.full(7, 1 / 7))

    def test_mask(self):
        gt = np.array([1, 1, 0, 0])
        assert lm.mask_loss(gt, gt) == 0
        assert lm.mask_loss([1, 1, 0, 1], gt) == 1
        assert lm.mask_loss(np.full(4, 0.5), gt) == 2.0

    def test_predicted_mask(self):
        assert lm.predicted_mask([-1.0, 0.0, 2.0]).tolist() == [False, False, True]

    def test_total(self):
        assert lm.total_loss(0, 0, 0, 0.7) == 0
        assert lm.total_loss(1, 2, 3, 0.5) == 3.5

    def test_config_validation(self):
        with pytest.raises(ValueError):
            lm.LossConfig(sigma=0)
        with pytest.raises(ValueError):
            lm.LossConfig(gamma=-1)

    def test_defaults(self):
        assert lm.LossConfig() == lm.LossConfig(sigma=4.0, gamma=1.0)


class TestSurfaceLosses:
    def _maps(self, seed, n=64):
        rng = np.random.default_rng(seed)
        gt = {s: codec.hcce_encode(rng.random((n, 3))) for s in lm.SURFACES}
        pred = {s: np.clip(g + rng.normal(0, 0.2, g.shape), 0, 1) for s, g in gt.items()}
        return pred, gt

    def test_six_histograms(self):
        pred, gt = self._maps(0)
        losses, hists = lm.surface_losses(pred, gt, lm.LossConfig())
        assert set(hists) == {(s, c) for s in lm.SURFACES for c in lm.COMPONENTS}
        for h in hists.values():
            assert abs(h.weights.sum() - 1) <= 1e-12

    def test_matches_manual_sum(self):
        pred, gt = self._maps(1)
        cfg = lm.LossConfig(sigma=3.0)
        losses, hists = lm.surface_losses(pred, gt, cfg)
        for s in lm.SURFACES:
            manual = 0.0
            for c, name in enumerate(lm.COMPONENTS):
                r = (codec.hcce_to_binary(pred[s][:, c]) != codec.hcce_to_binary(gt[s][:, c])).mean(axis=0)
                h = np.exp(3.0 * np.minimum(r, 0.5 - r))
                manual += (h / h.sum()) @ np.abs(pred[s][:, c] - gt[s][:, c]).sum(axis=0)
            assert losses[s] == pytest.approx(manual, rel=1e-12)

    def test_single_histogram_pools(self):
        pred, gt = self._maps(2)
        _, hists = lm.surface_losses(pred, gt, lm.LossConfig(), single_histogram=True)
        first = next(iter(hists.values())).weights
        assert all(np.array_equal(h.weights, first) for h in hists.values())

    def test_shape_check(self):
        pred, gt = self._maps(3)
        pred["back"] = pred["back"][:, :2]
        with pytest.raises(ShapeMismatchError):
            lm.surface_losses(pred, gt, lm.LossConfig())


class TestTrajectory:
    def test_frontier_moves_to_finer_levels(self):
        traj = lm.weight_trajectory(lm.synthetic_schedule(9), 4.0)
        peaks = [int(np.argmax(h.weights)) for h in traj[:-1]]
        assert peaks == sorted(peaks)
        assert peaks[0] < peaks[-1]

    def test_wrong_length(self):
        with pytest.raises(ShapeMismatchError):
            lm.weight_trajectory([np.zeros(7)], 4.0)
