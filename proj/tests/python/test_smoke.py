import numpy as np
import pytest

import betashap


def test_weights_sum_to_n():
    for n in (2, 10, 200):
        raw, norm = betashap.weights(n, "beta", 16.0, 1.0)
        assert raw.shape == (n,)
        assert abs(norm.sum() - n) / n < 1e-9
    _, ones = betashap.weights(7, "data-shapley")
    assert np.array_equal(ones, np.ones(7))


def test_two_point_additive_game():
    values = betashap.semivalue_table([0.0, 1.0, 3.0, 4.0], "beta", 1.0, 1.0)
    assert list(values) == [1.0, 3.0]


def test_generate_is_deterministic():
    x1, y1 = betashap.generate("gaussian-classification", 50, 3)
    x2, y2 = betashap.generate("gaussian-classification", 50, 3)
    assert x1.shape == (50, 5)
    assert np.array_equal(x1, x2) and np.array_equal(y1, y2)
    assert set(np.unique(y1)) <= {0.0, 1.0}


def test_flip_labels_counts():
    x, y = betashap.generate("gaussian-classification", 200, 1)
    flipped_y, ids = betashap.flip_labels(x, y, 0.1, 7)
    assert len(ids) == 20
    assert np.count_nonzero(flipped_y != y) == 20


def test_exact_and_mc_agree_in_rank():
    x, y = betashap.generate("gaussian-classification", 8, 11)
    xv, yv = betashap.generate("gaussian-classification", 100, 12)
    exact = np.asarray(betashap.value_exact(x, y, xv, yv, "data-shapley"))
    report = betashap.value_mc(x, y, xv, yv, "data-shapley", seed=4, max_iterations=2000)
    again = betashap.value_mc(x, y, xv, yv, "data-shapley", seed=4, max_iterations=2000)
    assert np.array_equal(report["values"], again["values"])
    assert report["values"].shape == (8,)
    assert np.corrcoef(exact, report["values"])[0, 1] > 0.9


def test_detection_example():
    out = betashap.detect_noisy([-1, -1, -1, 5, 5, 5, 5, 5, 5, 5], [0, 1, 2])
    assert out["selected"] == [0, 1, 2]
    assert out["f1"] == 1.0


def test_snr_scan_rows():
    rows = betashap.snr_scan(n=40, grid=[2, 20], repeats=3, samples=4, seed=1)
    assert [r["j"] for r in rows] == [2, 20]


def test_errors_surface_as_exceptions():
    x, y = betashap.generate("gaussian-classification", 21, 0)
    with pytest.raises(betashap.BetaShapError, match="20"):
        betashap.value_exact(x, y, x, y)
    with pytest.raises(ValueError):
        betashap.weights(5, "nonsense")
