import numpy as np
import pytest

from sewglyph.errors import ConfigError, EvalError, TrainError
from sewglyph.evalkit import (
    LinearModel,
    downsample,
    evaluate,
    logistic_gradient,
    logistic_loss,
    synthetic_signal_corpus,
    train_linear,
)
from sewglyph.render import ImageBuffer


def central_difference(f, w, h=1e-6):
    g = np.zeros_like(w)
    for i in range(len(w)):
        e = np.zeros_like(w)
        e[i] = h
        g[i] = (f(w + e) - f(w - e)) / (2 * h)
    return g


def relative_error(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)


def test_downsample_blank_and_full():
    assert np.array_equal(downsample(ImageBuffer.blank(224), 28), np.zeros(64))
    ink = ImageBuffer.from_array(np.zeros((224, 224), dtype=np.uint8))
    assert np.array_equal(downsample(ink, 28), np.ones(64))


def test_downsample_checkerboard():
    # 2x2 tiles alternating ink/background: every 2x2 pooling block is exactly half ink.
    tile = (np.indices((8, 8)).sum(axis=0) % 2) * 255
    img = ImageBuffer.from_array(tile.astype(np.uint8))
    assert np.array_equal(downsample(img, 2), np.full(16, 0.5))


def test_downsample_row_major_order():
    px = np.full((4, 4), 255, dtype=np.uint8)
    px[0:2, 2:4] = 0  # top-right block
    assert downsample(ImageBuffer.from_array(px), 2).tolist() == [0.0, 1.0, 0.0, 0.0]


@pytest.mark.parametrize("factor", [0, 3, 5])
def test_downsample_factor_must_divide(factor):
    with pytest.raises(ConfigError):
        downsample(ImageBuffer.blank(224), factor)


def test_gradient_at_zero_is_analytic():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(7, 3))
    y = np.array([0, 1, 1, 0, 1, 0, 0])
    Xa = np.hstack([X, np.ones((7, 1))])
    expected = Xa.T @ (0.5 - y) / 7
    w0 = np.zeros(4)
    assert np.allclose(logistic_gradient(w0, X, y), expected, atol=1e-15)
    fd = central_difference(lambda w: logistic_loss(w, X, y), w0)
    assert relative_error(logistic_gradient(w0, X, y), fd) < 1e-6


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_finite_differences_with_l2(seed):
    rng = np.random.default_rng(seed)
    n, d = rng.integers(3, 20), rng.integers(1, 6)
    X, y = rng.normal(size=(n, d)), rng.integers(0, 2, size=n)
    w, l2 = rng.normal(size=d + 1), rng.uniform(0, 1)
    fd = central_difference(lambda v: logistic_loss(v, X, y, l2), w)
    assert relative_error(logistic_gradient(w, X, y, l2), fd) < 1e-6


def test_loss_is_stable_for_large_margins():
    X = np.array([[1000.0], [-1000.0]])
    y = np.array([1, 0])
    assert np.isfinite(logistic_loss(np.array([5.0, 0.0]), X, y))
    assert np.isfinite(logistic_gradient(np.array([5.0, 0.0]), X, y)).all()


def test_separable_two_points():
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    y = np.array([0, 1])
    for standardize in (True, False):
        model = train_linear(X, y, epochs=500, learning_rate=0.5, standardize=standardize)
        assert evaluate(model, X, y).accuracy == 1.0


@pytest.mark.parametrize("standardize", [True, False])
def test_loss_nonincreasing_small_step(standardize):
    rng = np.random.default_rng(3)
    X = rng.uniform(size=(40, 5))
    y = (X[:, 0] + 0.3 * rng.normal(size=40) > 0.5).astype(int)
    hist = []
    train_linear(X, y, epochs=200, learning_rate=0.1, l2=0.01, standardize=standardize, history=hist)
    assert len(hist) == 200
    assert all(b <= a + 1e-15 for a, b in zip(hist, hist[1:]))


def test_order_invariance():
    rng = np.random.default_rng(5)
    X = rng.uniform(size=(30, 4))
    y = rng.integers(0, 2, size=30)
    perm = rng.permutation(30)
    a = train_linear(X, y, epochs=100)
    b = train_linear(X[perm], y[perm], epochs=100)
    np.testing.assert_allclose(a.weights, b.weights, rtol=1e-10, atol=1e-12)


def test_single_class_rejected():
    with pytest.raises(TrainError):
        train_linear(np.zeros((3, 2)), np.array([1, 1, 1]))
    with pytest.raises(TrainError):
        train_linear(np.zeros((2, 2)), np.array([0, 2]))


def test_evaluate_constant_zero_model_on_balanced_set():
    X = np.zeros((10, 3))
    y = np.array([0, 1] * 5)
    model = LinearModel(np.array([0.0, 0.0, 0.0, -1.0]))
    r = evaluate(model, X, y)
    assert r.accuracy == 0.5
    assert (r.tp, r.fp, r.tn, r.fn) == (0, 0, 5, 5)
    assert r.total == 10


def test_evaluate_empty():
    with pytest.raises(EvalError):
        evaluate(LinearModel(np.zeros(2)), np.zeros((0, 1)), np.array([]))


def test_model_dimension_invariant():
    LinearModel(np.zeros(65), factor=28, image_px=224)
    with pytest.raises(ConfigError):
        LinearModel(np.zeros(64), factor=28, image_px=224)
    with pytest.raises(ConfigError):
        LinearModel(np.zeros(65), factor=30, image_px=224)


def test_model_save_load(tmp_path):
    m = LinearModel(np.linspace(-1, 1, 65), factor=28, image_px=224)
    m.save(tmp_path / "m.txt")
    back = LinearModel.load(tmp_path / "m.txt")
    assert np.array_equal(back.weights, m.weights)
    assert (back.factor, back.image_px) == (28, 224)
    text = (tmp_path / "m.txt").read_text().splitlines()
    assert text[0].startswith("#") and len(text) == 66


def test_synthetic_corpus_shape():
    c = synthetic_signal_corpus(10, seed=1)
    assert [s.labels["happy"] for s in c] == [0, 1] * 5
    for s in c:
        words = s.text.split()
        assert words[2] == ("happy" if s.labels["happy"] else "sad")
        assert sum(w in ("happy", "sad") for w in words) == 1
    assert [s.text for s in c] == [s.text for s in synthetic_signal_corpus(10, seed=1)]
