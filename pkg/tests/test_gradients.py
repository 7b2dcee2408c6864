"""Analytic EMF gradients against central finite differences."""
import numpy as np
import pytest

from emotion_core.exceptions import GradientError, StatsError
from emotion_core.services.factorization import pair_gradients, pair_loss

STEP = 1e-6


def _numeric_gradient(fn, x):
    grad = np.zeros_like(x)
    for k in range(len(x)):
        hi, lo = x.copy(), x.copy()
        hi[k] += STEP
        lo[k] -= STEP
        grad[k] = (fn(hi) - fn(lo)) / (2 * STEP)
    return grad


@pytest.mark.parametrize("popular", [True, False])
@pytest.mark.parametrize("emotion_weight", [0.0, 0.01, 0.5])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gradients_match_finite_differences(popular, emotion_weight, seed):
    rng = np.random.default_rng(seed)
    u = rng.random(6) + 0.05
    v = rng.random(6) + 0.05
    args = dict(rating=4.0, max_rating=5.0, score=3.2, count=7.0, popular=popular, emotion_weight=emotion_weight)

    grad_u, grad_v = pair_gradients(u, v, **args)
    numeric_u = _numeric_gradient(lambda x: pair_loss(x, v, **args), u)
    numeric_v = _numeric_gradient(lambda x: pair_loss(u, x, **args), v)

    np.testing.assert_allclose(grad_u, numeric_u, rtol=1e-5, atol=1e-7)
    np.testing.assert_allclose(grad_v, numeric_v, rtol=1e-5, atol=1e-7)


@pytest.mark.parametrize("popular", [True, False])
def test_gradients_with_negative_cosine(popular):
    u = np.array([0.4, -0.3, 0.2])
    v = np.array([-0.5, 0.1, 0.3])
    args = dict(rating=2.0, max_rating=5.0, score=2.5, count=3.0, popular=popular, emotion_weight=0.2)

    grad_u, grad_v = pair_gradients(u, v, **args)

    np.testing.assert_allclose(grad_u, _numeric_gradient(lambda x: pair_loss(x, v, **args), u), rtol=1e-5, atol=1e-7)
    np.testing.assert_allclose(grad_v, _numeric_gradient(lambda x: pair_loss(u, x, **args), v), rtol=1e-5, atol=1e-7)


def test_popular_term_is_flat_inside_the_clamp_zone():
    u = np.array([1.0, 0.0, 0.0])
    v = np.array([0.0, 1.0, 0.0])
    common = dict(rating=3.0, max_rating=5.0, score=3.0, count=4.0, popular=True)

    with_emotion = pair_gradients(u, v, emotion_weight=1.0, **common)
    without = pair_gradients(u, v, emotion_weight=0.0, **common)

    np.testing.assert_array_equal(with_emotion[0], without[0])
    np.testing.assert_array_equal(with_emotion[1], without[1])
    assert np.isfinite(pair_loss(u, v, emotion_weight=1.0, **common))


def test_non_finite_gradient_names_branch():
    u = np.array([np.inf, 1.0])
    v = np.array([1.0, 1.0])
    with pytest.raises(GradientError) as exc_info:
        pair_gradients(u, v, 3.0, 5.0, 3.0, 2.0, popular=False, emotion_weight=0.1)
    assert exc_info.value.branch == "obscure"
    assert exc_info.value.exit_code == 3


def test_zero_item_statistics_are_rejected():
    u = np.ones(2)
    with pytest.raises(StatsError):
        pair_gradients(u, u, 3.0, 5.0, 0.0, 2.0, popular=True, emotion_weight=0.1)


def _random_configuration(rng, k):
    d = (2, 16)[(k // 2) % 2]
    while True:
        u, v = rng.normal(size=d), rng.normal(size=d)
        # keep away from the clamp boundary, where the popular term has a kink
        if abs(u @ v) >= 1e-2 * np.linalg.norm(u) * np.linalg.norm(v):
            break
    args = dict(
        rating=float(rng.integers(1, 6)),
        max_rating=5.0,
        score=float(rng.uniform(1.0, 5.0)),
        count=float(rng.integers(1, 500)),
        popular=k % 2 == 0,
        emotion_weight=(0.0, 0.01, 1.0)[k % 3],
    )
    return u, v, args


def _relative_error(analytic, numeric):
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-8)
    return np.linalg.norm(analytic - numeric) / scale


def test_gradients_over_a_thousand_random_configurations():
    rng = np.random.default_rng(2024)
    failures = []
    for k in range(1000):
        u, v, args = _random_configuration(rng, k)
        grad_u, grad_v = pair_gradients(u, v, **args)
        numeric_u = _numeric_gradient(lambda x: pair_loss(x, v, **args), u)
        numeric_v = _numeric_gradient(lambda x: pair_loss(u, x, **args), v)
        error = max(_relative_error(grad_u, numeric_u), _relative_error(grad_v, numeric_v))
        if error >= 1e-4:
            failures.append((k, len(u), args["popular"], args["emotion_weight"], error))

    assert failures == []
