"""Gradient checking: the delta-rule update against central differences.

With momentum off, the update applied to every weight and threshold must
equal -eta times the numeric gradient of E = half the squared residual sum.
The numeric side perturbs each parameter by +/- epsilon and never touches
the delta machinery, so agreement is evidence both are right.
"""

import numpy as np
import pytest

from churnnet import ConfigError, LearningParams, init_network, train_example
from churnnet.network import numeric_gradient


def random_case(rng):
    n_layers = int(rng.integers(2, 5))
    sizes = [int(rng.integers(1, 5)) for _ in range(n_layers)]
    net = init_network(sizes, seed=int(rng.integers(2**31)))
    x = rng.random(sizes[0])
    t = rng.random(sizes[-1])
    return net, x, t


def assert_update_matches_gradient(net, x, t, eta):
    wg, tg = numeric_gradient(net, x, t)
    before = net.copy()
    train_example(net, x, t, LearningParams(eta=eta, alpha=0.0))
    for k in range(len(net.weights)):
        np.testing.assert_allclose(
            net.weights[k] - before.weights[k], -eta * wg[k], rtol=1e-6, atol=1e-9
        )
        np.testing.assert_allclose(
            net.thresholds[k] - before.thresholds[k], -eta * tg[k], rtol=1e-6, atol=1e-9
        )


def test_update_is_negative_gradient_small_net():
    rng = np.random.default_rng(0)
    net = init_network([2, 3, 2], seed=1)
    assert_update_matches_gradient(net, rng.random(2), rng.random(2), eta=0.25)


def test_update_is_negative_gradient_random_nets():
    rng = np.random.default_rng(1234)
    for _ in range(25):
        net, x, t = random_case(rng)
        assert_update_matches_gradient(net, x, t, eta=float(rng.uniform(0.05, 1.0)))


def test_gradient_near_zero_at_fit_target():
    # pushing the target onto the current output makes every partial vanish
    net = init_network([3, 4, 2], seed=9)
    x = np.array([0.1, 0.6, 0.9])
    from churnnet import forward

    t = forward(net, x).output.copy()
    wg, tg = numeric_gradient(net, x, t)
    for g in wg + tg:
        np.testing.assert_allclose(g, 0.0, atol=1e-9)


def test_gradient_leaves_network_unchanged():
    net = init_network([2, 3, 1], seed=5)
    before = net.copy()
    numeric_gradient(net, np.array([0.2, 0.9]), np.array([0.5]))
    for k in range(2):
        np.testing.assert_array_equal(net.weights[k], before.weights[k])
        np.testing.assert_array_equal(net.thresholds[k], before.thresholds[k])


def test_epsilon_bounds():
    net = init_network([2, 2, 1], seed=0)
    x, t = np.array([0.5, 0.5]), np.array([1.0])
    with pytest.raises(ConfigError):
        numeric_gradient(net, x, t, epsilon=1e-8)
    with pytest.raises(ConfigError):
        numeric_gradient(net, x, t, epsilon=1e-2)
