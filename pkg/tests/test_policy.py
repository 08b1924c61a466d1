"""LSTM cell, actor-critic heads, and loss hand examples."""

import numpy as np
import pytest

from gridnav import policy
from gridnav.params import ParamSet, init_params
from gridnav.world.agent import Action


def make_params(input_size=3, hidden=4, seed=0):
    return init_params(policy.policy_param_spec(input_size, hidden), seed)


# ----------------------------------------------------------------------- lstm


def test_lstm_zero_weights_zero_state():
    params = ParamSet(policy.policy_param_spec(3, 4))  # all zeros
    x = np.ones(3)
    h = np.zeros(4)
    c = np.zeros(4)
    h2, c2, _ = policy.lstm_step(params, x, h, c)
    # gates all sigmoid(0)=0.5, g=tanh(0)=0 -> c'=0, h'=0
    assert np.allclose(c2, 0.0)
    assert np.allclose(h2, 0.0)


def test_lstm_forget_gate_saturation():
    """Large forget bias, tiny input/output gates: cell state is carried over."""
    hidden = 2
    params = ParamSet(policy.policy_param_spec(1, hidden))
    b = params["lstm.b"]
    b[0:hidden] = -50.0       # input gate ~ 0
    b[hidden : 2 * hidden] = 50.0   # forget gate ~ 1
    b[2 * hidden : 3 * hidden] = 50.0  # output gate ~ 1
    c = np.array([0.3, -0.7])
    h2, c2, _ = policy.lstm_step(params, np.zeros(1), np.zeros(hidden), c)
    assert np.allclose(c2, c, atol=1e-12)
    assert np.allclose(h2, np.tanh(c), atol=1e-12)


def test_lstm_deterministic_in_inputs():
    params = make_params()
    x = np.array([0.1, -0.2, 0.3])
    h = np.full(4, 0.05)
    c = np.full(4, -0.05)
    a = policy.lstm_step(params, x, h, c)
    b = policy.lstm_step(params, x, h, c)
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])


# ---------------------------------------------------------------------- heads


def test_softmax_properties():
    p = policy.softmax(np.array([1.0, 2.0, 3.0]))
    assert p.sum() == pytest.approx(1.0)
    assert np.all(np.diff(p) > 0)
    # shift invariance
    assert np.allclose(p, policy.softmax(np.array([101.0, 102.0, 103.0])))


def test_act_uniform_heads():
    """Zero heads: uniform policy, value 0, entropy ln 6."""
    params = ParamSet(policy.policy_param_spec(3, 4))
    rng = np.random.default_rng(0)
    action, logp, value, entropy, probs = policy.act(params, np.ones(4), rng)
    assert np.allclose(probs, 1.0 / 6)
    assert logp == pytest.approx(np.log(1.0 / 6))
    assert value == 0.0
    assert entropy == pytest.approx(np.log(6))
    assert isinstance(action, Action)


def test_act_seed_deterministic():
    params = make_params(input_size=3, hidden=4, seed=2)
    h = np.array([0.3, -0.1, 0.2, 0.9])
    a1 = policy.act(params, h, np.random.default_rng(5))
    a2 = policy.act(params, h, np.random.default_rng(5))
    assert a1[0] == a2[0]
    assert a1[1] == a2[1]
    assert policy.value_of(params, h) == a1[2]


# ----------------------------------------------------------------------- loss


def test_rollout_step_validation():
    with pytest.raises(ValueError):
        policy.RolloutStep(Action.Done, 0.5, 0.0, 0.0, 1.0, True)
    with pytest.raises(ValueError):
        policy.RolloutStep(Action.Done, -0.5, 0.0, 0.0, -1.0, True)


def test_a3c_loss_single_terminal_step():
    """One successful Done with value 0: R=5, value loss 12.5 before coef."""
    s = policy.RolloutStep(Action.Done, np.log(1 / 6), 0.0, 5.0, np.log(6), True)
    loss, grads = policy.a3c_loss([s], bootstrap_value=99.0, gamma=0.99,
                                  entropy_beta=0.01, value_coef=0.5)
    g = grads[0]
    assert g.ret == 5.0  # terminal: bootstrap ignored
    assert g.advantage == 5.0
    assert g.d_log_prob == -5.0
    assert g.d_value == 0.5 * (0.0 - 5.0)
    assert g.d_entropy == -0.01
    expect = -np.log(1 / 6) * 5.0 + 0.5 * (0.5 * 25.0) - 0.01 * np.log(6)
    assert loss == pytest.approx(expect)


def test_a3c_loss_two_step_returns():
    """Hand-checked discounted returns: R1 = r1 + g*r2, R2 = r2."""
    steps = [
        policy.RolloutStep(Action.MoveAhead, -1.0, 0.5, -0.01, 1.0, False),
        policy.RolloutStep(Action.Done, -2.0, 1.0, 5.0, 1.0, True),
    ]
    _, grads = policy.a3c_loss(steps, bootstrap_value=0.0, gamma=0.9)
    assert grads[1].ret == pytest.approx(5.0)
    assert grads[0].ret == pytest.approx(-0.01 + 0.9 * 5.0)
    assert grads[0].advantage == pytest.approx(-0.01 + 4.5 - 0.5)


def test_a3c_loss_bootstrap_when_truncated():
    steps = [policy.RolloutStep(Action.MoveAhead, -1.0, 0.0, 1.0, 1.0, False)]
    _, grads = policy.a3c_loss(steps, bootstrap_value=2.0, gamma=0.5)
    assert grads[0].ret == pytest.approx(1.0 + 0.5 * 2.0)
    with pytest.raises(ValueError):
        policy.a3c_loss([], 0.0)


def test_head_backward_uniform_entropy_gradient_vanishes():
    """At the uniform distribution the entropy term's logits gradient is 0."""
    params = make_params(hidden=4, seed=1)
    probs = np.full(6, 1.0 / 6)
    h = np.ones(4)
    dh, grads = policy.head_backward(
        params, h, probs, Action.MoveAhead, d_log_prob=0.0, d_value=0.0, d_entropy=-0.01
    )
    assert np.allclose(grads["actor.b"], 0.0, atol=1e-15)
    assert np.allclose(dh, 0.0, atol=1e-15)


def test_head_backward_critic_path():
    params = make_params(hidden=4, seed=1)
    probs = policy.softmax(np.array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6]))
    h = np.array([1.0, 2.0, 3.0, 4.0])
    dh, grads = policy.head_backward(
        params, h, probs, Action.Done, d_log_prob=0.0, d_value=2.0, d_entropy=0.0
    )
    assert np.allclose(grads["critic.W"][:, 0], 2.0 * h)
    assert grads["critic.b"][0] == 2.0
    assert np.allclose(dh, 2.0 * params["critic.W"][:, 0])
