"""LSTM memory, actor-critic heads, and the advantage actor-critic loss.

Everything is explicit numpy with hand-derived reverse-mode gradients; the
finite-difference suite in gradcheck.py keeps them honest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ParamSet, ParamSpec
from .world.agent import Action

NUM_ACTIONS = len(Action)


def policy_param_spec(input_size: int, hidden: int) -> ParamSpec:
    return [
        ("lstm.W", (input_size + hidden, 4 * hidden)),  # gate order: i, f, o, g
        ("lstm.b", (4 * hidden,)),
        ("actor.W", (hidden, NUM_ACTIONS)),
        ("actor.b", (NUM_ACTIONS,)),
        ("critic.W", (hidden, 1)),
        ("critic.b", (1,)),
    ]


def joint_embedding(obs_vec: np.ndarray, graph_emb: np.ndarray) -> np.ndarray:
    if obs_vec.ndim != 1 or graph_emb.ndim != 1:
        raise ValueError("joint embedding expects 1-D inputs")
    return np.concatenate([obs_vec, graph_emb])


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


@dataclass
class LstmCache:
    xh: np.ndarray
    c_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray
    c_new: np.ndarray


def lstm_step(
    params: ParamSet, x: np.ndarray, h: np.ndarray, c: np.ndarray
) -> tuple[np.ndarray, np.ndarray, LstmCache]:
    """One standard LSTM cell step."""
    hidden = h.shape[0]
    xh = np.concatenate([x, h])
    gates = xh @ params["lstm.W"] + params["lstm.b"]
    i = _sigmoid(gates[:hidden])
    f = _sigmoid(gates[hidden : 2 * hidden])
    o = _sigmoid(gates[2 * hidden : 3 * hidden])
    g = np.tanh(gates[3 * hidden :])
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, c_new, LstmCache(xh, c, i, f, o, g, c_new)


def lstm_backward(
    params: ParamSet,
    cache: LstmCache,
    dh: np.ndarray,
    dc: np.ndarray,
    input_size: int,
):
    """Backward through one cell step.

    Returns (dx, dh_prev, dc_prev, {param grads}).  ``dh``/``dc`` are the
    gradients flowing into h', c'.
    """
    tanh_c = np.tanh(cache.c_new)
    do = dh * tanh_c
    dc_total = dc + dh * cache.o * (1.0 - tanh_c**2)
    di = dc_total * cache.g
    df = dc_total * cache.c_prev
    dg = dc_total * cache.i
    dc_prev = dc_total * cache.f
    dz = np.concatenate(
        [
            di * cache.i * (1.0 - cache.i),
            df * cache.f * (1.0 - cache.f),
            do * cache.o * (1.0 - cache.o),
            dg * (1.0 - cache.g**2),
        ]
    )
    grad_w = np.outer(cache.xh, dz)
    grad_b = dz
    dxh = params["lstm.W"] @ dz
    return (
        dxh[:input_size],
        dxh[input_size:],
        dc_prev,
        {"lstm.W": grad_w, "lstm.b": grad_b},
    )


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max()
    e = np.exp(z)
    return e / e.sum()


def act(
    params: ParamSet, h: np.ndarray, rng: np.random.Generator
) -> tuple[Action, float, float, float, np.ndarray]:
    """Sample an action from the actor head; also return value and entropy.

    Returns (action, log_prob, value, entropy, probabilities).
    """
    logits = h @ params["actor.W"] + params["actor.b"]
    probs = softmax(logits)
    a = int(rng.choice(NUM_ACTIONS, p=probs))
    value = float(h @ params["critic.W"][:, 0] + params["critic.b"][0])
    logp = float(np.log(probs[a]))
    entropy = float(-(probs * np.log(probs)).sum())
    return Action(a), logp, value, entropy, probs


def value_of(params: ParamSet, h: np.ndarray) -> float:
    return float(h @ params["critic.W"][:, 0] + params["critic.b"][0])


@dataclass
class RolloutStep:
    action: Action
    log_prob: float
    value: float
    reward: float
    entropy: float
    terminal: bool

    def __post_init__(self):
        if self.log_prob > 0:
            raise ValueError("log_prob must be <= 0")
        if self.entropy < 0:
            raise ValueError("entropy must be >= 0")


@dataclass
class StepGrads:
    d_log_prob: float
    d_value: float
    d_entropy: float
    advantage: float
    ret: float


def a3c_loss(
    rollout: list[RolloutStep],
    bootstrap_value: float,
    gamma: float = 0.99,
    entropy_beta: float = 0.01,
    value_coef: float = 0.5,
) -> tuple[float, list[StepGrads]]:
    """n-step actor-critic loss and its per-step gradient signals.

    Returns R_t backward from the bootstrap (0 if the rollout ends an
    episode).  The advantage is treated as a constant in the policy term, so
    d/d(log_prob) = -A_t, and the critic only sees the squared-error term.
    """
    if not rollout:
        raise ValueError("empty rollout")
    ret = 0.0 if rollout[-1].terminal else float(bootstrap_value)
    policy_loss = 0.0
    value_loss = 0.0
    entropy_sum = 0.0
    grads: list[StepGrads] = [None] * len(rollout)  # type: ignore[list-item]
    for t in range(len(rollout) - 1, -1, -1):
        s = rollout[t]
        ret = s.reward + gamma * ret
        adv = ret - s.value
        policy_loss += -s.log_prob * adv
        value_loss += 0.5 * adv * adv
        entropy_sum += s.entropy
        grads[t] = StepGrads(
            d_log_prob=-adv,
            d_value=value_coef * (s.value - ret),
            d_entropy=-entropy_beta,
            advantage=adv,
            ret=ret,
        )
    loss = policy_loss + value_coef * value_loss - entropy_beta * entropy_sum
    return float(loss), grads


def head_backward(
    params: ParamSet,
    h: np.ndarray,
    probs: np.ndarray,
    action: Action,
    d_log_prob: float,
    d_value: float,
    d_entropy: float,
):
    """Backward through actor log-prob, entropy, and critic value to h.

    d(log p_a)/dlogits = onehot(a) - p;  dH/dlogits = -p * (log p + H).
    Returns (dh, {param grads}).
    """
    logp = np.log(probs)
    entropy = float(-(probs * logp).sum())
    dlogits = d_log_prob * (_onehot(action) - probs)
    dlogits += d_entropy * (-probs * (logp + entropy))
    grad_actor_w = np.outer(h, dlogits)
    grad_actor_b = dlogits
    grad_critic_w = (d_value * h)[:, None]
    grad_critic_b = np.array([d_value])
    dh = params["actor.W"] @ dlogits + d_value * params["critic.W"][:, 0]
    return dh, {
        "actor.W": grad_actor_w,
        "actor.b": grad_actor_b,
        "critic.W": grad_critic_w,
        "critic.b": grad_critic_b,
    }


def _onehot(action: Action) -> np.ndarray:
    v = np.zeros(NUM_ACTIONS)
    v[int(action)] = 1.0
    return v
