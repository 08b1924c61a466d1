"""Central finite-difference verification of every hand-rolled gradient.

Per weight matrix the reported error is ||g_analytic - g_numeric|| /
(||g_analytic|| + ||g_numeric||), which is robust near zero entries.  All
checks run at double precision with eps = 1e-5.
"""

from __future__ import annotations

import numpy as np

from . import cgn, context, policy
from .config import ModelConfig
from .knowledge import EmbeddingTable, KnowledgeGraph, normalize_adjacency
from .model import AgentModel, StepRecord
from .params import ParamSet, init_params
from .world.agent import Action
from .world.detector import Detection

EPS = 1e-5


def _rel_err(ga: np.ndarray, gn: np.ndarray) -> float:
    denom = np.linalg.norm(ga) + np.linalg.norm(gn)
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(ga - gn) / denom)


def _numeric_grads(params: ParamSet, f) -> ParamSet:
    gn = ParamSet(params.spec)
    v = params.vector
    for k in range(v.size):
        orig = v[k]
        v[k] = orig + EPS
        fp = f()
        v[k] = orig - EPS
        fm = f()
        v[k] = orig
        gn.vector[k] = (fp - fm) / (2 * EPS)
    return gn


def _random_a_hat(rng, n: int) -> np.ndarray:
    a = (rng.random((n, n)) < 0.4).astype(np.float64)
    a = np.maximum(a, a.T)
    np.fill_diagonal(a, 0.0)
    return normalize_adjacency(a)


def check_cgn(seed: int, no_g: bool = False) -> dict[str, float]:
    """Probe u . embedding against finite differences for all three layers."""
    rng = np.random.default_rng(seed)
    n, d, h1, h2, h3 = 5, 3, 6, 4, 3
    spec = cgn.cgn_param_spec(n, d, h1, h2, h3)
    params = init_params(spec, seed + 1)
    a_hat = _random_a_hat(rng, n)
    x = rng.standard_normal((n, n + d))
    c = rng.standard_normal((n, 5))
    out_size = n * (h2 if no_g else h3)
    u = rng.standard_normal(out_size)

    def f():
        if no_g:
            emb, _ = cgn.forward_no_g(params, a_hat, x)
        else:
            emb, _ = cgn.forward(params, a_hat, x, c)
        return float(u @ emb)

    if no_g:
        _, cache = cgn.forward_no_g(params, a_hat, x)
        ga = cgn.backward_no_g(params, cache, u)
    else:
        _, cache = cgn.forward(params, a_hat, x, c)
        ga = cgn.backward(params, cache, u)
    gn = _numeric_grads(params, f)
    names = ["cgn.W0", "cgn.W1"] if no_g else ["cgn.W0", "cgn.W1", "cgn.W2"]
    return {name: _rel_err(ga[name], gn[name]) for name in names}


def check_lstm(seed: int) -> dict[str, float]:
    """Probe u . h' + v . c' through one LSTM step."""
    rng = np.random.default_rng(seed)
    input_size, hidden = 7, 5
    spec = policy.policy_param_spec(input_size, hidden)
    params = init_params(spec, seed + 1)
    x = rng.standard_normal(input_size)
    h0 = rng.standard_normal(hidden)
    c0 = rng.standard_normal(hidden)
    u = rng.standard_normal(hidden)
    v = rng.standard_normal(hidden)

    def f():
        h1, c1, _ = policy.lstm_step(params, x, h0, c0)
        return float(u @ h1 + v @ c1)

    _, _, cache = policy.lstm_step(params, x, h0, c0)
    _, _, _, ga = policy.lstm_backward(params, cache, u, v, input_size)
    gn = _numeric_grads(params, f)
    return {name: _rel_err(ga[name], gn[name]) for name in ("lstm.W", "lstm.b")}


def check_heads(seed: int) -> dict[str, float]:
    """Actor/critic heads under the actor-critic loss with frozen advantage."""
    rng = np.random.default_rng(seed)
    hidden = 6
    spec = policy.policy_param_spec(3, hidden)
    params = init_params(spec, seed + 1)
    h = rng.standard_normal(hidden)
    action = Action(int(rng.integers(policy.NUM_ACTIONS)))
    adv = float(rng.standard_normal())
    ret = float(rng.standard_normal())
    beta, vc = 0.01, 0.5

    def f():
        logits = h @ params["actor.W"] + params["actor.b"]
        probs = policy.softmax(logits)
        value = policy.value_of(params, h)
        ent = float(-(probs * np.log(probs)).sum())
        return (
            -float(np.log(probs[int(action)])) * adv
            + vc * 0.5 * (ret - value) ** 2
            - beta * ent
        )

    logits = h @ params["actor.W"] + params["actor.b"]
    probs = policy.softmax(logits)
    value = policy.value_of(params, h)
    _, ga = policy.head_backward(
        params, h, probs, action, -adv, vc * (value - ret), -beta
    )
    gn = _numeric_grads(params, f)
    return {
        name: _rel_err(ga[name], gn[name])
        for name in ("actor.W", "actor.b", "critic.W", "critic.b")
    }


def _tiny_model(seed: int, variant: str = "full") -> tuple[AgentModel, ParamSet]:
    rng = np.random.default_rng(seed)
    n, d = 4, 3
    vecs = rng.standard_normal((n, d))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    emb = EmbeddingTable(dim=d, vectors=vecs)
    a = _random_a_hat(rng, n)
    graph = KnowledgeGraph(list(range(n)), a, a)  # a already normalized; adjacency unused
    cfg = ModelConfig(emb_dim=d, h1=5, h2=4, h3=3, lstm_hidden=8, variant=variant)
    model = AgentModel(cfg, graph, emb)
    return model, model.init_params(seed + 1)


def check_end_to_end(seed: int, variant: str = "full") -> float:
    """Full 2-step rollout: loss gradient through heads, LSTM, and graph net."""
    rng = np.random.default_rng(seed)
    model, params = _tiny_model(seed, variant)
    n = model.num_objects
    det_seq = [
        [Detection(int(k), rng.random(), rng.random(), rng.random(), 1.0)
         for k in rng.choice(n, size=2, replace=False)]
        for _ in range(2)
    ]
    target = 0
    actions = [Action(int(rng.integers(policy.NUM_ACTIONS))) for _ in range(2)]
    rewards = [0.3, 1.2]
    gamma, beta, vc = 0.99, 0.01, 0.5

    def run(ps: ParamSet):
        h, c = model.zero_state()
        recs = []
        for dets, a in zip(det_seq, actions):
            ctx = context.context_matrix(dets, target, model.emb)
            obs_vec = context.flatten(ctx)
            graph_emb, cache = model._graph_forward(ps, dets, ctx)
            x = policy.joint_embedding(obs_vec, graph_emb)
            h, c, lc = policy.lstm_step(ps, x, h, c)
            logits = h @ ps["actor.W"] + ps["actor.b"]
            probs = policy.softmax(logits)
            value = policy.value_of(ps, h)
            recs.append(
                StepRecord(
                    obs_vec=obs_vec,
                    cgn_cache=cache,
                    lstm_cache=lc,
                    h_in=h,
                    probs=probs,
                    action=a,
                    log_prob=float(np.log(probs[int(a)])),
                    value=value,
                    entropy=float(-(probs * np.log(probs)).sum()),
                )
            )
        return recs

    # freeze returns/advantages at the base point
    base = run(params)
    returns = []
    ret = 0.0
    for r in reversed(rewards):
        ret = r + gamma * ret
        returns.append(ret)
    returns.reverse()
    advs = [ret - rec.value for ret, rec in zip(returns, base)]

    def f():
        recs = run(params)
        loss = 0.0
        for rec, ret, adv in zip(recs, returns, advs):
            loss += -rec.log_prob * adv
            loss += vc * 0.5 * (ret - rec.value) ** 2
            loss += -beta * rec.entropy
        return float(loss)

    step_grads = [
        policy.StepGrads(
            d_log_prob=-adv,
            d_value=vc * (rec.value - ret),
            d_entropy=-beta,
            advantage=adv,
            ret=ret,
        )
        for rec, ret, adv in zip(base, returns, advs)
    ]
    ga = model.rollout_backward(params, base, step_grads)
    gn = _numeric_grads(params, f)
    return _rel_err(ga.vector, gn.vector)


def run_suite(seeds: range | list[int]) -> dict[str, float]:
    """Worst error per gradient over all seeds."""
    worst: dict[str, float] = {}
    for s in seeds:
        for name, err in check_cgn(s).items():
            worst[name] = max(worst.get(name, 0.0), err)
        for name, err in check_cgn(s, no_g=True).items():
            worst[f"{name} (no_g)"] = max(worst.get(f"{name} (no_g)", 0.0), err)
        for name, err in check_lstm(s).items():
            worst[name] = max(worst.get(name, 0.0), err)
        for name, err in check_heads(s).items():
            worst[name] = max(worst.get(name, 0.0), err)
        worst["end_to_end"] = max(worst.get("end_to_end", 0.0), check_end_to_end(s))
    return worst
