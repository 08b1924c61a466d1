"""End-to-end agent model: context features -> graph network -> LSTM -> heads.

Owns the combined parameter layout for the graph network and the policy, the
per-step forward pipeline, and full backpropagation through a rollout
(truncated at rollout boundaries).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import cgn, context, policy
from .config import ModelConfig
from .knowledge import EmbeddingTable, KnowledgeGraph
from .params import ParamSet, ParamSpec, init_params
from .world.agent import Action

VARIANTS = ("full", "no_g", "baseline")


@dataclass
class StepRecord:
    """Everything backward needs for one environment step."""

    obs_vec: np.ndarray
    cgn_cache: cgn.CgnCache | None
    lstm_cache: policy.LstmCache
    h_in: np.ndarray
    probs: np.ndarray
    action: Action
    log_prob: float
    value: float
    entropy: float


class AgentModel:
    def __init__(self, config: ModelConfig, graph: KnowledgeGraph, emb: EmbeddingTable):
        if config.variant not in VARIANTS:
            raise ValueError(f"unknown variant {config.variant!r}")
        if emb.dim != config.emb_dim:
            raise ValueError(f"embedding dim {emb.dim} != config {config.emb_dim}")
        n = emb.vectors.shape[0]
        if len(graph.node_order) != n:
            raise ValueError("graph and embedding table disagree on object count")
        self.config = config
        self.graph = graph
        self.emb = emb
        self.num_objects = n
        self.a_hat = graph.normalized_adjacency
        self.obs_size = context.CONTEXT_DIM * n
        per_node = config.h2 if config.variant == "no_g" else config.h3
        self.graph_size = n * per_node
        self.input_size = self.obs_size + self.graph_size
        self.spec: ParamSpec = cgn.cgn_param_spec(
            n, config.emb_dim, config.h1, config.h2, config.h3
        ) + policy.policy_param_spec(self.input_size, config.lstm_hidden)

    def init_params(self, seed: int) -> ParamSet:
        return init_params(self.spec, seed)

    def zero_state(self) -> tuple[np.ndarray, np.ndarray]:
        h = np.zeros(self.config.lstm_hidden)
        return h, h.copy()

    def _graph_forward(self, params: ParamSet, detections, ctx: np.ndarray):
        variant = self.config.variant
        if variant == "baseline":
            return np.zeros(self.graph_size), None
        x = cgn.node_features(detections, self.emb)
        if variant == "no_g":
            return cgn.forward_no_g(params, self.a_hat, x)
        return cgn.forward(params, self.a_hat, x, ctx)

    def step_forward(
        self,
        params: ParamSet,
        detections,
        target_id: int,
        h: np.ndarray,
        c: np.ndarray,
        rng: np.random.Generator,
    ) -> tuple[np.ndarray, np.ndarray, StepRecord]:
        """One policy step; returns (h', c', record with sampled action)."""
        ctx = context.context_matrix(detections, target_id, self.emb)
        obs_vec = context.flatten(ctx)
        graph_emb, cgn_cache = self._graph_forward(params, detections, ctx)
        x = policy.joint_embedding(obs_vec, graph_emb)
        h_new, c_new, lstm_cache = policy.lstm_step(params, x, h, c)
        action, logp, value, entropy, probs = policy.act(params, h_new, rng)
        rec = StepRecord(
            obs_vec=obs_vec,
            cgn_cache=cgn_cache,
            lstm_cache=lstm_cache,
            h_in=h,
            probs=probs,
            action=action,
            log_prob=logp,
            value=value,
            entropy=entropy,
        )
        return h_new, c_new, rec

    def state_value(
        self, params: ParamSet, detections, target_id: int, h: np.ndarray, c: np.ndarray
    ) -> float:
        """Critic value of the state reached after the last rollout step."""
        ctx = context.context_matrix(detections, target_id, self.emb)
        obs_vec = context.flatten(ctx)
        graph_emb, _ = self._graph_forward(params, detections, ctx)
        x = policy.joint_embedding(obs_vec, graph_emb)
        h_new, _, _ = policy.lstm_step(params, x, h, c)
        return policy.value_of(params, h_new)

    def rollout_backward(
        self,
        params: ParamSet,
        records: list[StepRecord],
        step_grads: list[policy.StepGrads],
    ) -> ParamSet:
        """Accumulate parameter gradients through a whole rollout."""
        grads = ParamSet(self.spec)
        dh_next = np.zeros(self.config.lstm_hidden)
        dc_next = np.zeros_like(dh_next)
        variant = self.config.variant
        for rec, sg in zip(reversed(records), reversed(step_grads)):
            dh, head_grads = policy.head_backward(
                params,
                # h' of this step is tanh(c')*o; recover from the cache
                rec.lstm_cache.o * np.tanh(rec.lstm_cache.c_new),
                rec.probs,
                rec.action,
                sg.d_log_prob,
                sg.d_value,
                sg.d_entropy,
            )
            for k, g in head_grads.items():
                grads[k][...] += g
            dx, dh_prev, dc_prev, lstm_grads = policy.lstm_backward(
                params, rec.lstm_cache, dh + dh_next, dc_next, self.input_size
            )
            for k, g in lstm_grads.items():
                grads[k][...] += g
            if variant != "baseline":
                d_graph = dx[self.obs_size :]
                if variant == "no_g":
                    cgrads = cgn.backward_no_g(params, rec.cgn_cache, d_graph)
                else:
                    cgrads = cgn.backward(params, rec.cgn_cache, d_graph)
                for k, g in cgrads.items():
                    grads[k][...] += g
            dh_next = dh_prev
            dc_next = dc_prev
        return grads
