"""Context-aware three-layer graph convolution with a hand-rolled backward.

Forward:  H1 = relu(A X W0); H2 = relu(A H1 W1); H3 = relu(A [H2 | C] W2)
where A is the normalized adjacency, X the node features and C the per-frame
context matrix injected between the second and third layers.  The output
embedding is the row-major flatten of H3.  The ``no_g`` variant stops after
the second layer and flattens H2 instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .knowledge import EmbeddingTable
from .params import ParamSet, ParamSpec


def cgn_param_spec(num_objects: int, emb_dim: int, h1: int, h2: int, h3: int) -> ParamSpec:
    return [
        ("cgn.W0", (num_objects + emb_dim, h1)),
        ("cgn.W1", (h1, h2)),
        ("cgn.W2", (h2 + 5, h3)),
    ]


def node_features(detections, emb: EmbeddingTable) -> np.ndarray:
    """(|O|, |O|+d) matrix: shared detection indicator columns + per-node embedding."""
    n = emb.vectors.shape[0]
    indicator = np.zeros(n, dtype=np.float64)
    for d in detections:
        indicator[d.class_id] = 1.0
    x = np.empty((n, n + emb.dim), dtype=np.float64)
    x[:, :n] = indicator[None, :]
    x[:, n:] = emb.vectors
    return x


@dataclass
class CgnCache:
    a_hat: np.ndarray
    x: np.ndarray
    c: np.ndarray
    z1: np.ndarray
    h1: np.ndarray
    z2: np.ndarray
    h2: np.ndarray
    h2c: np.ndarray
    z3: np.ndarray
    consumed: bool = False


def forward(
    params: ParamSet, a_hat: np.ndarray, x: np.ndarray, c: np.ndarray
) -> tuple[np.ndarray, CgnCache]:
    w0, w1, w2 = params["cgn.W0"], params["cgn.W1"], params["cgn.W2"]
    n = a_hat.shape[0]
    if x.shape[0] != n or c.shape != (n, 5) or x.shape[1] != w0.shape[0]:
        raise ValueError(
            f"shape mismatch: A {a_hat.shape}, X {x.shape}, C {c.shape}, W0 {w0.shape}"
        )
    z1 = a_hat @ x @ w0
    h1 = np.maximum(z1, 0.0)
    z2 = a_hat @ h1 @ w1
    h2 = np.maximum(z2, 0.0)
    h2c = np.concatenate([h2, c], axis=1)
    z3 = a_hat @ h2c @ w2
    h3 = np.maximum(z3, 0.0)
    cache = CgnCache(a_hat, x, c, z1, h1, z2, h2, h2c, z3)
    return h3.reshape(-1), cache


def backward(params: ParamSet, cache: CgnCache, grad_embedding: np.ndarray) -> dict[str, np.ndarray]:
    """Gradients of the flattened embedding w.r.t. W0, W1, W2.

    A cache feeds exactly one backward; reuse raises (stale cache).
    """
    if cache.consumed:
        raise RuntimeError("stale CGN cache: backward already consumed it")
    cache.consumed = True
    w1, w2 = params["cgn.W1"], params["cgn.W2"]
    a = cache.a_hat
    h2_cols = cache.h2.shape[1]
    g3 = grad_embedding.reshape(cache.z3.shape) * (cache.z3 > 0)
    grad_w2 = (a @ cache.h2c).T @ g3
    dh2c = a.T @ g3 @ w2.T
    g2 = dh2c[:, :h2_cols] * (cache.z2 > 0)
    grad_w1 = (a @ cache.h1).T @ g2
    dh1 = a.T @ g2 @ w1.T
    g1 = dh1 * (cache.z1 > 0)
    grad_w0 = (a @ cache.x).T @ g1
    return {"cgn.W0": grad_w0, "cgn.W1": grad_w1, "cgn.W2": grad_w2}


def forward_no_g(
    params: ParamSet, a_hat: np.ndarray, x: np.ndarray
) -> tuple[np.ndarray, CgnCache]:
    """Two-layer variant: the intermediate embedding is the output."""
    n = a_hat.shape[0]
    out, cache = forward(params, a_hat, x, np.zeros((n, 5)))
    return cache.h2.reshape(-1), cache


def backward_no_g(params: ParamSet, cache: CgnCache, grad_embedding: np.ndarray) -> dict[str, np.ndarray]:
    if cache.consumed:
        raise RuntimeError("stale CGN cache: backward already consumed it")
    cache.consumed = True
    w1 = params["cgn.W1"]
    a = cache.a_hat
    g2 = grad_embedding.reshape(cache.z2.shape) * (cache.z2 > 0)
    grad_w1 = (a @ cache.h1).T @ g2
    dh1 = a.T @ g2 @ w1.T
    g1 = dh1 * (cache.z1 > 0)
    grad_w0 = (a @ cache.x).T @ g1
    return {
        "cgn.W0": grad_w0,
        "cgn.W1": grad_w1,
        "cgn.W2": np.zeros_like(params["cgn.W2"]),
    }
