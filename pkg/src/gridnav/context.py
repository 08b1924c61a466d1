"""Per-frame context matrix: one 5-D state row per object class.

Row j is [detected, bbox center x, bbox center y, bbox area, cosine
similarity of class j's embedding to the target's].  Geometric fields reset
to zero for undetected classes; the similarity column is frame-independent
and populated for every row.
"""

from __future__ import annotations

import numpy as np

from .knowledge import EmbeddingTable

CONTEXT_DIM = 5


def similarity_column(emb: EmbeddingTable, target_id: int) -> np.ndarray:
    """Cosine similarity of every class embedding to the target's."""
    g = emb.vectors
    norms = np.linalg.norm(g, axis=1)
    gt = g[target_id]
    return (g @ gt) / (norms * np.linalg.norm(gt))


def context_matrix(detections, target_id: int, emb: EmbeddingTable) -> np.ndarray:
    """(num classes, 5) float array in class-id order."""
    n = emb.vectors.shape[0]
    m = np.zeros((n, CONTEXT_DIM), dtype=np.float64)
    m[:, 4] = similarity_column(emb, target_id)
    for d in detections:
        m[d.class_id, 0] = 1.0
        m[d.class_id, 1] = d.x_c
        m[d.class_id, 2] = d.y_c
        m[d.class_id, 3] = d.bbox_area
    return m


def flatten(m: np.ndarray) -> np.ndarray:
    """Row-major flatten to the length 5*|O| observation vector."""
    return m.reshape(-1).copy()


def unflatten(v: np.ndarray) -> np.ndarray:
    if v.size % CONTEXT_DIM != 0:
        raise ValueError(f"length {v.size} is not a multiple of {CONTEXT_DIM}")
    return v.reshape(-1, CONTEXT_DIM).copy()
