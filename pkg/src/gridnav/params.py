"""Flat parameter vector with named matrix views.

All learnable weights live in one contiguous float64 vector so the shared
optimizer, checkpointing, and gradient clipping can treat them uniformly;
forward/backward code addresses them by name through numpy views.
"""

from __future__ import annotations

import numpy as np

ParamSpec = list[tuple[str, tuple[int, ...]]]


class ParamSet:
    def __init__(self, spec: ParamSpec, vector: np.ndarray | None = None):
        self.spec = list(spec)
        total = sum(int(np.prod(shape)) for _, shape in self.spec)
        if vector is None:
            vector = np.zeros(total, dtype=np.float64)
        if vector.shape != (total,):
            raise ValueError(f"vector length {vector.shape} != {total}")
        self.vector = vector
        self.views: dict[str, np.ndarray] = {}
        off = 0
        for name, shape in self.spec:
            size = int(np.prod(shape))
            self.views[name] = self.vector[off : off + size].reshape(shape)
            off += size

    def __getitem__(self, name: str) -> np.ndarray:
        return self.views[name]

    @property
    def size(self) -> int:
        return self.vector.size

    def copy(self) -> "ParamSet":
        return ParamSet(self.spec, self.vector.copy())

    def zeros_like(self) -> "ParamSet":
        return ParamSet(self.spec)


def init_params(spec: ParamSpec, seed: int) -> ParamSet:
    """Uniform(-a, a) with a = 1/sqrt(fan_in) for matrices; zero biases."""
    rng = np.random.default_rng(np.random.PCG64(seed))
    ps = ParamSet(spec)
    for name, shape in spec:
        v = ps.views[name]
        if len(shape) >= 2:
            a = 1.0 / np.sqrt(shape[0])
            v[...] = rng.uniform(-a, a, size=shape)
        else:
            v[...] = 0.0
    return ps
