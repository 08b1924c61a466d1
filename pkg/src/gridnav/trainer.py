"""Asynchronous actor-critic training with a shared Adam optimizer.

Workers run episodes against private parameter snapshots, push whole-rollout
gradients to a shared store under a lock (applies are serialized and totally
ordered), then refresh their snapshot.  With one worker and a fixed seed the
whole loop is bit-deterministic.
"""

from __future__ import annotations

import csv
import os
import struct
import threading
import time
from dataclasses import dataclass

import numpy as np

from . import reward as reward_mod
from .config import Config
from .knowledge import PartialRewardMatrix, build_partial_reward_matrix
from .model import AgentModel
from .objects import RoomType, class_name, room_parents
from .params import ParamSet
from .policy import RolloutStep, a3c_loss
from .world.agent import Action, spawn, step
from .world.detector import detect, is_visible
from .worldset import WorldSet, draw_episode

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class SharedParams:
    """Shared flat parameter vector + shared Adam moments, lock-serialized."""

    def __init__(self, vector: np.ndarray, lr: float, clip_norm: float):
        self.vector = vector.astype(np.float64, copy=True)
        self.m = np.zeros_like(self.vector)
        self.v = np.zeros_like(self.vector)
        self.t = 0
        self.version = 0
        self.lr = lr
        self.clip_norm = clip_norm
        self.rejected = 0
        self.lock = threading.Lock()

    def snapshot(self) -> tuple[np.ndarray, int]:
        with self.lock:
            return self.vector.copy(), self.version

    def apply(self, grads: np.ndarray, apply_log: list | None = None) -> bool:
        """One clipped Adam update; returns False for rejected nonfinite grads."""
        if not np.all(np.isfinite(grads)):
            with self.lock:
                self.rejected += 1
            return False
        with self.lock:
            g = grads
            norm = float(np.linalg.norm(g))
            if self.clip_norm > 0 and norm > self.clip_norm:
                g = g * (self.clip_norm / norm)
            self.t += 1
            self.m[...] = ADAM_BETA1 * self.m + (1 - ADAM_BETA1) * g
            self.v[...] = ADAM_BETA2 * self.v + (1 - ADAM_BETA2) * g * g
            m_hat = self.m / (1 - ADAM_BETA1**self.t)
            v_hat = self.v / (1 - ADAM_BETA2**self.t)
            self.vector -= self.lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
            self.version += 1
            if apply_log is not None:
                apply_log.append(grads.copy())
            if not np.all(np.isfinite(self.vector)):
                raise FloatingPointError("parameter vector became non-finite")
            return True


@dataclass
class EpisodeStats:
    success: bool
    length: int
    ep_return: float
    room: RoomType
    target: int


def run_episode(
    model: AgentModel,
    shared: SharedParams,
    floorplan,
    target_id: int,
    rng: np.random.Generator,
    config: Config,
    matrix: PartialRewardMatrix,
    spawn_seed: int,
) -> EpisodeStats:
    """One episode: roll, learn every rollout_length steps, return stats."""
    wcfg, rcfg, tcfg = config.world, config.reward, config.trainer
    parent_ids = [c.id for c in room_parents(floorplan.room_type)]
    params = ParamSet(model.spec, shared.snapshot()[0])
    h, c = model.zero_state()
    seen = reward_mod.reset()
    pose = spawn(floorplan, spawn_seed)
    records, rollout = [], []
    ep_return = 0.0
    length = 0
    success = False

    for t in range(tcfg.max_episode_steps):
        dets = detect(floorplan, pose, wcfg)
        h, c, rec = model.step_forward(params, dets, target_id, h, c, rng)
        visible_parents = frozenset(
            p for p in parent_ids if is_visible(dets, p, wcfg.visibility_distance)
        )
        target_visible = is_visible(dets, target_id, wcfg.visibility_distance)
        r, seen = reward_mod.judge(
            visible_parents, target_visible, rec.action, target_id, seen, matrix, rcfg
        )
        terminal = rec.action == Action.Done
        success = terminal and target_visible
        ep_return += r
        length += 1
        records.append(rec)
        rollout.append(
            RolloutStep(rec.action, rec.log_prob, rec.value, r, rec.entropy, terminal)
        )
        if not terminal:
            pose = step(floorplan, pose, rec.action)
        last = terminal or t == tcfg.max_episode_steps - 1
        if len(rollout) == tcfg.rollout_length or last:
            if terminal:
                bootstrap = 0.0
            else:
                bootstrap = model.state_value(
                    params, detect(floorplan, pose, wcfg), target_id, h, c
                )
            _, step_grads = a3c_loss(
                rollout, bootstrap, tcfg.gamma, tcfg.entropy_beta, tcfg.value_coef
            )
            grads = model.rollout_backward(params, records, step_grads)
            shared.apply(grads.vector)
            params = ParamSet(model.spec, shared.snapshot()[0])
            records, rollout = [], []
        if terminal:
            break

    return EpisodeStats(success, length, ep_return, floorplan.room_type, target_id)


def build_reward_matrices(world_set: WorldSet, radius: float = 1.0):
    return {
        room: build_partial_reward_matrix(world_set.train[room], room, radius)
        for room in RoomType
    }


def train(
    config: Config,
    world_set: WorldSet,
    model: AgentModel,
    out_dir,
    matrices: dict[RoomType, PartialRewardMatrix] | None = None,
    resume: str | None = None,
    quiet: bool = True,
) -> ParamSet:
    """Run the multi-worker loop; writes metrics CSV and checkpoints."""
    tcfg = config.trainer
    os.makedirs(out_dir, exist_ok=True)
    if matrices is None:
        matrices = build_reward_matrices(world_set, config.world.co_place_radius)

    if resume is not None:
        ck = load_checkpoint(resume, model)
        shared = SharedParams(ck["params"], tcfg.lr, tcfg.clip_norm)
        shared.m[...] = ck["adam_m"]
        shared.v[...] = ck["adam_v"]
        shared.t = ck["adam_t"]
        shared.version = ck["version"]
        episodes_done = ck["episodes"]
    else:
        shared = SharedParams(model.init_params(tcfg.seed).vector, tcfg.lr, tcfg.clip_norm)
        episodes_done = 0

    all_train = world_set.all_train()
    counter = {"next": episodes_done}
    counter_lock = threading.Lock()
    csv_path = os.path.join(out_dir, "metrics.csv")
    csv_lock = threading.Lock()
    new_file = resume is None or not os.path.exists(csv_path)
    csv_file = open(csv_path, "w" if new_file else "a", newline="")
    writer = csv.writer(csv_file)
    if new_file:
        writer.writerow(
            ["episode", "worker", "room", "target", "success", "length", "return", "wallclock_ms"]
        )
    errors: list[BaseException] = []

    def worker(worker_id: int):
        rng = np.random.default_rng(np.random.PCG64((tcfg.seed, worker_id)))
        try:
            while True:
                with counter_lock:
                    if counter["next"] >= tcfg.max_episodes:
                        return
                    episode = counter["next"]
                    counter["next"] += 1
                t0 = time.perf_counter()
                fp, target, spawn_seed = draw_episode(all_train, rng)
                stats = run_episode(
                    model, shared, fp, target, rng, config, matrices[fp.room_type], spawn_seed
                )
                ms = (time.perf_counter() - t0) * 1000.0
                with csv_lock:
                    writer.writerow(
                        [
                            episode,
                            worker_id,
                            stats.room.value,
                            class_name(stats.target),
                            int(stats.success),
                            stats.length,
                            repr(stats.ep_return),
                            f"{ms:.3f}",
                        ]
                    )
                if tcfg.checkpoint_every and (episode + 1) % tcfg.checkpoint_every == 0:
                    save_checkpoint(
                        os.path.join(out_dir, "checkpoint.bin"), model, shared, episode + 1
                    )
        except BaseException as e:  # surface worker crashes to the caller
            errors.append(e)

    threads = [threading.Thread(target=worker, args=(w,)) for w in range(tcfg.workers)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    csv_file.close()
    if errors:
        raise errors[0]
    save_checkpoint(os.path.join(out_dir, "checkpoint.bin"), model, shared, tcfg.max_episodes)
    return ParamSet(model.spec, shared.vector.copy())


# -------------------------------------------------------------- checkpoints

_MAGIC = b"GNVC"
_FORMAT_VERSION = 1
_VARIANT_CODE = {"full": 0, "no_g": 1, "baseline": 2}


def save_checkpoint(path, model: AgentModel, shared: SharedParams, episodes: int) -> None:
    cfg = model.config
    with shared.lock:
        vec, m, v, t, version = (
            shared.vector.copy(),
            shared.m.copy(),
            shared.v.copy(),
            shared.t,
            shared.version,
        )
    header = struct.pack(
        "<4sI7I4Q",
        _MAGIC,
        _FORMAT_VERSION,
        model.num_objects,
        cfg.emb_dim,
        cfg.h1,
        cfg.h2,
        cfg.h3,
        cfg.lstm_hidden,
        _VARIANT_CODE[cfg.variant],
        vec.size,
        episodes,
        t,
        version,
    )
    tmp = str(path) + ".tmp"
    with open(tmp, "wb") as f:
        f.write(header)
        f.write(vec.astype("<f8").tobytes())
        f.write(m.astype("<f8").tobytes())
        f.write(v.astype("<f8").tobytes())
    os.replace(tmp, path)


def load_checkpoint(path, model: AgentModel | None = None) -> dict:
    with open(path, "rb") as f:
        head = f.read(struct.calcsize("<4sI7I4Q"))
        magic, fmt, n, d, h1, h2, h3, hidden, variant, size, episodes, t, version = (
            struct.unpack("<4sI7I4Q", head)
        )
        if magic != _MAGIC or fmt != _FORMAT_VERSION:
            raise ValueError(f"{path}: not a checkpoint (magic {magic!r}, v{fmt})")
        params = np.frombuffer(f.read(size * 8), dtype="<f8").copy()
        m = np.frombuffer(f.read(size * 8), dtype="<f8").copy()
        v = np.frombuffer(f.read(size * 8), dtype="<f8").copy()
    out = {
        "num_objects": n,
        "emb_dim": d,
        "h1": h1,
        "h2": h2,
        "h3": h3,
        "lstm_hidden": hidden,
        "variant": {v_: k for k, v_ in _VARIANT_CODE.items()}[variant],
        "episodes": episodes,
        "adam_t": t,
        "version": version,
        "params": params,
        "adam_m": m,
        "adam_v": v,
    }
    if model is not None:
        dims = (model.num_objects, model.config.emb_dim, model.config.h1,
                model.config.h2, model.config.h3, model.config.lstm_hidden)
        if (n, d, h1, h2, h3, hidden) != dims or model.config.variant != out["variant"]:
            raise ValueError(f"{path}: checkpoint shape/variant does not match model")
        if size != sum(int(np.prod(s)) for _, s in model.spec):
            raise ValueError(f"{path}: parameter count mismatch")
    return out
