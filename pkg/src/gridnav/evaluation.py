"""SR/SPL metrics, evaluation harness, and comparison agents.

Success rate is the fraction of successful episodes; SPL weighs each success
by optimal-over-actual path length.  The harness runs seeded episodes per
room type on the test split, under either termination mode: the agent's own
Done action, or the environment ending the episode the moment the success
predicate holds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Config
from .model import AgentModel
from .objects import RoomType, class_name
from .params import ParamSet
from .world.agent import Action, AgentPose, spawn, step
from .world.detector import detect, is_visible
from .world.pathing import optimal_path_length, shortest_path_actions
from .worldset import WorldSet, draw_episode

MODES = ("sampled_done", "sampled_or_env")


@dataclass(frozen=True)
class EpisodeResult:
    success: bool
    optimal_length: int   # l
    actual_length: int    # e, movement actions (terminal Done not counted)
    room: RoomType
    target: int


def sr(results: list[EpisodeResult]) -> float:
    if not results:
        raise ValueError("no episode results")
    return sum(r.success for r in results) / len(results)


def spl(results: list[EpisodeResult]) -> float:
    """Mean of S * l / max(l, e); an l = 0 success counts as 1."""
    if not results:
        raise ValueError("no episode results")
    total = 0.0
    for r in results:
        if not r.success:
            continue
        if r.optimal_length == 0:
            total += 1.0
        else:
            total += r.optimal_length / max(r.optimal_length, r.actual_length)
    return total / len(results)


# ------------------------------------------------------------------- agents


class RandomAgent:
    """Uniform over the 6 actions."""

    def reset(self, floorplan, target_id: int) -> None:
        pass

    def act(self, floorplan, pose, detections, rng) -> Action:
        return Action(int(rng.integers(len(Action))))


class OracleAgent:
    """Follows the shortest-path oracle and terminates on visibility."""

    def __init__(self, world_config=None):
        self.world_config = world_config
        self._plan: list[Action] = []

    def reset(self, floorplan, target_id: int) -> None:
        self._fp = floorplan
        self._target = target_id
        self._plan = []
        self._planned = False

    def act(self, floorplan, pose, detections, rng) -> Action:
        if not self._planned:
            self._plan = list(
                shortest_path_actions(floorplan, pose, self._target, self.world_config)
            )
            self._planned = True
        if self._plan:
            return self._plan.pop(0)
        return Action.Done


class PolicyAgent:
    """Trained model; samples from the policy with recurrent state."""

    def __init__(self, model: AgentModel, params: ParamSet):
        self.model = model
        self.params = params
        self.last_probs = None

    def reset(self, floorplan, target_id: int) -> None:
        self._target = target_id
        self._h, self._c = self.model.zero_state()
        self.last_probs = None

    def act(self, floorplan, pose, detections, rng) -> Action:
        self._h, self._c, rec = self.model.step_forward(
            self.params, detections, self._target, self._h, self._c, rng
        )
        self.last_probs = rec.probs.tolist()
        return rec.action


def baseline_agent(model: AgentModel, params: ParamSet) -> PolicyAgent:
    """Observation-only agent: same pipeline with the graph slice zeroed."""
    if model.config.variant != "baseline":
        raise ValueError("baseline_agent expects a model built with variant='baseline'")
    return PolicyAgent(model, params)


def random_agent() -> RandomAgent:
    return RandomAgent()


# ------------------------------------------------------------------ harness


def run_eval_episode(
    agent,
    floorplan,
    target_id: int,
    spawn_seed: int,
    rng: np.random.Generator,
    config: Config,
    mode: str = "sampled_done",
) -> EpisodeResult:
    wcfg = config.world
    if mode not in MODES:
        raise ValueError(f"unknown termination mode {mode!r}")
    pose = spawn(floorplan, spawn_seed)
    l_opt = optimal_path_length(floorplan, pose, target_id, wcfg)
    agent.reset(floorplan, target_id)
    moves = 0
    success = False
    for _ in range(config.eval.max_episode_steps):
        dets = detect(floorplan, pose, wcfg)
        target_visible = is_visible(dets, target_id, wcfg.visibility_distance)
        if mode == "sampled_or_env" and target_visible:
            success = True
            break
        action = agent.act(floorplan, pose, dets, rng)
        if action == Action.Done:
            success = target_visible
            break
        pose = step(floorplan, pose, action)
        moves += 1
    return EpisodeResult(success, l_opt, moves, floorplan.room_type, target_id)


@dataclass
class EvalReport:
    mode: str
    results: list[EpisodeResult]

    def filtered(self, min_l: int) -> list[EpisodeResult]:
        return [r for r in self.results if r.optimal_length >= min_l]

    def summary(self) -> dict:
        out = {}
        for label, min_l in (("all", 0), ("L>=1", 1), ("L>=5", 5)):
            sub = self.filtered(min_l)
            out[label] = {
                "episodes": len(sub),
                "SR": sr(sub) if sub else 0.0,
                "SPL": spl(sub) if sub else 0.0,
            }
            for room in RoomType:
                rsub = [r for r in sub if r.room is room]
                out[label][room.value] = {
                    "episodes": len(rsub),
                    "SR": sr(rsub) if rsub else 0.0,
                    "SPL": spl(rsub) if rsub else 0.0,
                }
        return out

    def table(self) -> str:
        s = self.summary()
        lines = [f"termination mode: {self.mode}"]
        header = f"{'split':8} {'N':>5} {'SR':>7} {'SPL':>7}"
        lines.append(header)
        for label in ("L>=1", "L>=5"):
            d = s[label]
            lines.append(f"{label:8} {d['episodes']:>5} {d['SR']:>7.3f} {d['SPL']:>7.3f}")
            for room in RoomType:
                rd = d[room.value]
                lines.append(
                    f"  {room.value:<10} {rd['episodes']:>3} {rd['SR']:>7.3f} {rd['SPL']:>7.3f}"
                )
        return "\n".join(lines)

    def to_csv(self, path) -> None:
        import csv

        s = self.summary()
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["filter", "room", "episodes", "SR", "SPL"])
            for label in ("all", "L>=1", "L>=5"):
                d = s[label]
                w.writerow([label, "overall", d["episodes"], d["SR"], d["SPL"]])
                for room in RoomType:
                    rd = d[room.value]
                    w.writerow([label, room.value, rd["episodes"], rd["SR"], rd["SPL"]])


def evaluate(
    agent,
    world_set: WorldSet,
    config: Config,
    n_episodes: int | None = None,
    mode: str | None = None,
    seed: int | None = None,
) -> EvalReport:
    """Seeded episodes split evenly across the 4 room types on the test split."""
    mode = mode or config.eval.mode
    seed = config.eval.seed if seed is None else seed
    n_episodes = n_episodes or config.eval.episodes
    per_room = n_episodes // len(RoomType)
    results = []
    for k, room in enumerate(RoomType):
        plans = world_set.test.get(room, [])
        if not plans:
            raise ValueError(f"no test floorplans for {room.value}")
        rng = np.random.default_rng(np.random.PCG64((seed, k)))
        for ep in range(per_room):
            fp, target, spawn_seed = draw_episode(plans, rng)
            # per-episode action stream, so termination modes share trajectories
            ep_rng = np.random.default_rng(np.random.PCG64((seed, k, ep)))
            results.append(
                run_eval_episode(agent, fp, target, spawn_seed, ep_rng, config, mode)
            )
    return EvalReport(mode, results)
