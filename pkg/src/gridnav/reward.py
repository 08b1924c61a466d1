"""Shaped reward: target reward on success, one-shot parent bonuses, step penalty.

A visible parent not yet rewarded this episode yields a bonus proportional to
how strongly it predicts the target; only the strongest eligible parent is
rewarded and each parent pays out at most once per episode.  On a successful
termination the seen-set is cleared first, so a parent still in view at the
end is rewarded again on top of the target reward.
"""

from __future__ import annotations

from .config import RewardConfig
from .knowledge import PartialRewardMatrix
from .objects import class_name
from .world.agent import Action

SeenList = frozenset


def reset() -> frozenset[int]:
    """Fresh per-episode seen-set."""
    return frozenset()


def _partial(
    visible_parents: frozenset[int],
    target_name: str,
    seen: frozenset[int],
    matrix: PartialRewardMatrix,
    cfg: RewardConfig,
) -> tuple[float | None, frozenset[int]]:
    row = matrix.rows[target_name]
    eligible = [p for p in visible_parents if p not in seen]
    if not eligible:
        return None, seen
    # strongest eligible parent; ties broken by lowest class id
    best = min(eligible, key=lambda p: (-row[class_name(p)], p))
    bonus = row[class_name(best)] * cfg.target_reward * cfg.scale_k
    if not cfg.shaped:
        bonus = 0.0
    return bonus, seen | {best}


def judge(
    visible_parents: frozenset[int],
    target_visible: bool,
    action: Action,
    target_id: int,
    seen: frozenset[int],
    matrix: PartialRewardMatrix,
    cfg: RewardConfig | None = None,
) -> tuple[float, frozenset[int]]:
    """Reward for one (state, action) and the updated seen-set.

    ``visible_parents`` are the parent classes passing the visibility
    predicate in the current frame.
    """
    cfg = cfg or RewardConfig()
    tname = class_name(target_id)
    if tname not in matrix.rows:
        raise KeyError(f"no reward-matrix row for target {tname}")
    if action != Action.Done:
        bonus, seen = _partial(visible_parents, tname, seen, matrix, cfg)
        if bonus is None:
            return -cfg.step_penalty, seen
        return bonus, seen
    if target_visible:
        # successful termination: clear first, then pay the final parent bonus
        bonus, seen = _partial(visible_parents, tname, reset(), matrix, cfg)
        return cfg.target_reward + (bonus or 0.0), seen
    return -cfg.step_penalty, seen
