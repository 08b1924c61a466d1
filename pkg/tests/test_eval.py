"""SR/SPL metrics, agents, and the evaluation harness."""

import numpy as np
import pytest

from gridnav.config import Config
from gridnav.evaluation import (
    EpisodeResult,
    EvalReport,
    OracleAgent,
    RandomAgent,
    evaluate,
    run_eval_episode,
    spl,
    sr,
)
from gridnav.objects import RoomType
from gridnav.worldset import build_world_set


def res(success, l, e, room=RoomType.Kitchen):
    return EpisodeResult(success, l, e, room, 0)


# -------------------------------------------------------------------- metrics


def test_sr_hand_examples():
    assert sr([res(True, 4, 4)]) == 1.0
    assert sr([res(True, 1, 1), res(False, 1, 1), res(True, 1, 1), res(False, 1, 1)]) == 0.5
    with pytest.raises(ValueError):
        sr([])


def test_spl_hand_examples():
    assert spl([res(True, 4, 4)]) == 1.0
    assert spl([res(False, 4, 4)]) == 0.0
    # the worked two-episode case: (1*4/8 + 1*6/6)/2 = 0.75
    assert spl([res(True, 4, 8), res(True, 6, 6)]) == pytest.approx(0.75)
    # l = 0 success counts as 1 (guard against 0/0)
    assert spl([res(True, 0, 3)]) == 1.0
    with pytest.raises(ValueError):
        spl([])


def test_spl_bounded_by_sr_fuzz():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n = int(rng.integers(1, 20))
        results = [
            res(bool(rng.random() < 0.5), int(rng.integers(0, 30)), int(rng.integers(0, 60)))
            for _ in range(n)
        ]
        s, p = sr(results), spl(results)
        assert 0.0 <= p <= s <= 1.0


# --------------------------------------------------------------------- report


def sample_report():
    results = [
        res(True, 2, 4, RoomType.Kitchen),
        res(False, 6, 10, RoomType.Kitchen),
        res(True, 7, 7, RoomType.Bedroom),
        res(True, 0, 0, RoomType.Bathroom),
        res(False, 3, 50, RoomType.LivingRoom),
    ]
    return EvalReport("sampled_done", results)


def test_report_filters():
    rep = sample_report()
    assert len(rep.filtered(1)) == 4   # drops the l=0 episode
    assert len(rep.filtered(5)) == 2  # l = 6 and l = 7
    s = rep.summary()
    assert s["all"]["episodes"] == 5
    assert s["L>=1"]["SR"] == pytest.approx(2 / 4)
    assert s["L>=5"]["SR"] == pytest.approx(1 / 2)


def test_per_room_srs_average_to_overall():
    rep = sample_report()
    s = rep.summary()["all"]
    total = sum(
        s[room.value]["SR"] * s[room.value]["episodes"] for room in RoomType
    )
    assert total / s["episodes"] == pytest.approx(s["SR"])


def test_report_csv(tmp_path):
    rep = sample_report()
    path = tmp_path / "report.csv"
    rep.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "filter,room,episodes,SR,SPL"
    assert len(lines) == 1 + 3 * 5  # 3 filters x (overall + 4 rooms)
    assert "table" not in rep.table()  # smoke: renders
    assert "sampled_done" in rep.table()


# -------------------------------------------------------------------- harness


@pytest.fixture(scope="module")
def small_world():
    cfg = Config()
    cfg.world.train_per_room = 2
    cfg.world.test_per_room = 2
    cfg.eval.episodes = 40
    return cfg, build_world_set(5, cfg.world)


def test_oracle_agent_is_perfect(small_world):
    cfg, ws = small_world
    report = evaluate(OracleAgent(cfg.world), ws, cfg, n_episodes=40, seed=1)
    assert sr(report.results) == 1.0
    assert spl(report.results) == 1.0


def test_random_agent_reproducible(small_world):
    cfg, ws = small_world
    a = evaluate(RandomAgent(), ws, cfg, n_episodes=40, seed=3)
    b = evaluate(RandomAgent(), ws, cfg, n_episodes=40, seed=3)
    assert a.results == b.results
    c = evaluate(RandomAgent(), ws, cfg, n_episodes=40, seed=4)
    assert a.results != c.results


def test_mode_dominance_on_shared_seeds(small_world):
    cfg, ws = small_world
    done = evaluate(RandomAgent(), ws, cfg, n_episodes=80, mode="sampled_done", seed=7)
    env = evaluate(RandomAgent(), ws, cfg, n_episodes=80, mode="sampled_or_env", seed=7)
    # per-episode dominance, not just aggregate
    for d, e in zip(done.results, env.results):
        assert e.success >= d.success
    assert sr(env.results) >= sr(done.results)


def test_bad_mode_rejected(small_world):
    cfg, ws = small_world
    fp = ws.test[RoomType.Kitchen][0]
    with pytest.raises(ValueError, match="termination mode"):
        run_eval_episode(RandomAgent(), fp, 0, 1, np.random.default_rng(0), cfg, "bogus")


def test_evaluate_requires_test_plans(small_world):
    cfg, ws = small_world
    from gridnav.worldset import WorldSet

    empty = WorldSet(ws.train, {room: [] for room in RoomType})
    with pytest.raises(ValueError, match="no test floorplans"):
        evaluate(RandomAgent(), empty, cfg, n_episodes=8)
