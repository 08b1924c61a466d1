"""Command-line surface: world generation, artifacts, training, evaluation."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import gradcheck as gradcheck_mod
from . import knowledge, trajectory
from .config import Config, ConfigError, apply_overrides, load_config, save_config
from .evaluation import OracleAgent, PolicyAgent, RandomAgent, evaluate
from .model import AgentModel
from .objects import CLASSES, RoomType
from .params import ParamSet
from .trainer import build_reward_matrices, load_checkpoint, train
from .worldset import build_world_set, draw_episode, load_world_set, save_world_set

GRAPH_HEADER = "gridnav-graph v1"


def save_graph(graph: knowledge.KnowledgeGraph, path) -> None:
    names = [CLASSES[i].name for i in graph.node_order]
    with open(path, "w") as f:
        f.write(GRAPH_HEADER + "\n")
        f.write(" ".join(names) + "\n")
        for row in graph.adjacency:
            f.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_graph(path) -> knowledge.KnowledgeGraph:
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f if ln.strip()]
    if lines[0] != GRAPH_HEADER:
        raise ValueError(f"{path}: not a graph file")
    names = lines[1].split()
    adjacency = np.array([[float(v) for v in ln.split()] for ln in lines[2:]])
    order = [knowledge.class_by_name(n).id for n in names]
    return knowledge.KnowledgeGraph(
        order, adjacency, knowledge.normalize_adjacency(adjacency)
    )


def _config_from_args(args) -> Config:
    cfg = load_config(args.config) if getattr(args, "config", None) else Config()
    return apply_overrides(cfg, getattr(args, "set", None) or [])


def _build_model(cfg: Config, emb_path=None, graph_path=None, seed=0) -> AgentModel:
    emb = (
        knowledge.load_embeddings(emb_path)
        if emb_path
        else knowledge.synth_embeddings(seed, cfg.model.emb_dim)
    )
    graph = (
        load_graph(graph_path)
        if graph_path
        else knowledge.default_graph(cfg.model.weighted_graph)
    )
    return AgentModel(cfg.model, graph, emb)


def _world_set(args, cfg: Config):
    if getattr(args, "world", None):
        return load_world_set(args.world)
    return build_world_set(args.seed, cfg.world)


def cmd_gen_floorplans(args) -> int:
    cfg = _config_from_args(args)
    if args.per_room is not None:
        n_test = max(1, args.per_room // 3)
        cfg.world.train_per_room = args.per_room - n_test
        cfg.world.test_per_room = n_test
    ws = build_world_set(args.seed, cfg.world)
    save_world_set(ws, args.out)
    total = sum(len(v) for v in ws.train.values()) + sum(len(v) for v in ws.test.values())
    print(f"wrote {total} floorplans to {args.out}")
    return 0


def cmd_build_graph(args) -> int:
    triples = knowledge.load_triples(args.triples)
    aliases = knowledge.load_aliases(args.aliases)
    graph = knowledge.build_graph(triples, aliases, weighted=args.weighted)
    save_graph(graph, args.out)
    edges = int((graph.adjacency > 0).sum() // 2)
    print(
        f"graph: {len(graph.node_order)} nodes, {edges} edges, "
        f"{graph.skipped_triples} triples skipped"
    )
    return 0


def cmd_build_reward_matrix(args) -> int:
    ws = load_world_set(args.world)
    room = RoomType(args.room)
    m = knowledge.build_partial_reward_matrix(ws.train[room], room, args.radius)
    knowledge.save_partial_reward_matrix(m, args.out)
    print(f"wrote reward matrix for {room.value} to {args.out}")
    return 0


def cmd_train(args) -> int:
    cfg = _config_from_args(args)
    cfg.trainer.seed = args.seed
    if args.episodes is not None:
        cfg.trainer.max_episodes = args.episodes
    if args.workers is not None:
        cfg.trainer.workers = args.workers
    if args.variant is not None:
        cfg.model.variant = args.variant
    if args.unshaped:
        cfg.reward.shaped = False
    os.makedirs(args.out, exist_ok=True)
    save_config(cfg, os.path.join(args.out, "config.json"))
    ws = _world_set(args, cfg)
    model = _build_model(cfg, args.embeddings, args.graph, args.seed)
    train(cfg, ws, model, args.out, resume=args.resume)
    print(f"trained {cfg.trainer.max_episodes} episodes; checkpoint in {args.out}")
    return 0


def cmd_eval(args) -> int:
    cfg = _config_from_args(args)
    cfg.eval.seed = args.seed
    if args.episodes is not None:
        cfg.eval.episodes = args.episodes
    if args.mode is not None:
        cfg.eval.mode = args.mode
    ws = _world_set(args, cfg)
    if args.agent == "random":
        agent = RandomAgent()
    elif args.agent == "oracle":
        agent = OracleAgent(cfg.world)
    else:
        if not args.checkpoint:
            print("eval: --checkpoint required for the policy agent", file=sys.stderr)
            return 2
        ck = load_checkpoint(args.checkpoint)
        cfg.model.variant = ck["variant"]
        model = _build_model(cfg, args.embeddings, args.graph, args.seed)
        load_checkpoint(args.checkpoint, model)  # shape check
        agent = PolicyAgent(model, ParamSet(model.spec, ck["params"]))
    report = evaluate(agent, ws, cfg)
    print(report.table())
    if args.out:
        report.to_csv(args.out)
    if args.dump:
        matrices = build_reward_matrices(ws, cfg.world.co_place_radius)
        emb = (
            knowledge.load_embeddings(args.embeddings)
            if args.embeddings
            else knowledge.synth_embeddings(args.seed, cfg.model.emb_dim)
        )
        episodes = []
        rng = np.random.default_rng(np.random.PCG64((args.seed, 999)))
        for room in RoomType:
            for _ in range(max(1, cfg.eval.episodes // 40)):
                fp, target, spawn_seed = draw_episode(ws.test[room], rng)
                agent.reset(fp, target)
                episodes.append(
                    trajectory.record_episode(
                        agent, fp, target, spawn_seed, rng, cfg, matrices[room], emb
                    )
                )
        trajectory.save_dump(episodes, args.dump)
        print(f"dumped {len(episodes)} episodes to {args.dump}")
    return 0


def cmd_replay(args) -> int:
    cfg = _config_from_args(args)
    episodes = trajectory.load_dump(args.dump)
    if args.world:
        matrices = build_reward_matrices(load_world_set(args.world), cfg.world.co_place_radius)
    else:
        matrices = {room: knowledge.load_paper_matrix(room) for room in RoomType}
    diffs = trajectory.replay(episodes, matrices, cfg)
    if diffs:
        for d in diffs[:20]:
            print(
                f"episode {d['episode']} step {d['step']}: "
                f"stored {d['stored']} replayed {d['replayed']}"
            )
        print(f"{len(diffs)} reward diffs")
        return 1
    print(f"replayed {len(episodes)} episodes: zero diffs")
    return 0


def cmd_gradcheck(args) -> int:
    seeds = range(args.seed, args.seed + args.seeds)
    worst = gradcheck_mod.run_suite(seeds)
    ok = True
    for name, err in sorted(worst.items()):
        status = "ok" if err < 1e-4 else "FAIL"
        if err >= 1e-4:
            ok = False
        print(f"{name:20} max rel err {err:.3e}  {status}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gridnav")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed_required=True):
        sp.add_argument("--seed", type=int, required=seed_required)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument(
            "--set", action="append", metavar="SECTION.KEY=VALUE", help="config override"
        )

    sp = sub.add_parser("gen-floorplans", help="generate a train/test world set")
    common(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--per-room", type=int, default=None)
    sp.set_defaults(func=cmd_gen_floorplans)

    sp = sub.add_parser("build-graph", help="build the knowledge graph from triples")
    sp.add_argument("--triples", required=True, dest="triples")
    sp.add_argument("--aliases", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--weighted", action="store_true")
    sp.set_defaults(func=cmd_build_graph, config=None, set=None)

    sp = sub.add_parser("build-reward-matrix", help="count co-locations on the train split")
    sp.add_argument("--world", required=True, dest="world")
    sp.add_argument("--room", required=True, choices=[r.value for r in RoomType])
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_build_reward_matrix, config=None, set=None)

    sp = sub.add_parser("train", help="train an agent")
    common(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--world", help="floorplan directory (default: generate from seed)")
    sp.add_argument("--episodes", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--variant", choices=["full", "no_g", "baseline"])
    sp.add_argument("--unshaped", action="store_true", help="disable parent bonuses")
    sp.add_argument("--resume", help="checkpoint to resume from")
    sp.add_argument("--embeddings", help="embedding file (default: synthesized)")
    sp.add_argument("--graph", help="graph file (default: shipped triples)")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("eval", help="evaluate an agent on the test split")
    common(sp)
    sp.add_argument("--checkpoint")
    sp.add_argument("--agent", choices=["policy", "random", "oracle"], default="policy")
    sp.add_argument("--mode", choices=["sampled_done", "sampled_or_env"])
    sp.add_argument("--episodes", type=int)
    sp.add_argument("--world")
    sp.add_argument("--embeddings")
    sp.add_argument("--graph")
    sp.add_argument("--out", help="write report CSV here")
    sp.add_argument("--dump", help="write trajectory dump here")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("replay", help="re-score a trajectory dump")
    sp.add_argument("dump")
    sp.add_argument("--world")
    sp.set_defaults(func=cmd_replay, config=None, set=None)

    sp = sub.add_parser("gradcheck", help="finite-difference gradient verification")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--seeds", type=int, default=10)
    sp.set_defaults(func=cmd_gradcheck, config=None, set=None)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
