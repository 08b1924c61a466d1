"""Knowledge graph, word embeddings, and the parent-conditioned reward matrix.

The graph is built from relation triples (subject, predicate, object) whose
surface forms are mapped to canonical class names through an alias table.
The adjacency is symmetrized and normalized Kipf-style as
D^{-1/2} (A + I) D^{-1/2}.

The reward matrix gives, per room type and target class, a probability
distribution over parent classes estimated from how often each target sits
within 1 meter of each parent across the training floorplans.  The published
per-room matrices ship as data files and can be used directly.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field

import numpy as np

from .objects import (
    CLASSES,
    NUM_CLASSES,
    ObjectClass,
    Role,
    RoomType,
    class_by_name,
    room_parents,
    room_targets,
)


@dataclass(frozen=True)
class RelationTriple:
    subject: str
    predicate: str
    object: str

    def __post_init__(self):
        if not (self.subject and self.predicate and self.object):
            raise ValueError("triple fields must be nonempty")


@dataclass
class KnowledgeGraph:
    node_order: list[int]
    adjacency: np.ndarray
    normalized_adjacency: np.ndarray
    skipped_triples: int = 0


def normalize_adjacency(adjacency: np.ndarray) -> np.ndarray:
    """D^{-1/2} (A + I) D^{-1/2}, with D the degree matrix of A + I."""
    a_hat = adjacency + np.eye(adjacency.shape[0])
    d = a_hat.sum(axis=1)
    d_inv_sqrt = 1.0 / np.sqrt(d)
    return a_hat * d_inv_sqrt[:, None] * d_inv_sqrt[None, :]


def build_graph(
    triples: list[RelationTriple],
    aliases: dict[str, str],
    classes: list[ObjectClass] | None = None,
    weighted: bool = False,
) -> KnowledgeGraph:
    """Adjacency over classes from alias-pruned triples.

    Triples that do not resolve to two distinct known classes are skipped
    and counted.  Weighted mode uses triple counts, symmetrized by max.
    """
    classes = classes if classes is not None else CLASSES
    by_name = {c.name: c for c in classes}
    index = {c.id: k for k, c in enumerate(classes)}
    n = len(classes)

    def resolve(surface: str) -> int | None:
        name = aliases.get(surface, surface)
        cls = by_name.get(name)
        return None if cls is None else index[cls.id]

    counts = np.zeros((n, n), dtype=np.float64)
    skipped = 0
    for t in triples:
        i = resolve(t.subject)
        j = resolve(t.object)
        if i is None or j is None or i == j:
            skipped += 1
            continue
        counts[i, j] += 1
        counts[j, i] += 1
    sym = np.maximum(counts, counts.T)
    adjacency = sym if weighted else (sym > 0).astype(np.float64)
    return KnowledgeGraph(
        node_order=[c.id for c in classes],
        adjacency=adjacency,
        normalized_adjacency=normalize_adjacency(adjacency),
        skipped_triples=skipped,
    )


def load_triples(path) -> list[RelationTriple]:
    out = []
    with open(path) as f:
        for ln in f:
            ln = ln.rstrip("\n")
            if not ln or ln.startswith("#"):
                continue
            parts = ln.split("\t")
            if len(parts) != 3:
                raise ValueError(f"bad triple line: {ln!r}")
            out.append(RelationTriple(*parts))
    return out


def load_aliases(path) -> dict[str, str]:
    out = {}
    with open(path) as f:
        for ln in f:
            ln = ln.rstrip("\n")
            if not ln or ln.startswith("#"):
                continue
            surface, _, canonical = ln.partition("\t")
            out[surface] = canonical
    return out


def _data_path(name: str):
    return importlib.resources.files("gridnav.data") / name


def default_graph(weighted: bool = False) -> KnowledgeGraph:
    """Graph over the full catalog from the shipped triples and aliases."""
    return build_graph(
        load_triples(_data_path("relation_triples.txt")),
        load_aliases(_data_path("aliases.txt")),
        weighted=weighted,
    )


# ------------------------------------------------------------------ embeddings


@dataclass
class EmbeddingTable:
    dim: int
    vectors: np.ndarray  # (num classes, dim)

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("embedding dim must be >= 2")
        norms = np.linalg.norm(self.vectors, axis=1)
        bad = np.nonzero(norms == 0)[0]
        if len(bad):
            raise ValueError(f"zero embedding vector for class id {int(bad[0])}")


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine similarity undefined for zero-norm vector")
    return float(np.dot(a, b) / (na * nb))


def load_embeddings(path, classes: list[ObjectClass] | None = None) -> EmbeddingTable:
    """Parse ``name v1 ... vd`` lines; every class must be covered."""
    classes = classes if classes is not None else CLASSES
    rows = {}
    dim = None
    with open(path) as f:
        for ln in f:
            parts = ln.split()
            if not parts:
                continue
            name, vals = parts[0], [float(v) for v in parts[1:]]
            if dim is None:
                dim = len(vals)
            elif len(vals) != dim:
                raise ValueError(f"dimension mismatch for {name}: {len(vals)} != {dim}")
            rows[name] = vals
    vecs = np.zeros((len(classes), dim), dtype=np.float64)
    for k, cls in enumerate(classes):
        if cls.name not in rows:
            raise ValueError(f"missing embedding: {cls.name}")
        vecs[k] = rows[cls.name]
        if not np.any(vecs[k]):
            raise ValueError(f"zero embedding: {cls.name}")
    return EmbeddingTable(dim=dim, vectors=vecs)


def save_embeddings(table: EmbeddingTable, path, classes=None) -> None:
    classes = classes if classes is not None else CLASSES
    with open(path, "w") as f:
        for k, cls in enumerate(classes):
            f.write(cls.name + " " + " ".join(repr(float(v)) for v in table.vectors[k]) + "\n")


def synth_embeddings(
    seed: int, dim: int = 32, classes: list[ObjectClass] | None = None
) -> EmbeddingTable:
    """Deterministic stand-in embeddings with pairwise cosine similarity < 0.99."""
    if dim < 2:
        raise ValueError("embedding dim must be >= 2")
    classes = classes if classes is not None else CLASSES
    n = len(classes)
    vecs = np.zeros((n, dim), dtype=np.float64)
    for k in range(n):
        for attempt in range(100):
            rng = np.random.default_rng(np.random.PCG64((seed, k, attempt)))
            v = rng.standard_normal(dim)
            norm = np.linalg.norm(v)
            if norm == 0:
                continue
            v = v / norm
            if all(abs(float(vecs[p] @ v)) < 0.99 for p in range(k)):
                vecs[k] = v
                break
        else:
            raise RuntimeError("could not draw sufficiently distinct embeddings")
    return EmbeddingTable(dim=dim, vectors=vecs)


# --------------------------------------------------- parent-conditioned matrix


@dataclass
class PartialRewardMatrix:
    room_type: RoomType
    rows: dict[str, dict[str, float]] = field(default_factory=dict)

    def validate(self, tol: float = 1e-9) -> None:
        targets = {c.name for c in room_targets(self.room_type)}
        parents = {c.name for c in room_parents(self.room_type)}
        if set(self.rows) != targets:
            raise ValueError(
                f"rows {sorted(self.rows)} != room targets {sorted(targets)}"
            )
        for t, row in self.rows.items():
            if set(row) != parents:
                raise ValueError(f"row {t}: columns != room parents")
            vals = list(row.values())
            if any(v < 0 or v > 1 for v in vals):
                raise ValueError(f"row {t}: entries outside [0, 1]")
            if abs(sum(vals) - 1.0) > tol:
                raise ValueError(f"row {t}: sums to {sum(vals)}")

    def prob(self, target_name: str, parent_name: str) -> float:
        return self.rows[target_name][parent_name]


def build_partial_reward_matrix(
    floorplans, room_type: RoomType, radius: float = 1.0
) -> PartialRewardMatrix:
    """Count target instances within ``radius`` of parent instances, row-normalize.

    Uses the train split only.  A target never near any parent gets a uniform
    row so downstream rewards stay defined.
    """
    if not floorplans:
        raise ValueError("empty floorplan list")
    for fp in floorplans:
        if fp.room_type is not room_type:
            raise ValueError(f"{fp.id}: wrong room type {fp.room_type}")
        if fp.split != "train":
            raise ValueError(f"{fp.id}: reward matrix must come from the train split")
    targets = room_targets(room_type)
    parents = room_parents(room_type)
    counts = {t.name: {p.name: 0 for p in parents} for t in targets}
    target_ids = {t.id: t.name for t in targets}
    parent_ids = {p.id: p.name for p in parents}
    for fp in floorplans:
        tinst = [o for o in fp.objects if o.class_id in target_ids]
        pinst = [o for o in fp.objects if o.class_id in parent_ids]
        for ti in tinst:
            for pi in pinst:
                dx = ti.position[0] - pi.position[0]
                dy = ti.position[1] - pi.position[1]
                if (dx * dx + dy * dy) ** 0.5 <= radius:
                    counts[target_ids[ti.class_id]][parent_ids[pi.class_id]] += 1
    rows = {}
    for t in targets:
        row = counts[t.name]
        total = sum(row.values())
        if total == 0:
            rows[t.name] = {p: 1.0 / len(parents) for p in row}
        else:
            rows[t.name] = {p: c / total for p, c in row.items()}
    m = PartialRewardMatrix(room_type, rows)
    m.validate()
    return m


def save_partial_reward_matrix(m: PartialRewardMatrix, path) -> None:
    parents = [c.name for c in room_parents(m.room_type)]
    lines = [" ".join(parents)]
    for t in [c.name for c in room_targets(m.room_type)]:
        vals = " ".join(repr(m.rows[t][p]) for p in parents)
        lines.append(f"{t} {vals}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_partial_reward_matrix(
    path, room_type: RoomType, normalize: bool = True
) -> PartialRewardMatrix:
    """Parse a headed matrix file; '-' entries are zero.

    ``normalize`` renormalizes each row (published tables are rounded to two
    decimals, so raw row sums can be off by a percent or two).  Missing
    columns for the room are filled with zeros.
    """
    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip() and not ln.startswith("#")]
    header = lines[0].split()
    parents = [c.name for c in room_parents(room_type)]
    unknown = set(header) - set(parents)
    if unknown:
        raise ValueError(f"unknown parent column(s) for {room_type}: {sorted(unknown)}")
    rows = {}
    for ln in lines[1:]:
        parts = ln.split()
        t, vals = parts[0], parts[1:]
        if len(vals) != len(header):
            raise ValueError(f"row {t}: {len(vals)} values for {len(header)} columns")
        row = {p: 0.0 for p in parents}
        for p, v in zip(header, vals):
            row[p] = 0.0 if v == "-" else float(v)
        if normalize:
            total = sum(row.values())
            if total <= 0:
                raise ValueError(f"row {t}: nonpositive row sum")
            row = {p: v / total for p, v in row.items()}
        rows[t] = row
    m = PartialRewardMatrix(room_type, rows)
    if normalize:
        m.validate()
    return m


def load_paper_matrix(room_type: RoomType, normalize: bool = True) -> PartialRewardMatrix:
    """The shipped published per-room matrix."""
    return load_partial_reward_matrix(
        _data_path(f"partial_reward_{room_type.value}.txt"), room_type, normalize
    )
