"""Seeded synthetic inputs for verification runs.

Random AMR-like graphs (trees plus forced re-entrant edges), random frame
queries, and fully assembled scoring instances. Everything is a pure function
of the seed so verification runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .amr import AmrEdge, AmrGraph, AmrNode
from .blocks import (
    BlockParams,
    FrameQuerySet,
    QueryBundle,
    assemble_query_bundles,
    swq_encode,
    temporal_decode,
)
from .features import EmbeddingProvider, GraphFeatures, embed_graph, make_pe_table
from .losses import GroundTruth, Prediction
from .reg import Reg, ReasoningSchedule, acyclize, reroot, topological_schedule
from .tcrr import TcrrParams

_ROLE_POOL = (
    ":ARG0",
    ":ARG1",
    ":ARG2",
    ":mod",
    ":time",
    ":destination",
    ":source",
    ":location",
    ":ARG0-of",
    ":ARG1-of",
    ":poss",
)

_WORD_POOL = (
    "man",
    "cat",
    "dog",
    "run-02",
    "walk-01",
    "jump-03",
    "left",
    "right",
    "ball",
    "stand-01",
    "near-02",
    "track",
    "bird",
    "car",
    "throw-01",
)


def rng_for(seed: int, *tags: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *tags])))


def random_amr_graph(
    rng: np.random.Generator, min_nodes: int = 2, max_nodes: int = 12
) -> AmrGraph:
    """Random rooted DAG: a spanning tree plus extra forward edges.

    Extra edges run from a topologically earlier node to a later one, which
    forces re-entrancies while keeping the graph acyclic.
    """
    n = int(rng.integers(min_nodes, max_nodes + 1))
    nodes = tuple(
        AmrNode(
            id=f"n{i}",
            concept=str(rng.choice(_WORD_POOL)),
            align=frozenset({i}),
        )
        for i in range(n)
    )
    edges: list[AmrEdge] = []
    for child in range(1, n):
        parent = int(rng.integers(0, child))
        edges.append(
            AmrEdge(source=f"n{parent}", role=str(rng.choice(_ROLE_POOL)), target=f"n{child}")
        )
    if n >= 3:
        extra = int(rng.integers(1, max(2, n // 2)))
        for _ in range(extra):
            a = int(rng.integers(0, n - 1))
            b = int(rng.integers(a + 1, n))
            edges.append(AmrEdge(source=f"n{a}", role=str(rng.choice(_ROLE_POOL)), target=f"n{b}"))
    return AmrGraph(nodes=nodes, edges=tuple(edges), root="n0")


def random_reg(rng: np.random.Generator, max_nodes: int = 12) -> tuple[Reg, ReasoningSchedule]:
    graph = random_amr_graph(rng, max_nodes=max_nodes)
    target = f"n{int(rng.integers(0, len(graph.nodes)))}"
    reg = acyclize(reroot(graph, target))
    return reg, topological_schedule(reg)


def random_frame_queries(
    rng: np.random.Generator, frames: int, per_frame: int, d: int
) -> FrameQuerySet:
    return FrameQuerySet(q=rng.standard_normal((frames, per_frame, d)))


@dataclass
class ScoringInstance:
    reg: Reg
    schedule: ReasoningSchedule
    features: GraphFeatures
    bundles: list[QueryBundle]
    params: TcrrParams


def random_instance(
    seed: int,
    max_nodes: int = 12,
    num_queries: int = 8,
    per_frame: int = 4,
    frames: int = 6,
    d: int = 16,
) -> ScoringInstance:
    """A fully wired scoring instance: REG, features, bundles, parameters."""
    rng = rng_for(seed, 0x1257)
    reg, schedule = random_reg(rng, max_nodes=max_nodes)
    provider = EmbeddingProvider(d=d, hash_seed=seed)
    features = embed_graph(reg, provider, make_pe_table(d, seed=seed))
    frames_set = random_frame_queries(rng, frames, per_frame, d)
    blocks = BlockParams.create(
        d=d, num_queries=num_queries, window=max(2, frames // 2), seed=seed
    )
    encoded = swq_encode(frames_set, blocks)
    temporal = temporal_decode(encoded, blocks)
    bundles = assemble_query_bundles(encoded, temporal)
    params = TcrrParams.create(d, seed=seed)
    return ScoringInstance(
        reg=reg, schedule=schedule, features=features, bundles=bundles, params=params
    )


def random_predictions(
    rng: np.random.Generator,
    num_queries: int,
    frames: int = 3,
    hw: int = 16,
) -> tuple[list[Prediction], GroundTruth]:
    """Random mask/box predictions and a binary referent ground truth."""
    gt_mask = (rng.random((frames, hw, hw)) < 0.35).astype(np.float64)
    gt_boxes = _random_boxes(rng, frames)
    preds = [
        Prediction(
            mask_logits=rng.standard_normal((frames, hw, hw)),
            boxes=_random_boxes(rng, frames),
        )
        for _ in range(num_queries)
    ]
    return preds, GroundTruth(mask=gt_mask, boxes=gt_boxes)


def _random_boxes(rng: np.random.Generator, frames: int) -> np.ndarray:
    wh = 0.1 + 0.3 * rng.random((frames, 2))
    cxcy = 0.25 + 0.5 * rng.random((frames, 2))
    return np.concatenate([cxcy, wh], axis=1)
