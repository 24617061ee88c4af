"""End-to-end runs: corpus record -> REG -> fused features -> scores.

This module owns the run configuration and the deterministic wiring between
the graph side and the (synthetic or file-loaded) visual side. The CLI and
the external bindings both go through these functions, so their outputs agree
byte for byte.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .amr import AmrGraph, parse_penman
from .blocks import (
    BlockParams,
    FrameQuerySet,
    assemble_query_bundles,
    bcmf,
    swq_encode,
    temporal_decode,
)
from .corpus import CorpusRecord
from .features import (
    EmbeddingProvider,
    GraphFeatures,
    embed_graph,
    load_embedding_table,
    make_pe_table,
)
from .losses import LossWeights
from .reg import Reg, ReasoningSchedule, RegBuild, build_reg, validate
from .tcrr import TcrrForward, referring_distribution, run_tcrr, TcrrParams

__all__ = ["RunConfig", "ScoreOutput", "build_record", "score_reg", "format_scores"]


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    d: int = 256
    num_queries: int = 20  # temporal queries
    num_frame_queries: int = 20
    frames: int = 12
    window: int = 6
    layers: int = 3
    weights: LossWeights = field(default_factory=LossWeights)
    embeddings_path: str | None = None

    def __post_init__(self):
        for name in ("d", "num_queries", "num_frame_queries", "frames", "window", "layers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    def provider(self) -> EmbeddingProvider:
        table = {}
        if self.embeddings_path:
            table = load_embedding_table(self.embeddings_path, self.d)
        return EmbeddingProvider(d=self.d, hash_seed=self.seed, table=table)

    def pe_table(self) -> np.ndarray:
        return make_pe_table(self.d, seed=self.seed)

    def block_params(self) -> BlockParams:
        return BlockParams.create(
            d=self.d,
            num_queries=self.num_queries,
            window=self.window,
            num_swq_layers=self.layers,
            num_decoder_layers=self.layers,
            seed=self.seed,
        )

    def tcrr_params(self) -> TcrrParams:
        return TcrrParams.create(self.d, seed=self.seed)


def build_record(record: CorpusRecord) -> RegBuild:
    """Parse the record's PENMAN and derive its REG and schedule."""
    graph: AmrGraph = parse_penman(record.penman)
    return build_reg(graph, record.annotation)


def _record_rng(config: RunConfig, key: str) -> np.random.Generator:
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    seq = np.random.SeedSequence([config.seed, int.from_bytes(digest, "big")])
    return np.random.Generator(np.random.PCG64(seq))


@dataclass
class ScoreOutput:
    forward: TcrrForward
    probs: np.ndarray
    referent: int


def score_reg(
    reg: Reg,
    schedule: ReasoningSchedule,
    config: RunConfig,
    key: str = "",
) -> ScoreOutput:
    """Full scoring pass over one REG with seeded synthetic frame queries.

    The frame queries are drawn from (seed, key), fused with the graph
    features through the bilateral block, window-encoded, decoded into
    temporal queries, and finally reasoned over bottom-up.
    """
    problems = validate(reg)
    if problems:
        raise ValueError("invalid REG: " + "; ".join(problems))
    provider = config.provider()
    features = embed_graph(reg, provider, config.pe_table())
    params = config.block_params()

    rng = _record_rng(config, key)
    raw = rng.standard_normal((config.frames, config.num_frame_queries, config.d))

    graph_rows = np.concatenate([features.C, features.R]) if len(features.R) else features.C
    visual_rows = raw.reshape(-1, config.d)
    fused_visual, fused_graph = bcmf(visual_rows, graph_rows, params)
    frames = FrameQuerySet(q=fused_visual.reshape(raw.shape))
    c_rows = features.C.shape[0]
    fused = GraphFeatures(
        C=fused_graph[:c_rows],
        R=fused_graph[c_rows:],
        E=features.E,
        concept_labels=features.concept_labels,
        role_labels=features.role_labels,
    )

    encoded = swq_encode(frames, params)
    temporal = temporal_decode(encoded, params)
    bundles = assemble_query_bundles(encoded, temporal)

    forward = run_tcrr(fused, schedule, bundles, config.tcrr_params())
    probs, referent = referring_distribution(forward.table, reg.root)
    return ScoreOutput(forward=forward, probs=probs, referent=referent)


def format_scores(scores: np.ndarray) -> str:
    """Row-major text matrix, one node per line, full float precision."""
    lines = [" ".join(repr(float(v)) for v in row) for row in np.atleast_2d(scores)]
    return "\n".join(lines) + "\n"
