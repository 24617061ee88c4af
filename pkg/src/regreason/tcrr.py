"""Temporal concept-role reasoning over a REG schedule.

Every node accumulates one unnormalized referring score per temporal query.
A node's score is its object-concept alignment (OCA) plus, for each edge
from a child, a temporal referent-context alignment (TRCA) that consumes the
child's already-finished score row. Processing layers leaves-to-root
guarantees child rows are complete when a parent needs them.

The backward pass is the exact chain rule over the same computation, run in
reverse schedule order; see tcrr_backward.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .blocks import QueryBundle
from .features import GraphFeatures
from .numerics import softmax_stable
from .reg import ReasoningSchedule

__all__ = [
    "TcrrParams",
    "ScoreTable",
    "QaRecord",
    "TcrrForward",
    "oca_score",
    "child_summary",
    "trca_score",
    "run_tcrr",
    "referring_distribution",
    "tcrr_backward",
    "trace_to_json",
]


@dataclass(frozen=True)
class TcrrParams:
    w_r: np.ndarray  # (d, d)
    omega_r: np.ndarray  # (d,)
    w_e: np.ndarray  # (2d, d)
    omega_e: np.ndarray  # (d,)

    @staticmethod
    def create(d: int, seed: int = 0, scale: float = 0.02) -> "TcrrParams":
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0x7C88])))
        return TcrrParams(
            w_r=scale * rng.standard_normal((d, d)),
            omega_r=scale * rng.standard_normal(d),
            w_e=scale * rng.standard_normal((2 * d, d)),
            omega_e=scale * rng.standard_normal(d),
        )

    @property
    def d(self) -> int:
        return self.w_r.shape[0]


@dataclass(frozen=True)
class ScoreTable:
    """Unnormalized referring scores, shape (num nodes, num queries)."""

    scores: np.ndarray


@dataclass(frozen=True)
class QaRecord:
    kind: str  # "OCA" | "TRCA"
    parent: str
    child: str | None
    role: str | None
    question: str
    answer: str
    contributions: np.ndarray  # (num queries,)


def oca_score(parent_feat: np.ndarray, bundle: QueryBundle, params: TcrrParams) -> float:
    """Alignment of one temporal query with one concept feature."""
    return float(params.omega_r @ ((params.w_r.T @ bundle.video_feat) * parent_feat))


def child_summary(child_scores: np.ndarray, temporal_queries: np.ndarray) -> np.ndarray:
    """Score-weighted mix of the temporal queries: softmax(scores)^T Q."""
    return softmax_stable(child_scores) @ temporal_queries


def trca_score(
    summary: np.ndarray,
    role_feat: np.ndarray,
    bundle: QueryBundle,
    params: TcrrParams,
) -> float:
    """Per-frame role alignment, weighted by the query's frame attention.

    For frame t: concat the child summary with the query's frame feature,
    project through w_e, gate elementwise by the role feature, reduce with
    omega_e, and weight by tau_t. The tau weights are used as given, with no
    renormalization over frames.
    """
    total = 0.0
    for t in range(bundle.frame_feats.shape[0]):
        u = np.concatenate([summary, bundle.frame_feats[t]])
        total += float(bundle.taus[t]) * float(params.omega_e @ ((params.w_e.T @ u) * role_feat))
    return total


@dataclass
class _EdgeCache:
    child: int
    parent: int
    edge_row: int
    weights: np.ndarray  # softmax over the child's score row, (Nq,)
    summary: np.ndarray  # (d,)


@dataclass
class TcrrForward:
    """Forward result plus everything the backward pass needs."""

    table: ScoreTable
    trace: list[QaRecord]
    features: GraphFeatures
    schedule: ReasoningSchedule
    bundles: list[QueryBundle]
    params: TcrrParams
    edge_caches: list[_EdgeCache] = field(default_factory=list)
    node_order: list[int] = field(default_factory=list)


def run_tcrr(
    features: GraphFeatures,
    schedule: ReasoningSchedule,
    bundles: list[QueryBundle],
    params: TcrrParams,
) -> TcrrForward:
    """Score every node bottom-up; emit one QA record per node and per edge."""
    num_nodes = features.C.shape[0]
    nq = len(bundles)
    scheduled = [i for layer in schedule.layers for i in layer]
    if sorted(scheduled) != list(range(num_nodes)):
        raise ValueError("schedule does not cover the node set exactly once")
    d = params.d
    if features.C.shape[1] != d:
        raise ValueError(f"feature dim {features.C.shape[1]} != params dim {d}")

    otilde = np.stack([b.video_feat for b in bundles])  # (Nq, d)
    taus = np.stack([b.taus for b in bundles])  # (Nq, T)
    frame_feats = np.stack([b.frame_feats for b in bundles])  # (Nq, T, d)
    nframes = taus.shape[1]

    in_edges: dict[int, list[int]] = {i: [] for i in range(num_nodes)}
    for row, (src, dst) in enumerate(features.E.tolist()):
        in_edges[dst].append(row)

    scores = np.zeros((num_nodes, nq))
    done = [False] * num_nodes
    trace: list[QaRecord] = []
    fwd = TcrrForward(
        table=ScoreTable(scores=scores),
        trace=trace,
        features=features,
        schedule=schedule,
        bundles=bundles,
        params=params,
    )

    proj = otilde @ params.w_r  # (Nq, d), row i is w_r^T applied to query i

    for layer in schedule.layers:
        for p in layer:
            c_p = features.C[p]
            oca = (proj * c_p) @ params.omega_r  # (Nq,)
            trace.append(
                QaRecord(
                    kind="OCA",
                    parent=features.concept_labels[p],
                    child=None,
                    role=None,
                    question="what are you?",
                    answer=features.concept_labels[p],
                    contributions=oca.copy(),
                )
            )
            total = oca.copy()
            for row in in_edges[p]:
                k = int(features.E[row, 0])
                if not done[k]:
                    raise ValueError(f"schedule fires node {p} before its child {k}")
                weights = softmax_stable(scores[k])
                summary = weights @ otilde  # (d,)
                role_feat = features.R[row]
                contrib = np.zeros(nq)
                for t in range(nframes):
                    u = np.concatenate(
                        [np.tile(summary, (nq, 1)), frame_feats[:, t, :]], axis=1
                    )  # (Nq, 2d)
                    contrib += taus[:, t] * (((u @ params.w_e) * role_feat) @ params.omega_e)
                trace.append(
                    QaRecord(
                        kind="TRCA",
                        parent=features.concept_labels[p],
                        child=features.concept_labels[k],
                        role=features.role_labels[row],
                        question=f'what does "{features.concept_labels[k]}" mean to you?',
                        answer=features.role_labels[row],
                        contributions=contrib.copy(),
                    )
                )
                fwd.edge_caches.append(
                    _EdgeCache(child=k, parent=p, edge_row=row, weights=weights, summary=summary)
                )
                total += contrib
            scores[p] = total
            done[p] = True
            fwd.node_order.append(p)
    return fwd


def referring_distribution(table: ScoreTable, root: int) -> tuple[np.ndarray, int]:
    """Softmax over the root's score row and the argmax query index."""
    probs = softmax_stable(table.scores[root])
    return probs, int(np.argmax(probs))


def tcrr_backward(fwd: TcrrForward, upstream: np.ndarray) -> dict[str, np.ndarray]:
    """Exact gradients of sum(upstream * scores) for params and inputs.

    upstream has the score table's shape. Nodes are processed in reverse
    schedule order so each score row's adjoint is complete before the row's
    own computation is differentiated. Returns gradients for w_r, omega_r,
    w_e, omega_e, C, R and the temporal queries.
    """
    params = fwd.params
    features = fwd.features
    scores = fwd.table.scores
    otilde = np.stack([b.video_feat for b in fwd.bundles])
    taus = np.stack([b.taus for b in fwd.bundles])
    frame_feats = np.stack([b.frame_feats for b in fwd.bundles])
    nq, nframes = taus.shape

    if upstream.shape != scores.shape:
        raise ValueError(f"upstream shape {upstream.shape} != scores shape {scores.shape}")

    sbar = upstream.astype(np.float64).copy()  # adjoint of each score row
    grads = {
        "w_r": np.zeros_like(params.w_r),
        "omega_r": np.zeros_like(params.omega_r),
        "w_e": np.zeros_like(params.w_e),
        "omega_e": np.zeros_like(params.omega_e),
        "C": np.zeros_like(features.C),
        "R": np.zeros_like(features.R),
        "O": np.zeros_like(otilde),
    }

    proj = otilde @ params.w_r  # (Nq, d)
    caches_by_parent: dict[int, list[_EdgeCache]] = {}
    for cache in fwd.edge_caches:
        caches_by_parent.setdefault(cache.parent, []).append(cache)

    for p in reversed(fwd.node_order):
        row_adj = sbar[p]  # (Nq,), final by reverse-order invariant

        # OCA: score_i = omega_r . (proj_i * C_p)
        c_p = features.C[p]
        grads["C"][p] += params.omega_r * (proj.T @ row_adj)
        grads["omega_r"] += (proj * c_p).T @ row_adj
        d_proj = np.outer(row_adj, params.omega_r * c_p)  # (Nq, d)
        grads["w_r"] += otilde.T @ d_proj
        grads["O"] += d_proj @ params.w_r.T

        # TRCA, one block per in-edge of p
        for cache in caches_by_parent.get(p, ()):
            role_feat = features.R[cache.edge_row]
            gate = params.omega_e * role_feat  # (d,)
            d_summary = np.zeros_like(cache.summary)
            for t in range(nframes):
                u = np.concatenate(
                    [np.tile(cache.summary, (nq, 1)), frame_feats[:, t, :]], axis=1
                )  # (Nq, 2d)
                b = u @ params.w_e  # (Nq, d)
                coeff = row_adj * taus[:, t]  # (Nq,)
                grads["omega_e"] += (b * role_feat).T @ coeff
                grads["R"][cache.edge_row] += (b * params.omega_e).T @ coeff
                db = np.outer(coeff, gate)  # (Nq, d)
                grads["w_e"] += u.T @ db
                du = db @ params.w_e.T  # (Nq, 2d)
                d_summary += du[:, : params.d].sum(axis=0)
            # summary = weights @ otilde; weights = softmax(scores[child])
            w = cache.weights
            grads["O"] += np.outer(w, d_summary)
            dw = otilde @ d_summary  # (Nq,)
            sbar[cache.child] += w * (dw - float(w @ dw))

    return grads


def trace_to_json(trace: list[QaRecord]) -> str:
    records = [
        {
            "kind": rec.kind,
            "parent": rec.parent,
            "child": rec.child,
            "role": rec.role,
            "question": rec.question,
            "answer": rec.answer,
            "contributions": [float(x) for x in rec.contributions],
        }
        for rec in trace
    ]
    return json.dumps(records, indent=2) + "\n"
