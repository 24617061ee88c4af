"""Cross-modal fusion and temporal aggregation blocks, desk scale.

Shapes follow one convention throughout: frame queries are (T, Nf, d), the
flattened token sequence is (T*Nf, d), temporal queries are (Nq, d). All
attention is single-head scaled dot-product with residual connections, and
every softmax is computed row-stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BlockParams",
    "FrameQuerySet",
    "TemporalQuerySet",
    "QueryBundle",
    "bcmf",
    "swq_encode",
    "temporal_decode",
    "assemble_query_bundles",
]


def _softmax(x: np.ndarray, axis: int) -> np.ndarray:
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


@dataclass(frozen=True)
class FrameQuerySet:
    """Per-frame summary vectors, shape (T, Nf, d)."""

    q: np.ndarray

    def __post_init__(self):
        if self.q.ndim != 3 or self.q.shape[0] < 1 or self.q.shape[1] < 1:
            raise ValueError(f"frame queries must be (T, Nf, d), got {self.q.shape}")

    @property
    def frames(self) -> int:
        return self.q.shape[0]

    @property
    def per_frame(self) -> int:
        return self.q.shape[1]

    @property
    def dim(self) -> int:
        return self.q.shape[2]


@dataclass(frozen=True)
class TemporalQuerySet:
    """Video-level queries (Nq, d) and per-frame attention slices (Nq, T, Nf)."""

    queries: np.ndarray
    attn: np.ndarray


@dataclass(frozen=True)
class QueryBundle:
    """Everything one temporal query carries into reasoning."""

    index: int
    video_feat: np.ndarray  # (d,)
    frame_feats: np.ndarray  # (T, d), the argmax frame query per frame
    taus: np.ndarray  # (T,), attention weight of that frame query


@dataclass(frozen=True)
class AttnParams:
    wq: np.ndarray
    wk: np.ndarray
    wv: np.ndarray


@dataclass(frozen=True)
class BlockParams:
    d: int
    window: int
    fusion_wq: np.ndarray
    fusion_wk: np.ndarray
    fusion_wv_text: np.ndarray  # projects graph rows into the visual update
    fusion_wv_vis: np.ndarray  # projects visual rows into the graph update
    swq_layers: tuple[AttnParams, ...]
    decoder_queries: np.ndarray  # (Nq, d) learned initial temporal queries
    decoder_layers: tuple[AttnParams, ...]

    @staticmethod
    def create(
        d: int,
        num_queries: int,
        window: int = 6,
        num_swq_layers: int = 3,
        num_decoder_layers: int = 3,
        seed: int = 0,
        scale: float = 0.02,
    ) -> "BlockParams":
        if window < 1:
            raise ValueError("window length must be >= 1")
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0xB70C])))

        def mat() -> np.ndarray:
            return scale * rng.standard_normal((d, d))

        def attn() -> AttnParams:
            return AttnParams(wq=mat(), wk=mat(), wv=mat())

        return BlockParams(
            d=d,
            window=window,
            fusion_wq=mat(),
            fusion_wk=mat(),
            fusion_wv_text=mat(),
            fusion_wv_vis=mat(),
            swq_layers=tuple(attn() for _ in range(num_swq_layers)),
            decoder_queries=rng.standard_normal((num_queries, d)),
            decoder_layers=tuple(attn() for _ in range(num_decoder_layers)),
        )


def bcmf(
    visual: np.ndarray,
    graph: np.ndarray,
    params: BlockParams,
    return_weights: bool = False,
):
    """Bilateral fusion over shared attention logits.

    One logit matrix A = (visual Wq)(graph Wk)^T / sqrt(d) serves both
    directions: rows softmaxed over the graph dimension update the visual
    side, columns softmaxed over the visual dimension update the graph side.
    Both returned arrays include residual connections.
    """
    logits = (visual @ params.fusion_wq) @ (graph @ params.fusion_wk).T / np.sqrt(params.d)
    to_vis = _softmax(logits, axis=1)  # (Nv, Ng), rows sum to 1
    to_graph = _softmax(logits, axis=0)  # (Nv, Ng), columns sum to 1
    visual_out = visual + to_vis @ (graph @ params.fusion_wv_text)
    graph_out = graph + to_graph.T @ (visual @ params.fusion_wv_vis)
    if return_weights:
        return visual_out, graph_out, to_vis, to_graph
    return visual_out, graph_out


def _self_attention(tokens: np.ndarray, p: AttnParams, d: int) -> np.ndarray:
    logits = (tokens @ p.wq) @ (tokens @ p.wk).T / np.sqrt(d)
    return tokens + _softmax(logits, axis=1) @ (tokens @ p.wv)


def _window_slices(t: int, window: int) -> list[np.ndarray]:
    return [np.arange(start, min(start + window, t)) for start in range(0, t, window)]


def swq_encode(frames: FrameQuerySet, params: BlockParams) -> FrameQuerySet:
    """Windowed self-attention over time; odd layers shift cyclically by w/2.

    Attention runs independently inside each window of `window` frames
    (window*Nf tokens). The cyclic shift between layers makes far frames
    path-connected after two layers even though each layer is local.
    """
    if params.window < 1:
        raise ValueError("window length must be >= 1")
    t, nf, d = frames.q.shape
    x = frames.q
    shift = params.window // 2
    for layer_index, layer in enumerate(params.swq_layers):
        shifted = layer_index % 2 == 1 and 0 < shift < t
        work = np.roll(x, -shift, axis=0) if shifted else x
        out = np.empty_like(work)
        for idx in _window_slices(t, params.window):
            tokens = work[idx].reshape(len(idx) * nf, d)
            out[idx] = _self_attention(tokens, layer, d).reshape(len(idx), nf, d)
        x = np.roll(out, shift, axis=0) if shifted else out
    return FrameQuerySet(q=x)


def temporal_decode(frames: FrameQuerySet, params: BlockParams) -> TemporalQuerySet:
    """Temporal queries cross-attend to every frame query.

    Returns the decoded queries and the last layer's attention, reshaped to
    (Nq, T, Nf) with each frame slice renormalized to sum to one.
    """
    t, nf, d = frames.q.shape
    tokens = frames.q.reshape(t * nf, d)
    queries = params.decoder_queries.copy()
    weights = None
    for layer in params.decoder_layers:
        logits = (queries @ layer.wq) @ (tokens @ layer.wk).T / np.sqrt(d)
        weights = _softmax(logits, axis=1)  # (Nq, T*Nf)
        queries = queries + weights @ (tokens @ layer.wv)
    if weights is None:
        raise ValueError("temporal decoder needs at least one layer")
    gamma = weights.reshape(-1, t, nf)
    gamma = gamma / gamma.sum(axis=2, keepdims=True)
    return TemporalQuerySet(queries=queries, attn=gamma)


def assemble_query_bundles(
    frames: FrameQuerySet, temporal: TemporalQuerySet
) -> list[QueryBundle]:
    """Pick each query's strongest frame query per frame (ties: lowest index)."""
    gamma = temporal.attn
    nq, t, nf = gamma.shape
    if frames.q.shape[:2] != (t, nf):
        raise ValueError("frame set and attention tensor disagree on (T, Nf)")
    bundles = []
    for i in range(nq):
        picks = gamma[i].argmax(axis=1)  # (T,) first maximal index per frame
        frame_feats = frames.q[np.arange(t), picks]
        taus = gamma[i, np.arange(t), picks]
        bundles.append(
            QueryBundle(
                index=i,
                video_feat=temporal.queries[i].copy(),
                frame_feats=frame_feats.copy(),
                taus=taus.copy(),
            )
        )
    return bundles
