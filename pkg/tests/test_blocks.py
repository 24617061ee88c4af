import numpy as np
import pytest

from regreason.blocks import (
    BlockParams,
    FrameQuerySet,
    assemble_query_bundles,
    bcmf,
    swq_encode,
    temporal_decode,
)


def params_for(d=8, nq=4, window=6, swq_layers=1, dec_layers=1, seed=0):
    return BlockParams.create(
        d=d,
        num_queries=nq,
        window=window,
        num_swq_layers=swq_layers,
        num_decoder_layers=dec_layers,
        seed=seed,
    )


def reference_self_attention(x, layer, d):
    logits = (x @ layer.wq) @ (x @ layer.wk).T / np.sqrt(d)
    shifted = logits - logits.max(axis=1, keepdims=True)
    weights = np.exp(shifted)
    weights /= weights.sum(axis=1, keepdims=True)
    return x + weights @ (x @ layer.wv)


class TestBcmf:
    def test_shapes_preserved(self, rng):
        p = params_for(d=8)
        visual, graph = rng.standard_normal((5, 8)), rng.standard_normal((3, 8))
        v2, g2 = bcmf(visual, graph, p)
        assert v2.shape == visual.shape
        assert g2.shape == graph.shape

    def test_softmax_normalization(self, rng):
        p = params_for(d=8)
        visual, graph = rng.standard_normal((5, 8)), rng.standard_normal((3, 8))
        _, _, to_vis, to_graph = bcmf(visual, graph, p, return_weights=True)
        np.testing.assert_allclose(to_vis.sum(axis=1), np.ones(5), atol=1e-9)
        np.testing.assert_allclose(to_graph.sum(axis=0), np.ones(3), atol=1e-9)

    def test_bidirectional_influence(self, rng):
        p = params_for(d=8)
        visual, graph = rng.standard_normal((5, 8)), rng.standard_normal((3, 8))
        v1, g1 = bcmf(visual, graph, p)
        graph_mod = graph.copy()
        graph_mod[1] += 0.5
        v2, g2 = bcmf(visual, graph_mod, p)
        assert np.abs(v2 - v1).max() > 0
        visual_mod = visual.copy()
        visual_mod[0] += 0.5
        v3, g3 = bcmf(visual_mod, graph, p)
        assert np.abs(g3 - g1).max() > 0


class TestSwq:
    def test_single_window_equals_full_attention(self, rng):
        d, t, nf = 8, 4, 3
        p = params_for(d=d, window=10, swq_layers=1)
        frames = FrameQuerySet(q=rng.standard_normal((t, nf, d)))
        out = swq_encode(frames, p)
        ref = reference_self_attention(
            frames.q.reshape(t * nf, d), p.swq_layers[0], d
        ).reshape(t, nf, d)
        np.testing.assert_allclose(out.q, ref, atol=1e-9)

    def test_one_layer_no_cross_window_flow(self, rng):
        d, t, nf = 8, 4, 3
        p = params_for(d=d, window=2, swq_layers=1)
        frames = FrameQuerySet(q=rng.standard_normal((t, nf, d)))
        base = swq_encode(frames, p)
        bumped = frames.q.copy()
        bumped[0, 0] += 1.0
        out = swq_encode(FrameQuerySet(q=bumped), p)
        assert np.abs(out.q[0] - base.q[0]).max() > 0
        np.testing.assert_array_equal(out.q[2], base.q[2])
        np.testing.assert_array_equal(out.q[3], base.q[3])

    def test_two_shifted_layers_connect_far_frames(self, rng):
        d, t, nf = 8, 4, 2
        p = params_for(d=d, window=2, swq_layers=2)
        frames = FrameQuerySet(q=rng.standard_normal((t, nf, d)))
        base = swq_encode(frames, p)
        bumped = frames.q.copy()
        bumped[0, 0] += 1.0
        out = swq_encode(FrameQuerySet(q=bumped), p)
        assert np.abs(out.q[3] - base.q[3]).max() > 0

    def test_window_validation(self, rng):
        frames = FrameQuerySet(q=rng.standard_normal((4, 2, 8)))
        p = params_for(d=8)
        bad = BlockParams(
            d=p.d,
            window=0,
            fusion_wq=p.fusion_wq,
            fusion_wk=p.fusion_wk,
            fusion_wv_text=p.fusion_wv_text,
            fusion_wv_vis=p.fusion_wv_vis,
            swq_layers=p.swq_layers,
            decoder_queries=p.decoder_queries,
            decoder_layers=p.decoder_layers,
        )
        with pytest.raises(ValueError):
            swq_encode(frames, bad)

    def test_ragged_tail_window(self, rng):
        # T=5 with window 2 leaves a one-frame tail; must still run.
        p = params_for(d=8, window=2, swq_layers=2)
        frames = FrameQuerySet(q=rng.standard_normal((5, 2, 8)))
        out = swq_encode(frames, p)
        assert out.q.shape == (5, 2, 8)


class TestTemporalDecode:
    def test_shapes(self, rng):
        d, t, nf, nq = 8, 4, 3, 5
        p = params_for(d=d, nq=nq, dec_layers=2)
        frames = FrameQuerySet(q=rng.standard_normal((t, nf, d)))
        out = temporal_decode(frames, p)
        assert out.queries.shape == (nq, d)
        assert out.attn.shape == (nq, t, nf)

    def test_frame_slices_sum_to_one(self, rng):
        p = params_for(d=8, nq=5, dec_layers=3)
        frames = FrameQuerySet(q=rng.standard_normal((4, 3, 8)))
        out = temporal_decode(frames, p)
        np.testing.assert_allclose(out.attn.sum(axis=2), np.ones((5, 4)), atol=1e-9)

    def test_deterministic(self, rng):
        p = params_for(d=8, nq=5)
        frames = FrameQuerySet(q=rng.standard_normal((4, 3, 8)))
        a = temporal_decode(frames, p)
        b = temporal_decode(frames, p)
        np.testing.assert_array_equal(a.queries, b.queries)
        np.testing.assert_array_equal(a.attn, b.attn)


class TestAssembleBundles:
    def make_temporal(self, attn, queries):
        from regreason.blocks import TemporalQuerySet

        return TemporalQuerySet(queries=queries, attn=attn)

    def test_one_hot_pick(self, rng):
        t, nf, d = 2, 4, 8
        frames = FrameQuerySet(q=rng.standard_normal((t, nf, d)))
        attn = np.zeros((1, t, nf))
        attn[0, :, 3] = 1.0
        bundles = assemble_query_bundles(
            frames, self.make_temporal(attn, rng.standard_normal((1, d)))
        )
        np.testing.assert_array_equal(bundles[0].frame_feats[0], frames.q[0, 3])
        np.testing.assert_array_equal(bundles[0].taus, [1.0, 1.0])

    def test_uniform_tie_picks_first(self, rng):
        t, nf, d = 1, 4, 8
        frames = FrameQuerySet(q=rng.standard_normal((t, nf, d)))
        attn = np.full((1, t, nf), 0.25)
        bundles = assemble_query_bundles(
            frames, self.make_temporal(attn, rng.standard_normal((1, d)))
        )
        np.testing.assert_array_equal(bundles[0].frame_feats[0], frames.q[0, 0])
        assert bundles[0].taus[0] == 0.25

    def test_matches_bruteforce_scan(self, rng):
        t, nf, d, nq = 3, 5, 8, 4
        frames = FrameQuerySet(q=rng.standard_normal((t, nf, d)))
        attn = rng.random((nq, t, nf))
        attn /= attn.sum(axis=2, keepdims=True)
        bundles = assemble_query_bundles(
            frames, self.make_temporal(attn, rng.standard_normal((nq, d)))
        )
        for i in range(nq):
            for f in range(t):
                best_j, best_v = 0, -1.0
                for j in range(nf):
                    if attn[i, f, j] > best_v:
                        best_j, best_v = j, attn[i, f, j]
                np.testing.assert_array_equal(bundles[i].frame_feats[f], frames.q[f, best_j])
                assert bundles[i].taus[f] == best_v

    def test_taus_are_maxima(self, rng):
        t, nf, d, nq = 3, 5, 8, 4
        frames = FrameQuerySet(q=rng.standard_normal((t, nf, d)))
        attn = rng.random((nq, t, nf))
        attn /= attn.sum(axis=2, keepdims=True)
        bundles = assemble_query_bundles(
            frames, self.make_temporal(attn, rng.standard_normal((nq, d)))
        )
        for i in range(nq):
            np.testing.assert_array_equal(bundles[i].taus, attn[i].max(axis=1))
            assert np.all(bundles[i].taus > 0) and np.all(bundles[i].taus <= 1.0)

    def test_shape_mismatch_rejected(self, rng):
        frames = FrameQuerySet(q=rng.standard_normal((3, 5, 8)))
        attn = np.full((2, 4, 5), 0.2)
        with pytest.raises(ValueError):
            assemble_query_bundles(frames, self.make_temporal(attn, rng.standard_normal((2, 8))))
