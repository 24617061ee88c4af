import numpy as np
import pytest

from regreason.corpus import load_corpus, mini_corpus_path

C1C_PENMAN = (
    "(s / stand-01 :ARG1 (c~0 / cat) :ARG2 (n~3 / near-02 :ARG1 c :ARG2 (g~5 / cage)))"
)


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(mini_corpus_path())


@pytest.fixture(scope="session")
def c1c_record(corpus):
    return next(r for r in corpus if r.id == "c1c_cat_cage")


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


def bundle_arrays(bundles):
    """(otilde, frame_feats, taus) stacked from a bundle list."""
    otilde = np.stack([b.video_feat for b in bundles])
    frame_feats = np.stack([b.frame_feats for b in bundles])
    taus = np.stack([b.taus for b in bundles])
    return otilde, frame_feats, taus
