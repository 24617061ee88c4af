"""Graph feature matrices with refer-aware positional encoding.

A REG becomes three aligned arrays: concept features C (one row per concept,
depth encoding added), role features R (one row per edge), and the integer
edge index list E with rows (child index, parent index). Token vectors come
from a pluggable provider: either a loaded token->vector table or, for
unknown tokens, a deterministic unit-norm vector derived by hashing
(seed, token).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .reg import MAX_REFER_DEPTH, Reg

__all__ = [
    "EmbeddingProvider",
    "GraphFeatures",
    "provider_lookup",
    "embed_graph",
    "make_pe_table",
    "load_embedding_table",
]


def _hash_rng(seed: int, token: str) -> np.random.Generator:
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=16, key=str(seed).encode("utf-8")
    ).digest()
    return np.random.Generator(np.random.PCG64(int.from_bytes(digest, "big")))


@dataclass(frozen=True)
class EmbeddingProvider:
    d: int
    hash_seed: int = 0
    table: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for token, vec in self.table.items():
            if vec.shape != (self.d,):
                raise ValueError(f"table entry {token!r} has shape {vec.shape}, want ({self.d},)")

    def __call__(self, token: str) -> np.ndarray:
        return provider_lookup(self, token)


def provider_lookup(provider: EmbeddingProvider, token: str) -> np.ndarray:
    """Stored vector on a table hit, otherwise a seeded unit-norm hash vector."""
    hit = provider.table.get(token)
    if hit is not None:
        return hit.astype(np.float64, copy=True)
    vec = _hash_rng(provider.hash_seed, token).standard_normal(provider.d)
    return vec / np.linalg.norm(vec)


def make_pe_table(d: int, seed: int = 0, scale: float = 0.02) -> np.ndarray:
    """Learnable depth-encoding table, rows 0..MAX_REFER_DEPTH, small init."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0x5E9])))
    return scale * rng.standard_normal((MAX_REFER_DEPTH + 1, d))


@dataclass(frozen=True)
class GraphFeatures:
    C: np.ndarray  # (num concepts, d), positional encoding applied
    R: np.ndarray  # (num edges, d)
    E: np.ndarray  # (num edges, 2) int, rows (child, parent)
    concept_labels: tuple[str, ...]
    role_labels: tuple[str, ...]


def embed_graph(reg: Reg, provider: EmbeddingProvider, pe_table: np.ndarray) -> GraphFeatures:
    if pe_table.shape != (MAX_REFER_DEPTH + 1, provider.d):
        raise ValueError(
            f"pe_table shape {pe_table.shape} does not match "
            f"({MAX_REFER_DEPTH + 1}, {provider.d})"
        )
    if reg.depths is None:
        raise ValueError("reg has no depths; run compute_refer_depths first")
    C = np.empty((len(reg.concepts), provider.d))
    for i, concept in enumerate(reg.concepts):
        C[i] = provider(concept.label) + pe_table[min(reg.depths[i], MAX_REFER_DEPTH)]
    R = np.empty((len(reg.edges), provider.d))
    for j, edge in enumerate(reg.edges):
        R[j] = provider(edge.role)
    E = np.array([[e.src, e.dst] for e in reg.edges], dtype=np.int64).reshape(-1, 2)
    return GraphFeatures(
        C=C,
        R=R,
        E=E,
        concept_labels=tuple(c.label for c in reg.concepts),
        role_labels=tuple(e.role for e in reg.edges),
    )


def load_embedding_table(path, d: int) -> dict[str, np.ndarray]:
    """Read a 'token<TAB>v1 v2 ... vd' file into a lookup table."""
    table: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                token, values = line.split("\t", 1)
                vec = np.array([float(v) for v in values.split()], dtype=np.float64)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad embedding line") from exc
            if vec.shape != (d,):
                raise ValueError(f"{path}:{lineno}: expected {d} values, got {vec.size}")
            table[token] = vec
    return table
