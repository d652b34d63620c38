"""Butina clustering over fingerprints and cluster-based training plans.

Neighbor computation is vectorized over packed 64-bit words, so the O(L^2)
similarity table stays cheap at dataset scale (a few thousand molecules).
The greedy assignment is the classic scheme: repeatedly promote the
unassigned item with the most unassigned neighbors to centroid, ties going
to the lowest index.  Because neighbor counts only shrink as items are
assigned, clusters emerge in non-increasing size order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import SplitPlan
from .errors import EmptyInput, LengthMismatch, NoLargeClusters
from .fingerprint import Fingerprint
from .rng import generator

__all__ = ["Clustering", "butina_cluster", "cluster_training_plan", "neighbor_matrix"]

LARGE_CLUSTER_MIN_SIZE = 21
MAX_PER_CLUSTER = 7


@dataclass(frozen=True)
class Clustering:
    """Partition of input indices; each cluster leads with its centroid."""

    clusters: tuple[tuple[int, ...], ...]
    cutoff: float

    @property
    def n_items(self) -> int:
        return sum(len(c) for c in self.clusters)

    def labels(self) -> np.ndarray:
        out = np.empty(self.n_items, dtype=np.int64)
        for cluster_id, members in enumerate(self.clusters):
            for idx in members:
                out[idx] = cluster_id
        return out

    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]


def neighbor_matrix(fps: list[Fingerprint], cutoff: float, chunk: int = 256) -> np.ndarray:
    """Boolean matrix of pairwise Tanimoto >= cutoff (diagonal True)."""
    widths = {fp.nbits for fp in fps}
    if len(widths) > 1:
        raise LengthMismatch(f"mixed fingerprint widths: {sorted(widths)}")
    words = np.stack([fp.to_words() for fp in fps])
    pop = np.bitwise_count(words).sum(axis=1).astype(np.int64)
    n = len(fps)
    out = np.empty((n, n), dtype=bool)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        inter = np.bitwise_count(words[start:stop, None, :] & words[None, :, :]).sum(axis=2)
        union = pop[start:stop, None] + pop[None, :] - inter
        sims = np.where(union == 0, 1.0, inter / np.maximum(union, 1))
        out[start:stop] = sims >= cutoff
    return out


def butina_cluster(fps: list[Fingerprint], cutoff: float) -> Clustering:
    """Greedy neighbor-count clustering at the given similarity cutoff."""
    if not fps:
        raise EmptyInput("cannot cluster an empty fingerprint list")
    if not 0.0 < cutoff <= 1.0:
        raise ValueError(f"cutoff must be in (0, 1], got {cutoff}")

    neighbors = neighbor_matrix(fps, cutoff).astype(np.float64)
    unassigned = np.ones(len(fps), dtype=np.float64)
    clusters: list[tuple[int, ...]] = []
    remaining = len(fps)
    while remaining:
        counts = neighbors @ unassigned
        counts[unassigned == 0.0] = -1.0
        centroid = int(np.argmax(counts))
        members = np.flatnonzero((neighbors[centroid] > 0.0) & (unassigned > 0.0))
        cluster = (centroid, *[int(m) for m in members if m != centroid])
        unassigned[members] = 0.0
        remaining -= len(cluster)
        clusters.append(cluster)
    return Clustering(clusters=tuple(clusters), cutoff=cutoff)


def cluster_training_plan(
    clustering: Clustering,
    min_size: int = LARGE_CLUSTER_MIN_SIZE,
    k_per_cluster: int = 1,
    seed: int = 0,
) -> SplitPlan:
    """Draw k members from every cluster of size >= min_size as training data.

    Everything else, small-cluster members included, becomes the test set.
    """
    if not 1 <= k_per_cluster <= MAX_PER_CLUSTER:
        raise ValueError(f"k_per_cluster must be in 1..{MAX_PER_CLUSTER}, got {k_per_cluster}")
    large = [c for c in clustering.clusters if len(c) >= min_size]
    if not large:
        raise NoLargeClusters(f"no cluster reaches size {min_size}")

    rng = generator(seed)
    picks: list[np.ndarray] = []
    for members in large:
        picks.append(rng.choice(np.array(members, dtype=np.int64), size=k_per_cluster, replace=False))
    train = np.sort(np.concatenate(picks))
    mask = np.ones(clustering.n_items, dtype=bool)
    mask[train] = False
    test = np.flatnonzero(mask)
    return SplitPlan(
        train_indices=train,
        test_indices=test,
        seed=seed,
        train_fraction=train.size / clustering.n_items,
    )
