"""Point sets, cluster trees and the admissibility predicate.

A cluster tree is a recursive binary partition of a set of discretization
points. Each node owns a contiguous range of the *permuted* index set, so
the tree induces a reordering of the points (and hence of matrix rows and
columns). Two splitting strategies are provided:

- ``bisection``: split at the median coordinate along the widest bounding
  box axis. Deterministic and perfectly balanced.
- ``kmeans2``: recursive 2-means with deterministic seeding (the two
  points realizing the extremes of the bounding box diagonal).

Admissibility of a cluster pair is decided on bounding boxes, which is
conservative: the bbox diameter overestimates the true diameter and the
bbox distance underestimates the true distance, so a pair is never
declared admissible when the exact criterion would reject it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PointSet",
    "ClusterNode",
    "Permutation",
    "ClusterTree",
    "build_cluster_tree",
    "admissible",
]

_KMEANS_MAX_ITER = 50


class PointSet:
    """A nonempty set of 1D or 2D points with finite coordinates.

    Stores points as an (n, d) float array; 1D input of shape (n,) is
    promoted to (n, 1).
    """

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ValueError("points must be an (n, d) array")
        if pts.shape[0] == 0:
            raise ValueError("point set must be nonempty")
        if pts.shape[1] not in (1, 2):
            raise ValueError("only 1D and 2D point sets are supported")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must have finite coordinates")
        self.points = pts

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


@dataclass
class ClusterNode:
    """A node of the cluster tree: a contiguous range of permuted indices.

    ``start:end`` indexes into the tree ordering. ``bbox_lo``/``bbox_hi``
    is the axis-aligned bounding box of the node's points. Children, if
    present, partition the parent's range exactly.
    """

    start: int
    end: int
    bbox_lo: np.ndarray
    bbox_hi: np.ndarray
    children: tuple = field(default=())

    @property
    def size(self):
        return self.end - self.start

    @property
    def is_leaf(self):
        return not self.children

    @property
    def diameter(self):
        return float(np.linalg.norm(self.bbox_hi - self.bbox_lo))

    @property
    def center(self):
        return 0.5 * (self.bbox_lo + self.bbox_hi)

    def depth(self):
        if self.is_leaf:
            return 0
        return 1 + max(c.depth() for c in self.children)

    def leaves(self):
        if self.is_leaf:
            yield self
        else:
            for c in self.children:
                yield from c.leaves()


@dataclass
class Permutation:
    """Bijection between original and tree index orderings.

    ``forward[i_orig] = i_tree`` and ``inverse[i_tree] = i_orig``; hence
    ``forward[inverse] == identity``.
    """

    forward: np.ndarray
    inverse: np.ndarray

    def to_tree(self, v):
        """Reorder a vector (or matrix rows) from original into tree order."""
        return np.asarray(v)[self.inverse]

    def from_tree(self, v):
        """Reorder a vector (or matrix rows) from tree back into original order."""
        return np.asarray(v)[self.forward]


@dataclass
class ClusterTree:
    """Root node, permutation and the points in tree order."""

    root: ClusterNode
    perm: Permutation
    points: np.ndarray  # (n, d), tree order

    def __len__(self):
        return self.points.shape[0]


def _bbox(pts):
    return pts.min(axis=0), pts.max(axis=0)


def _split_bisection(pts):
    """Median split along the widest bbox axis. Returns a boolean left mask."""
    lo, hi = _bbox(pts)
    axis = int(np.argmax(hi - lo))
    order = np.argsort(pts[:, axis], kind="stable")
    half = pts.shape[0] // 2
    mask = np.zeros(pts.shape[0], dtype=bool)
    mask[order[:half]] = True
    return mask


def _split_kmeans2(pts):
    """Deterministic 2-means split. Returns a boolean mask for cluster 0.

    Centroids are seeded with the two points realizing the extremes of the
    projection onto the bbox diagonal; assignment ties go to the
    lower-index centroid. Falls back to an even index split when the
    points are all identical or one cluster empties.
    """
    n = pts.shape[0]
    lo, hi = _bbox(pts)
    diag = hi - lo
    if not np.any(diag > 0):
        mask = np.zeros(n, dtype=bool)
        mask[: n // 2] = True
        return mask
    proj = pts @ diag
    c = np.stack([pts[int(np.argmin(proj))], pts[int(np.argmax(proj))]])
    assign = None
    for _ in range(_KMEANS_MAX_ITER):
        d0 = ((pts - c[0]) ** 2).sum(axis=1)
        d1 = ((pts - c[1]) ** 2).sum(axis=1)
        new_assign = d1 < d0  # tie -> centroid 0
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        n1 = int(assign.sum())
        if n1 == 0 or n1 == n:
            mask = np.zeros(n, dtype=bool)
            mask[: n // 2] = True
            return mask
        c = np.stack([pts[~assign].mean(axis=0), pts[assign].mean(axis=0)])
    return ~assign


def build_cluster_tree(pts, leaf_size=64, strategy="bisection"):
    """Build a cluster tree over a point set.

    Parameters
    ----------
    pts : PointSet or array_like
        The points to partition.
    leaf_size : int
        Nodes with at most this many points become leaves.
    strategy : {"bisection", "kmeans2"}
        Splitting rule.

    Returns
    -------
    ClusterTree
        Carrying the root ClusterNode, the Permutation and the points in
        tree order (depth-first leaf order).
    """
    if not isinstance(pts, PointSet):
        pts = PointSet(pts)
    if leaf_size < 1:
        raise ValueError("leaf_size must be >= 1")
    if strategy == "bisection":
        split = _split_bisection
    elif strategy == "kmeans2":
        split = _split_kmeans2
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    points = pts.points
    n = points.shape[0]
    order = np.empty(n, dtype=np.intp)
    cursor = 0

    def build(idx, start):
        nonlocal cursor
        sub = points[idx]
        lo, hi = _bbox(sub)
        if idx.shape[0] <= leaf_size:
            order[start : start + idx.shape[0]] = idx
            cursor = start + idx.shape[0]
            return ClusterNode(start, cursor, lo, hi)
        mask = split(sub)
        left = build(idx[mask], start)
        right = build(idx[~mask], left.end)
        return ClusterNode(start, right.end, lo, hi, (left, right))

    root = build(np.arange(n, dtype=np.intp), 0)
    inverse = order  # inverse[i_tree] = i_orig
    forward = np.empty(n, dtype=np.intp)
    forward[inverse] = np.arange(n, dtype=np.intp)
    perm = Permutation(forward=forward, inverse=inverse)
    return ClusterTree(root=root, perm=perm, points=points[inverse])


def bbox_distance(a, b):
    """Distance between the bounding boxes of two cluster nodes."""
    gap = np.maximum(a.bbox_lo - b.bbox_hi, b.bbox_lo - a.bbox_hi)
    gap = np.maximum(gap, 0.0)
    return float(np.linalg.norm(gap))


def admissible(a, b, eta):
    """Separation test for a cluster pair.

    Returns True when ``min(diam(a), diam(b)) <= eta * dist(a, b)`` with
    diameters and distances taken on bounding boxes. A pair at distance
    zero (e.g. adjacent or identical clusters) is never admissible.
    """
    dist = bbox_distance(a, b)
    if dist <= 0.0:
        return False
    return min(a.diameter, b.diameter) <= eta * dist
