"""Nearest-neighbor distances R_i for every point of a sample.

Two interchangeable paths: an O(N^2) brute force that serves as the oracle,
and a k-d tree path for large samples.  Both report the distance of each
point to its closest *other* point, computed by the same kernel, so the two
paths agree bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .geometry import NormKind


class DuplicatePointsError(ValueError):
    """Raised when an estimator is fed a sample with coincident points.

    Zero nearest-neighbor distances make log Y_i = -inf; continuous data
    produces ties with probability zero, so ties mean the data violates the
    model and downstream estimators refuse to run.
    """


@dataclass(frozen=True)
class SampleSet:
    """An i.i.d. sample: (N+1) x d matrix of float64 plus the norm tag."""

    points: np.ndarray
    norm: NormKind

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2:
            raise ValueError(f"points must be 2-d, got shape {pts.shape}")
        if pts.shape[0] < 2:
            raise ValueError("need at least two points for nearest neighbors")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain NaN or infinity")
        object.__setattr__(self, "points", pts)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class NNDistances:
    """Per-point nearest-neighbor distances and log-gap values.

    r[i] is the distance from point i to the rest of the sample and
    log_y[i] = log N + d*log r[i] (so log_y is -inf exactly where r is 0;
    duplicate_count says how many such indices exist).
    """

    r: np.ndarray
    log_y: np.ndarray
    n: int
    duplicate_count: int


def _pair_distances(points: np.ndarray, i: int, norm: NormKind) -> np.ndarray:
    """Distances from points[i] to every row, by the canonical kernel."""
    diff = points - points[i]
    if norm is NormKind.CHEBYSHEV:
        return np.max(np.abs(diff), axis=1)
    return np.sqrt(np.sum(diff * diff, axis=1))


def _finish(r: np.ndarray, n_points: int, d: int) -> NNDistances:
    n = n_points - 1
    dup = int(np.count_nonzero(r == 0.0))
    with np.errstate(divide="ignore"):
        log_y = np.log(n) + d * np.log(r)
    return NNDistances(r=r, log_y=log_y, n=n, duplicate_count=dup)


def nn_bruteforce(s: SampleSet) -> NNDistances:
    """Exact all-pairs minimum; O(N^2).  The oracle for the tree path."""
    pts = s.points
    n_points, d = pts.shape
    r = np.empty(n_points)
    for i in range(n_points):
        dist = _pair_distances(pts, i, s.norm)
        dist[i] = np.inf
        r[i] = dist.min()
    return _finish(r, n_points, d)


def nn_kdtree(s: SampleSet) -> NNDistances:
    """Nearest-neighbor distances via a k-d tree; expected O(N log N).

    The tree proposes a handful of candidate neighbors per point and the
    final distance is recomputed with the same kernel as nn_bruteforce,
    which keeps the two paths exactly equal.
    """
    pts = s.points
    n_points, d = pts.shape
    p = 2 if s.norm is NormKind.EUCLIDEAN else np.inf
    k = min(4, n_points)
    tree = cKDTree(pts)
    _, idx = tree.query(pts, k=k, p=p)

    diff = pts[idx] - pts[:, None, :]
    if s.norm is NormKind.CHEBYSHEV:
        cand = np.max(np.abs(diff), axis=2)
    else:
        cand = np.sqrt(np.sum(diff * diff, axis=2))
    cand[idx == np.arange(n_points)[:, None]] = np.inf
    r = cand.min(axis=1)
    return _finish(r, n_points, d)


def nn_distances(s: SampleSet, force_bruteforce: bool = False) -> NNDistances:
    """Dispatch: brute force for tiny samples, k-d tree otherwise."""
    if force_bruteforce or s.n_points <= 64:
        return nn_bruteforce(s)
    return nn_kdtree(s)
