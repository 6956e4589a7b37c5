"""Exact k-d tree for small metric pools.

Nearest-neighbor results are exact (identical to a linear scan) and fully
deterministic: distance ties break on the lexicographically smaller payload
id, and the tree structure does not depend on insertion order.
"""

from __future__ import annotations

import math
from bisect import insort
from typing import Sequence


class KDTree:
    """Static k-d tree over fixed-dimension points with string payload ids."""

    __slots__ = ("dims", "_points", "_ids", "_nodes", "_root")

    def __init__(self, points: Sequence[Sequence[float]],
                 ids: Sequence[str]) -> None:
        if len(points) != len(ids):
            raise ValueError("points and ids must have equal length")
        if not points:
            raise ValueError("cannot build an empty tree")
        dims = len(points[0])
        if dims == 0:
            raise ValueError("points must have at least one dimension")
        for p in points:
            if len(p) != dims:
                raise ValueError("all points must share one dimensionality")
            for v in p:
                if not math.isfinite(v):
                    raise ValueError(f"non-finite coordinate in point {p!r}")
        if len(set(ids)) != len(ids):
            raise ValueError("ids must be unique")
        self.dims = dims
        self._points = [tuple(float(v) for v in p) for p in points]
        self._ids = list(ids)
        # Nodes as (point_index, left_node, right_node); -1 is "no child".
        self._nodes: list[tuple[int, int, int]] = []
        # Ordering by (coordinate, id) makes the structure independent of
        # the input order, so query results are order-invariant too.
        index_order = sorted(range(len(points)),
                             key=lambda i: (self._points[i], self._ids[i]))
        self._root = self._build(index_order, 0)

    def __len__(self) -> int:
        return len(self._points)

    def _build(self, indices: list[int], depth: int) -> int:
        if not indices:
            return -1
        axis = depth % self.dims
        indices = sorted(indices,
                         key=lambda i: (self._points[i][axis], self._ids[i]))
        mid = len(indices) // 2
        left = self._build(indices[:mid], depth + 1)
        right = self._build(indices[mid + 1:], depth + 1)
        self._nodes.append((indices[mid], left, right))
        return len(self._nodes) - 1

    def query(self, point: Sequence[float], k: int) -> list[tuple[float, str]]:
        """The k nearest (euclidean distance, id) pairs, ascending.

        Fewer than k entries are returned when the pool is smaller than k.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        if len(point) != self.dims:
            raise ValueError(f"query point must have {self.dims} dimensions")
        q = tuple(float(v) for v in point)
        # best: ascending (squared distance, id, index), at most k entries.
        best: list[tuple[float, str, int]] = []

        def consider(idx: int) -> None:
            p = self._points[idx]
            d2 = 0.0
            for a, b in zip(p, q):
                diff = a - b
                d2 += diff * diff
            entry = (d2, self._ids[idx], idx)
            if len(best) < k:
                insort(best, entry)
            elif entry < best[-1]:
                insort(best, entry)
                best.pop()

        def visit(node: int, depth: int) -> None:
            if node == -1:
                return
            idx, left, right = self._nodes[node]
            consider(idx)
            axis = depth % self.dims
            delta = q[axis] - self._points[idx][axis]
            near, far = (right, left) if delta > 0 else (left, right)
            visit(near, depth + 1)
            # The far side can only hold a winner if the splitting plane is
            # within the current worst distance (non-strict, for exact ties).
            if len(best) < k or delta * delta <= best[-1][0]:
                visit(far, depth + 1)

        visit(self._root, 0)
        return [(math.sqrt(d2), id_) for d2, id_, _ in best]


def linear_scan(points: Sequence[Sequence[float]], ids: Sequence[str],
                query: Sequence[float], k: int) -> list[tuple[float, str]]:
    """Brute-force reference with the same distance and tie-break rules."""
    q = tuple(float(v) for v in query)
    scored = []
    for p, id_ in zip(points, ids):
        d2 = 0.0
        for a, b in zip(p, q):
            diff = float(a) - b
            d2 += diff * diff
        scored.append((d2, id_))
    scored.sort()
    return [(math.sqrt(d2), id_) for d2, id_ in scored[:k]]
