"""Exact vantage-point tree for Euclidean range search over unit vectors.

Queries are answered in batches: at each node the whole batch is compared
against the vantage point and split into the subsets that may reach each
child, so the inner loops are numpy array operations and leaf buckets are
scanned with a single matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class _Node:
    vantage: int
    # [lo, hi] distance ranges from the vantage point to points in each child
    inner_lo: float = 0.0
    inner_hi: float = -1.0
    outer_lo: float = 0.0
    outer_hi: float = -1.0
    inner: "_Node | _Leaf | None" = None
    outer: "_Node | _Leaf | None" = None


@dataclass
class _Leaf:
    ids: np.ndarray


def _unit_dist(points: np.ndarray, v: np.ndarray) -> np.ndarray:
    # |a - b| for unit vectors, via the inner product
    return np.sqrt(np.maximum(2.0 - 2.0 * (points @ v), 0.0))


class VPTree:
    """Index over the rows of ``points`` (assumed to have unit norm).

    The vantage point of each node is the first remaining point in index
    order, so construction is fully deterministic.
    """

    def __init__(self, points: np.ndarray, leaf_size: int = 64):
        self.points = np.ascontiguousarray(points, dtype=np.float64)
        self.leaf_size = max(1, int(leaf_size))
        self.root = self._build(np.arange(len(self.points)))

    def _build(self, ids: np.ndarray):
        if ids.size == 0:
            return None
        if ids.size <= self.leaf_size:
            return _Leaf(ids)
        v, rest = ids[0], ids[1:]
        d = _unit_dist(self.points[rest], self.points[v])
        order = np.argsort(d, kind="stable")
        half = rest.size // 2
        inner_idx, outer_idx = order[:half], order[half:]
        node = _Node(int(v))
        if inner_idx.size:
            node.inner_lo, node.inner_hi = float(d[inner_idx].min()), float(d[inner_idx].max())
            node.inner = self._build(np.sort(rest[inner_idx]))
        if outer_idx.size:
            node.outer_lo, node.outer_hi = float(d[outer_idx].min()), float(d[outer_idx].max())
            node.outer = self._build(np.sort(rest[outer_idx]))
        return node

    def query_radius(self, queries: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
        """All (query index, point index) pairs with distance <= radius.

        Pairs are returned sorted by query then point index.
        """
        queries = np.ascontiguousarray(queries, dtype=np.float64)
        qi_out: list[np.ndarray] = []
        pi_out: list[np.ndarray] = []
        stack = [(self.root, np.arange(len(queries)))]
        while stack:
            node, q = stack.pop()
            if node is None or q.size == 0:
                continue
            if isinstance(node, _Leaf):
                dots = queries[q] @ self.points[node.ids].T
                dist = np.sqrt(np.maximum(2.0 - 2.0 * dots, 0.0))
                r, c = np.nonzero(dist <= radius)
                qi_out.append(q[r])
                pi_out.append(node.ids[c])
                continue
            dq = _unit_dist(queries[q], self.points[node.vantage])
            hit = dq <= radius
            if hit.any():
                qi_out.append(q[hit])
                pi_out.append(np.full(int(hit.sum()), node.vantage))
            # triangle inequality: a child is reachable iff the query shell meets its range
            for child, lo, hi in (
                (node.outer, node.outer_lo, node.outer_hi),
                (node.inner, node.inner_lo, node.inner_hi),
            ):
                if child is None:
                    continue
                reach = (dq + radius >= lo) & (dq - radius <= hi)
                if reach.any():
                    stack.append((child, q[reach]))
        if not qi_out:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        qi = np.concatenate(qi_out).astype(np.int64)
        pi = np.concatenate(pi_out).astype(np.int64)
        order = np.lexsort((pi, qi))
        return qi[order], pi[order]
