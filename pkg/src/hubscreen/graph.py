"""Thresholded (partial) correlation graphs and hub extraction.

Two construction engines are provided. ``exact`` scans column tiles with
dense inner products; ``range`` queries a vantage-point tree built over the
2p points {+Z_j, -Z_j}, using |<Z_i, Z_j>| >= rho iff
min(|Z_i - Z_j|, |Z_i + Z_j|) <= sqrt(2 (1 - rho)). Both engines only
propose candidate pairs (with a small slack); the final edge decision and
the stored magnitude come from one shared pairwise routine, so the engines
agree exactly and results do not depend on tile size or thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, VertexNotDiscovered
from .vptree import VPTree
from .zscore import ScoreMatrix

DEFAULT_TILE = 256
CANDIDATE_SLACK = 1e-9
# magnitudes this close to 1 are round-off on identical unit vectors
UNIT_SNAP = 1e-12
_PAIR_CHUNK = 16384


@dataclass
class ThresholdGraph:
    """Adjacency in CSR form; each row sorted by descending magnitude, then id."""

    rho: float
    p: int
    indptr: np.ndarray
    neighbors: np.ndarray
    magnitudes: np.ndarray
    signs: np.ndarray

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def n_edges(self) -> int:
        return int(self.neighbors.size // 2)

    def neighbor_list(self, i: int) -> list[tuple[int, float, int]]:
        s, e = self.indptr[i], self.indptr[i + 1]
        return [
            (int(j), float(m), int(g))
            for j, m, g in zip(self.neighbors[s:e], self.magnitudes[s:e], self.signs[s:e])
        ]

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Upper-triangle edges (i < j) as sorted arrays (i, j, magnitude)."""
        rows = np.repeat(np.arange(self.p), self.degrees)
        keep = rows < self.neighbors
        i, j, m = rows[keep], self.neighbors[keep], self.magnitudes[keep]
        order = np.lexsort((j, i))
        return i[order], j[order], m[order]

    def edge_set(self) -> set[tuple[int, int]]:
        i, j, _ = self.edges()
        return set(zip(i.tolist(), j.tolist()))

    def same_as(self, other: "ThresholdGraph") -> bool:
        return (
            self.p == other.p
            and self.rho == other.rho
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.neighbors, other.neighbors)
            and np.array_equal(self.magnitudes, other.magnitudes)
            and np.array_equal(self.signs, other.signs)
        )

    @classmethod
    def from_edges(cls, p, rho, i, j, values) -> "ThresholdGraph":
        """Build from undirected edges given once each, with signed values."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        src = np.concatenate([i, j])
        dst = np.concatenate([j, i])
        mag = np.abs(np.concatenate([values, values]))
        sgn = np.where(np.concatenate([values, values]) < 0, -1, 1).astype(np.int8)
        order = np.lexsort((dst, -mag, src))
        src, dst, mag, sgn = src[order], dst[order], mag[order], sgn[order]
        indptr = np.zeros(p + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=p), out=indptr[1:])
        return cls(float(rho), int(p), indptr, dst, mag, sgn)


def pair_inner_products(Z: ScoreMatrix, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Inner products <Z_i, Z_j> for index arrays, computed the same way everywhere."""
    rows = _rows(Z)
    out = np.empty(len(i), dtype=np.float64)
    for s in range(0, len(i), _PAIR_CHUNK):
        a = rows[i[s : s + _PAIR_CHUNK]]
        b = rows[j[s : s + _PAIR_CHUNK]]
        out[s : s + _PAIR_CHUNK] = (a * b).sum(axis=1)
    mag = np.abs(out)
    snap = mag >= 1.0 - UNIT_SNAP
    out[snap] = np.sign(out[snap])
    return out


def _rows(Z: ScoreMatrix) -> np.ndarray:
    rows = getattr(Z, "_rows_cache", None)
    if rows is None or rows.shape != (Z.p, Z.dim):
        rows = np.ascontiguousarray(Z.scores.T)
        Z._rows_cache = rows
    return rows


def _finalize(Z: ScoreMatrix, rho: float, ci: np.ndarray, cj: np.ndarray) -> ThresholdGraph:
    if ci.size:
        key = np.unique(ci * Z.p + cj)
        ci, cj = key // Z.p, key % Z.p
    vals = pair_inner_products(Z, ci, cj)
    keep = np.abs(vals) >= rho
    return ThresholdGraph.from_edges(Z.p, rho, ci[keep], cj[keep], vals[keep])


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho <= 1.0:
        raise ValidationError(f"rho must lie in [0, 1] (got {rho})")


def build_graph_exact(
    Z: ScoreMatrix, rho: float, tile: int = DEFAULT_TILE, threads: int = 1
) -> ThresholdGraph:
    """Threshold graph from blocked dense inner products over column tiles."""
    _check_rho(rho)
    rows = _rows(Z)
    p = Z.p
    starts = list(range(0, p, tile))
    cut = rho - CANDIDATE_SLACK

    def scan(a: int):
        block = rows[a : a + tile]
        found_i, found_j = [], []
        for b in starts[starts.index(a) :]:
            g = block @ rows[b : b + tile].T
            r, c = np.nonzero(np.abs(g) >= cut)
            gi, gj = r + a, c + b
            upper = gi < gj
            found_i.append(gi[upper])
            found_j.append(gj[upper])
        return np.concatenate(found_i), np.concatenate(found_j)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(scan, starts))
    else:
        parts = [scan(a) for a in starts]
    ci = np.concatenate([x for x, _ in parts]).astype(np.int64)
    cj = np.concatenate([y for _, y in parts]).astype(np.int64)
    return _finalize(Z, rho, ci, cj)


def build_graph_range(
    Z: ScoreMatrix, rho: float, leaf_size: int = 64, threads: int = 1, batch: int = 8192
) -> ThresholdGraph:
    """Threshold graph from exact metric range search over {+Z_j, -Z_j}."""
    _check_rho(rho)
    rows = _rows(Z)
    p = Z.p
    tree = VPTree(np.vstack([rows, -rows]), leaf_size=leaf_size)
    radius = math.sqrt(2.0 * max(0.0, 1.0 - rho + CANDIDATE_SLACK))

    def run(s: int):
        qi, pj = tree.query_radius(rows[s : s + batch], radius)
        return qi + s, pj % p

    starts = range(0, p, batch)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    ci = np.concatenate([x for x, _ in parts])
    cj = np.concatenate([y for _, y in parts])
    upper = ci < cj
    return _finalize(Z, rho, ci[upper], cj[upper])


def build_graph(Z: ScoreMatrix, rho: float, engine: str = "exact", threads: int = 1) -> ThresholdGraph:
    if engine == "exact":
        return build_graph_exact(Z, rho, threads=threads)
    if engine == "range":
        return build_graph_range(Z, rho, threads=threads)
    raise ValidationError(f"unknown engine {engine!r}")


def hub_discoveries(G: ThresholdGraph, delta: int) -> tuple[np.ndarray, int]:
    if delta < 1:
        raise ValidationError("delta must be >= 1")
    hubs = np.flatnonzero(G.degrees >= delta)
    return hubs, int(hubs.size)


def threshold_profile(G: ThresholdGraph, i: int) -> np.ndarray:
    """rho_i(delta) for delta = 1..d_i: the sorted neighbour magnitudes."""
    s, e = G.indptr[i], G.indptr[i + 1]
    if e == s:
        raise VertexNotDiscovered(i)
    return G.magnitudes[s:e].copy()


def count_stars(G: ThresholdGraph, delta: int) -> int:
    """Number of (centre, delta-leaf set) stars: sum_i C(d_i, delta)."""
    if delta < 1:
        raise ValidationError("delta must be >= 1")
    deg = G.degrees
    return sum(math.comb(int(d), delta) for d in deg[deg >= delta])


def counts_by_delta(G: ThresholdGraph) -> list[int]:
    """N_{delta,rho} for delta = 1..d_max."""
    deg = G.degrees
    d_max = int(deg.max()) if deg.size else 0
    hist = np.bincount(deg, minlength=d_max + 1)
    tail = np.cumsum(hist[::-1])[::-1]
    return [int(x) for x in tail[1:]]
