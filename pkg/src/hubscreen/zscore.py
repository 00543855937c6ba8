"""Z-score representations of sample correlation and partial correlation.

A data matrix X (n samples x p variables) is standardized to T, whose Gram
matrix is the sample correlation R. Projecting T onto the orthocomplement of
the all-ones vector gives U-scores: p unit vectors in R^{n-1} with
U^T U = R. Partial correlation scores Y are the unit-normalized columns of
[U U^T]^{-1} U, so that Y^T Y is the pseudo-inverse based partial
correlation matrix. Everything is computed through the (n-1) x (n-1) Gram
matrix U U^T; the p x p matrices are never formed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, RankDeficientGram, ValidationError, ZeroVarianceColumn

RANK_TOL = 1e-10
DIAG_GUARD = 1e-14


class ScoreKind(str, enum.Enum):
    U = "U"
    Y = "Y"


@dataclass
class DataMatrix:
    values: np.ndarray
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValidationError("data matrix must be two-dimensional")
        n, p = self.values.shape
        if not self.labels:
            self.labels = default_labels(p)
        self.labels = [str(s) for s in self.labels]
        if len(self.labels) != p:
            raise DimensionMismatch(f"{len(self.labels)} labels for {p} columns")
        if n < 3 or p < 2:
            raise ValidationError(f"need n >= 3 samples and p >= 2 variables (got n={n}, p={p})")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("data matrix contains non-finite values")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def default_labels(p: int) -> list[str]:
    width = max(4, len(str(p)))
    return [f"v{i + 1:0{width}d}" for i in range(p)]


@dataclass
class ScoreMatrix:
    """Unit-norm score columns living on S_{n-2}."""

    scores: np.ndarray
    kind: ScoreKind
    n: int
    labels: list[str]

    @property
    def p(self) -> int:
        return self.scores.shape[1]

    @property
    def dim(self) -> int:
        return self.scores.shape[0]

    def gram(self) -> np.ndarray:
        """Full p x p inner-product matrix; test-scale use only."""
        return self.scores.T @ self.scores


@dataclass
class GramSpectrum:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns match eigenvalues
    rank_tolerance: float = RANK_TOL

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T


def standardize(X: DataMatrix) -> np.ndarray:
    """Centre each column and scale it to unit Euclidean norm.

    Equivalent to (n-1)^{-1/2} (I - 11^T/n) X D_S^{-1/2}.
    """
    values = X.values
    n = values.shape[0]
    centered = values - values.mean(axis=0)
    var = np.einsum("ij,ij->j", centered, centered) / (n - 1)
    # relative check catches columns that are constant up to round-off
    scale = np.maximum(np.abs(values).max(axis=0), 1.0)
    bad = np.flatnonzero(~(var > (1e-13 * scale) ** 2))
    if bad.size:
        raise ZeroVarianceColumn([X.labels[j] for j in bad])
    T = centered / np.sqrt((n - 1) * var)
    # one more pass removes the residual mean left by floating-point centring
    T -= T.mean(axis=0)
    T /= np.linalg.norm(T, axis=0)
    return T


def build_basis(n: int) -> np.ndarray:
    """Deterministic orthonormal basis H_{2:n} of the complement of the ones vector.

    Uses the Householder reflection sending e_1 to 1/sqrt(n); its last n-1
    columns are orthonormal and orthogonal to 1. Each column is signed so
    its first nonzero entry is positive.
    """
    if n < 2:
        raise ValidationError(f"basis requires n >= 2 (got {n})")
    w = np.full(n, -1.0 / np.sqrt(n))
    w[0] += 1.0
    H = np.eye(n) - (2.0 / (w @ w)) * np.outer(w, w)
    H2 = H[:, 1:]
    for j in range(H2.shape[1]):
        nz = np.flatnonzero(np.abs(H2[:, j]) > 1e-15)
        if nz.size and H2[nz[0], j] < 0:
            H2[:, j] = -H2[:, j]
    return np.ascontiguousarray(H2)


def u_scores(T: np.ndarray, labels=None, basis: np.ndarray | None = None) -> ScoreMatrix:
    n, p = T.shape
    H2 = build_basis(n) if basis is None else basis
    U = H2.T @ T
    U /= np.linalg.norm(U, axis=0)
    return ScoreMatrix(U, ScoreKind.U, n, list(labels) if labels is not None else default_labels(p))


def gram_spectrum(U: ScoreMatrix, rank_tolerance: float = RANK_TOL) -> GramSpectrum:
    if U.kind is not ScoreKind.U:
        raise ValidationError("gram_spectrum expects U-scores")
    m, p = U.scores.shape
    if p < m:
        raise RankDeficientGram(
            f"U U^T is {m}x{m} but has rank at most p={p}; partial correlation "
            f"scores need p >= n-1"
        )
    G = U.scores @ U.scores.T
    vals, vecs = np.linalg.eigh(G)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    cutoff = rank_tolerance * vals[0]
    low = np.flatnonzero(vals <= cutoff)
    if low.size:
        raise RankDeficientGram(
            f"U U^T has {low.size} of {m} eigenvalues below {rank_tolerance:g} x max "
            f"(smallest {vals[-1]:.3e}); partial correlation scores are undefined"
        )
    return GramSpectrum(np.ascontiguousarray(vals), np.ascontiguousarray(vecs), rank_tolerance)


def y_scores(U: ScoreMatrix, spec: GramSpectrum | None = None) -> ScoreMatrix:
    """Partial correlation scores Y = [UU^T]^{-1} U D^{-1/2}.

    D_ii is the squared norm of column i of W = [UU^T]^{-1} U, which equals
    the i-th diagonal entry of U^T [UU^T]^{-2} U.
    """
    if spec is None:
        spec = gram_spectrum(U)
    V, lam = spec.eigenvectors, spec.eigenvalues
    W = V @ ((V.T @ U.scores) / lam[:, None])
    d = np.einsum("ij,ij->j", W, W)
    bad = np.flatnonzero(d < DIAG_GUARD)
    if bad.size:
        names = ", ".join(U.labels[j] for j in bad[:10])
        raise RankDeficientGram(f"degenerate pseudo-inverse diagonal for columns: {names}")
    Y = W / np.sqrt(d)
    return ScoreMatrix(Y, ScoreKind.Y, U.n, list(U.labels))


def moore_penrose_residuals(R: np.ndarray, Q: np.ndarray) -> tuple[float, float, float, float]:
    """Max-abs residuals of the four Moore-Penrose conditions for Q = pinv(R).

    Returns (asym(QR), asym(RQ), |RQR - R|, |QRQ - Q|).
    """
    R = np.asarray(R, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1] or Q.shape != R.shape:
        raise DimensionMismatch(f"need equal square matrices, got {R.shape} and {Q.shape}")
    QR = Q @ R
    RQ = R @ Q
    return (
        float(np.max(np.abs(QR - QR.T))),
        float(np.max(np.abs(RQ - RQ.T))),
        float(np.max(np.abs(RQ @ R - R))),
        float(np.max(np.abs(QR @ Q - Q))),
    )


def score_matrix(X: DataMatrix, mode: str = "parcor") -> ScoreMatrix:
    """Convenience: data matrix to U-scores (``corr``) or Y-scores (``parcor``)."""
    U = u_scores(standardize(X), X.labels)
    if str(getattr(mode, "value", mode)) == "corr":
        return U
    return y_scores(U)
