"""Classical MDS: double centering, Jacobi eigendecomposition, 2-D coordinates.

Edit-distance matrices are generally non-Euclidean, so the spectrum can
contain negative eigenvalues; only positive ones are used for coordinates and
the discarded negative mass is reported as a quality diagnostic.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .distance import DistanceMatrix, check_distance_matrix
from .errors import NoConvergence, TooFewPoints

MAX_SWEEPS = 100
OFFDIAG_TOL = 1e-10


def double_center(values: np.ndarray) -> np.ndarray:
    """-(1/2) C D^2 C with C = I - (1/n) 1 1'; rows and columns sum to zero."""
    d = check_distance_matrix(values)
    n = d.shape[0]
    c = np.eye(n) - np.ones((n, n)) / n
    return -0.5 * (c @ (d * d) @ c)


def _frobenius(a: np.ndarray) -> float:
    return float(np.sqrt((a * a).sum()))


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diagonal(a))
    return _frobenius(off)


def eigendecompose(m: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Full spectrum of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues descending, eigenvector columns), with each
    eigenvector's first nonzero component made positive.  Raises
    NoConvergence if the off-diagonal norm is not annihilated within
    the sweep budget.
    """
    a = np.array(m, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T):
        raise ValueError("matrix must be symmetric")
    n = a.shape[0]
    v = np.eye(n)
    scale = _frobenius(a)
    threshold = OFFDIAG_TOL * scale if scale > 0 else 0.0
    converged = _offdiag_norm(a) <= threshold
    for _ in range(max_sweeps):
        if converged:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J' A J restricted to rows/cols p and q
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        converged = _offdiag_norm(a) <= threshold
    if not converged:
        raise NoConvergence(f"Jacobi sweep budget ({max_sweeps}) exhausted")
    eigenvalues = np.diagonal(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = v[:, order]
    for col in range(n):
        for row in range(n):
            if abs(vectors[row, col]) > 1e-12:
                if vectors[row, col] < 0:
                    vectors[:, col] = -vectors[:, col]
                break
    return eigenvalues, vectors


@dataclass(frozen=True)
class Embedding:
    """Top-2 classical MDS coordinates with spectrum diagnostics."""

    ids: tuple[str, ...]
    coordinates: np.ndarray = field(repr=False)  # n x 2
    lambda1: float
    lambda2: float
    negative_mass: float
    degenerate: bool

    def to_jsonable(self) -> dict:
        return {
            "ids": list(self.ids),
            "xy": [[float(x), float(y)] for x, y in self.coordinates],
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "negative_mass": self.negative_mass,
            "degenerate": self.degenerate,
        }


class ClassicalMDS(BaseEstimator, TransformerMixin):
    """Embed a precomputed distance matrix into the plane.

    fit_transform(X) returns n x 2 coordinates scaled by sqrt(eigenvalue);
    eigenvalues_, negative_mass_, degenerate_ are set after fitting.
    """

    def __init__(self, max_sweeps: int = MAX_SWEEPS):
        self.max_sweeps = max_sweeps

    def fit(self, X, y=None):
        values = check_distance_matrix(X)
        n = values.shape[0]
        if n < 3:
            raise TooFewPoints(f"MDS needs at least 3 points, got {n}")
        centered = double_center(values)
        eigenvalues, vectors = eigendecompose(centered, self.max_sweeps)
        self.eigenvalues_ = eigenvalues
        coords = np.zeros((n, 2))
        retained = [0.0, 0.0]
        degenerate = False
        # treat numerically-zero eigenvalues as non-positive
        eps = 1e-12 * max(float(np.abs(eigenvalues).max()), 1.0)
        for axis in range(2):
            lam = eigenvalues[axis] if axis < n else 0.0
            if lam > eps:
                coords[:, axis] = vectors[:, axis] * np.sqrt(lam)
                retained[axis] = float(lam)
            else:
                degenerate = True
        self.embedding_ = coords
        self.retained_ = tuple(retained)
        self.negative_mass_ = float(np.sum(np.abs(eigenvalues[eigenvalues < 0])))
        self.degenerate_ = degenerate
        return self

    def transform(self, X):
        # classical MDS has no out-of-sample map; transform re-fits
        return self.fit(X).embedding_

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_


def mds(matrix: DistanceMatrix, max_sweeps: int = MAX_SWEEPS) -> Embedding:
    """Classical MDS over a DistanceMatrix, keeping the two largest positive axes."""
    est = ClassicalMDS(max_sweeps=max_sweeps).fit(matrix.values)
    return Embedding(
        ids=matrix.ids,
        coordinates=est.embedding_,
        lambda1=est.retained_[0],
        lambda2=est.retained_[1],
        negative_mass=est.negative_mass_,
        degenerate=est.degenerate_,
    )
