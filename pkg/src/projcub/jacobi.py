"""Quadrature on [0, 1] for the normalized weight ``t**alpha * (1-t)**beta``.

Rules come in two flavors: plain Gauss (exact through degree ``2K - 1``)
and a fixed-node variant with one node pinned at 0 (exact through degree
``2K`` with ``K`` free nodes).  Nodes are computed from the symmetric
tridiagonal eigenproblem built out of the closed-form three-term recurrence
coefficients; the fixed-node variant modifies the last diagonal entry so
that 0 becomes an eigenvalue.  The weight function is never sampled, so
integrable endpoint singularities (e.g. ``beta = -1/2``) are handled exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg

__all__ = [
    "QuadratureRule",
    "QuadratureError",
    "recurrence_coefficients",
    "gauss_rule",
    "radau_zero_rule",
    "chi_moment",
]

GAUSS = "gauss"
RADAU_ZERO = "radau0"


class QuadratureError(RuntimeError):
    """Raised when a rule cannot be produced (eigensolver failure,
    nonpositive weight).  A partial rule is never returned."""


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights on [0, 1], exact for the normalized Jacobi-type weight."""

    alpha: float
    beta: float
    flavor: str
    nodes: np.ndarray
    weights: np.ndarray
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise QuadratureError("nonpositive weight encountered")

    @property
    def count(self) -> int:
        return self.nodes.shape[0]

    def integrate_monomial(self, j: int) -> float:
        """Apply the rule to ``t**j``."""
        return float(np.dot(self.weights, self.nodes**j))


def _validate_exponents(alpha: float, beta: float) -> None:
    if not (alpha > -1 and beta > -1):
        raise ValueError(
            f"weight exponents must satisfy alpha > -1 and beta > -1, "
            f"got alpha={alpha}, beta={beta}"
        )


def recurrence_coefficients(alpha: float, beta: float, count: int):
    """Monic three-term recurrence coefficients on [0, 1].

    Returns arrays ``(a, b)`` of length ``count`` with
    ``p_{k+1}(t) = (t - a_k) p_k(t) - b_k p_{k-1}(t)`` and ``b_0 = 1``
    (the measure is normalized).  Derived from the classical closed forms
    for the weight ``(1-u)**A (1+u)**B`` on [-1, 1] with ``A = beta``,
    ``B = alpha``, shifted by ``t = (1+u)/2``.
    """
    _validate_exponents(alpha, beta)
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    A, B = float(beta), float(alpha)
    a = np.empty(count)
    b = np.empty(count)
    apb = A + B
    a[0] = (B - A) / (apb + 2.0)
    b[0] = 2.0  # placeholder, overwritten by the normalization below
    for k in range(1, count):
        den = (2.0 * k + apb) * (2.0 * k + apb + 2.0)
        a[k] = (B * B - A * A) / den
        if k == 1:
            b[1] = 4.0 * (A + 1.0) * (B + 1.0) / ((apb + 2.0) ** 2 * (apb + 3.0))
        else:
            b[k] = (
                4.0
                * k
                * (k + A)
                * (k + B)
                * (k + apb)
                / ((2.0 * k + apb) ** 2 * (2.0 * k + apb + 1.0) * (2.0 * k + apb - 1.0))
            )
    # Shift [-1, 1] -> [0, 1]: u = 2t - 1.
    a = (a + 1.0) / 2.0
    b = b / 4.0
    b[0] = 1.0
    return a, b


def _eigen_nodes_weights(diag: np.ndarray, offdiag_sq: np.ndarray):
    """Golub-Welsch: eigenvalues of the symmetric tridiagonal matrix are the
    nodes; squared first eigenvector components are the weights (times b_0=1).
    """
    off = np.sqrt(offdiag_sq)
    try:
        vals, vecs = scipy.linalg.eigh_tridiagonal(diag, off)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:  # pragma: no cover
        raise QuadratureError(f"tridiagonal eigensolver did not converge: {exc}")
    if not np.all(np.isfinite(vals)):  # pragma: no cover
        raise QuadratureError("tridiagonal eigensolver returned non-finite nodes")
    order = np.argsort(vals)
    nodes = vals[order]
    weights = vecs[0, order] ** 2
    return nodes, weights


def gauss_rule(alpha: float, beta: float, K: int) -> QuadratureRule:
    """The K-node Gauss rule: exact for polynomials of degree <= 2K - 1."""
    K = int(K)
    if K < 1:
        raise ValueError("K must be >= 1")
    a, b = recurrence_coefficients(alpha, beta, K)
    nodes, weights = _eigen_nodes_weights(a[:K], b[1:K])
    if np.any(nodes <= 0.0) or np.any(nodes >= 1.0):
        raise QuadratureError("Gauss nodes escaped the open interval (0, 1)")
    return QuadratureRule(alpha, beta, GAUSS, nodes, weights)


def _monic_value(a: np.ndarray, b: np.ndarray, k: int, t: float) -> float:
    """Evaluate the monic orthogonal polynomial p_k at t via the recurrence."""
    pm1, p = 0.0, 1.0
    for i in range(k):
        pm1, p = p, (t - a[i]) * p - (b[i] if i >= 1 else 0.0) * pm1
    return p


def radau_zero_rule(alpha: float, beta: float, K: int) -> QuadratureRule:
    """K free nodes plus one node fixed at exactly 0; exact to degree 2K.

    The last diagonal entry of the (K+1)-point Jacobi matrix is replaced by
    ``0 - b_K * p_{K-1}(0) / p_K(0)`` so that 0 becomes an eigenvalue.
    """
    K = int(K)
    if K < 1:
        raise ValueError("K must be >= 1")
    a, b = recurrence_coefficients(alpha, beta, K + 1)
    pK = _monic_value(a, b, K, 0.0)
    pKm1 = _monic_value(a, b, K - 1, 0.0)
    if pK == 0.0:  # pragma: no cover - 0 is outside the support interior
        raise QuadratureError("degenerate fixed-node modification: p_K(0) = 0")
    diag = a[: K + 1].copy()
    diag[K] = 0.0 - b[K] * pKm1 / pK
    nodes, weights = _eigen_nodes_weights(diag, b[1 : K + 1])
    # In exact arithmetic the smallest eigenvalue is 0; snap it.
    if abs(nodes[0]) > 1e-10:
        raise QuadratureError(
            f"fixed node drifted from 0: got {nodes[0]:.3e}"
        )
    nodes = nodes.copy()
    nodes[0] = 0.0
    if np.any(nodes[1:] <= 0.0) or np.any(nodes >= 1.0):
        raise QuadratureError("free nodes escaped the interval [0, 1)")
    if np.any(weights <= 0.0):
        raise QuadratureError("nonpositive weight encountered")
    return QuadratureRule(alpha, beta, RADAU_ZERO, nodes, weights)


def chi_moment(alpha: float, beta: float, j: int) -> float:
    """The j-th moment of the normalized weight: B(alpha+1+j, beta+1) /
    B(alpha+1, beta+1), evaluated in log-gamma space for stability."""
    _validate_exponents(alpha, beta)
    j = int(j)
    if j < 0:
        raise ValueError("j must be >= 0")
    if j == 0:
        return 1.0
    return math.exp(
        math.lgamma(alpha + 1.0 + j)
        + math.lgamma(alpha + beta + 2.0)
        - math.lgamma(alpha + 1.0)
        - math.lgamma(alpha + beta + 2.0 + j)
    )
