"""Construction of projective cubature formulas.

Base cases (singleton, orthonormal basis, regular half-polygon), the
recursive dimension lift ``S(m-1, K) -> S(m, K)``, the field-descent product
that turns a complex or quaternionic formula into a real one, and the
regrouping map in the opposite direction.

The lift combines three ingredients:

* a source formula of index ``p`` on the sphere over ``K^(m-1)``,
* a podal rule of index ``2*floor(p/4)`` on the unit sphere of ``K`` itself
  (viewed as the real sphere of dimension ``delta``), and
* a radial quadrature on [0, 1] for the weight ``t**a * (1-t)**b`` with
  ``a = delta*(m-1)/2 - 1`` and ``b = delta/2 - 1`` (these exponents make the
  radial measure match the area element of the sphere split; see the radial
  factor derivation in the verification tests).

For ``p ≡ 2 (mod 4)`` the radial rule is Gauss with ``K = (p+2)/4`` nodes;
for ``p ≡ 0 (mod 4)`` it is the fixed-node rule with ``K = p/4`` free nodes
plus the node 0, which contributes an extra "apex" family ``theta_j ⊕ 0``.

Note: for the complex and quaternionic fields with ``p ≡ 0 (mod 4)`` the
``nu`` apex nodes all reduce to the same projective point (their mutual
inner products have modulus exactly 1).  The constructor keeps them as
separate weighted nodes so that node counts follow the recursion's
bookkeeping exactly; the verification module reports the coincidence via
``min_projective_gap = 0`` and such formulas fail the strict pairwise
distinctness clause of ``check``.  Counts, weights and the integral
identity itself remain exact.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import fields as F
from .fields import FIELD_C, FIELD_R, FieldTag, parse_field
from .jacobi import QuadratureRule, gauss_rule, radau_zero_rule

__all__ = [
    "CubatureFormula",
    "ConstructionError",
    "NodeBudgetError",
    "default_node_cap",
    "base_singleton",
    "base_orthonormal",
    "base_polygon",
    "unit_sphere_rule",
    "nu_constructive",
    "lift",
    "construct",
    "field_descent",
    "project_to_K",
    "MERGE_GAP_TOL",
]

NODE_CAP_ENV = "PROJCUB_NODE_CAP"
DEFAULT_NODE_CAP = 10_000_000

# Two nodes closer (projectively) than this are considered coincident when
# merging in project_to_K; the verifier uses the same threshold for the
# pairwise-distinctness clause.
MERGE_GAP_TOL = 1e-9


class ConstructionError(RuntimeError):
    """A construction step failed (quadrature failure, bad self-test)."""


class NodeBudgetError(ConstructionError):
    """Predicted node count exceeds the configured cap."""


def default_node_cap() -> int:
    """Node cap: the PROJCUB_NODE_CAP environment variable, else 10**7."""
    raw = os.environ.get(NODE_CAP_ENV)
    if raw is None:
        return DEFAULT_NODE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{NODE_CAP_ENV} must be an integer, got {raw!r}")
    if cap < 1:
        raise ValueError(f"{NODE_CAP_ENV} must be >= 1, got {cap}")
    return cap


@dataclass(frozen=True)
class CubatureFormula:
    """A weighted node set on the unit sphere of ``field^m``.

    ``nodes`` has shape ``(n, m, delta)``; ``weights`` has shape ``(n,)``.
    Formulas produced by this module have canonicalized unit nodes and
    positive weights summing to 1.
    """

    field: FieldTag
    m: int
    index: int
    nodes: np.ndarray
    weights: np.ndarray
    metadata: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        weights = np.ascontiguousarray(self.weights, dtype=float)
        if nodes.ndim != 3 or nodes.shape[1] != self.m or nodes.shape[2] != self.field.delta:
            raise ValueError(
                f"nodes must have shape (n, {self.m}, {self.field.delta}), "
                f"got {nodes.shape}"
            )
        if weights.ndim != 1 or weights.shape[0] != nodes.shape[0]:
            raise ValueError("weights must be one per node")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        """Node count."""
        return self.weights.shape[0]

    def flat_nodes(self) -> np.ndarray:
        """Nodes as real vectors of length ``m * delta``."""
        return F.flatten(self.nodes)


def _finalize(
    field: FieldTag,
    m: int,
    index: int,
    nodes: np.ndarray,
    weights: np.ndarray,
    metadata: dict,
) -> CubatureFormula:
    """Normalize nodes to unit length, canonicalize, normalize the weight sum."""
    nodes = np.ascontiguousarray(nodes, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    if np.any(weights <= 0.0):
        raise ConstructionError("nonpositive weight in assembled formula")
    norms = F.norm(nodes)
    nodes = nodes / norms[:, None, None]
    nodes = F.canonicalize_all(field, nodes)
    weights = weights / math.fsum(weights.tolist())
    return CubatureFormula(field, m, index, nodes, weights, metadata)


# ---------------------------------------------------------------------------
# Base cases
# ---------------------------------------------------------------------------

def base_singleton(field, p: int) -> CubatureFormula:
    """The one-point formula on the projective point ``m = 1``: node (1)."""
    field = parse_field(field)
    p = _check_index(p)
    nodes = np.zeros((1, 1, field.delta))
    nodes[0, 0, 0] = 1.0
    return CubatureFormula(
        field, 1, p, nodes, np.array([1.0]), {"rule": "singleton"}
    )


def base_orthonormal(field, m: int) -> CubatureFormula:
    """Basis nodes e_1..e_m with weights 1/m; index 2."""
    field = parse_field(field)
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    nodes = np.zeros((m, m, field.delta))
    for i in range(m):
        nodes[i, i, 0] = 1.0
    weights = np.full(m, 1.0 / m)
    return CubatureFormula(field, m, 2, nodes, weights, {"rule": "orthonormal"})


def base_polygon(s: int) -> CubatureFormula:
    """The half-polygon on the circle: s+1 nodes at angles k*pi/(s+1),
    equal weights; a podal real formula of index 2s on the plane."""
    s = int(s)
    if s < 1:
        raise ValueError("s must be >= 1")
    k = np.arange(s + 1)
    ang = k * math.pi / (s + 1)
    nodes = np.stack([np.cos(ang), np.sin(ang)], axis=1)[:, :, None]
    weights = np.full(s + 1, 1.0 / (s + 1))
    return _finalize(
        FIELD_R, 2, 2 * s, nodes, weights, {"rule": "polygon", "s": s}
    )


def _check_index(p) -> int:
    p = int(p)
    if p < 2 or p % 2 != 0:
        raise ValueError(f"index p must be even and >= 2, got {p}")
    return p


# ---------------------------------------------------------------------------
# The unit-sphere rule on S(1, K) and the constructive nu
# ---------------------------------------------------------------------------

def unit_sphere_rule(field, p: int, cap: int | None = None) -> CubatureFormula:
    """A podal real cubature of index ``2*floor(p/4)`` on the unit sphere of
    the field itself (dimension ``delta``), used as the angular factor of the
    lift.  Real field: a single node.  Complex: the half-polygon.
    Quaternions: the smaller of the recursively constructed real formula on
    the 3-sphere and the descent of the complex plane formula."""
    field = parse_field(field)
    p = _check_index(p)
    if p < 4:
        raise ValueError("unit_sphere_rule requires p >= 4")
    q = 2 * (p // 4)
    if field.name == "R":
        return base_singleton(FIELD_R, max(q, 2))
    if field.name == "C":
        return base_polygon(p // 4)
    cand_a = construct(FIELD_R, 4, q, cap=cap)
    cand_b = field_descent(construct(FIELD_C, 2, q, cap=cap))
    return cand_a if cand_a.n <= cand_b.n else cand_b


def nu_constructive(field, p: int) -> int:
    """Node count of :func:`unit_sphere_rule` (the constructive surrogate for
    the minimal angular count)."""
    return unit_sphere_rule(field, p).n


# ---------------------------------------------------------------------------
# The lift
# ---------------------------------------------------------------------------

def _radial_rule(field: FieldTag, m_target: int, p: int) -> QuadratureRule:
    alpha = field.delta * (m_target - 1) / 2.0 - 1.0
    beta = field.delta / 2.0 - 1.0
    if p % 4 == 2:
        return gauss_rule(alpha, beta, (p + 2) // 4)
    return radau_zero_rule(alpha, beta, p // 4)


def lift(
    source: CubatureFormula,
    sphere: CubatureFormula | None = None,
    radial: QuadratureRule | None = None,
    validate: bool = True,
) -> CubatureFormula:
    """One dimension step: from a formula on the sphere over ``K^m`` to one
    of the same index on the sphere over ``K^(m+1)``.

    Node count: ``nu * (p/2 + 1) * n`` for ``p ≡ 2 (mod 4)`` and
    ``nu * ((p/2) * n + 1)`` for ``p ≡ 0 (mod 4)``, where ``nu`` is the node
    count of the angular rule.  Output ordering is deterministic: the apex
    family first (in angular order), then the sign families ordered by
    angular node, then source node, then radial node, with + before -.
    """
    field = source.field
    p = _check_index(source.index)
    if p < 4:
        raise ValueError("lift requires source index p >= 4")
    m_target = source.m + 1
    if sphere is None:
        sphere = unit_sphere_rule(field, p)
    if radial is None:
        radial = _radial_rule(field, m_target, p)

    d = field.delta
    thetas = F.flatten(sphere.nodes)  # (nu, d) unit scalars of the field
    if thetas.shape[1] != d:
        raise ValueError(
            f"angular rule lives on a sphere of dimension {thetas.shape[1]}, "
            f"expected delta={d}"
        )
    mu = sphere.weights
    nu = thetas.shape[0]
    n = source.n

    has_apex = p % 4 == 0
    if has_apex:
        if radial.flavor != "radau0" or radial.nodes[0] != 0.0:
            raise ConstructionError("p ≡ 0 (mod 4) requires the fixed-node radial rule")
        tau_int = radial.nodes[1:]
        omega_int = radial.weights[1:]
        omega0 = radial.weights[0]
    else:
        if radial.flavor != "gauss":
            raise ConstructionError("p ≡ 2 (mod 4) requires the Gauss radial rule")
        tau_int = radial.nodes
        omega_int = radial.weights
        omega0 = 0.0
    K = tau_int.shape[0]

    c_first = np.sqrt(1.0 - tau_int)  # (K,)
    c_rest = np.sqrt(tau_int)  # (K,)

    # Sign families: shape (nu, n, K, 2, m_target, d).
    sign = np.empty((nu, n, K, 2, m_target, d))
    sgn = np.array([1.0, -1.0])
    # first coordinate: sigma * sqrt(1 - tau_k) * theta_j
    sign[..., 0, :] = (
        thetas[:, None, None, None, :]
        * c_first[None, None, :, None, None]
        * sgn[None, None, None, :, None]
    )
    # remaining coordinates: sqrt(tau_k) * source node
    sign[..., 1:, :] = (
        source.nodes[None, :, None, None, :, :]
        * c_rest[None, None, :, None, None, None]
    )
    sign_nodes = sign.reshape(nu * n * K * 2, m_target, d)
    sign_weights = (
        0.5
        * source.weights[None, :, None, None]
        * mu[:, None, None, None]
        * omega_int[None, None, :, None]
    ) * np.ones((1, 1, 1, 2))
    sign_weights = sign_weights.reshape(nu * n * K * 2)

    if has_apex:
        apex_nodes = np.zeros((nu, m_target, d))
        apex_nodes[:, 0, :] = thetas
        apex_weights = mu * omega0
        nodes = np.concatenate([apex_nodes, sign_nodes], axis=0)
        weights = np.concatenate([apex_weights, sign_weights], axis=0)
    else:
        nodes, weights = sign_nodes, sign_weights

    expected = nu * ((p // 2) * n + 1) if has_apex else nu * (p // 2 + 1) * n
    if nodes.shape[0] != expected:  # pragma: no cover - structural assertion
        raise ConstructionError(
            f"lift produced {nodes.shape[0]} nodes, expected {expected}"
        )

    out = _finalize(
        field,
        m_target,
        p,
        nodes,
        weights,
        {
            "rule": "lift",
            "index": p,
            "source_n": n,
            "nu": nu,
            "radial_flavor": radial.flavor,
            "radial_K": K,
            "apex": bool(has_apex),
        },
    )
    if validate:
        _self_test(out)
    return out


def _self_test(formula: CubatureFormula, n_random: int = 64) -> None:
    """Cheap integral-identity self-test; raises on numerical failure.

    Checks the residual, weight-sum and node-norm clauses only (the pairwise
    distinctness clause is a property of the output reported by the full
    verifier, not a numerical failure of the construction).
    """
    from .verify import default_tol, max_residual_over, standard_directions

    dirs = standard_directions(formula.field, formula.m, n_random=n_random, seed=0)
    tol = max(1e-7, 10.0 * default_tol(formula.n))
    # use_numba=False: keep construction free of JIT-compile latency; the
    # compiled kernels are reserved for the full verifier on large inputs.
    res = max_residual_over(formula, dirs, use_numba=False)
    if not (res <= tol):
        raise ConstructionError(
            f"constructed formula failed its integral self-test: "
            f"max relative residual {res:.3e} > {tol:.1e} "
            f"(field {formula.field}, m={formula.m}, p={formula.index}, n={formula.n})"
        )


# ---------------------------------------------------------------------------
# construct: iterate the lift from the singleton
# ---------------------------------------------------------------------------

def _step_count(p: int, nu: int, n: int) -> int:
    if p % 4 == 0:
        return nu * ((p // 2) * n + 1)
    return nu * (p // 2 + 1) * n


def construct(
    field,
    m: int,
    p: int,
    cap: int | None = None,
    validate: bool = True,
) -> CubatureFormula:
    """Build a formula on the sphere over ``field^m`` of even index ``p`` by
    iterating the lift from the one-point base case.

    ``p = 2`` returns the orthonormal-basis formula.  Raises
    :class:`NodeBudgetError` before assembling anything if the predicted node
    count exceeds ``cap`` (default: PROJCUB_NODE_CAP or 10**7)."""
    field = parse_field(field)
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    p = _check_index(p)
    if cap is None:
        cap = default_node_cap()

    if p == 2:
        if m > cap:
            raise NodeBudgetError(f"predicted node count {m} exceeds cap {cap}")
        return base_orthonormal(field, m)
    if m == 1:
        return base_singleton(field, p)

    sphere = unit_sphere_rule(field, p, cap=cap)
    nu = sphere.n

    # Predict the final count before doing any work.
    counts = [1]
    for _ in range(m - 1):
        counts.append(_step_count(p, nu, counts[-1]))
        if counts[-1] > cap:
            raise NodeBudgetError(
                f"predicted node count {counts[-1]} exceeds cap {cap} "
                f"(field {field}, m={m}, p={p})"
            )

    out = base_singleton(field, p)
    for target in range(2, m + 1):
        out = lift(
            out,
            sphere=sphere,
            radial=_radial_rule(field, target, p),
            validate=validate,
        )
    if out.n != counts[-1]:  # pragma: no cover - structural assertion
        raise ConstructionError(
            f"recursion produced {out.n} nodes, predicted {counts[-1]}"
        )
    return out


# ---------------------------------------------------------------------------
# Field descent and regrouping
# ---------------------------------------------------------------------------

def field_descent(
    source: CubatureFormula,
    circle: CubatureFormula | None = None,
    validate: bool = True,
) -> CubatureFormula:
    """Turn a complex or quaternionic formula into a real one on the sphere
    of dimension ``delta * m`` by multiplying every node by every node of a
    full-index podal rule on the unit scalars, with product weights.

    If the source has projectively coincident nodes (the apex block of a
    ``p = 0 (mod 4)`` lift), each coincident group produces identical circle
    orbits and the real output inherits the coincidences; sources with
    pairwise-distinct nodes yield podal real outputs."""
    field = source.field
    if field.name == "R":
        raise ValueError("field_descent expects a complex or quaternionic source")
    p = _check_index(source.index)
    if circle is None:
        if field.name == "C":
            circle = base_polygon(p // 2)
        else:
            cand_a = construct(FIELD_R, 4, p)
            cand_b = field_descent(construct(FIELD_C, 2, p))
            circle = cand_a if cand_a.n <= cand_b.n else cand_b
    thetas = F.flatten(circle.nodes)  # (k, d)
    if thetas.shape[1] != field.delta:
        raise ValueError("circle rule dimension does not match the field")
    if circle.index < p:
        raise ValueError(
            f"circle rule must have full index {p}, got {circle.index}"
        )
    d = field.delta
    n = source.n
    k = thetas.shape[0]
    # products u_i * theta_j, source-node major, shape (n, k, m, d)
    prod = F.scalar_mul(
        field,
        source.nodes[:, None, :, :],
        np.broadcast_to(thetas[None, :, None, :], (n, k, source.m, d)),
    )
    nodes = prod.reshape(n * k, source.m * d, 1)
    weights = (source.weights[:, None] * circle.weights[None, :]).reshape(n * k)
    out = _finalize(
        FIELD_R,
        source.m * d,
        p,
        nodes,
        weights,
        {
            "rule": "field_descent",
            "source_field": field.name,
            "source_n": n,
            "circle_n": k,
            "index": p,
        },
    )
    if validate:
        _self_test(out)
    return out


def project_to_K(source: CubatureFormula, field, validate: bool = True) -> CubatureFormula:
    """Regroup a real formula on the sphere of dimension ``delta * m`` as a
    formula over the target field: consecutive coordinate blocks become
    scalar entries, nodes are canonicalized, and projectively coincident
    nodes are merged with summed weights."""
    field = parse_field(field)
    if source.field.name != "R":
        raise ValueError("project_to_K expects a real source formula")
    d = field.delta
    if source.m % d != 0:
        raise ValueError(
            f"real dimension {source.m} is not divisible by delta={d}"
        )
    m_target = source.m // d
    nodes = source.nodes.reshape(source.n, m_target, d)
    nodes = F.canonicalize_all(field, nodes)
    weights = source.weights

    # Merge projectively coincident nodes (|<x_i, x_j>| >= 1 - MERGE_GAP_TOL),
    # keeping first occurrences.
    n = nodes.shape[0]
    parent = np.arange(n)

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    block = 1024
    for i0 in range(0, n, block):
        xs = nodes[i0 : i0 + block]
        for j0 in range(i0, n, block):
            g = F.abs_inner_matrix(field, xs, nodes[j0 : j0 + block])
            close = np.argwhere(g >= 1.0 - MERGE_GAP_TOL)
            for a, b in close:
                i, j = i0 + int(a), j0 + int(b)
                if i < j:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)

    roots = np.array([find(i) for i in range(n)])
    keep = np.unique(roots)
    merged_w = np.zeros(keep.shape[0])
    root_pos = {int(r): idx for idx, r in enumerate(keep)}
    for i in range(n):
        merged_w[root_pos[int(roots[i])]] += weights[i]
    out = _finalize(
        field,
        m_target,
        source.index,
        nodes[keep],
        merged_w,
        {
            "rule": "project_to_K",
            "source_n": n,
            "merged_n": int(keep.shape[0]),
            "index": source.index,
        },
    )
    if validate:
        _self_test(out)
    return out
