"""Arithmetic over the three classical real division algebras.

Scalars are stored as fixed-size real coordinate tuples (length ``delta``):
real part first, then the imaginary units (for the quaternions the order is
1, i, j, k).  Vectors over a field are arrays of shape ``(m, delta)``; node
sets are arrays of shape ``(n, m, delta)``.  The vector space is a *right*
module: projective equivalence is ``x ~ x * alpha`` with ``|alpha| = 1``
acting entrywise on the right.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FieldTag",
    "FIELD_R",
    "FIELD_C",
    "FIELD_H",
    "FIELDS",
    "parse_field",
    "scalar_conj",
    "scalar_mul",
    "scalar_abs",
    "inner",
    "re_inner",
    "abs_inner",
    "abs_inner_pow",
    "norm",
    "flatten",
    "unflatten",
    "canonicalize",
    "canonicalize_all",
    "abs_inner_matrix",
    "basis_vector",
]


@dataclass(frozen=True)
class FieldTag:
    """One of the three fields, with its real dimension."""

    name: str
    delta: int

    def __str__(self) -> str:
        return self.name


FIELD_R = FieldTag("R", 1)
FIELD_C = FieldTag("C", 2)
FIELD_H = FieldTag("H", 4)

FIELDS = {"R": FIELD_R, "C": FIELD_C, "H": FIELD_H}


def parse_field(name) -> FieldTag:
    """Return the FieldTag for ``name`` ("R", "C" or "H", case-insensitive)."""
    if isinstance(name, FieldTag):
        return name
    key = str(name).strip().upper()
    if key not in FIELDS:
        raise ValueError(f"unknown field {name!r}; expected one of R, C, H")
    return FIELDS[key]


def _check_same_field(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(
            f"field mismatch: scalar widths {a.shape[-1]} and {b.shape[-1]}"
        )


def scalar_conj(a: np.ndarray) -> np.ndarray:
    """Conjugate: negate every non-real coordinate.  Broadcasts over leading axes."""
    a = np.asarray(a, dtype=float)
    out = -a.copy()
    out[..., 0] = a[..., 0]
    return out


def scalar_mul(field: FieldTag, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product ``a * b`` of scalars given as ``(..., delta)`` coordinate arrays.

    Uses the Hamilton product for the quaternions; broadcasts over leading axes.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_same_field(a, b)
    if a.shape[-1] != field.delta:
        raise ValueError(f"scalar width {a.shape[-1]} does not match field {field}")
    if field.delta == 1:
        return a * b
    if field.delta == 2:
        ar, ai = a[..., 0], a[..., 1]
        br, bi = b[..., 0], b[..., 1]
        return np.stack([ar * br - ai * bi, ar * bi + ai * br], axis=-1)
    w, x, y, z = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    e, f, g, h = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            w * e - x * f - y * g - z * h,
            w * f + x * e + y * h - z * g,
            w * g - x * h + y * e + z * f,
            w * h + x * g - y * f + z * e,
        ],
        axis=-1,
    )


def scalar_abs(a: np.ndarray) -> np.ndarray:
    """Modulus |a|; broadcasts over leading axes."""
    a = np.asarray(a, dtype=float)
    return np.sqrt(np.sum(a * a, axis=-1))


def _conj_product(field: FieldTag, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``conj(a) * b`` componentwise, broadcasting over leading axes."""
    if field.delta == 1:
        return a * b
    if field.delta == 2:
        ar, ai = a[..., 0], a[..., 1]
        br, bi = b[..., 0], b[..., 1]
        return np.stack([ar * br + ai * bi, ar * bi - ai * br], axis=-1)
    w, x, y, z = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    e, f, g, h = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            w * e + x * f + y * g + z * h,
            w * f - x * e - y * h + z * g,
            w * g + x * h - y * e - z * f,
            w * h - x * g + y * f - z * e,
        ],
        axis=-1,
    )


def inner(field: FieldTag, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Inner product ``sum_i conj(x_i) y_i`` of vectors shaped ``(..., m, delta)``.

    Returns a scalar coordinate array of shape ``(..., delta)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-2:] != y.shape[-2:]:
        raise ValueError(f"dimension mismatch: {x.shape[-2:]} vs {y.shape[-2:]}")
    if x.shape[-1] != field.delta:
        raise ValueError(f"scalar width {x.shape[-1]} does not match field {field}")
    return _conj_product(field, x, y).sum(axis=-2)


def re_inner(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Real part of ``conj(a) * b``: the Euclidean dot of the coordinate tuples."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_same_field(a, b)
    return np.sum(a * b, axis=-1)


def abs_inner(field: FieldTag, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``|<x, y>|`` for vectors shaped ``(..., m, delta)``."""
    return scalar_abs(inner(field, x, y))


def abs_inner_pow(field: FieldTag, x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    """``|<x, y>|**p`` for even ``p >= 2``."""
    p = int(p)
    if p < 2 or p % 2 != 0:
        raise ValueError(f"index p must be even and >= 2, got {p}")
    g = inner(field, x, y)
    sq = np.sum(g * g, axis=-1)
    return sq ** (p // 2)


def norm(x: np.ndarray) -> np.ndarray:
    """Euclidean norm of vectors shaped ``(..., m, delta)`` (flattening isometry)."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.sum(x * x, axis=(-2, -1)))


def flatten(x: np.ndarray) -> np.ndarray:
    """View ``(..., m, delta)`` coordinates as real vectors ``(..., m*delta)``."""
    x = np.asarray(x, dtype=float)
    return x.reshape(x.shape[:-2] + (x.shape[-2] * x.shape[-1],))


def unflatten(v: np.ndarray, field: FieldTag) -> np.ndarray:
    """Inverse of :func:`flatten`: group consecutive ``delta``-blocks into scalars."""
    v = np.asarray(v, dtype=float)
    d = field.delta
    if v.shape[-1] % d != 0:
        raise ValueError(
            f"real dimension {v.shape[-1]} is not divisible by delta={d}"
        )
    return v.reshape(v.shape[:-1] + (v.shape[-1] // d, d))


_PIVOT_TOL = 1e-12


def canonicalize(field: FieldTag, x: np.ndarray) -> np.ndarray:
    """Projective representative: right-multiply by a unit scalar so that the
    first entry of modulus > 1e-12 becomes real and positive.  Deterministic."""
    x = np.asarray(x, dtype=float)
    mods = scalar_abs(x)
    nz = np.flatnonzero(mods > _PIVOT_TOL)
    if nz.size == 0:
        raise ValueError("cannot canonicalize the zero vector")
    pivot = x[nz[0]]
    if field.delta == 1:
        return x * (1.0 if pivot[0] >= 0.0 else -1.0)
    alpha = scalar_conj(pivot) / mods[nz[0]]
    out = scalar_mul(field, x, np.broadcast_to(alpha, x.shape))
    # The rounded components of alpha leave ~1e-17 imaginary residue on the
    # pivot itself; its exact value is its modulus, so write that directly.
    out[nz[0], :] = 0.0
    out[nz[0], 0] = mods[nz[0]]
    return out


def canonicalize_all(field: FieldTag, nodes: np.ndarray) -> np.ndarray:
    """Vectorized :func:`canonicalize` over a node set ``(n, m, delta)``."""
    nodes = np.ascontiguousarray(nodes, dtype=float)
    n, m, d = nodes.shape
    mods = scalar_abs(nodes)  # (n, m)
    ok = mods > _PIVOT_TOL
    if not ok.any(axis=1).all():
        raise ValueError("cannot canonicalize a zero vector in the node set")
    first = np.argmax(ok, axis=1)  # (n,)
    rows = np.arange(n)
    pivot = nodes[rows, first]  # (n, d)
    if d == 1:
        return nodes * np.where(pivot[:, 0] >= 0.0, 1.0, -1.0)[:, None, None]
    pmod = mods[rows, first]
    alpha = scalar_conj(pivot) / pmod[:, None]
    out = scalar_mul(field, nodes, alpha[:, None, :])
    # As in canonicalize: the pivot's exact canonical value is its modulus.
    out[rows, first] = 0.0
    out[rows, first, 0] = pmod
    return out


def abs_inner_matrix(field: FieldTag, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """``|<x_i, y_j>|`` for node sets ``(n, m, delta)`` and ``(k, m, delta)``.

    Plain numpy reference path; quadratic memory, intended for small sets.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    g = _conj_product(field, xs[:, None, :, :], ys[None, :, :, :]).sum(axis=-2)
    return np.sqrt(np.sum(g * g, axis=-1))


def basis_vector(field: FieldTag, m: int, i: int) -> np.ndarray:
    """The standard basis vector e_i (0-based) as an ``(m, delta)`` array."""
    e = np.zeros((m, field.delta))
    e[i, 0] = 1.0
    return e
