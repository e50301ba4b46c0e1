"""Fast evaluation kernels for the cubature sums.

The hot loop of verification evaluates ``sum_k w_k * |<x_k, y>|**p`` for
many directions ``y``.  For speed the inner products are computed on
component planes: a node set ``(n, m, delta)`` is stored as ``delta``
C-contiguous arrays of shape ``(m, n)`` (one per real coordinate of the
scalar), and the power ``p = 2e`` is applied to ``|<x,y>|**2`` by a
square-and-multiply chain.

Kernels are generated as source text per ``(delta, m, e)`` with the entry
loop fully unrolled (``m`` and the chain are compile-time constants) and
jitted with numba when it is available.  A plain numpy fallback with the
same blocked API is always provided.
"""

from __future__ import annotations

import functools

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

__all__ = [
    "HAVE_NUMBA",
    "node_planes",
    "dir_planes",
    "eval_sums",
    "max_sq_abs_inner",
]

_FASTMATH = {"reassoc", "contract"}


def _pow_chain(e: int) -> list[str]:
    """Statements turning ``v`` (=|g|^2) into ``acc`` = v**e."""
    bits = bin(int(e))[2:]
    out = ["acc = v"]
    for b in bits[1:]:
        out.append("acc = acc * acc")
        if b == "1":
            out.append("acc = acc * v")
    return out


def _gen_eval_source(delta: int, m: int, e: int) -> str:
    chain = "; ".join(_pow_chain(e))
    if delta == 1:
        args = "x0"
        snap = "; ".join(f"z{a} = y0[t, {a}]" for a in range(m))
        g = " + ".join(f"x0[{a}, k] * z{a}" for a in range(m))
        body = f"g = {g}\n            v = g * g"
    elif delta == 2:
        args = "x0, x1"
        snap = "; ".join(f"y{a}r = y0[t, {a}]; y{a}i = y1[t, {a}]" for a in range(m))
        gr = " + ".join(f"x0[{a}, k] * y{a}r + x1[{a}, k] * y{a}i" for a in range(m))
        gi = " + ".join(f"x0[{a}, k] * y{a}i - x1[{a}, k] * y{a}r" for a in range(m))
        body = f"gr = {gr}\n            gi = {gi}\n            v = gr * gr + gi * gi"
    else:
        args = "x0, x1, x2, x3"
        snap = "; ".join(
            f"y{a}a = y0[t, {a}]; y{a}b = y1[t, {a}]; "
            f"y{a}c = y2[t, {a}]; y{a}d = y3[t, {a}]"
            for a in range(m)
        )
        c0 = " + ".join(
            f"x0[{a}, k] * y{a}a + x1[{a}, k] * y{a}b + "
            f"x2[{a}, k] * y{a}c + x3[{a}, k] * y{a}d"
            for a in range(m)
        )
        c1 = " + ".join(
            f"x0[{a}, k] * y{a}b - x1[{a}, k] * y{a}a - "
            f"x2[{a}, k] * y{a}d + x3[{a}, k] * y{a}c"
            for a in range(m)
        )
        c2 = " + ".join(
            f"x0[{a}, k] * y{a}c + x1[{a}, k] * y{a}d - "
            f"x2[{a}, k] * y{a}a - x3[{a}, k] * y{a}b"
            for a in range(m)
        )
        c3 = " + ".join(
            f"x0[{a}, k] * y{a}d - x1[{a}, k] * y{a}c + "
            f"x2[{a}, k] * y{a}b - x3[{a}, k] * y{a}a"
            for a in range(m)
        )
        body = (
            f"c0 = {c0}\n            c1 = {c1}\n            c2 = {c2}\n"
            f"            c3 = {c3}\n"
            "            v = c0 * c0 + c1 * c1 + c2 * c2 + c3 * c3"
        )
    ydecl = args.replace("x", "y")
    return f"""
def kern({args}, w, {ydecl}, k0, k1, out):
    for t in range(y0.shape[0]):
        {snap}
        s = 0.0
        for k in range(k0, k1):
            {body}
            {chain}
            s += w[k] * acc
        out[t] = s
"""


@functools.lru_cache(maxsize=None)
def _eval_kernel(delta: int, m: int, e: int):
    """Compiled kernel for (delta, m, e), or None when numba is unavailable."""
    if not HAVE_NUMBA:
        return None
    src = _gen_eval_source(delta, m, e)
    ns: dict = {}
    exec(src, ns)  # noqa: S102 - source generated above from integers only
    return numba.njit(cache=False, fastmath=_FASTMATH)(ns["kern"])


def node_planes(nodes: np.ndarray) -> tuple[np.ndarray, ...]:
    """Split ``(n, m, delta)`` nodes into ``delta`` C-contiguous ``(m, n)`` planes."""
    return tuple(
        np.ascontiguousarray(nodes[:, :, c].T) for c in range(nodes.shape[2])
    )


def dir_planes(dirs: np.ndarray) -> tuple[np.ndarray, ...]:
    """Split ``(B, m, delta)`` directions into ``delta`` ``(B, m)`` planes."""
    return tuple(
        np.ascontiguousarray(dirs[:, :, c]) for c in range(dirs.shape[2])
    )


def _pow_inplace(v: np.ndarray, e: int) -> np.ndarray:
    """In-place square-and-multiply ``v**e`` (v is consumed)."""
    bits = bin(int(e))[2:]
    if len(bits) == 1:
        return v
    base = v.copy() if "1" in bits[1:] else None
    acc = v
    for b in bits[1:]:
        np.multiply(acc, acc, out=acc)
        if b == "1":
            np.multiply(acc, base, out=acc)
    return acc


def _eval_numpy_chunk(xp, w, yp, k0, k1, e, out):
    """Numpy fallback with the same contract as the generated kernels."""
    xs = [x[:, k0:k1] for x in xp]
    delta = len(xp)
    if delta == 1:
        g = yp[0] @ xs[0]
        v = g * g
    elif delta == 2:
        gr = yp[0] @ xs[0] + yp[1] @ xs[1]
        gi = yp[1] @ xs[0] - yp[0] @ xs[1]
        v = gr * gr
        v += gi * gi
    else:
        c0 = yp[0] @ xs[0] + yp[1] @ xs[1] + yp[2] @ xs[2] + yp[3] @ xs[3]
        c1 = yp[1] @ xs[0] - yp[0] @ xs[1] - yp[3] @ xs[2] + yp[2] @ xs[3]
        c2 = yp[2] @ xs[0] + yp[3] @ xs[1] - yp[0] @ xs[2] - yp[1] @ xs[3]
        c3 = yp[3] @ xs[0] - yp[2] @ xs[1] + yp[1] @ xs[2] - yp[0] @ xs[3]
        v = c0 * c0
        v += c1 * c1
        v += c2 * c2
        v += c3 * c3
    v = _pow_inplace(v, e)
    out[:] = v @ w[k0:k1]


def eval_sums(
    nodes: np.ndarray,
    weights: np.ndarray,
    dirs: np.ndarray,
    p: int,
    node_chunk: int = 262_144,
    dir_block: int = 1024,
    use_numba: bool | None = None,
) -> np.ndarray:
    """``S(y) = sum_k w_k |<x_k, y>|**p`` for every direction, compensated.

    Nodes are processed in chunks; the per-chunk partial sums (all positive)
    are combined across chunks with Kahan accumulation.
    """
    n, m, delta = nodes.shape
    e = p // 2
    xp = node_planes(nodes)
    w = np.ascontiguousarray(weights)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    kern = _eval_kernel(delta, m, e) if use_numba else None

    B = dirs.shape[0]
    result = np.empty(B)
    partial = np.empty(dir_block)
    for b0 in range(0, B, dir_block):
        b1 = min(b0 + dir_block, B)
        yp = dir_planes(dirs[b0:b1])
        nb = b1 - b0
        acc = np.zeros(nb)
        comp = np.zeros(nb)
        for k0 in range(0, n, node_chunk):
            k1 = min(k0 + node_chunk, n)
            part = partial[:nb]
            if kern is not None:
                kern(*xp, w, *yp, k0, k1, part)
            else:
                _eval_numpy_chunk(xp, w, yp, k0, k1, e, part)
            # Kahan step
            ytmp = part - comp
            t = acc + ytmp
            comp = (t - acc) - ytmp
            acc = t
        result[b0:b1] = acc
    return result


def max_sq_abs_inner(nodes: np.ndarray, row_block: int = 512) -> float:
    """Maximum of ``|<x_i, x_j>|**2`` over pairs ``i < j`` (blocked, exact)."""
    n, m, delta = nodes.shape
    if n < 2:
        return 0.0
    planes = [np.ascontiguousarray(nodes[:, :, c]) for c in range(delta)]
    best = 0.0
    for i0 in range(0, n, row_block):
        i1 = min(i0 + row_block, n)
        rows = [pl[i0:i1] for pl in planes]
        if delta == 1:
            g = rows[0] @ planes[0][i0:].T
            v = g * g
        elif delta == 2:
            ar, ai = rows
            br, bi = planes[0][i0:], planes[1][i0:]
            gr = ar @ br.T + ai @ bi.T
            gi = ar @ bi.T - ai @ br.T
            v = gr * gr
            v += gi * gi
        else:
            a0, a1, a2, a3 = rows
            b0, b1, b2, b3 = (pl[i0:] for pl in planes)
            c0 = a0 @ b0.T + a1 @ b1.T + a2 @ b2.T + a3 @ b3.T
            c1 = a0 @ b1.T - a1 @ b0.T - a2 @ b3.T + a3 @ b2.T
            c2 = a0 @ b2.T + a1 @ b3.T - a2 @ b0.T - a3 @ b1.T
            c3 = a0 @ b3.T - a1 @ b2.T + a2 @ b1.T - a3 @ b0.T
            v = c0 * c0
            v += c1 * c1
            v += c2 * c2
            v += c3 * c3
        # Zero out the diagonal and the lower triangle of this block strip.
        nb = i1 - i0
        tri = np.tril_indices(nb, k=0)
        v[tri[0], tri[1]] = 0.0
        if v.size:
            best = max(best, float(v.max()))
    return best
