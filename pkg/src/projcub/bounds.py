"""Dimension counts, the general upper bound, and the bound-inference rules.

``N_K(m, p)`` denotes the minimal number of projective cubature nodes of
index ``p`` on the unit sphere of ``K^m`` — equivalently the minimal ``n``
such that the m-dimensional Hilbert space over ``K`` embeds isometrically
into ``l_p^n``.  This module evaluates:

* ``dim_phi`` — the dimension of the relevant space of even polynomials
  (exact integer arithmetic),
* ``gub`` — the general upper bound ``dim_phi - 1``,
* ``nu`` — the recursion multiplier ``nu_K(p) = N_R(delta, 2*floor(p/4))``,
* ``recursion_bound`` / ``iterated_bound`` — the dimension-lift recursion
  ``N_K(m+1, p) <= nu*(p/2+1)*N_K(m, p)`` (p = 2 mod 4) and
  ``N_K(m+1, p) <= nu*((p/2)*N_K(m, p) + 1)`` (p = 0 mod 4),
* ``koly_bounds`` — the inclusion chain
  ``N_K(m, p) <= N_R(delta*m, p) <= N_R(delta, p) * N_K(m, p)``,
* ``index_reduction`` — ``N_K(m, p-2) <= N_K(m, p)``,
* ``asymptotic_constant`` — the constant in the large-p growth rate of the
  general upper bound.

Bound bookkeeping is deliberately decoupled from the constructive recursion
in :mod:`.construct`: here ``nu`` consults a database of best known values
(sporadic small formulas enter as data), while the constructor only uses
node sets it can actually build.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fields import FIELD_H, FIELD_R, FieldTag, parse_field

__all__ = [
    "BoundFact",
    "dim_phi",
    "gub",
    "closed_form_complex_m2",
    "nu",
    "recursion_bound",
    "iterated_bound",
    "koly_bounds",
    "index_reduction",
    "asymptotic_constant",
]

EXACT = "exact"
UPPER = "upper"


@dataclass(frozen=True)
class BoundFact:
    """A known value (kind 'exact') or upper bound (kind 'upper') for
    N_field(m, p), with a provenance tag: an input-table id like 'e1' or
    'i14', or a derivation trace like 'step(e2)'."""

    field: FieldTag
    m: int
    p: int
    n: int
    kind: str
    provenance: str

    def __post_init__(self) -> None:
        if self.kind not in (EXACT, UPPER):
            raise ValueError(f"kind must be {EXACT!r} or {UPPER!r}: {self.kind!r}")
        if self.n < 1 or self.m < 1 or self.p < 2 or self.p % 2 != 0:
            raise ValueError("need n >= 1, m >= 1, even p >= 2")


def _check_mp(m: int, p: int) -> None:
    if m < 1 or p < 2 or p % 2 != 0:
        raise ValueError(f"need m >= 1 and even p >= 2, got m={m}, p={p}")


def dim_phi(field, m: int, p: int) -> int:
    """Dimension of the space of polynomials a formula of index ``p`` on the
    sphere of ``K^m`` must integrate exactly.  Exact integer arithmetic:

    * R:  binom(m+p-1, m-1)
    * C:  binom(m+p/2-1, m-1)^2
    * H:  binom(2m+p/2-2, 2m-2) * binom(2m+p/2-1, 2m-2) / (2m-1)
    """
    field = parse_field(field)
    m = int(m)
    p = int(p)
    _check_mp(m, p)
    s = p // 2
    if field.delta == 1:
        return math.comb(m + p - 1, m - 1)
    if field.delta == 2:
        return math.comb(m + s - 1, m - 1) ** 2
    num = math.comb(2 * m + s - 2, 2 * m - 2) * math.comb(2 * m + s - 1, 2 * m - 2)
    den = 2 * m - 1
    if num % den != 0:
        raise ArithmeticError(
            f"quaternionic dimension formula not divisible by 2m-1 at m={m}, p={p}"
        )
    return num // den


def gub(field, m: int, p: int) -> int:
    """General upper bound for N_field(m, p): ``dim_phi(field, m, p) - 1``."""
    return dim_phi(field, m, p) - 1


def closed_form_complex_m2(s: int) -> int:
    """Best closed-form bound for N_C(2, 2s):
    ``(s+1)^2 / 2`` for odd ``s``, ``(s+1)(s+2)/2`` for even ``s``."""
    s = int(s)
    if s < 1:
        raise ValueError("need s >= 1")
    if s % 2 == 1:
        return (s + 1) ** 2 // 2
    return (s + 1) * (s + 2) // 2


def _default_db():
    from .tables import input_facts

    return input_facts()


def nu(field, p: int, db=None) -> int:
    """Recursion multiplier ``nu_K(p) = N_R(delta, q)``, ``q = 2*floor(p/4)``.

    * R: 1 (a point).
    * C: floor(p/4) + 1 (a half-polygon on the circle).
    * H: the best available bound for ``N_R(4, q)``.  Candidates: the exact
      value 4 at q = 2; every database fact for ``N_R(4, p')`` with
      ``p' >= q`` (index reduction); and the closed form
      ``(q/2+1) * N_C(2, q)`` from the inclusion chain.  ``db`` defaults to
      the embedded input tables.
    """
    field = parse_field(field)
    p = int(p)
    if p < 4 or p % 2 != 0:
        raise ValueError(f"need even p >= 4, got {p}")
    if field.delta == 1:
        return 1
    if field.delta == 2:
        return p // 4 + 1
    q = 2 * (p // 4)
    if q == 2:
        return 4
    s = q // 2
    best = (s + 1) * closed_form_complex_m2(s)
    if db is None:
        db = _default_db()
    for fact in db.values():
        if fact.field.delta == 1 and fact.m == 4 and fact.p >= q:
            best = min(best, fact.n)
    return best


def recursion_bound(field, p: int, n: int, nu_value: int | None = None, db=None) -> int:
    """One dimension-lift step: the node count of a formula on the sphere of
    ``K^(m+1)`` obtained from an n-node formula on the sphere of ``K^m``.

    ``nu*(p/2+1)*n`` for p = 2 (mod 4); ``nu*((p/2)*n + 1)`` for p = 0 (mod 4).
    """
    field = parse_field(field)
    p = int(p)
    n = int(n)
    if p < 4 or p % 2 != 0 or n < 1:
        raise ValueError("need even p >= 4 and n >= 1")
    v = int(nu_value) if nu_value is not None else nu(field, p, db=db)
    s = p // 2
    if p % 4 == 2:
        return v * (s + 1) * n
    return v * (s * n + 1)


def iterated_bound(
    field, p: int, n: int, l: int, nu_value: int | None = None, db=None
) -> int:
    """Closed form for ``l`` compositions of :func:`recursion_bound`.

    Each step is the affine map ``n -> q*n + c`` with ``q = nu*(s+1), c = 0``
    for p = 2 (mod 4) and ``q = nu*s, c = nu`` for p = 0 (mod 4) (s = p/2),
    so the l-fold composite is ``q**l * n + c*(q**l - 1)/(q - 1)`` — exact
    integer arithmetic throughout.
    """
    field = parse_field(field)
    p = int(p)
    n = int(n)
    l = int(l)
    if l < 0:
        raise ValueError("need l >= 0")
    if l == 0:
        return n
    v = int(nu_value) if nu_value is not None else nu(field, p, db=db)
    s = p // 2
    if p % 4 == 2:
        q, c = v * (s + 1), 0
    else:
        q, c = v * s, v
    ql = q**l
    if q == 1:  # pragma: no cover - q >= 2 for all valid inputs
        return n + c * l
    geo, rem = divmod(c * (ql - 1), q - 1)
    if rem != 0:  # pragma: no cover - geometric series is always exact
        raise ArithmeticError("geometric series not integral")
    return ql * n + geo


def koly_bounds(field, m: int, p: int, db=None) -> list[BoundFact]:
    """Upper facts from the inclusion chain
    ``N_K(m, p) <= N_R(delta*m, p) <= N_R(delta, p) * N_K(m, p)``.

    The left inequality turns a known real bound at dimension ``delta*m``
    into a bound over ``K``; the right one multiplies a real bound at
    dimension ``delta`` by a bound over ``K`` to bound the real problem at
    dimension ``delta*m``.  Returns the facts derivable from ``db`` (best
    inputs win); empty if the needed inputs are missing.
    """
    field = parse_field(field)
    m = int(m)
    p = int(p)
    _check_mp(m, p)
    if db is None:
        db = _default_db()
    d = field.delta
    out: list[BoundFact] = []

    def best(f: FieldTag, mm: int) -> tuple[int, str] | None:
        got = None
        for fid, fact in db.items():
            if fact.field.name == f.name and fact.m == mm and fact.p >= p:
                if got is None or fact.n < got[0]:
                    got = (fact.n, fid)
        if f.delta == 1 and mm <= 2:
            # Exact small real values: a point, and the half-polygon
            # N_R(2, 2s) = s+1.
            val = 1 if mm == 1 else p // 2 + 1
            if got is None or val < got[0]:
                got = (val, "closed" if mm == 2 else "point")
        return got

    if d > 1:
        left = best(FIELD_R, d * m)
        if left is not None:
            out.append(
                BoundFact(field, m, p, left[0], UPPER, f"incl({left[1]})")
            )
    a = best(FIELD_R, d)
    b = best(field, m)
    if a is not None and b is not None:
        out.append(
            BoundFact(
                FIELD_R, d * m, p, a[0] * b[0], UPPER, f"product({a[1]},{b[1]})"
            )
        )
    return out


def index_reduction(fact: BoundFact) -> BoundFact:
    """``N_K(m, p-2) <= N_K(m, p)``: the same nodes satisfy the lower even
    index.  At the floor p = 2 the value is exactly ``m`` (an orthonormal
    basis), so reducing a p = 4 fact yields that exact value instead."""
    if fact.p < 4:
        raise ValueError("need p >= 4 to reduce")
    if fact.p == 4:
        return BoundFact(
            fact.field, fact.m, 2, fact.m, EXACT, f"floor({fact.provenance})"
        )
    return BoundFact(
        fact.field, fact.m, fact.p - 2, fact.n, UPPER, f"reduce({fact.provenance})"
    )


def asymptotic_constant(field, m: int, log: bool = False) -> float:
    """Constant ``c_m(K)`` governing the large-p growth of the general upper
    bound: ``dim_phi ~ p**(dim_R(K^m) - 1) / c_m(K)`` as p grows.

    * R: (m-1)!
    * C: 4**(m-1) * ((m-1)!)**2
    * H: 16**(m-1) * (2m-1)! * (2m-2)!

    With ``log=True`` the natural logarithm is returned (safe for large m).
    """
    field = parse_field(field)
    m = int(m)
    if m < 1:
        raise ValueError("need m >= 1")
    if field.delta == 1:
        lg = math.lgamma(m)
    elif field.delta == 2:
        lg = (m - 1) * math.log(4.0) + 2.0 * math.lgamma(m)
    else:
        lg = (m - 1) * math.log(16.0) + math.lgamma(2 * m) + math.lgamma(2 * m - 1)
    if log:
        return lg
    if lg > 700.0:
        raise OverflowError(
            f"asymptotic constant overflows a float at m={m}; use log=True"
        )
    if field.delta == 1:
        return float(math.factorial(m - 1))
    if field.delta == 2:
        return float(4 ** (m - 1) * math.factorial(m - 1) ** 2)
    return float(
        16 ** (m - 1) * math.factorial(2 * m - 1) * math.factorial(2 * m - 2)
    )
