"""Real root isolation for low-degree polynomials.

Coefficients are given highest degree first (numpy ``polyval`` order).
Root counting uses a Sturm chain built in exact rational arithmetic, so the
count on a bracket is reliable even when the float polynomial is badly
scaled; the final refinement is plain float bisection plus one Newton step.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .errors import RootNotFound

Poly = list[Fraction]


def _trim(p: Poly) -> Poly:
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def _derivative(p: Poly) -> Poly:
    deg = len(p) - 1
    if deg == 0:
        return [Fraction(0)]
    return [c * (deg - i) for i, c in enumerate(p[:-1])]


def _divmod(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    num = list(num)
    den = _trim(den)
    if len(den) == 1 and den[0] == 0:
        raise ZeroDivisionError("polynomial division by zero")
    if len(num) < len(den):
        return [Fraction(0)], _trim(num)
    quot = []
    lead = den[0]
    while len(num) >= len(den):
        q = num[0] / lead
        quot.append(q)
        for j, d in enumerate(den):
            num[j] -= q * d
        num.pop(0)
    return quot, _trim(num) if num else [Fraction(0)]


def _is_zero(p: Poly) -> bool:
    return all(c == 0 for c in p)


def _gcd(a: Poly, b: Poly) -> Poly:
    a, b = _trim(a), _trim(b)
    while not _is_zero(b):
        _, r = _divmod(a, b)
        a, b = b, r
    return [c / a[0] for c in a]


def _eval(p: Sequence, x):
    acc = 0 * x
    for c in p:
        acc = acc * x + c
    return acc


def square_free(coefficients: Sequence[float]) -> Poly:
    """Return p / gcd(p, p') in exact arithmetic (same real roots, all simple)."""
    p = _trim([Fraction(c) for c in coefficients])
    if len(p) <= 2:
        return p
    g = _gcd(p, _derivative(p))
    if len(g) == 1:
        return p
    q, _ = _divmod(p, g)
    return q


def sturm_chain(coefficients: Sequence[float]) -> list[Poly]:
    return _chain_exact(_trim([Fraction(c) for c in coefficients]))


def _sign_changes(chain: list[Poly], x: Fraction) -> int:
    signs = [s for s in (_eval(p, x) for p in chain) if s != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if (s > 0) != (t > 0))


def count_real_roots(coefficients: Sequence[float], lower: float, upper: float) -> int:
    """Number of distinct real roots in the half-open interval (lower, upper]."""
    chain = sturm_chain(coefficients)
    return _sign_changes(chain, Fraction(lower)) - _sign_changes(chain, Fraction(upper))


def largest_real_root(
    coefficients: Sequence[float],
    bound: float,
    lower: float | None = None,
    tol: float = 1e-12,
) -> float:
    """Largest real root of a polynomial inside ``[lower, bound]``.

    ``lower`` defaults to ``-bound``. The root is isolated with Sturm counts,
    refined by bisection on the square-free part down to ``tol`` (absolute)
    and finished with a single Newton step that is kept only if it stays
    inside the final bracket.
    """
    if lower is None:
        lower = -bound
    if not lower < bound:
        raise ValueError("empty search interval")
    sqf = square_free(coefficients)
    if len(sqf) < 2:
        raise RootNotFound("no real root in bracket: constant polynomial")
    chain = _chain_exact(sqf)

    lo_f, hi_f = Fraction(lower), Fraction(bound)
    if _eval(sqf, lo_f) == 0 and _sign_changes(chain, lo_f) == _sign_changes(chain, hi_f):
        return float(lower)
    v_hi = _sign_changes(chain, hi_f)
    if _sign_changes(chain, lo_f) - v_hi < 1:
        raise RootNotFound(f"no real root in bracket [{lower}, {bound}]")

    # shrink (lo, hi] until it holds exactly one root, namely the largest
    lo, hi = lo_f, hi_f
    while _sign_changes(chain, lo) - v_hi > 1:
        mid = (lo + hi) / 2
        if _sign_changes(chain, mid) - v_hi >= 1:
            lo = mid
        else:
            hi = mid

    def sign(x: float) -> int:
        # exact at float abscissae, so rounding near a root cannot flip it
        v = _eval(sqf, Fraction(x))
        return (v > 0) - (v < 0)

    if _eval(sqf, hi) == 0:
        return float(hi)
    a, b = float(lo), float(hi)
    sa = sign(a)
    if sa == 0:
        # the open end is itself a (smaller) root; step inside
        a = math.nextafter(a, b)
        sa = sign(a)
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        sm = sign(m)
        if sm == 0:
            return m
        if sm == sa:
            a = m
        else:
            b = m
    coeffs = [float(c) for c in sqf]
    x = 0.5 * (a + b)
    dcoeffs = [float(c) for c in _derivative(sqf)]
    dfx = _eval(dcoeffs, x)
    if dfx != 0.0:
        xn = x - _eval(coeffs, x) / dfx
        if a - tol <= xn <= b + tol:
            x = xn
    return x


def _chain_exact(p: Poly) -> list[Poly]:
    if len(p) < 2:
        return [p]
    chain = [p, _derivative(p)]
    while True:
        _, r = _divmod(chain[-2], chain[-1])
        if _is_zero(r):
            return chain
        chain.append([-c for c in r])


def bisect_scalar(func, lo: float, hi: float, tol: float = 1e-13, max_iter: int = 200) -> float:
    """Plain bisection on a sign change of ``func`` over [lo, hi]."""
    flo, fhi = func(lo), func(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise RootNotFound(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = func(mid)
        if fm == 0 or hi - lo <= tol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
