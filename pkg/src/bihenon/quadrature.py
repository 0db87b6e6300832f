"""Ball integrals of radial solutions.

Everything reduces to the two radial densities

    D_v(s) = s^{n-1} v(s)^2,     D_u(s) = s^{n-1+a} |u(s)|^{p+1},

so that ∫_{B_r} (A (Δu)² + B |x|^a |u|^{p+1}) dx = ω_{n-1} (A ∫D_v + B ∫D_u).
Each grid step is integrated by Gauss-Legendre with adaptive bisection;
the piece inside the first grid radius comes from the local power law of
the solution's core.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import GridError, QuadratureError
from .shooting import HOMOGENEOUS_CORE, REGULAR_CORE, RadialSolution

QUAD_RTOL = 1e-10
MAX_DEPTH = 40

_rules: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _rule(order: int):
    if order not in _rules:
        _rules[order] = np.polynomial.legendre.leggauss(order)
    return _rules[order]


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def densities(sol: RadialSolution, s: np.ndarray) -> np.ndarray:
    n, a, p = sol.params.n, sol.params.a, sol.params.p
    st = sol(s)
    u, v = st[0], st[2]
    return np.stack([v * v * s ** (n - 1), np.abs(u) ** (p + 1) * s ** (n - 1 + a)])


def _gauss(func, lo, hi, order):
    x, w = _rule(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(func(nodes.ravel()))
    vals = vals.reshape(vals.shape[0], *nodes.shape)
    return np.einsum("kij,j->ki", vals, w) * half


def adaptive_gauss(func, lo, hi, order=8, rtol=QUAD_RTOL, floor=None, depth=0):
    """Integrate a vector-valued ``func`` over each interval [lo_i, hi_i].

    ``func`` maps a 1-D array of abscissae to shape (k, len(x)). Each interval
    is compared against its two halves and bisected until they agree to
    ``rtol`` (plus a floor of 1e-15 of the total). Returns shape (k, len(lo)).
    """
    lo, hi = np.atleast_1d(np.asarray(lo, float)), np.atleast_1d(np.asarray(hi, float))
    if lo.size == 0:
        k = np.asarray(func(np.array([1.0]))).shape[0]
        return np.zeros((k, 0))
    mid = 0.5 * (lo + hi)
    coarse = _gauss(func, lo, hi, order)
    fine = _gauss(func, lo, mid, order) + _gauss(func, mid, hi, order)
    if floor is None:
        floor = 1e-15 * np.sum(np.abs(fine), axis=1, keepdims=True) + 1e-300
    bad = np.any(np.abs(fine - coarse) > rtol * np.abs(fine) + floor, axis=0)
    if np.any(bad):
        if depth >= MAX_DEPTH:
            raise QuadratureError("quadrature failed to converge")
        idx = np.nonzero(bad)[0]
        left = adaptive_gauss(func, lo[idx], mid[idx], order, rtol, floor, depth + 1)
        right = adaptive_gauss(func, mid[idx], hi[idx], order, rtol, floor, depth + 1)
        fine[:, idx] = left + right
    return fine


def segment_integrals(sol, lo, hi, order=8, rtol=QUAD_RTOL):
    """Integrals of (D_v, D_u) over each [lo_i, hi_i]; shape (2, len(lo))."""
    return adaptive_gauss(lambda s: densities(sol, s), lo, hi, order, rtol)


def core_integrals(sol: RadialSolution) -> np.ndarray:
    """(∫D_v, ∫D_u) over [0, r_start] from the core power law."""
    n, a = sol.params.n, sol.params.a
    r0 = sol.r_start
    d = densities(sol, np.array([r0]))[:, 0]
    if sol.core == REGULAR_CORE:
        # u, v tend to constants: D_v ~ s^{n-1}, D_u ~ s^{n-1+a}
        return np.array([d[0] * r0 / n, d[1] * r0 / (n + a)])
    if sol.core == HOMOGENEOUS_CORE:
        # both densities ~ s^{n-5-2β}
        m = n - 4 - 2 * sol.params.beta
        if m <= 0:
            raise QuadratureError("volume integral diverges at the origin for this core")
        return d * r0 / m
    raise ValueError(f"unknown core {sol.core!r}")


def _cumulative(sol: RadialSolution, order: int) -> np.ndarray:
    key = ("cumulative", order)
    if key not in sol._cache:
        seg = segment_integrals(sol, sol.r[:-1], sol.r[1:], order)
        cum = np.zeros((2, len(sol.r)))
        cum[:, 0] = core_integrals(sol)
        cum[:, 1:] = cum[:, :1] + np.cumsum(seg, axis=1)
        sol._cache[key] = cum
    return sol._cache[key]


def radial_moments(sol: RadialSolution, radius, order: int = 8) -> np.ndarray:
    """(∫_0^r D_v, ∫_0^r D_u) for one radius or an array of radii."""
    rr = np.atleast_1d(np.asarray(radius, dtype=float))
    if not (sol.contains(rr.min()) and sol.contains(rr.max())):
        raise GridError(f"r outside grid [{sol.r_start}, {sol.r_end}]")
    rr = np.clip(rr, sol.r_start, sol.r_end)
    cum = _cumulative(sol, order)
    idx = np.clip(np.searchsorted(sol.r, rr, side="right") - 1, 0, len(sol.r) - 1)
    base = cum[:, idx]
    lo = sol.r[idx]
    partial = np.zeros_like(base)
    need = rr > lo
    if np.any(need):
        partial[:, need] = segment_integrals(sol, lo[need], rr[need], order)
    out = base + partial
    return out[:, 0] if np.ndim(radius) == 0 else out


def ball_integral(sol: RadialSolution, radius, coef_v2: float, coef_pow: float, order: int = 8):
    """∫_{B_r} [coef_v2 (Δu)² + coef_pow |x|^a |u|^{p+1}] dx."""
    m = radial_moments(sol, radius, order)
    return sphere_area(sol.params.n) * (coef_v2 * m[0] + coef_pow * m[1])
