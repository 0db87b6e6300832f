"""Pohozaev identity on solution grids, the two integration-by-parts
identities for a pair (ζ, η), and the Hardy-Rellich quotient, all for
radial data so that every integral is one-dimensional.

Test functions carry analytic jets (f, f', f'', f''', f'''') in r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import GridError, InvalidParameters, QuadratureError
from .quadrature import adaptive_gauss, ball_integral, sphere_area
from .shooting import RadialSolution, ode_residual

GAUSSIAN_CUTOFF = 9.0
QUAD_RTOL = 1e-13
SOLUTION_RESIDUAL_LIMIT = 100.0


# -- test functions ---------------------------------------------------------


def _gaussian_jet(r):
    h = np.exp(-r * r)
    r2 = r * r
    return np.array([
        h,
        -2 * r * h,
        (4 * r2 - 2) * h,
        (-8 * r2 * r + 12 * r) * h,
        (16 * r2 * r2 - 48 * r2 + 12) * h,
    ])


def _r2_jet(r):
    z = np.zeros_like(r)
    return np.array([r * r, 2 * r, 2 + z, z, z])


def leibniz(f, g):
    """Jet of a product from the jets of its factors (orders 0..4)."""
    out = np.zeros_like(f)
    for k in range(f.shape[0]):
        out[k] = sum(math.comb(k, j) * f[j] * g[k - j] for j in range(k + 1))
    return out


def _gaussian_poly_jet(r):
    return leibniz(_r2_jet(r), _gaussian_jet(r))


def _bump_jet(r):
    # φ(t) = exp(-1/t) with t = 1 - r², zero for r >= 1
    r = np.asarray(r, dtype=float)
    out = np.zeros((5,) + r.shape)
    inside = r < 1
    x = r[inside]
    t = 1 - x * x
    it = 1 / t
    phi = np.exp(-it)
    d1 = phi * it**2
    d2 = phi * (it**4 - 2 * it**3)
    d3 = phi * (it**6 - 6 * it**5 + 6 * it**4)
    d4 = phi * (it**8 - 12 * it**7 + 36 * it**6 - 24 * it**5)
    t1, t2 = -2 * x, -2.0
    out[0, inside] = phi
    out[1, inside] = d1 * t1
    out[2, inside] = d2 * t1**2 + d1 * t2
    out[3, inside] = d3 * t1**3 + 3 * d2 * t1 * t2
    out[4, inside] = d4 * t1**4 + 6 * d3 * t1**2 * t2 + 3 * d2 * t2**2
    return out


@dataclass(frozen=True)
class TestFunction:
    """Radial profile r ↦ base(r / scale) with jets up to fourth order.

    ``support`` is the radius (before scaling) beyond which the base profile
    is negligible or identically zero.
    """

    name: str
    base_jet: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    support: float
    scale: float = 1.0

    __test__ = False  # not a pytest class

    @property
    def cutoff(self) -> float:
        return self.support * self.scale

    def jet(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        factors = self.scale ** -np.arange(5.0)
        return self.base_jet(r / self.scale) * factors.reshape((5,) + (1,) * r.ndim)

    def __call__(self, r):
        return self.jet(r)[0]

    def rescaled(self, lam: float) -> "TestFunction":
        """The profile r ↦ ψ(λ r)."""
        return replace(self, scale=self.scale / lam)


def gaussian(scale: float = 1.0) -> TestFunction:
    return TestFunction("gaussian", _gaussian_jet, GAUSSIAN_CUTOFF, scale)


def gaussian_poly(scale: float = 1.0) -> TestFunction:
    return TestFunction("r2_gaussian", _gaussian_poly_jet, GAUSSIAN_CUTOFF, scale)


def bump(radius: float = 3.0) -> TestFunction:
    return TestFunction("bump", _bump_jet, 1.0, radius)


def zero_function() -> TestFunction:
    return TestFunction("zero", lambda r: np.zeros((5,) + np.shape(r)), 1.0)


def catalog() -> list[TestFunction]:
    return [gaussian(), bump(3.0), gaussian_poly(), gaussian(0.7), bump(1.5)]


# -- radial calculus ------------------------------------------------------------


def laplacian_jet(j, r, n):
    """(Δf, (Δf)', (Δf)'') from the jet of f."""
    m = n - 1
    f1, f2, f3, f4 = j[1], j[2], j[3], j[4]
    lap = f2 + m * f1 / r
    dlap = f3 + m * f2 / r - m * f1 / r**2
    ddlap = f4 + m * f3 / r - 2 * m * f2 / r**2 + 2 * m * f1 / r**3
    return lap, dlap, ddlap


def bilaplacian(j, r, n):
    _, dlap, ddlap = laplacian_jet(j, r, n)
    return ddlap + (n - 1) * dlap / r


def _radial_integrals(func, upper, n, lower=0.0, pieces=16):
    """∫ func(|x|) dx over the shell lower < |x| < upper, for a radial
    integrand returning shape (k, len(r)); result has shape (k,)."""
    if lower > 0:
        edges = np.geomspace(lower, upper, pieces + 1)
    else:
        edges = np.linspace(0.0, upper, pieces + 1)

    def weighted(r):
        return np.asarray(func(r)) * r ** (n - 1)

    seg = adaptive_gauss(weighted, edges[:-1], edges[1:], order=10, rtol=QUAD_RTOL)
    return sphere_area(n) * seg.sum(axis=1)


def _normalized(lhs, rhs):
    return (lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


def product_rule_sides(zeta: TestFunction, eta: TestFunction, n: int):
    """Both sides of ∫(Δ²ζ)ζη² = ∫[Δ(ζη)]² + ∫[-4(∇ζ·∇η)² + 2ζΔζ|∇η|²]
    + ∫ζ²[2∇(Δη)·∇η + (Δη)²]."""
    upper = min(zeta.cutoff, eta.cutoff)

    def sides(r):
        z, e = zeta.jet(r), eta.jet(r)
        lhs = bilaplacian(z, r, n) * z[0] * e[0] ** 2
        ze = leibniz(z, e)
        lap_ze = laplacian_jet(ze, r, n)[0]
        lap_z = laplacian_jet(z, r, n)[0]
        lap_e, dlap_e, _ = laplacian_jet(e, r, n)
        rhs = (
            lap_ze**2
            - 4 * (z[1] * e[1]) ** 2
            + 2 * z[0] * lap_z * e[1] ** 2
            + z[0] ** 2 * (2 * dlap_e * e[1] + lap_e**2)
        )
        return np.stack([lhs, rhs])

    lhs, rhs = _radial_integrals(sides, upper, n)
    return float(lhs), float(rhs)


def product_rule_defect(zeta: TestFunction, eta: TestFunction, n: int = 6) -> float:
    return _normalized(*product_rule_sides(zeta, eta, n))


def gradient_weight_sides(zeta: TestFunction, eta: TestFunction, n: int):
    """Both sides of 2∫|∇ζ|²|∇η|² = ∫[2ζ(-Δζ)|∇η|² + ζ²Δ(|∇η|²)]."""
    upper = min(zeta.cutoff, eta.cutoff)

    def sides(r):
        z, e = zeta.jet(r), eta.jet(r)
        lhs = 2 * z[1] ** 2 * e[1] ** 2
        lap_z = laplacian_jet(z, r, n)[0]
        # |∇η|² = η'², whose radial jet starts 2η'η'', 2η''² + 2η'η'''
        g1 = 2 * e[1] * e[2]
        g2 = 2 * e[2] ** 2 + 2 * e[1] * e[3]
        lap_g = g2 + (n - 1) * g1 / r
        rhs = -2 * z[0] * lap_z * e[1] ** 2 + z[0] ** 2 * lap_g
        return np.stack([lhs, rhs])

    lhs, rhs = _radial_integrals(sides, upper, n)
    return float(lhs), float(rhs)


def gradient_weight_defect(zeta: TestFunction, eta: TestFunction, n: int = 6) -> float:
    return _normalized(*gradient_weight_sides(zeta, eta, n))


def hardy_rellich_ratio(psi: TestFunction, n: int) -> float:
    """∫|Δψ|² / ∫ψ²|x|^{-4} for a radial ψ in dimension n."""
    if n < 1:
        raise InvalidParameters("dimension must be positive")

    def parts(r):
        j = psi.jet(r)
        return np.stack([laplacian_jet(j, r, n)[0] ** 2, j[0] ** 2 / r**4])

    upper = psi.cutoff
    numerator, denominator = _radial_integrals(parts, upper, n)
    # a finite denominator barely notices the innermost shell
    inner = [_radial_integrals(parts, upper, n, lower=lo, pieces=48)[1] for lo in (1e-8, 1e-12)]
    if not math.isfinite(denominator) or abs(inner[1] - inner[0]) > 1e-6 * abs(inner[1]):
        raise QuadratureError("denominator integral diverged")
    if denominator == 0:
        raise QuadratureError("denominator integral vanishes")
    return numerator / denominator


# -- Pohozaev identity on solutions ---------------------------------------------------


@dataclass(frozen=True)
class PohozaevResult:
    radius: float
    lhs: float
    rhs: float
    defect: float


def pohozaev_sides(sol: RadialSolution, R: float) -> tuple[float, float]:
    """Volume side ∫_{B_R}[(n-4)/2 (Δu)² - (n+a)/(p+1)|x|^a|u|^{p+1}] and the
    boundary side, both for radial u."""
    n, a, p = sol.params.n, sol.params.a, sol.params.p
    lhs = float(ball_integral(sol, R, 0.5 * (n - 4), -(n + a) / (p + 1)))
    u, du, v, dv = sol(R)
    ddu = v - (n - 1) * du / R
    d_dilation = du + R * ddu  # ∂(x·∇u)/∂r
    pointwise = (
        0.5 * R * v * v
        - R ** (1 + a) * abs(u) ** (p + 1) / (p + 1)
        + R * du * dv
        - v * d_dilation
    )
    rhs = float(sphere_area(n) * R ** (n - 1) * pointwise)
    return lhs, rhs


def pohozaev_defect(sol: RadialSolution, R: float, require_solution: bool = True) -> PohozaevResult:
    """Normalised (LHS - RHS) of the Pohozaev identity on B_R.

    With ``require_solution`` the grid's ODE residual up to R must stay below
    SOLUTION_RESIDUAL_LIMIT tolerance units; the identity says nothing about
    functions that do not solve the equation.
    """
    if not sol.contains(R):
        raise GridError(f"R={R} outside grid [{sol.r_start}, {sol.r_end}]")
    if require_solution and len(sol.r) > 1:
        res = ode_residual(sol)
        upto = sol.r[:-1] < R
        if np.any(upto) and np.max(res[upto]) > SOLUTION_RESIDUAL_LIMIT:
            raise GridError("not a solution grid: ODE residual exceeds threshold")
    lhs, rhs = pohozaev_sides(sol, R)
    return PohozaevResult(float(R), lhs, rhs, _normalized(lhs, rhs))
