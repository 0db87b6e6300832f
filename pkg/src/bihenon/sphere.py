"""Stability of homogeneous solutions reduced to the unit sphere.

A homogeneous solution u = r^{-β} w(θ) turns the equation into

    Δ_θ² w - ℓ1 Δ_θ w + ℓ2 w = |w|^{p-1} w   on S^{n-1},

and stability against r^{-(n-4)/2} w(θ) ζ(r) test functions combines with it
into the quadratic form

    ∫ (p-1)|Δ_θ w|² + (pℓ1 - n(n-4)/2)|∇_θ w|² + (pℓ2 - n²(n-4)²/16) w² ≤ 0.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoSingularSolution
from .params import (
    ProblemParams,
    derive_scalars,
    ell_values,
    gradient_threshold,
    hardy_rellich_constant,
    jl_exponent,
    sobolev_critical,
)

ALL_POSITIVE = "all_positive"
MASS_NONPOSITIVE = "mass_nonpositive"
GRADIENT_NONPOSITIVE = "gradient_nonpositive"
DEFAULT_P_CAP = 100.0


@dataclass(frozen=True)
class QuadraticFormReport:
    params: ProblemParams
    coeff_bilaplacian: float
    coeff_gradient: float
    coeff_mass: float
    conclusion: str


def combined_coefficients(params: ProblemParams) -> QuadraticFormReport:
    d = derive_scalars(params)
    p = params.p
    c1 = p - 1
    c2 = p * d.ell1 - d.grad_threshold
    c3 = p * d.ell2 - d.mass_threshold
    if c3 <= 0:
        conclusion = MASS_NONPOSITIVE
    elif c2 <= 0:
        conclusion = GRADIENT_NONPOSITIVE
    else:
        # every term is a positive multiple of a nonnegative integral
        conclusion = ALL_POSITIVE
    return QuadraticFormReport(params, c1, c2, c3, conclusion)


def constant_mode_residual(params: ProblemParams, factor: float = 1.0) -> float:
    """ℓ2 w - |w|^{p-1} w for the constant profile w = factor · ℓ2^{1/(p-1)}."""
    ell2 = derive_scalars(params).ell2
    if not ell2 > 0:
        raise NoSingularSolution(f"no constant mode: ℓ2 ≤ 0 (ℓ2 = {ell2!r})")
    w = factor * ell2 ** (1.0 / (params.p - 1))
    return ell2 * w - abs(w) ** (params.p - 1) * w


@dataclass(frozen=True)
class ScanRow:
    n: int
    a: float
    p: float
    coeff_bilaplacian: float
    coeff_gradient: float
    coeff_mass: float
    conclusion: str


@dataclass(frozen=True)
class ScanSummary:
    n: int
    a: float
    p_jl: float
    step: float
    sign_changes: list[float]  # grid p where coeff_mass first turns nonpositive
    consistent: bool


def _p_grid(n, a, p_cap, p_step):
    p_crit = sobolev_critical(n, a)
    if p_cap <= p_crit:
        return np.array([])
    count = int(math.floor((p_cap - p_crit) / p_step + 1e-9))
    return p_crit + p_step * np.arange(1, count + 1)


def _coefficient_arrays(n, a, p):
    """Same coefficients as combined_coefficients, evaluated over an array of p."""
    beta = (4 + a) / (p - 1)
    ell1, ell2 = ell_values(n, beta)
    c1 = p - 1
    c2 = p * ell1 - gradient_threshold(n)
    c3 = p * ell2 - hardy_rellich_constant(n)
    tags = np.where(c3 <= 0, MASS_NONPOSITIVE, np.where(c2 <= 0, GRADIENT_NONPOSITIVE, ALL_POSITIVE))
    return c1, c2, c3, tags.tolist()


def scan_grid(n_values, a_values, p_step: float = 0.01, p_cap: float = DEFAULT_P_CAP):
    """Coefficient table over (n, a, p) with p on a uniform grid in (p_crit, p_cap].

    Returns (rows, summaries). Each summary records the grid points where the
    mass coefficient changes sign and whether that matches p_a(n) to within
    one grid step (no change at all is expected when p_a(n) = ∞ or
    p_a(n) > p_cap).
    """
    rows: list[ScanRow] = []
    summaries: list[ScanSummary] = []
    for n in sorted(set(int(x) for x in n_values)):
        for a in sorted(set(float(x) for x in a_values)):
            grid = _p_grid(n, a, p_cap, p_step)
            c1, c2, c3, tags = _coefficient_arrays(n, a, grid)
            rows.extend(ScanRow(n, a, float(p), float(x), float(y), float(z), t)
                        for p, x, y, z, t in zip(grid, c1, c2, c3, tags))
            positive = c3 > 0
            flips = np.nonzero(positive[1:] != positive[:-1])[0]
            changes = [float(grid[i + 1]) for i in flips]
            p_jl = jl_exponent(n, a)
            if math.isinf(p_jl) or p_jl > (grid[-1] if len(grid) else -math.inf):
                consistent = not changes
            else:
                consistent = len(changes) == 1 and abs(changes[0] - p_jl) <= p_step
            summaries.append(ScanSummary(n, a, p_jl, p_step, changes, consistent))
    return rows, summaries


def scan_table_csv(rows) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "a", "p", "coeff1", "coeff2", "coeff3", "conclusion"])
    for r in rows:
        writer.writerow([r.n, format(r.a, ".17g"), format(r.p, ".17g"),
                         format(r.coeff_bilaplacian, ".17g"), format(r.coeff_gradient, ".17g"),
                         format(r.coeff_mass, ".17g"), r.conclusion])
    return out.getvalue()
