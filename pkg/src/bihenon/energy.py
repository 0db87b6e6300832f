"""Monotonicity energy E(r; 0, u) for radial solutions, its blow-down
scaling, and growth diagnostics.

With β = (4+a)/(p-1), k = 2β, ω = |S^{n-1}| and w = βu/r + u_r, the energy
evaluated by default ("proof" form) is

    E(r) = Ê(r) - (γ/2) ω r^k u² - (γ/2) ω d/dr (r^{k+1} u²)
           + (r³/2) ω d/dr (r^k w²),

    Ê(r) = r^{k+4-n} ∫_{B_r} ½(Δu)² - |x|^a |u|^{p+1}/(p+1).

Angular-gradient terms vanish for radial u. The "typeset" form replaces the
second term by -(γ/2) ω d/dr (r^k u²); it is kept for comparison only and is
not monotone in general.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters
from .params import derive_scalars, sobolev_critical
from .quadrature import ball_integral, sphere_area
from .shooting import RadialSolution

PROOF_FORM = "proof"
TYPESET_FORM = "typeset"


def _radial_pieces(sol: RadialSolution, r):
    n = sol.params.n
    beta = sol.params.beta
    u, du, v, _ = sol(r)
    ddu = v - (n - 1) * du / r
    w = beta * u / r + du
    dw = -beta * u / r**2 + beta * du / r + ddu
    return u, du, w, dw


def hat_energy(sol: RadialSolution, tau, order: int = 8):
    """Rescaled bulk energy τ^{k+4-n} ∫_{B_τ} ½(Δu)² - |x|^a|u|^{p+1}/(p+1)."""
    n, p = sol.params.n, sol.params.p
    k = 2 * sol.params.beta
    tau = np.asarray(tau, dtype=float)
    bulk = ball_integral(sol, tau, 0.5, -1.0 / (p + 1), order)
    return tau ** (k + 4 - n) * bulk


def energy_radial(sol: RadialSolution, r, form: str = PROOF_FORM, order: int = 8):
    """E(r; 0, u) at one radius or an array of radii."""
    params = sol.params
    n = params.n
    k = 2 * params.beta
    gamma = derive_scalars(params).gamma
    omega = sphere_area(n)
    r = np.asarray(r, dtype=float)
    u, du, w, dw = _radial_pieces(sol, r)

    if form == PROOF_FORM:
        mass = r**k * u * u
    elif form == TYPESET_FORM:
        mass = k * r ** (k - 1) * u * u + 2 * r**k * u * du
    else:
        raise ValueError(f"unknown energy form {form!r}")
    d_mass_r = (k + 1) * r**k * u * u + 2 * r ** (k + 1) * u * du
    d_flux = k * r ** (k - 1) * w * w + 2 * r**k * w * dw

    boundary = omega * (-0.5 * gamma * mass - 0.5 * gamma * d_mass_r + 0.5 * r**3 * d_flux)
    return hat_energy(sol, r, order) + boundary


def derivative_bound(sol: RadialSolution, r):
    """c(n,p,a) r^{2+k-n} ∮_{∂B_r} (βu/r + u_r)² for radial u."""
    c = derive_scalars(sol.params).c
    k = 2 * sol.params.beta
    r = np.asarray(r, dtype=float)
    _, _, w, _ = _radial_pieces(sol, r)
    return c * sphere_area(sol.params.n) * r ** (k + 1) * w * w


def energy_rate(sol: RadialSolution, r):
    """Closed-form dE/dr along a radial solution:

        ω r^{k+1} [ 2((β+1) w + r w')² + c w² ],

    i.e. the derivative bound plus the square dropped in the inequality.
    """
    c = derive_scalars(sol.params).c
    beta = sol.params.beta
    r = np.asarray(r, dtype=float)
    _, _, w, dw = _radial_pieces(sol, r)
    sq = ((beta + 1) * w + r * dw) ** 2
    return sphere_area(sol.params.n) * r ** (2 * beta + 1) * (2 * sq + c * w * w)


def blow_down(sol: RadialSolution, tau: float) -> RadialSolution:
    """u^τ(x) = τ^β u(τx), carried through the grid and the interpolant."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    beta = sol.params.beta
    scale = tau ** (beta + np.arange(4.0))
    inner = sol.interpolant

    def interp(x):
        x = np.asarray(x, dtype=float)
        return scale.reshape((4,) + (1,) * x.ndim) * inner(tau * x)

    return sol.with_fields(r=sol.r / tau, y=sol.y * scale[:, None], interpolant=interp,
                           blowup_radius=None if sol.blowup_radius is None
                           else sol.blowup_radius / tau)


@dataclass(frozen=True)
class EnergyTrace:
    radii: np.ndarray
    E: np.ndarray
    dE_bound: np.ndarray
    dE_estimate: np.ndarray
    tolerance: np.ndarray
    params: object = None

    @property
    def margins(self) -> np.ndarray:
        return self.dE_estimate - self.dE_bound

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["r", "E", "dE_bound", "dE_estimate"])
        for row in zip(self.radii, self.E, self.dE_bound, self.dE_estimate):
            writer.writerow([format(float(x), ".17g") for x in row])
        return out.getvalue()


@dataclass(frozen=True)
class MonotonicityVerdict:
    passed: bool
    worst_margin: float  # min over radii of dE - bound + tol
    max_margin: float  # max over radii of dE - bound


def _local_step(sol: RadialSolution, r: float) -> float:
    i = int(np.clip(np.searchsorted(sol.r, r) - 1, 0, len(sol.r) - 2))
    h = sol.r[i + 1] - sol.r[i]
    room = min(r - sol.r_start, sol.r_end - r)
    if room <= 0:
        raise InvalidParameters(f"radius {r} has no room for a central difference")
    return float(min(h, 0.5 * room))


def monotonicity_check(sol: RadialSolution, radii, form: str = PROOF_FORM,
                       order: int = 8) -> tuple[EnergyTrace, MonotonicityVerdict]:
    """Compare central-difference dE/dr with the lower bound at each radius.

    The difference step is the local grid spacing h. The tolerance at each
    radius is ten times the truncation estimate 4/3 |D(h) - D(h/2)| plus a
    rounding allowance.
    """
    params = sol.params
    p_crit = sobolev_critical(params.n, params.a)
    if params.p < p_crit * (1 - 1e-12):
        raise InvalidParameters("monotonicity formula needs p >= (n+4+2a)/(n-4)")
    radii = np.asarray(radii, dtype=float)
    h = np.array([_local_step(sol, r) for r in radii])
    pts = np.concatenate([radii, radii + h, radii - h, radii + h / 2, radii - h / 2])
    vals = energy_radial(sol, pts, form, order).reshape(5, -1)
    E, ep, em, ep2, em2 = vals
    d_h = (ep - em) / (2 * h)
    d_h2 = (ep2 - em2) / h
    trunc = 4.0 / 3.0 * np.abs(d_h - d_h2)
    scale = np.max(np.abs(vals), axis=0)
    rounding = 1e3 * np.finfo(float).eps * scale / h
    tol = 10 * trunc + rounding
    bound = derivative_bound(sol, radii)
    trace = EnergyTrace(radii, E, bound, d_h, tol, params)
    slack = d_h - bound + tol
    verdict = MonotonicityVerdict(
        passed=bool(np.all(slack >= 0)),
        worst_margin=float(np.min(slack)) if slack.size else math.inf,
        max_margin=float(np.max(d_h - bound)) if slack.size else 0.0,
    )
    return trace, verdict


def bulk_integral(sol: RadialSolution, radius, order: int = 8):
    """∫_{B_R} (|Δu|² + |x|^a |u|^{p+1})."""
    return ball_integral(sol, radius, 1.0, 1.0, order)


def bulk_energy_slope(sol: RadialSolution, tail_fraction: float = 0.5) -> float:
    """Log-log slope of the bulk integral over the tail of the grid.

    Returns nan when the integral vanishes on the tail (slope undefined).
    Compare with n - (4(p+1)+2a)/(p-1).
    """
    m = max(2, int(math.ceil(tail_fraction * len(sol.r))))
    radii = sol.r[-m:]
    vals = bulk_integral(sol, radii)
    if np.any(vals <= 0):
        return math.nan
    slope, _ = np.polyfit(np.log(radii), np.log(vals), 1)
    return float(slope)


def expected_bulk_slope(params) -> float:
    return params.n - (4 * (params.p + 1) + 2 * params.a) / (params.p - 1)

