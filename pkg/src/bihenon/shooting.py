"""Radial solutions of Δ²u = |x|^a |u|^{p-1} u by shooting from the origin.

The fourth-order radial equation is integrated as the first-order system

    u' = du,   du' = v - (n-1) du / r,
    v' = dv,   dv' = r^a |u|^{p-1} u - (n-1) dv / r,

with v = Δu. Integration starts at a small radius from the regular series
(or from any supplied state) and uses scipy's DOP853 pair with dense output.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DecayFitError, GridError, StepSizeUnderflow
from .params import ProblemParams

REACHED_HORIZON = "reached_horizon"
BLEW_UP = "blew_up"

REGULAR_CORE = "regular"
HOMOGENEOUS_CORE = "homogeneous"

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class RadialState:
    r: float
    u: float
    du: float
    v: float
    dv: float

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.du, self.v, self.dv])


@dataclass(frozen=True)
class ShootingConfig:
    alpha: float = 0.0
    b: float = 0.0
    r_start: float = 1e-4
    r_max: float = 10.0
    rel_tol: float = 1e-11
    abs_tol: float = 1e-14
    blowup_bound: float = 1e8

    def __post_init__(self):
        if not 0 < self.r_start < self.r_max:
            raise ValueError("need 0 < r_start < r_max")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.blowup_bound <= 0:
            raise ValueError("blowup_bound must be positive")


@dataclass(frozen=True, eq=False)
class RadialSolution:
    """Samples (r, u, u', Δu, (Δu)') on a strictly increasing grid plus a
    dense interpolant valid on [r[0], r[-1]].

    ``core`` says how the solution behaves inside r[0]: ``"regular"`` means
    smooth at the origin, ``"homogeneous"`` means u ∝ r^{-β} there.
    """

    params: ProblemParams
    r: np.ndarray
    y: np.ndarray
    interpolant: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    termination: str = REACHED_HORIZON
    blowup_radius: float | None = None
    core: str = REGULAR_CORE
    rel_tol: float | None = None
    abs_tol: float | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def r_start(self) -> float:
        return float(self.r[0])

    @property
    def r_end(self) -> float:
        return float(self.r[-1])

    @property
    def u(self):
        return self.y[0]

    @property
    def du(self):
        return self.y[1]

    @property
    def v(self):
        return self.y[2]

    @property
    def dv(self):
        return self.y[3]

    def __len__(self):
        return len(self.r)

    def contains(self, radius: float) -> bool:
        slack = 1e-12 * self.r_end
        return self.r_start - slack <= radius <= self.r_end + slack

    def __call__(self, radius):
        """State (4, ...) at one radius or an array of radii."""
        rr = np.asarray(radius, dtype=float)
        lo, hi = np.min(rr), np.max(rr)
        if not (self.contains(lo) and self.contains(hi)):
            raise GridError(f"r outside grid [{self.r_start}, {self.r_end}]")
        return self.interpolant(np.clip(rr, self.r_start, self.r_end))

    def state(self, radius: float) -> RadialState:
        u, du, v, dv = self(float(radius))
        return RadialState(float(radius), float(u), float(du), float(v), float(dv))

    def samples(self) -> Iterator[RadialState]:
        for i, r in enumerate(self.r):
            yield RadialState(float(r), *(float(c) for c in self.y[:, i]))

    def to_csv(self, stream=None) -> str:
        """Write the grid as CSV columns r,u,du,v,dv (17 significant digits)."""
        out = stream if stream is not None else io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["r", "u", "du", "v", "dv"])
        for s in self.samples():
            writer.writerow([format(x, ".17g") for x in (s.r, s.u, s.du, s.v, s.dv)])
        return out.getvalue() if stream is None else ""

    def with_fields(self, **changes) -> "RadialSolution":
        changes.setdefault("_cache", {})
        return dataclasses.replace(self, **changes)


def radial_rhs(params: ProblemParams):
    n, a, p = params.n, params.a, params.p

    def rhs(r, y):
        u, du, v, dv = y
        return np.array([
            du,
            v - (n - 1) * du / r,
            dv,
            r**a * np.abs(u) ** (p - 1) * u - (n - 1) * dv / r,
        ])

    return rhs


def series_start(alpha: float, b: float, params: ProblemParams, r0: float = 1e-4) -> RadialState:
    """Leading-order regular expansion about the origin with u(0)=alpha, Δu(0)=b."""
    n, a, p = params.n, params.a, params.p
    src = abs(alpha) ** (p - 1) * alpha
    return RadialState(
        r=r0,
        u=alpha + b * r0**2 / (2 * n),
        du=b * r0 / n,
        v=b + src * r0 ** (a + 2) / ((a + 2) * (a + n)),
        dv=src * r0 ** (a + 1) / (a + n),
    )


def integrate(
    config: ShootingConfig,
    params: ProblemParams,
    start: RadialState | None = None,
    core: str = REGULAR_CORE,
) -> RadialSolution:
    """Shoot from ``start`` (default: the regular series at config.r_start)."""
    if start is None:
        start = series_start(config.alpha, config.b, params, config.r_start)
    bound = config.blowup_bound

    def blowup(r, y):
        return max(abs(y[0]), abs(y[2])) - bound

    blowup.terminal = True

    res = solve_ivp(
        radial_rhs(params),
        (start.r, config.r_max),
        start.as_array(),
        method="DOP853",
        rtol=config.rel_tol,
        atol=config.abs_tol,
        dense_output=True,
        events=blowup,
    )
    if res.status == -1:
        raise StepSizeUnderflow(f"step size underflow near r={res.t[-1]!r}: {res.message}")

    r, y = res.t, res.y
    # drop a zero-length final step that solve_ivp can leave behind an event
    keep = np.concatenate([[True], np.diff(r) > 0])
    r, y = r[keep], y[:, keep]

    if res.status == 1:
        termination, blowup_radius = BLEW_UP, float(r[-1])
    else:
        termination, blowup_radius = REACHED_HORIZON, None
    return RadialSolution(
        params=params,
        r=r,
        y=y,
        interpolant=res.sol,
        termination=termination,
        blowup_radius=blowup_radius,
        core=core,
        rel_tol=config.rel_tol,
        abs_tol=config.abs_tol,
    )


def continue_singular(
    params: ProblemParams,
    r_start: float = 0.1,
    r_max: float = 10.0,
    rel_tol: float = 1e-12,
    abs_tol: float = 1e-300,
) -> RadialSolution:
    """Integrate outward from the singular solution's data at r_start."""
    from .singular import build_singular

    sol = build_singular(params)
    u, du, v, dv = sol.state(r_start)
    config = ShootingConfig(r_start=r_start, r_max=r_max, rel_tol=rel_tol, abs_tol=abs_tol,
                            blowup_bound=1e300)
    start = RadialState(r_start, float(u), float(du), float(v), float(dv))
    return integrate(config, params, start=start, core=HOMOGENEOUS_CORE)


def from_state_function(
    params: ProblemParams,
    state_fn: Callable[[np.ndarray], np.ndarray],
    radii,
    core: str = REGULAR_CORE,
) -> RadialSolution:
    """Wrap an analytic (u, u', Δu, (Δu)') map as a RadialSolution.

    Used for exact reference data and for deliberately wrong (non-solution)
    discriminators.
    """
    r = np.asarray(radii, dtype=float)
    if np.any(np.diff(r) <= 0):
        raise GridError("grid radii must be strictly increasing")

    def interp(x):
        return np.asarray(state_fn(np.asarray(x, dtype=float)), dtype=float)

    return RadialSolution(params=params, r=r, y=interp(r), interpolant=interp, core=core)


def ode_residual(sol: RadialSolution) -> np.ndarray:
    """Per-step residual of the integral form of the radial system.

    For each grid step [r_i, r_{i+1}] compares y_{i+1} - y_i with the
    8-point Gauss-Legendre integral of the right-hand side along the dense
    interpolant, in units of the solution's own tolerances
    (abs_tol + rel_tol * |y|). A grid that really solves the equation gives
    values of order one or below.
    """
    rel = sol.rel_tol if sol.rel_tol is not None else 1e-10
    ab = sol.abs_tol if sol.abs_tol is not None else 1e-14
    rhs = radial_rhs(sol.params)
    r0, r1 = sol.r[:-1], sol.r[1:]
    half = 0.5 * (r1 - r0)
    mid = 0.5 * (r1 + r0)
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    states = sol(nodes.ravel()).reshape(4, *nodes.shape)
    f = rhs(nodes, states)
    integral = np.einsum("kij,j->ki", f, _GL_WEIGHTS) * half
    jump = sol.y[:, 1:] - sol.y[:, :-1]
    scale = ab + rel * np.maximum(np.abs(sol.y[:, 1:]), np.abs(sol.y[:, :-1]))
    # weight the rhs magnitude too, so stiff 1/r terms near the origin count
    scale = scale + rel * np.einsum("kij,j->ki", np.abs(f), _GL_WEIGHTS) * half
    return np.max(np.abs(jump - integral) / scale, axis=0)


def estimate_decay(sol: RadialSolution, tail_fraction: float = 0.5) -> float:
    """Least-squares slope of log|u| against log r over the grid tail."""
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    m = max(2, int(math.ceil(tail_fraction * len(sol.r))))
    r, u = sol.r[-m:], sol.u[-m:]
    if np.any(u == 0) or not (np.all(u > 0) or np.all(u < 0)):
        raise DecayFitError("tail contains zeros or sign changes")
    slope, _ = np.polyfit(np.log(r), np.log(np.abs(u)), 1)
    return float(slope)


def _end_sign(sol: RadialSolution) -> float:
    return float(np.sign(sol.u[-1]))


def shoot_b(
    params: ProblemParams,
    alpha: float,
    b_low: float,
    b_high: float,
    config: ShootingConfig | None = None,
    iterations: int = 60,
) -> tuple[float, RadialSolution]:
    """Bisect Δu(0) between two shots whose end values have opposite signs.

    The returned solution is the longest-lived of the final bracket. This is
    a search heuristic for near-entire solutions, not a proof of existence.
    """
    config = config or ShootingConfig()

    def shot(b):
        return integrate(dataclasses.replace(config, alpha=alpha, b=b), params)

    lo_sol, hi_sol = shot(b_low), shot(b_high)
    s_lo, s_hi = _end_sign(lo_sol), _end_sign(hi_sol)
    if s_lo == s_hi or s_lo == 0 or s_hi == 0:
        raise ValueError("shots at b_low and b_high end with the same sign")
    for _ in range(iterations):
        mid = 0.5 * (b_low + b_high)
        if mid in (b_low, b_high):
            break
        mid_sol = shot(mid)
        s_mid = _end_sign(mid_sol)
        if s_mid == 0:
            return mid, mid_sol
        if s_mid == s_lo:
            b_low, lo_sol = mid, mid_sol
        else:
            b_high, hi_sol = mid, mid_sol
    best = max((lo_sol, hi_sol), key=lambda s: s.r_end)
    return (b_low if best is lo_sol else b_high), best
