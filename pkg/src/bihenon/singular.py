"""The homogeneous singular solution u_s(r) = ℓ2^{1/(p-1)} r^{-β}."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoSingularSolution
from .params import ProblemParams, derive_scalars, hardy_rellich_constant


@dataclass(frozen=True)
class SingularSolution:
    params: ProblemParams
    amplitude: float
    decay: float

    def __call__(self, r):
        return self.amplitude * np.power(r, -self.decay)

    def state(self, r):
        """(u, u', Δu, (Δu)') at radius r, from the radial power rule."""
        r = np.asarray(r, dtype=float)
        n, s = self.params.n, -self.decay
        lap = s * (s + n - 2)
        A = self.amplitude
        return np.array([
            A * r**s,
            A * s * r ** (s - 1),
            A * lap * r ** (s - 2),
            A * lap * (s - 2) * r ** (s - 3),
        ])


def ell2_typeset_form(params: ProblemParams) -> float:
    """ℓ2 written as β(β+2)(β+4-n)(β+2-n)."""
    b, n = params.beta, params.n
    return b * (b + 2) * (b + 4 - n) * (b + 2 - n)


def build_singular(params: ProblemParams) -> SingularSolution:
    ell2 = derive_scalars(params).ell2
    if not ell2 > 0:
        raise NoSingularSolution(f"no singular solution: ℓ2 ≤ 0 (ℓ2 = {ell2!r})")
    return SingularSolution(params, ell2 ** (1.0 / (params.p - 1)), params.beta)


def _power_laplacian_factor(s: float, n: int) -> float:
    # Δ(r^s) = s (s + n - 2) r^{s-2}
    return s * (s + n - 2)


def singular_residual(sol: SingularSolution, r: float) -> float:
    """Signed Δ²u_s - r^a |u_s|^{p-1} u_s at radius r.

    Δ² is applied with the power rule twice, so the only error is rounding.
    """
    n, a, p = sol.params.n, sol.params.a, sol.params.p
    s = -sol.decay
    lhs = sol.amplitude * _power_laplacian_factor(s, n) * _power_laplacian_factor(s - 2, n) * r ** (s - 4)
    u = sol.amplitude * r**s
    rhs = r**a * abs(u) ** (p - 1) * u
    return lhs - rhs


def residual_scale(sol: SingularSolution, r: float) -> float:
    """Natural magnitude of either side of the equation at r."""
    return sol.amplitude**sol.params.p * r ** (-sol.decay - 4)


def is_stable_singular(params: ProblemParams) -> bool:
    build_singular(params)
    return params.p * derive_scalars(params).ell2 <= hardy_rellich_constant(params.n)
