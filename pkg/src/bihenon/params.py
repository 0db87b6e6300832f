"""Problem parameters, derived constants and critical exponents for
Δ²u = |x|^a |u|^{p-1} u in dimension n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameters, RootNotFound
from .roots import bisect_scalar, largest_real_root

#: upper end of the search bracket for the Joseph-Lundgren-type root
JL_SEARCH_BOUND = 1e3
#: relative tolerance for calling p equal to the Sobolev exponent
CRITICAL_RTOL = 1e-12

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL_BELOW_JL = "supercritical_below_JL"
AT_OR_ABOVE_JL = "at_or_above_JL"


@dataclass(frozen=True)
class ProblemParams:
    n: int
    a: float
    p: float

    def __post_init__(self):
        if int(self.n) != self.n:
            raise InvalidParameters(f"dimension must be an integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "p", float(self.p))
        if self.n < 5:
            raise InvalidParameters(f"need n >= 5, got n={self.n}")
        if not self.a >= 0:
            raise InvalidParameters(f"need a >= 0, got a={self.a}")
        if not self.p > 1:
            raise InvalidParameters(f"need p > 1, got p={self.p}")

    @property
    def beta(self) -> float:
        return (4 + self.a) / (self.p - 1)


@dataclass(frozen=True)
class DerivedScalars:
    beta: float
    rho: float
    gamma: float
    ell1: float
    ell2: float
    c: float
    p_crit: float
    grad_threshold: float
    mass_threshold: float


@dataclass(frozen=True)
class Regime:
    tag: str
    p_crit: float
    p_jl: float  # math.inf when there is no finite threshold


def _check_dim(n, a):
    if n < 5:
        raise InvalidParameters(f"need n >= 5, got n={n}")
    if a < 0:
        raise InvalidParameters(f"need a >= 0, got a={a}")


def sobolev_critical(n: int, a: float) -> float:
    _check_dim(n, a)
    return (n + 4 + 2 * a) / (n - 4)


def hardy_rellich_constant(n: int) -> float:
    return n**2 * (n - 4) ** 2 / 16


def gradient_threshold(n: int) -> float:
    return n * (n - 4) / 2


def ell_values(n: int, beta: float) -> tuple[float, float]:
    """ℓ1, ℓ2 of the angular equation for decay exponent ``beta``."""
    ell1 = (beta + 2) * (n - 4 - beta) + beta * (n - 2 - beta)
    ell2 = beta * (beta + 2) * (n - 4 - beta) * (n - 2 - beta)
    return ell1, ell2


def derive_scalars(params: ProblemParams) -> DerivedScalars:
    n, a, p = params.n, params.a, params.p
    beta = params.beta
    rho = n - 1 - (8 + 2 * a) / (p - 1)
    gamma = beta * (beta - n + 2)
    ell1, ell2 = ell_values(n, beta)
    return DerivedScalars(
        beta=beta,
        rho=rho,
        gamma=gamma,
        ell1=ell1,
        ell2=ell2,
        c=2 * (rho - gamma - 1),
        p_crit=sobolev_critical(n, a),
        grad_threshold=gradient_threshold(n),
        mass_threshold=hardy_rellich_constant(n),
    )


def g_value(n: int, a: float, p: float) -> float:
    b = (4 + a) / (p - 1)
    return p * (b + 2) * (n - 4 - b) + p * b * (n - 2 - b)


def f_value(n: int, a: float, p: float) -> float:
    b = (4 + a) / (p - 1)
    return p * b * (b + 2) * (n - 4 - b) * (n - 2 - b)


def f_prime_value(n: int, a: float, p: float) -> float:
    b = (4 + a) / (p - 1)
    first = 2 * p * (4 + a) ** 2 / (p - 1) ** 3 * (b + 2) * (n - 3 - b)
    second = (4 + a) / (p - 1) ** 2 * (6 + a + (8 + 2 * a) / (p - 1)) * (n - 4 - b) * (n - 2 - b)
    return first - second


def gf_values(params: ProblemParams) -> tuple[float, float, float]:
    """(g, f, f') at the parameter triple."""
    n, a, p = params.n, params.a, params.p
    return g_value(n, a, p), f_value(n, a, p), f_prime_value(n, a, p)


def threshold_cubic(a: float) -> list[float]:
    return [1.0, -4.0, -32.0 * (a + 4), 64.0 * a + 256.0]


def n_threshold(a: float) -> int:
    """Integer part of the largest real root of the dimension cubic."""
    if a < 0:
        raise InvalidParameters(f"need a >= 0, got a={a}")
    # value at x = 4 is -64a - 256 < 0, so the largest root lies above 4
    bound = 16.0 + 64.0 * (a + 4)
    return math.floor(largest_real_root(threshold_cubic(a), bound, lower=4.0))


def jl_quartic(n: int, a: float, typeset: bool = False) -> list[float]:
    """Coefficients (x⁴ first) of the quartic whose largest root is p(n, a).

    The default form is 16 (x-1)⁴ (n²(n-4)²/16 - f(x)) expanded. With
    ``typeset=True`` the x³ bracket carries ``+8n³`` instead of ``-8n³``;
    that variant disagrees with f by 64 n³ x³ and is kept only so the
    discrepancy stays testable.
    """
    s = 8 if typeset else -8
    a2, a3 = a * a, a**3
    c4 = n**4 - 8 * n**3 - 16 * (2 * a + 7) * n**2 + 192 * (a + 4) * n - 256 * (a + 4)
    c3 = -4 * (
        n**4
        + s * n**3
        + 4 * (a2 + 2 * a - 4) * n**2
        - 8 * (5 * a2 + 22 * a + 8) * n
        + 16 * (5 * a2 + 28 * a + 32)
    )
    c2 = 2 * (
        3 * n**4
        - 24 * n**3
        + 16 * (a2 + 5 * a + 7) * n**2
        + 16 * (a3 + 2 * a2 - 14 * a - 24) * n
        - 64 * (a3 + 7 * a2 + 14 * a + 8)
    )
    c1 = -4 * (
        n**4
        - 8 * n**3
        + 4 * (a2 + 6 * a + 12) * n**2
        + 8 * (a3 + 7 * a2 + 14 * a + 8) * n
        + 4 * a * (a3 + 8 * a2 + 20 * a + 16)
    )
    c0 = n**4 - 8 * n**3 + 16 * n**2
    return [float(c) for c in (c4, c3, c2, c1, c0)]


def jl_exponent(n: int, a: float, bound: float = JL_SEARCH_BOUND) -> float:
    """p_a(n): ``math.inf`` when n <= n(a), else the quartic's largest root."""
    p_crit = sobolev_critical(n, a)
    if n <= n_threshold(a):
        return math.inf
    try:
        root = largest_real_root(jl_quartic(n, a), bound, lower=p_crit)
    except RootNotFound as exc:
        raise RootNotFound("quartic root not found above critical exponent") from exc
    if not root > p_crit:
        raise RootNotFound("quartic root not found above critical exponent")
    return root


def jl_exponent_bisection(n: int, a: float, bound: float = JL_SEARCH_BOUND) -> float:
    """Independent route to p_a(n): bisect f(p) = n²(n-4)²/16 above p_crit."""
    p_crit = sobolev_critical(n, a)
    target = hardy_rellich_constant(n)
    return bisect_scalar(lambda p: f_value(n, a, p) - target, p_crit, bound, tol=1e-13)


def classify(params: ProblemParams) -> Regime:
    p_crit = sobolev_critical(params.n, params.a)
    p_jl = jl_exponent(params.n, params.a)
    p = params.p
    if abs(p - p_crit) <= CRITICAL_RTOL * p_crit:
        tag = CRITICAL
    elif p < p_crit:
        tag = SUBCRITICAL
    elif p < p_jl:
        tag = SUPERCRITICAL_BELOW_JL
    else:
        tag = AT_OR_ABOVE_JL
    return Regime(tag=tag, p_crit=p_crit, p_jl=p_jl)
