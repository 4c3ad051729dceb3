"""Exponential sums, the sawtooth expansion, and the main term.

Evaluates the prime floor-power phase sum, its all-integer dyadic
analogue, the smooth-weight comparison sum, the truncated sawtooth
expansion of e(-alpha * frac(x)), the Gamma-factor main term, and the
minor-arc grid scan.  Phases are always reduced modulo one before the
2*pi scaling (see fplab.kernels) so large floor-power values do not
shed precision.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from fplab.counting import rep_spectrum, DEFAULT_MEM_CAP
from fplab.floortable import (
    DEFAULT_POLICY,
    FloorPowerTable,
    PrecisionPolicy,
    floor_pow,
)
from fplab.kernels import phase_sum, phase_sum_grid

TWO_PI = 2.0 * math.pi


class SumKind(enum.Enum):
    PRIME = "prime"
    PRIME_DYADIC = "prime-dyadic"
    INTEGER_WINDOW = "integer-window"
    SMOOTH = "smooth"
    VON_MANGOLDT = "von-mangoldt"


@dataclass(frozen=True)
class SumSample:
    alpha: float
    value: complex
    kind: SumKind


def prime_exp_sum(table: FloorPowerTable, alpha: float) -> complex:
    """sum over table entries of w(p) * e(floor(p^c) * alpha).

    With log-prime weights this is the central prime phase sum; at
    alpha = 0 it equals the total weight mass (chebyshev theta).
    """
    return phase_sum(table.v, table.w, float(alpha))


def prime_exp_sum_grid(table: FloorPowerTable, alphas: np.ndarray) -> np.ndarray:
    return phase_sum_grid(table.v, table.w, np.asarray(alphas, dtype=np.float64))


def window_exp_sum(
    X: int, c: float, alpha: float, policy: PrecisionPolicy = DEFAULT_POLICY
) -> complex:
    """sum over integers n in (X, 2X] of e(floor(n^c) * alpha)."""
    if X < 1:
        raise ValueError(f"X must be >= 1, got {X}")
    ns = np.arange(X + 1, 2 * X + 1, dtype=np.int64)
    v = np.fromiter(
        (floor_pow(int(n), c, policy) for n in ns), dtype=np.int64, count=len(ns)
    )
    return phase_sum(v, np.ones(len(v)), float(alpha))


def smooth_exp_sum(N: int, c: float, alpha: float) -> complex:
    """sum over m <= N of (1/c) * m^(1/c - 1) * e(m * alpha).

    The smooth comparison sum whose fifth power integrates to the main
    term; its mass at alpha = 0 is ~ N^(1/c).
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not c > 1:
        raise ValueError(f"c must be > 1, got {c}")
    m = np.arange(1, N + 1, dtype=np.int64)
    coeff = (1.0 / c) * np.power(m.astype(np.float64), 1.0 / c - 1.0)
    return phase_sum(m, coeff, float(alpha))


def fourier_coeff(h: int, alpha: float) -> complex:
    """Sawtooth expansion coefficient (1 - e(-alpha)) / (2*pi*i*(h + alpha))."""
    if h == 0 and alpha == 0.0:
        raise ValueError("(h, alpha) = (0, 0) is outside the domain")
    num = 1.0 - cmath.exp(-2j * math.pi * alpha)
    return num / (2j * math.pi * (h + alpha))


def sawtooth_partial_sum(xs: np.ndarray, alpha: float, H: int) -> np.ndarray:
    """sum over |h| <= H of c_h(alpha) * e(h * x), vectorized over x.

    Uses e(h*x) = e(h*frac(x)) and incremental powers of the base
    phase, so the cost is O(H * len(xs)) complex multiplies.
    """
    xs = np.asarray(xs, dtype=np.float64)
    frac = xs - np.floor(xs)
    base = np.exp(2j * math.pi * frac)
    k = (1.0 - cmath.exp(-2j * math.pi * alpha)) / (2j * math.pi)
    acc = np.full(len(xs), k / alpha, dtype=np.complex128)  # h = 0 term
    fwd = np.ones(len(xs), dtype=np.complex128)
    for h in range(1, H + 1):
        fwd = fwd * base
        acc += (k / (h + alpha)) * fwd
        acc += (k / (-h + alpha)) * np.conj(fwd)
    return acc


def sawtooth_error(x: float, alpha: float, H: int) -> float:
    """|e(-alpha*frac(x)) - truncated expansion| at a single point.

    The expansion is invalid at integer x (the target has a jump
    there), so integer x raises.
    """
    if H < 3:
        raise ValueError(f"H must be >= 3, got {H}")
    if float(x).is_integer():
        raise ValueError(f"x must not be an integer, got {x}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return float(sawtooth_error_batch(np.array([x]), alpha, H)[0])


def sawtooth_error_batch(xs: np.ndarray, alpha: float, H: int) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    frac = xs - np.floor(xs)
    target = np.exp(-2j * math.pi * alpha * frac)
    return np.abs(target - sawtooth_partial_sum(xs, alpha, H))


@dataclass(frozen=True)
class MainTermParams:
    """Inputs of the predicted count Gamma(1+1/c)^s / Gamma(s/c) * N^(s/c-1).

    c = 1 is admitted for formula evaluation (the limit point where the
    prediction degenerates to the all-integer count); the counting
    theorems themselves live at c > 1.
    """

    N: int
    c: float
    s: int

    def __post_init__(self):
        if self.s < 2:
            raise ValueError(f"s must be >= 2, got {self.s}")
        if not self.c >= 1:
            raise ValueError(f"c must be >= 1, got {self.c}")
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")


def main_term(params: MainTermParams) -> float:
    """Evaluate the main-term prediction via log-Gamma (rel. err ~1e-14)."""
    N, c, s = params.N, params.c, params.s
    log_val = (
        s * math.lgamma(1.0 + 1.0 / c)
        - math.lgamma(s / c)
        + (s / c - 1.0) * math.log(N)
    )
    return math.exp(log_val)


@dataclass(frozen=True)
class ArcScanReport:
    P: int
    c: float
    tau: float
    grid_count: int
    grid_rule: str
    max_abs: float
    argmax_alpha: float
    theta_exponent_observed: float


def minor_arc_tau(P: int, c: float, epsilon_cfg: float) -> float:
    return float(P) ** (1.0 - c - epsilon_cfg)


def minor_arc_scan(
    table: FloorPowerTable,
    epsilon_cfg: float = 0.01,
    grid_count: int = 10**5,
) -> ArcScanReport:
    """Scan |prime_exp_sum| on a uniform grid over (tau, 1/2].

    Conjugate symmetry covers (1/2, 1 - tau), so only the left half is
    scanned.  The grid is alpha_j = tau + (1/2 - tau) * j / m for
    j = 1..m; doubling m refines the same nested family.
    """
    if grid_count < 10**3:
        raise ValueError(f"grid_count must be >= 1000, got {grid_count}")
    P, c = table.limit, table.c
    tau = minor_arc_tau(P, c, epsilon_cfg)
    j = np.arange(1, grid_count + 1, dtype=np.float64)
    alphas = tau + (0.5 - tau) * (j / grid_count)
    vals = np.abs(prime_exp_sum_grid(table, alphas))
    imax = int(np.argmax(vals))
    max_abs = float(vals[imax])
    return ArcScanReport(
        P=P,
        c=c,
        tau=tau,
        grid_count=grid_count,
        grid_rule="uniform over (tau, 1/2], conjugate half omitted",
        max_abs=max_abs,
        argmax_alpha=float(alphas[imax]),
        theta_exponent_observed=math.log(max_abs) / math.log(P),
    )


def fourth_moment_quadrature(table: FloorPowerTable, grid_count: int) -> float:
    """Mean of |prime_exp_sum|^4 over the uniform grid j/M on [0, 1).

    |S|^4 is a trigonometric polynomial with frequencies bounded by
    2 * max(v); the grid mean is exact (up to roundoff) as soon as
    M exceeds that bound.
    """
    alphas = np.arange(grid_count, dtype=np.float64) / grid_count
    vals = np.abs(prime_exp_sum_grid(table, alphas))
    return float(np.mean(vals**4))


def major_arc_fourth_moment(
    table: FloorPowerTable, epsilon_cfg: float = 0.01, grid_count: int = 4096
) -> float:
    """Trapezoid estimate of the restricted moment on (-tau, tau).

    Report-only: the restricted fourth moment has no counting identity,
    so this is a numerical observation, never an asserted bound.
    """
    tau = minor_arc_tau(table.limit, table.c, epsilon_cfg)
    alphas = np.linspace(0.0, tau, grid_count)
    vals = np.abs(prime_exp_sum_grid(table, alphas)) ** 4
    return 2.0 * float(np.trapezoid(vals, alphas))


def asymptotic_ratio(
    table: FloorPowerTable,
    N_list,
    s: int,
    mem_cap: int = DEFAULT_MEM_CAP,
) -> list[tuple[int, float, float, float]]:
    """(N, ratio, weighted count, main term) for each requested N.

    ratio = weighted representation count / main-term prediction,
    computed from one FFT spectrum pass over max(N_list).
    """
    N_list = sorted(int(N) for N in N_list)
    spectrum = rep_spectrum(table, s, N_list[-1], mem_cap=mem_cap, unweighted=False)
    out = []
    for N in N_list:
        weighted = float(spectrum.weighted[N])
        predicted = main_term(MainTermParams(N=N, c=table.c, s=s))
        out.append((N, weighted / predicted, weighted, predicted))
    return out
