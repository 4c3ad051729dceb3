"""Named verification suites behind the ``fplab verify`` subcommand.

Each suite re-checks one target with an independent route: exact
rational identities are timed and compared with zero tolerance, counts
are checked against enumeration oracles that never share code with the
production counting paths, and the analytic bounds are sampled
empirically with generous calibrated constants.  Suites return a
SuiteResult; they never print.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from fplab.analytic import (
    asymptotic_ratio,
    fourth_moment_quadrature,
    minor_arc_scan,
)
from fplab.counting import (
    DENSE,
    MITM,
    moment4_count,
    rep_count,
    robert_sargos_count,
    scaling_fit,
    weighted_fourth_moment,
)
from fplab.exppairs import (
    C_MAX_FIVE_SUMMANDS,
    OPTIMAL_WORD_16,
    TARGET_THETA,
    TYPE_I_DEFAULT,
    TYPE_II_Q_EXPONENT,
    eval_word,
    max_c_type_I,
    type_II_theta,
)
from fplab.floortable import build_table, covering_limit, floor_pow

DEFAULT_SEED = 20260810


@dataclass
class SuiteResult:
    name: str
    ok: bool
    elapsed: float
    details: dict = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        parts = ", ".join(f"{k}={v}" for k, v in self.details.items())
        return f"[{status}] {self.name} ({self.elapsed:.2f}s) {parts}"


def _timed_best(fn, repeats: int = 5) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


# -- exact rational suites ----------------------------------------------


def verify_pairs() -> SuiteResult:
    """The three classical word evaluations, exact, in under 1 ms."""
    t0 = time.perf_counter()
    expected = {
        "AB": (Fraction(1, 6), Fraction(2, 3)),
        "AAB": (Fraction(1, 14), Fraction(11, 14)),
        OPTIMAL_WORD_16: (Fraction(33, 1550), Fraction(698, 775)),
    }
    ok = all(eval_word(w).as_tuple() == pair for w, pair in expected.items())
    runtime = _timed_best(lambda: [eval_word(w) for w in expected])
    elapsed = time.perf_counter() - t0
    return SuiteResult(
        name="pairs",
        ok=ok and runtime < 1e-3,
        elapsed=elapsed,
        details={"exact": ok, "runtime_ms": round(runtime * 1e3, 4)},
    )


def verify_threshold() -> SuiteResult:
    """Exact re-derivation of the admissible-c threshold."""
    t0 = time.perf_counter()
    pair = eval_word(OPTIMAL_WORD_16)
    c_max = max_c_type_I(pair, TYPE_I_DEFAULT)
    t2 = type_II_theta(TYPE_II_Q_EXPONENT)
    ok = c_max == C_MAX_FIVE_SUMMANDS and t2 == TARGET_THETA
    runtime = _timed_best(
        lambda: (max_c_type_I(pair, TYPE_I_DEFAULT), type_II_theta(TYPE_II_Q_EXPONENT))
    )
    elapsed = time.perf_counter() - t0
    return SuiteResult(
        name="threshold",
        ok=ok and runtime < 1e-3,
        elapsed=elapsed,
        details={
            "c_max": str(c_max),
            "type_II_theta": str(t2),
            "runtime_ms": round(runtime * 1e3, 4),
        },
    )


# -- counting oracles ----------------------------------------------------


def _enum_histograms(v: np.ndarray, w: np.ndarray, cap: int) -> dict:
    """Exact 1/2/3-fold sum histograms by explicit enumeration.

    Every ordered pair sum, and every (pair, single) extension, is
    materialized as a concrete integer and tallied; no convolution and
    no hashing, so this stays independent of both production methods.
    """
    keep = v <= cap
    v1 = v[keep].astype(np.int64)
    w1 = w[keep].astype(np.float64)
    cnt1 = np.bincount(v1, minlength=cap + 1).astype(np.int64)
    mass1 = np.bincount(v1, weights=w1, minlength=cap + 1)

    sums2 = (v1[:, None] + v1[None, :]).ravel()
    wm2 = (w1[:, None] * w1[None, :]).ravel()
    ok2 = sums2 <= cap
    sums2, wm2 = sums2[ok2], wm2[ok2]
    cnt2 = np.bincount(sums2, minlength=cap + 1).astype(np.int64)
    mass2 = np.bincount(sums2, weights=wm2, minlength=cap + 1)

    cnt3 = np.zeros(cap + 1, dtype=np.int64)
    mass3 = np.zeros(cap + 1)
    for p, wp in zip(v1.tolist(), w1.tolist()):
        s3 = sums2 + p
        ok3 = s3 <= cap
        s3k = s3[ok3]
        cnt3 += np.bincount(s3k, minlength=cap + 1).astype(np.int64)
        mass3 += np.bincount(s3k, weights=wm2[ok3] * wp, minlength=cap + 1)
    return {
        1: (cnt1, mass1),
        2: (cnt2, mass2),
        3: (cnt3, mass3),
    }


def _oracle_rep(hist: dict, N: int, s: int) -> tuple[int, float]:
    """Exact ordered rep count from the enumeration histograms."""
    if s in hist:
        cnt, mass = hist[s]
        return int(cnt[N]), float(mass[N])
    a = 3
    b = s - a
    if b not in hist or b < 1:
        raise ValueError(f"oracle supports s in {{2,3,4,5,6}}, got {s}")
    ca, ma = hist[a]
    cb, mb = hist[b]
    u = int(np.dot(ca[: N + 1], cb[N::-1]))
    wm = float(np.dot(ma[: N + 1], mb[N::-1]))
    return u, wm


def verify_counting(
    seed: int = DEFAULT_SEED,
    draws: int = 20,
    n_max: int = 10**4,
    cs=(1.2, 1.5, 2.5),
    ss=(2, 3, 5),
) -> SuiteResult:
    """Both rep_count methods against the enumeration oracle."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    checked = 0
    worst_rel = 0.0
    failures: list[str] = []
    for c in cs:
        limit = covering_limit(n_max, c)
        table = build_table(c, limit)
        hist = _enum_histograms(table.v, table.w, n_max)
        for s in ss:
            for N in rng.integers(1, n_max + 1, size=draws).tolist():
                u_ref, w_ref = _oracle_rep(hist, N, s)
                for method in (DENSE, MITM):
                    rc = rep_count(table, N, s, method=method)
                    if rc.unweighted != u_ref:
                        failures.append(
                            f"{method} c={c} s={s} N={N}: {rc.unweighted} != {u_ref}"
                        )
                        continue
                    if u_ref:
                        rel = abs(rc.weighted - w_ref) / w_ref
                        worst_rel = max(worst_rel, rel)
                        if rel > 1e-9:
                            failures.append(
                                f"{method} c={c} s={s} N={N}: weighted rel {rel:.2e}"
                            )
                    elif rc.weighted != 0.0:
                        failures.append(f"{method} c={c} s={s} N={N}: weighted != 0")
                checked += 1
    elapsed = time.perf_counter() - t0
    return SuiteResult(
        name="counting",
        ok=not failures,
        elapsed=elapsed,
        details={
            "checked": checked,
            "worst_weighted_rel": f"{worst_rel:.2e}",
            "failures": failures[:5],
        },
    )


def _brute_moment4(X: int, c: float) -> int:
    """Literal four-nested-loop count of equal floor-power pair sums."""
    vals = [floor_pow(n, c) for n in range(X + 1, 2 * X + 1)]
    count = 0
    for a in vals:
        for b in vals:
            ab = a + b
            for d in vals:
                for e in vals:
                    if ab == d + e:
                        count += 1
    return count


def verify_parseval(X: int = 50, c: float = 1.5, P: int = 2000, grid: int = 200000) -> SuiteResult:
    """Histogram fourth moment against brute force and grid quadrature."""
    t0 = time.perf_counter()
    m4 = moment4_count(X, c)
    brute = _brute_moment4(X, c)
    table = build_table(c, P)
    hist_moment = weighted_fourth_moment(table)
    quad = fourth_moment_quadrature(table, grid)
    rel = abs(quad - hist_moment) / hist_moment
    ok = m4.count == brute and rel <= 0.02
    elapsed = time.perf_counter() - t0
    return SuiteResult(
        name="parseval",
        ok=ok,
        elapsed=elapsed,
        details={
            "count": m4.count,
            "brute": brute,
            "quadrature_rel": f"{rel:.2e}",
        },
    )


def verify_scaling(
    c: float = 1.5,
    X_values=(64, 128, 256, 512, 1024, 2048),
    Y_values=(64, 128, 256, 512, 1024),
    gamma: float = 1.0,
) -> SuiteResult:
    """Empirical growth exponents of the two quadruple counts.

    Both counts should grow like size^(4-c) + size^2; the fitted slope
    must stay within 0.15 of max(4-c, 2).
    """
    t0 = time.perf_counter()
    bound = max(4.0 - c, 2.0) + 0.15
    m4_pts = [(X, moment4_count(X, c).count) for X in X_values]
    rs_pts = [(Y, robert_sargos_count(Y, c, gamma).count) for Y in Y_values]
    slope_m4 = scaling_fit(m4_pts)
    slope_rs = scaling_fit(rs_pts)
    elapsed = time.perf_counter() - t0
    return SuiteResult(
        name="scaling",
        ok=slope_m4 <= bound and slope_rs <= bound,
        elapsed=elapsed,
        details={
            "slope_moment4": round(slope_m4, 4),
            "slope_near_equal": round(slope_rs, 4),
            "bound": bound,
        },
    )


def verify_asymptotic(
    c: float = 1.2,
    s: int = 5,
    n_lo: int = 10**5,
    n_hi: int = 10**6,
    points: int = 10,
) -> SuiteResult:
    """Counts against the main-term prediction, with a convergence trend.

    Every ratio must lie in [0.6, 1.4] and the mean distance from 1
    over the upper half of the N range must be below the lower half's.
    """
    t0 = time.perf_counter()
    Ns = np.linspace(n_lo, n_hi, points).astype(np.int64).tolist()
    table = build_table(c, covering_limit(n_hi, c))
    rows = asymptotic_ratio(table, Ns, s)
    ratios = np.array([r for _, r, _, _ in rows])
    in_band = bool(((ratios >= 0.6) & (ratios <= 1.4)).all())
    half = len(ratios) // 2
    dev = np.abs(ratios - 1.0)
    trend = float(dev[half:].mean()) < float(dev[:half].mean())
    elapsed = time.perf_counter() - t0
    return SuiteResult(
        name="asymptotic",
        ok=in_band and trend,
        elapsed=elapsed,
        details={
            "ratios": [round(float(r), 4) for r in ratios],
            "in_band": in_band,
            "trend_down": trend,
        },
    )


def verify_sawtooth(
    samples: int = 10**4,
    seeds=(DEFAULT_SEED, DEFAULT_SEED + 1),
    H_values=(10, 100, 1000),
) -> SuiteResult:
    """Truncated-expansion error against 10x the classical envelope.

    For each sample the error must not exceed 10 * min(1, 1/(H*||x||));
    the worst observed ratio must agree across seeds within 2x.
    """
    t0 = time.perf_counter()
    max_ratio_per_seed = []
    per_H: dict[int, float] = {}
    ok = True
    for seed in seeds:
        rng = np.random.default_rng(seed)
        xs = rng.uniform(0.0, 1000.0, samples)
        xs = xs[np.abs(xs - np.rint(xs)) > 1e-9]
        alphas = rng.uniform(1e-6, 1.0 - 1e-6, len(xs))
        frac = xs - np.floor(xs)
        dist = np.minimum(frac, 1.0 - frac)
        seed_max = 0.0
        for H in H_values:
            err = _sawtooth_errors_varying_alpha(xs, alphas, H)
            envelope = np.minimum(1.0, 1.0 / (H * dist))
            ratios = err / envelope
            worst = float(ratios.max())
            seed_max = max(seed_max, worst)
            per_H[H] = max(per_H.get(H, 0.0), worst)
            if worst > 10.0:
                ok = False
        max_ratio_per_seed.append(seed_max)
    stability = max(max_ratio_per_seed) / min(max_ratio_per_seed)
    elapsed = time.perf_counter() - t0
    return SuiteResult(
        name="sawtooth",
        ok=ok and stability <= 2.0,
        elapsed=elapsed,
        details={
            "max_ratio_per_H": {k: round(v, 4) for k, v in per_H.items()},
            "seed_stability": round(stability, 4),
        },
    )


def _sawtooth_errors_varying_alpha(
    xs: np.ndarray, alphas: np.ndarray, H: int
) -> np.ndarray:
    """sawtooth_error with per-sample alpha, vectorized over samples."""
    frac = xs - np.floor(xs)
    base = np.exp(2j * math.pi * frac)
    k = (1.0 - np.exp(-2j * math.pi * alphas)) / (2j * math.pi)
    acc = k / alphas
    fwd = np.ones(len(xs), dtype=np.complex128)
    for h in range(1, H + 1):
        fwd = fwd * base
        acc = acc + (k / (h + alphas)) * fwd
        acc = acc + (k / (alphas - h)) * np.conj(fwd)
    target = np.exp(-2j * math.pi * alphas * frac)
    return np.abs(target - acc)


def verify_minor_arc(
    P: int = 10**5,
    c: float = 1.5,
    epsilon: float = 0.01,
    grid: int = 10**5,
) -> SuiteResult:
    """Grid scan of the prime phase sum over the minor arcs.

    Sanity checks only: the maximum must respect the trivial bound and
    the observed exponent must stay below 0.999 (the proven exponent is
    0.98549, approached only asymptotically; this is report-level).
    """
    t0 = time.perf_counter()
    table = build_table(c, P)
    report = minor_arc_scan(table, epsilon_cfg=epsilon, grid_count=grid)
    theta = table.theta()
    ok = report.max_abs <= theta * (1.0 + 1e-12) and report.theta_exponent_observed < 0.999
    elapsed = time.perf_counter() - t0
    return SuiteResult(
        name="minor-arc",
        ok=ok,
        elapsed=elapsed,
        details={
            "max_abs": round(report.max_abs, 3),
            "theta_P": round(theta, 3),
            "exponent_observed": round(report.theta_exponent_observed, 6),
            "argmax_alpha": report.argmax_alpha,
            "tau": report.tau,
        },
    )


def verify_floor_cert(
    samples: int = 10**4,
    seed: int = DEFAULT_SEED,
    n_hi: int = 10**9,
) -> SuiteResult:
    """Certified floors against a 300-bit mpmath oracle."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    ns = rng.integers(1, n_hi + 1, samples)
    cs = rng.uniform(1.0 + 1e-9, 3.0, samples)
    mismatches = 0
    with mpmath.workprec(300):
        for n, c in zip(ns.tolist(), cs.tolist()):
            ours = floor_pow(n, c)
            ref = int(mpmath.floor(mpmath.mpf(n) ** mpmath.mpf(c)))
            if ours != ref:
                mismatches += 1
    elapsed = time.perf_counter() - t0
    return SuiteResult(
        name="floor-cert",
        ok=mismatches == 0,
        elapsed=elapsed,
        details={"samples": samples, "mismatches": mismatches},
    )


SUITES = {
    "pairs": verify_pairs,
    "threshold": verify_threshold,
    "parseval": verify_parseval,
    "sawtooth": verify_sawtooth,
    "scaling": verify_scaling,
    "asymptotic": verify_asymptotic,
    "minor-arc": verify_minor_arc,
    "counting": verify_counting,
    "floor-cert": verify_floor_cert,
}
