"""Exact representation counting over floor-power tables.

Counts ordered tuples (p_1, ..., p_s) with floor(p_1^c) + ... +
floor(p_s^c) = N, both unweighted and weighted by the product of the
log weights, plus the fourth-moment equal-sum counts and the
near-equal-sum counts behind the moment estimates.  Two independent
strategies are provided and must agree exactly: dense convolution of
the value histogram, and a meet-in-the-middle hash join of partial-sum
maps.  Disagreement is a defect, never an error state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
import numpy as np

from fplab.floortable import (
    DEFAULT_POLICY,
    FloorPowerTable,
    PrecisionPolicy,
    floor_pow,
)

DEFAULT_MEM_CAP = 8 * 10**9

DENSE = "dense-convolution"
MITM = "meet-in-the-middle"

# FFT outputs must round to integers at least this cleanly, or the
# count is recomputed with exact integer convolution.
_FFT_INT_GUARD = 1e-3

# Big-integer exact convolution stops being affordable past this output
# size (cost grows ~ bytes^1.6; 2 MB is a few seconds).
_KRONECKER_BYTE_CAP = 2_000_000


class MemoryCapError(RuntimeError):
    """A buffer estimate exceeded the configured memory cap."""


class TableCoverageError(ValueError):
    """The table's prime limit is too small for the requested N."""


@dataclass(frozen=True)
class RepresentationCount:
    N: int
    s: int
    weighted: float
    unweighted: int
    method: str

    def __post_init__(self):
        if self.unweighted < 0 or self.weighted < 0:
            raise ValueError("counts must be nonnegative")
        if (self.unweighted == 0) != (self.weighted == 0.0):
            raise ValueError("weighted and unweighted must vanish together")


@dataclass(frozen=True)
class MomentCount:
    X: int
    c: float
    count: int
    weighted: float | None

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be nonnegative")


@dataclass(frozen=True)
class NearEqualCount:
    Y: int
    c: float
    gamma: float
    count: int


def _check_mem(estimate: int, mem_cap: int, what: str) -> None:
    if estimate > mem_cap:
        raise MemoryCapError(
            f"{what} needs ~{estimate} bytes, exceeding the cap of {mem_cap}"
        )


def _histograms(table: FloorPowerTable, cap: int) -> tuple[np.ndarray, np.ndarray]:
    """(unweighted, weighted) histograms of floor-power values <= cap."""
    mask = table.v <= cap
    vals = table.v[mask]
    f_u = np.bincount(vals, minlength=cap + 1).astype(np.int64)
    f_w = np.bincount(vals, weights=table.w[mask], minlength=cap + 1)
    return f_u, f_w


def _conv_at(a: np.ndarray, b: np.ndarray, n: int):
    """Coefficient n of the linear convolution a * b."""
    lo = max(0, n - (len(b) - 1))
    hi = min(n, len(a) - 1)
    if lo > hi:
        return a.dtype.type(0)
    return np.dot(a[lo : hi + 1], b[n - hi : n - lo + 1][::-1])


def _fft_len(n: int) -> int:
    return 1 << max(0, (n - 1)).bit_length()


def _kronecker_pow(f_u: np.ndarray, s: int) -> tuple[bytes, int]:
    """Exact s-fold self-convolution of an integer histogram.

    Encodes the histogram as a big integer in base 2^(8*word) and takes
    the s-th power; coefficients never collide across word boundaries
    because each is bounded by (sum f)^s.  Returns the little-endian
    byte string of the power and the word size in bytes.
    """
    total = int(f_u.sum())
    bound_bits = max(1, total.bit_length()) * s + 1
    word = 8 if bound_bits <= 63 else 16
    n = len(f_u)
    buf = bytearray(n * word)
    nonzero = np.flatnonzero(f_u)
    for i in nonzero.tolist():
        buf[i * word : i * word + 8] = int(f_u[i]).to_bytes(8, "little")
    x = int.from_bytes(bytes(buf), "little")
    y = x**s
    out_words = s * (n - 1) + 1
    return y.to_bytes(out_words * word, "little"), word


def _decode_words(raw: bytes, word: int) -> np.ndarray:
    if word == 8:
        return np.frombuffer(raw, dtype="<u8").astype(np.int64)
    pairs = np.frombuffer(raw, dtype="<u8").reshape(-1, 2)
    if (pairs[:, 1] != 0).any():
        raise OverflowError("convolution coefficient exceeds int64")
    return pairs[:, 0].astype(np.int64)


def _dense_unweighted(f_u: np.ndarray, s: int, n_max: int) -> np.ndarray:
    """Exact unweighted s-fold convolution, coefficients 0..n_max.

    FFT first; if any coefficient is farther than the guard from an
    integer, recompute with exact integer (big-number) convolution.
    """
    L = _fft_len(s * (len(f_u) - 1) + 1)
    spec = np.fft.rfft(f_u.astype(np.float64), L)
    conv = np.fft.irfft(spec**s, L)[: n_max + 1]
    rounded = np.rint(conv)
    if np.abs(conv - rounded).max() < _FFT_INT_GUARD:
        return rounded.astype(np.int64)
    total = int(f_u.sum())
    word = 8 if max(1, total.bit_length()) * s + 1 <= 63 else 16
    if (s * (len(f_u) - 1) + 1) * word > _KRONECKER_BYTE_CAP:
        raise MemoryCapError(
            "exact unweighted convolution at this size is past the big-integer "
            "budget; reduce N_max or use the weighted-only spectrum"
        )
    raw, word = _kronecker_pow(f_u, s)
    return _decode_words(raw, word)[: n_max + 1]


def _dense_weighted_at(f_w: np.ndarray, s: int, N: int) -> float:
    """Weighted s-fold convolution read at index N, by direct convolution.

    Direct (quadratic) convolution keeps the rounding error relative to
    the coefficient itself, which FFT does not: FFT noise is absolute
    across the whole output and would swamp small coefficients.
    """
    if s == 2:
        return float(_conv_at(f_w, f_w, N))
    h2 = np.convolve(f_w, f_w)[: N + 1]
    if s == 3:
        return float(_conv_at(h2, f_w, N))
    if s == 4:
        return float(_conv_at(h2, h2, N))
    h4 = np.convolve(h2, h2)[: N + 1]
    if s == 5:
        return float(_conv_at(h4, f_w, N))
    return float(_conv_at(h4, h2, N))


def _partial_sums(
    v: np.ndarray, w: np.ndarray, k: int, cap: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All k-fold ordered partial sums <= cap as (sums, counts, mass).

    counts are exact (integer-valued float64 stays exact below 2^53,
    then cast); mass carries the product-of-weights totals.
    """
    if cap < 0:
        empty = np.empty(0)
        return empty.astype(np.int64), empty.astype(np.int64), empty
    keys = v[v <= cap].astype(np.int64)
    cnt = np.ones(len(keys))
    mass = w[v <= cap].astype(np.float64)
    for _ in range(k - 1):
        sums = (keys[:, None] + v[None, :]).ravel()
        c_all = np.broadcast_to(cnt[:, None], (len(keys), len(v))).ravel()
        m_all = (mass[:, None] * w[None, :]).ravel()
        ok = sums <= cap
        sums = sums[ok]
        if len(sums) == 0:
            empty = np.empty(0)
            return empty.astype(np.int64), empty.astype(np.int64), empty
        dense_c = np.bincount(sums, weights=c_all[ok])
        dense_m = np.bincount(sums, weights=m_all[ok])
        keys = np.flatnonzero(dense_c).astype(np.int64)
        cnt = dense_c[keys]
        mass = dense_m[keys]
    return keys, np.rint(cnt).astype(np.int64), mass


def _mitm_count(table: FloorPowerTable, N: int, s: int) -> tuple[int, float]:
    """Meet-in-the-middle: join hash maps of a-fold and b-fold sums."""
    a = (s + 1) // 2
    b = s - a
    if len(table.v) == 0:
        return 0, 0.0
    vmin = int(table.v[0])
    ka, ca, ma = _partial_sums(table.v, table.w, a, N - b * vmin)
    kb, cb, mb = _partial_sums(table.v, table.w, b, N - a * vmin)
    bmap = {int(k): (int(c), float(m)) for k, c, m in zip(kb, cb, mb)}
    count = 0
    mass = 0.0
    for k, c, m in zip(ka.tolist(), ca.tolist(), ma.tolist()):
        hit = bmap.get(N - k)
        if hit is not None:
            count += c * hit[0]
            mass += m * hit[1]
    return count, mass


def _require(table: FloorPowerTable, N: int, s: int, closed_table: bool) -> None:
    if not 2 <= s <= 6:
        raise ValueError(f"s must be in 2..6, got {s}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if closed_table:
        return
    # a prime beyond the limit can join a solution only if its value
    # plus s-1 copies of the smallest value still fits under N
    next_p = int(gmpy2.next_prime(table.limit))
    vmin = floor_pow(2, table.c)
    if floor_pow(next_p, table.c) + (s - 1) * vmin <= N:
        raise TableCoverageError(
            f"table with limit {table.limit} does not cover N={N} for s={s} "
            f"at c={table.c}"
        )


def rep_count(
    table: FloorPowerTable,
    N: int,
    s: int,
    method: str = DENSE,
    mem_cap: int = DEFAULT_MEM_CAP,
    closed_table: bool = False,
) -> RepresentationCount:
    """Ordered representation count of N as s floor-powers from the table.

    Returns the exact ordered-tuple count and the sum over solutions of
    the product of entry weights.  By default the table must be large
    enough that no prime beyond its limit could contribute a solution;
    ``closed_table=True`` instead counts representations by table
    entries only, with no coverage requirement.
    """
    _require(table, N, s, closed_table)
    if method == DENSE:
        _check_mem(10 * 8 * (N + 1), mem_cap, "dense convolution")
        f_u, f_w = _histograms(table, N)
        unweighted = int(_dense_unweighted(f_u, s, N)[N])
        weighted = _dense_weighted_at(f_w, s, N)
    elif method == MITM:
        _check_mem(6 * 8 * (N + 1) + 24 * len(table.v), mem_cap, "partial-sum maps")
        unweighted, weighted = _mitm_count(table, N, s)
    else:
        raise ValueError(f"unknown method {method!r}")
    if unweighted == 0:
        weighted = 0.0
    return RepresentationCount(
        N=N, s=s, weighted=weighted, unweighted=unweighted, method=method
    )


class RepSpectrum:
    """Counts for every N <= N_max, backed by flat arrays.

    ``unweighted`` is None when the spectrum was computed weighted-only
    (exact integer counts become too expensive at large N_max and are
    not always needed).
    """

    def __init__(self, s: int, unweighted: np.ndarray | None, weighted: np.ndarray):
        self.s = s
        self.unweighted = unweighted
        self.weighted = weighted

    def __len__(self) -> int:
        return len(self.weighted)

    def __getitem__(self, N: int) -> RepresentationCount:
        if self.unweighted is None:
            raise ValueError("weighted-only spectrum has no per-N exact counts")
        u = int(self.unweighted[N])
        w = float(self.weighted[N]) if u else 0.0
        return RepresentationCount(N=N, s=self.s, weighted=w, unweighted=u, method=DENSE)


def rep_spectrum(
    table: FloorPowerTable,
    s: int,
    N_max: int,
    mem_cap: int = DEFAULT_MEM_CAP,
    unweighted: bool = True,
    closed_table: bool = False,
) -> RepSpectrum:
    """All rep counts up to N_max via one s-fold FFT convolution."""
    _require(table, N_max, s, closed_table)
    L = _fft_len(s * N_max + 1)
    _check_mem(6 * 16 * L, mem_cap, "spectrum FFT buffers")
    f_u, f_w = _histograms(table, N_max)
    spec = np.fft.rfft(f_w, L)
    weighted = np.fft.irfft(spec**s, L)[: N_max + 1]
    np.maximum(weighted, 0.0, out=weighted)
    if not unweighted:
        return RepSpectrum(s=s, unweighted=None, weighted=weighted)
    counts = _dense_unweighted(f_u, s, N_max)
    weighted[counts == 0] = 0.0
    return RepSpectrum(s=s, unweighted=counts, weighted=weighted)


def _int_square_sum(g: np.ndarray) -> int:
    """Exact sum of squares of an integer histogram."""
    total = int(g.sum())
    if total and 2 * (total.bit_length()) + 1 >= 63:
        return int(sum(int(x) * int(x) for x in g[g > 0]))
    return int(np.dot(g, g))


def moment4_count(
    X: int,
    c: float,
    prime_restricted: bool = False,
    table: FloorPowerTable | None = None,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    mem_cap: int = DEFAULT_MEM_CAP,
) -> MomentCount:
    """Quadruples n_i in (X, 2X] with equal floor-power pair-sums.

    Histogram the pair sums g[m] and return sum g[m]^2, which equals the
    number of ordered solutions of v(n1) + v(n2) = v(n3) + v(n4).  With
    prime_restricted the n_i run over primes from the table and the
    log-weighted analogue sum |g_w[m]|^2 is returned alongside.
    """
    if X < 2:
        raise ValueError(f"X must be >= 2, got {X}")
    if prime_restricted:
        if table is None:
            raise ValueError("prime_restricted needs a table covering 2X")
        if table.limit < 2 * X:
            raise TableCoverageError(f"table limit {table.limit} < 2X = {2 * X}")
        sel = (table.p > X) & (table.p <= 2 * X)
        v = table.v[sel]
        w = table.w[sel]
    else:
        ns = np.arange(X + 1, 2 * X + 1)
        v = np.fromiter(
            (floor_pow(int(n), c, policy) for n in ns), dtype=np.int64, count=len(ns)
        )
        w = None
    if len(v) == 0:
        return MomentCount(X=X, c=c, count=0, weighted=0.0 if prime_restricted else None)

    _check_mem(16 * len(v) ** 2 + 16 * int(2 * v.max()), mem_cap, "pair-sum histogram")
    sums = (v[:, None] + v[None, :]).ravel()
    g = np.bincount(sums)
    count = _int_square_sum(g)
    weighted = None
    if prime_restricted:
        g_w = np.bincount(sums, weights=(w[:, None] * w[None, :]).ravel())
        weighted = float(np.dot(g_w, g_w))
    return MomentCount(X=X, c=c, count=count, weighted=weighted)


def weighted_fourth_moment(table: FloorPowerTable) -> float:
    """sum over m of g_w[m]^2 for pair sums over the whole table.

    Equals the mean of |S(alpha)|^4 over [0, 1) for the table's prime
    exponential sum, by orthogonality of the phases.
    """
    v, w = table.v, table.w
    sums = (v[:, None] + v[None, :]).ravel()
    g_w = np.bincount(sums, weights=(w[:, None] * w[None, :]).ravel())
    return float(np.dot(g_w, g_w))


def robert_sargos_count(Y: int, c: float, gamma: float) -> NearEqualCount:
    """Quadruples in (Y, 2Y] with |n1^c + n2^c - n3^c - n4^c| < gamma.

    Pair sums are formed in extended precision (x86 long double, 64-bit
    mantissa), keeping gamma down to ~1e-12 meaningful at desk scale;
    the strict-inequality window count is a sorted two-sided rank query.
    """
    if Y < 1:
        raise ValueError(f"Y must be >= 1, got {Y}")
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    ns = np.arange(Y + 1, 2 * Y + 1, dtype=np.int64)
    vals = np.power(ns.astype(np.longdouble), np.longdouble(c))
    sums = np.sort((vals[:, None] + vals[None, :]).ravel())
    g = np.longdouble(gamma)
    hi = np.searchsorted(sums, sums + g, side="left")
    lo = np.searchsorted(sums, sums - g, side="right")
    return NearEqualCount(Y=Y, c=c, gamma=gamma, count=int((hi - lo).sum()))


def scaling_fit(points) -> float:
    """Least-squares slope of log(count) against log(size)."""
    pts = list(points)
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    sizes = np.array([p[0] for p in pts], dtype=np.float64)
    counts = np.array([p[1] for p in pts], dtype=np.float64)
    if not (np.diff(sizes) > 0).all():
        raise ValueError("sizes must be strictly increasing")
    slope, _ = np.polyfit(np.log(sizes), np.log(counts), 1)
    return float(slope)
