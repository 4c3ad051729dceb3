"""Certified floor-power tables over primes.

The substrate shared by the counting and analytic engines: all primes
p <= P together with exact values v = floor(p^c) and weights w.  The
exponent c is taken at face value as the binary64 it arrives as; every
floor is certified by adaptive-precision interval arithmetic (gmpy2
with directed rounding), never trusted to hardware floats, because a
single off-by-one in v corrupts every downstream count.
"""

from __future__ import annotations

import enum
import math
import os
import struct
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

_INT64_MAX = 2**63 - 1

# Exact rational tie-breaks n^(a/b) ? m are feasible only while the
# integer powers stay this size; beyond it the precision ladder is the
# only tool and genuinely ambiguous inputs raise.
_EXACT_TIEBREAK_BIT_BUDGET = 1 << 24


class FloorCertificationError(ArithmeticError):
    """floor(n^c) could not be certified within the precision policy."""

    def __init__(self, n: int, c: float, bits: int, lo, hi):
        self.n = n
        self.c = c
        self.bits = bits
        self.lo = lo
        self.hi = hi
        super().__init__(
            f"floor({n}^{c!r}) ambiguous at {bits} bits: enclosure [{lo}, {hi}]"
        )


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working-precision ladder for certified floors.

    Precision starts at initial_bits and doubles until the enclosure of
    n^c contains no integer, up to max_bits.  ambiguity_margin, when
    positive, additionally requires the enclosure to clear the nearest
    integers by that absolute distance.
    """

    initial_bits: int = 128
    max_bits: int = 4096
    ambiguity_margin: float = 0.0

    def __post_init__(self):
        if self.initial_bits < 64:
            raise ValueError(f"initial_bits must be >= 64, got {self.initial_bits}")
        if self.max_bits < self.initial_bits:
            raise ValueError("max_bits must be >= initial_bits")


DEFAULT_POLICY = PrecisionPolicy()


def policy_from_env() -> PrecisionPolicy:
    """Default policy, with FPL_PRECISION_BITS overriding initial_bits."""
    bits = os.environ.get("FPL_PRECISION_BITS")
    if bits is None:
        return DEFAULT_POLICY
    return PrecisionPolicy(initial_bits=max(64, int(bits)))


def _pow_enclosure(n: int, c: float, bits: int):
    """Rigorous enclosure [lo, hi] of n^c via exp(c*log n), n >= 2, c > 0.

    Each operation is correctly rounded in the stated direction, and the
    chain log -> multiply -> exp is monotone for n >= 2, c > 0, so the
    directed evaluations bound the true value.
    """
    with gmpy2.context(precision=bits, round=gmpy2.RoundDown):
        lo = gmpy2.exp(gmpy2.mul(gmpy2.mpfr(c), gmpy2.log(n)))
    with gmpy2.context(precision=bits, round=gmpy2.RoundUp):
        hi = gmpy2.exp(gmpy2.mul(gmpy2.mpfr(c), gmpy2.log(n)))
    return lo, hi


def _mpfr_floor(x) -> int:
    """Exact floor of an mpfr, independent of the ambient context precision."""
    num, den = x.as_integer_ratio()
    return int(num // den)


def _exact_floor_tiebreak(n: int, c: float, m: int) -> int | None:
    """Decide floor(n^c) exactly when the enclosure straddles integer m.

    c is an exact binary rational a/b, so n^c compares to m through the
    integer comparison n^a ? m^b.  Returns the floor, or None when the
    integer powers would be too large to materialize.
    """
    frac = Fraction(c)
    a, b = frac.numerator, frac.denominator
    cost = a * n.bit_length() + b * max(m, 2).bit_length()
    if cost > _EXACT_TIEBREAK_BIT_BUDGET:
        return None
    lhs = n**a
    rhs = m**b
    if lhs == rhs:
        return m
    return m - 1 if lhs < rhs else m


def floor_pow(n: int, c: float, policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    """Certified floor(n^c) for integer n >= 1 and real c > 0.

    The result m satisfies m <= n^c < m + 1 with c read as its exact
    binary64 value.  Exact integer powers (c integral, or n^c rational
    with small exact representation) are resolved exactly; everything
    else goes through the interval ladder.  Raises
    FloorCertificationError only if max_bits is exhausted and the exact
    tie-break is infeasible.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not c > 0:
        raise ValueError(f"c must be > 0, got {c}")
    if n == 1:
        return 1
    if float(c).is_integer():
        return n ** int(c)

    bits = policy.initial_bits
    while True:
        lo, hi = _pow_enclosure(n, c, bits)
        flo = _mpfr_floor(lo)
        fhi = _mpfr_floor(hi)
        if flo == fhi:
            if policy.ambiguity_margin > 0:
                clear = (lo - flo >= policy.ambiguity_margin) and (
                    flo + 1 - hi >= policy.ambiguity_margin
                )
                if not clear and bits < policy.max_bits:
                    bits = min(2 * bits, policy.max_bits)
                    continue
            return flo
        if fhi - flo == 1:
            exact = _exact_floor_tiebreak(n, c, fhi)
            if exact is not None:
                return exact
        if bits >= policy.max_bits:
            raise FloorCertificationError(n, c, bits, lo, hi)
        bits = min(2 * bits, policy.max_bits)


def covering_limit(N: int, c: float, policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    """Smallest prime limit whose table covers N.

    Returns the largest integer p with floor(p^c) <= N; a table built
    with this limit misses no solution of any equation with target <= N.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    lo = 1
    hi = max(2, int((N + 1) ** (1.0 / c)) + 4)
    while floor_pow(hi, c, policy) <= N:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if floor_pow(mid, c, policy) <= N:
            lo = mid
        else:
            hi = mid
    return lo


def sieve_primes(limit: int, segment_size: int = 1 << 20) -> np.ndarray:
    """All primes <= limit, ascending, as int64.

    Odd-only segmented sieve: memory O(sqrt(limit) + segment_size).
    limit < 2 yields an empty array.
    """
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    root = math.isqrt(limit)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if base[p]:
            base[p * p :: p] = False
    base_primes = np.flatnonzero(base)

    chunks = [np.array([2], dtype=np.int64)] if limit >= 2 else []
    low = 3
    while low <= limit:
        high = min(low + 2 * segment_size, limit + 1)  # exclusive
        count = (high - low + 1) // 2  # odd numbers in [low, high)
        mask = np.ones(count, dtype=bool)
        for p in base_primes:
            if p == 2:
                continue
            if p * p >= high:
                break
            start = max(p * p, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start < high:
                mask[(start - low) // 2 :: p] = False
        chunks.append((low + 2 * np.flatnonzero(mask)).astype(np.int64))
        low = high
    return np.concatenate(chunks)


def chebyshev_theta(P: int) -> float:
    """Sum of log p over primes p <= P (the zero-frequency prime sum)."""
    if P < 2:
        return 0.0
    return float(np.log(sieve_primes(P).astype(np.float64)).sum())


class WeightMode(enum.Enum):
    LOG_PRIME = "log-prime"
    VON_MANGOLDT = "von-mangoldt"
    UNIT = "unit"


_MODE_CODES = {WeightMode.LOG_PRIME: 0, WeightMode.VON_MANGOLDT: 1, WeightMode.UNIT: 2}
_CODE_MODES = {v: k for k, v in _MODE_CODES.items()}


def _coerce_mode(mode: WeightMode | str) -> WeightMode:
    return mode if isinstance(mode, WeightMode) else WeightMode(mode)


@dataclass
class FloorPowerTable:
    """Certified (p, floor(p^c), weight) records for all p <= limit.

    In log-prime and unit modes ``p`` runs over primes; in von-Mangoldt
    mode it runs over prime powers p0^k <= limit with weight log p0, so
    the table realizes the von-Mangoldt-weighted sum.  Entries are
    sorted by p; v is strictly increasing for c > 1.
    """

    c: float
    limit: int
    mode: WeightMode
    p: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __len__(self) -> int:
        return len(self.p)

    @property
    def entries(self):
        return zip(self.p.tolist(), self.v.tolist(), self.w.tolist())

    def covers(self, N: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> bool:
        """True when every prime with floor(p^c) <= N is in the table."""
        return floor_pow(self.limit + 1, self.c, policy) > N

    def theta(self) -> float:
        """Total weight mass; equals chebyshev_theta(limit) in log-prime mode."""
        return float(self.w.sum())

    def spot_check(
        self,
        fraction: float = 0.01,
        seed: int = 0,
        policy: PrecisionPolicy = DEFAULT_POLICY,
    ) -> int:
        """Re-verify v = floor(p^c) on a random sample at doubled precision.

        Returns the number of entries checked; raises on any mismatch.
        """
        if len(self) == 0:
            return 0
        rng = np.random.default_rng(seed)
        k = max(1, int(len(self) * fraction))
        idx = rng.choice(len(self), size=k, replace=False)
        doubled = PrecisionPolicy(
            initial_bits=2 * policy.initial_bits,
            max_bits=max(2 * policy.max_bits, 2 * policy.initial_bits),
            ambiguity_margin=policy.ambiguity_margin,
        )
        for i in idx:
            n, v = int(self.p[i]), int(self.v[i])
            if floor_pow(n, self.c, doubled) != v:
                raise FloorCertificationError(n, self.c, doubled.max_bits, v, v)
        return k

    # -- serialization --------------------------------------------------

    def save(self, path: str) -> None:
        """Binary export: FPT1 header, then (p, v, w) fixed-width records."""
        ctext = repr(self.c).encode("ascii")
        with open(path, "wb") as fh:
            fh.write(b"FPT1")
            fh.write(struct.pack("<H", len(ctext)))
            fh.write(ctext)
            fh.write(struct.pack("<QBQ", self.limit, _MODE_CODES[self.mode], len(self)))
            rec = np.empty(len(self), dtype=[("p", "<i8"), ("v", "<i8"), ("w", "<f8")])
            rec["p"], rec["v"], rec["w"] = self.p, self.v, self.w
            fh.write(rec.tobytes())

    @classmethod
    def load(cls, path: str) -> "FloorPowerTable":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != b"FPT1":
                raise ValueError(f"not a floor-power table file (magic {magic!r})")
            (clen,) = struct.unpack("<H", fh.read(2))
            c = float(fh.read(clen).decode("ascii"))
            limit, mode_code, count = struct.unpack("<QBQ", fh.read(17))
            rec = np.frombuffer(
                fh.read(count * 24), dtype=[("p", "<i8"), ("v", "<i8"), ("w", "<f8")]
            )
        return cls(
            c=c,
            limit=limit,
            mode=_CODE_MODES[mode_code],
            p=rec["p"].copy(),
            v=rec["v"].copy(),
            w=rec["w"].copy(),
        )

    def to_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("p,v,w\n")
            for p, v, w in self.entries:
                fh.write(f"{p},{v},{w!r}\n")


def _prime_powers(limit: int) -> tuple[np.ndarray, np.ndarray]:
    """(n, base) for every prime power n = p^k <= limit, sorted by n."""
    primes = sieve_primes(limit)
    ns: list[int] = []
    bases: list[int] = []
    for p in primes.tolist():
        n = p
        while n <= limit:
            ns.append(n)
            bases.append(p)
            n *= p
    order = np.argsort(np.array(ns))
    return np.array(ns, dtype=np.int64)[order], np.array(bases, dtype=np.int64)[order]


def build_table(
    c: float,
    P: int,
    mode: WeightMode | str = WeightMode.LOG_PRIME,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> FloorPowerTable:
    """Build the certified table over all primes (or prime powers) <= P.

    Accepts any c > 1; the counting results of interest live in
    1 < c < 3 but exploration outside is not blocked.  Deterministic:
    identical inputs give bit-identical tables.
    """
    if not c > 1:
        raise ValueError(f"need c > 1, got {c}")
    mode = _coerce_mode(mode)
    if P >= 2 and math.log2(P) * c >= 63:
        raise OverflowError(f"floor(P^c) would overflow int64 for P={P}, c={c}")

    if mode is WeightMode.VON_MANGOLDT:
        ns, bases = _prime_powers(P)
        weights = np.log(bases.astype(np.float64)) if len(ns) else np.empty(0)
    else:
        ns = sieve_primes(P)
        if mode is WeightMode.LOG_PRIME:
            weights = np.log(ns.astype(np.float64)) if len(ns) else np.empty(0)
        else:
            weights = np.ones(len(ns), dtype=np.float64)

    values = np.fromiter(
        (floor_pow(int(n), c, policy) for n in ns), dtype=np.int64, count=len(ns)
    )
    if len(values) > 1 and not (np.diff(values) > 0).all():
        raise AssertionError("floor powers not strictly increasing; table corrupt")
    return FloorPowerTable(c=c, limit=P, mode=mode, p=ns, v=values, w=weights)
