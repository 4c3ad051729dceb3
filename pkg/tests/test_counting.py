import itertools
import math
from collections import Counter

import numpy as np
import pytest

from fplab.counting import (
    DENSE,
    MITM,
    MemoryCapError,
    TableCoverageError,
    moment4_count,
    rep_count,
    rep_spectrum,
    robert_sargos_count,
    scaling_fit,
    weighted_fourth_moment,
)
from fplab.floortable import build_table, covering_limit, floor_pow


def brute_rep(table, N, s):
    """Literal nested enumeration of ordered tuples; tiny inputs only."""
    entries = list(table.entries)
    count = 0
    mass = 0.0
    for tup in itertools.product(entries, repeat=s):
        if sum(e[1] for e in tup) == N:
            count += 1
            mass += math.prod(e[2] for e in tup)
    return count, mass


def brute_moment4(X, c):
    vals = [floor_pow(n, c) for n in range(X + 1, 2 * X + 1)]
    return sum(
        1
        for a in vals
        for b in vals
        for d in vals
        for e in vals
        if a + b == d + e
    )


def brute_near_equal(Y, c, gamma):
    ns = range(Y + 1, 2 * Y + 1)
    vals = [float(n) ** c for n in ns]
    return sum(
        1
        for a in vals
        for b in vals
        for d in vals
        for e in vals
        if abs(a + b - d - e) < gamma
    )


@pytest.fixture(scope="module")
def table_15():
    return build_table(1.5, covering_limit(200, 1.5))


class TestRepCount:
    def test_two_summands_example(self, table_15):
        rc = rep_count(table_15, 4, 2)
        assert rc.unweighted == 1  # only floor(2^1.5) + floor(2^1.5) = 2 + 2
        assert rc.weighted == pytest.approx(math.log(2) ** 2, rel=1e-12)

    def test_no_solutions_below_minimum(self, table_15):
        rc = rep_count(table_15, 1, 5)
        assert rc.unweighted == 0 and rc.weighted == 0.0

    @pytest.mark.parametrize("method", [DENSE, MITM])
    def test_five_summands_against_brute_force(self, method):
        table = build_table(1.5, covering_limit(100, 1.5))
        ref_count, ref_mass = brute_rep(table, 100, 5)
        rc = rep_count(table, 100, 5, method=method)
        assert rc.unweighted == ref_count
        assert rc.weighted == pytest.approx(ref_mass, rel=1e-9)

    @pytest.mark.parametrize("method", [DENSE, MITM])
    @pytest.mark.parametrize("s", [2, 3, 4, 5, 6])
    def test_small_random_against_brute_force(self, method, s):
        table = build_table(1.8, 12)
        rng = np.random.default_rng(42 + s)
        for N in rng.integers(1, 60, 4).tolist():
            ref_count, ref_mass = brute_rep(table, int(N), s)
            rc = rep_count(table, int(N), s, method=method)
            assert rc.unweighted == ref_count
            assert rc.weighted == pytest.approx(ref_mass, rel=1e-9, abs=1e-12)

    def test_methods_agree(self, table_15):
        rng = np.random.default_rng(0)
        for N in rng.integers(1, 200, 25).tolist():
            for s in (2, 3, 5):
                a = rep_count(table_15, int(N), s, method=DENSE)
                b = rep_count(table_15, int(N), s, method=MITM)
                assert a.unweighted == b.unweighted
                assert a.weighted == pytest.approx(b.weighted, rel=1e-9, abs=1e-12)

    def test_ordered_count_from_multisets(self):
        # ordered count equals the multinomial-weighted multiset count
        table = build_table(1.8, 12)
        entries = list(table.entries)
        N, s = 40, 3
        ordered = rep_count(table, N, s).unweighted
        total = 0
        for combo in itertools.combinations_with_replacement(range(len(entries)), s):
            if sum(entries[i][1] for i in combo) == N:
                mult = math.factorial(s)
                for rep in Counter(combo).values():
                    mult //= math.factorial(rep)
                total += mult
        assert ordered == total

    def test_unit_weights_match_counts(self):
        table = build_table(2.0, 40, mode="unit")
        for N in (50, 100, 173):
            rc = rep_count(table, N, 2)
            assert rc.weighted == pytest.approx(float(rc.unweighted))

    def test_coverage_error(self, table_15):
        with pytest.raises(TableCoverageError, match="does not cover"):
            rep_count(table_15, 10**6, 2)

    def test_s_range_error(self, table_15):
        with pytest.raises(ValueError):
            rep_count(table_15, 10, 1)
        with pytest.raises(ValueError):
            rep_count(table_15, 10, 7)

    def test_memory_cap(self, table_15):
        with pytest.raises(MemoryCapError):
            rep_count(table_15, 150, 2, mem_cap=100)


class TestSpectrum:
    def test_matches_per_n_counts(self, table_15):
        spec = rep_spectrum(table_15, 3, 180)
        rng = np.random.default_rng(9)
        for N in rng.integers(1, 181, 100).tolist():
            rc = rep_count(table_15, int(N), 3)
            assert int(spec.unweighted[N]) == rc.unweighted
            assert float(spec.weighted[N]) == pytest.approx(
                rc.weighted, rel=1e-9, abs=1e-9
            )

    def test_total_mass_conservation(self):
        # summed over all N the closed-table spectrum counts every
        # ordered tuple of table entries exactly once
        table = build_table(1.5, 20)
        s = 3
        n_max = int(s * table.v.max())
        spec = rep_spectrum(table, s, n_max, closed_table=True)
        assert int(spec.unweighted.sum()) == len(table) ** s
        assert float(spec.weighted.sum()) == pytest.approx(
            float(table.w.sum()) ** s, rel=1e-9
        )

    def test_squares_pair_sums(self):
        # c = 2, P = 5: the three squares 4, 9, 25 pair up to exactly
        # {8, 13, 18, 29, 34, 50}
        table = build_table(2.0, 5)
        spec = rep_spectrum(table, 2, 50)
        assert np.flatnonzero(spec.unweighted).tolist() == [8, 13, 18, 29, 34, 50]
        assert spec.unweighted[13] == 2  # (4,9) and (9,4)

    def test_weighted_only_mode(self, table_15):
        spec = rep_spectrum(table_15, 5, 200, unweighted=False)
        assert spec.unweighted is None
        full = rep_spectrum(table_15, 5, 200)
        assert np.allclose(spec.weighted, full.weighted)
        with pytest.raises(ValueError, match="weighted-only"):
            spec[100]

    def test_memory_cap_precedes_allocation(self, table_15):
        with pytest.raises(MemoryCapError):
            rep_spectrum(table_15, 5, 200, mem_cap=1000)


class TestMoment4:
    def test_tiny_example(self):
        # (2, 4] holds 3 and 4 with floor powers 5 and 8: histogram
        # {10: 1, 13: 2, 16: 1} gives 1 + 4 + 1
        m = moment4_count(2, 1.5)
        assert m.count == 6
        assert m.weighted is None

    def test_diagonal_lower_bound(self):
        for X in (4, 16, 64):
            m = moment4_count(X, 1.5)
            assert m.count >= X * X

    def test_against_brute_force(self):
        for X, c in ((12, 1.5), (9, 2.5), (15, 1.2)):
            assert moment4_count(X, c).count == brute_moment4(X, c)

    def test_prime_restricted_weighted(self):
        table = build_table(1.5, 40)
        m = moment4_count(10, 1.5, prime_restricted=True, table=table)
        primes = [(p, v, w) for p, v, w in table.entries if 10 < p <= 20]
        ref_count = 0
        ref_mass = 0.0
        for (p1, v1, w1), (p2, v2, w2), (p3, v3, w3), (p4, v4, w4) in itertools.product(
            primes, repeat=4
        ):
            if v1 + v2 == v3 + v4:
                ref_count += 1
                ref_mass += w1 * w2 * w3 * w4
        assert m.count == ref_count
        assert m.weighted == pytest.approx(ref_mass, rel=1e-12)

    def test_prime_restricted_needs_table(self):
        with pytest.raises(ValueError):
            moment4_count(10, 1.5, prime_restricted=True)
        with pytest.raises(TableCoverageError):
            moment4_count(100, 1.5, prime_restricted=True, table=build_table(1.5, 40))


class TestWeightedFourthMoment:
    def test_against_quadruple_loop(self):
        table = build_table(1.5, 20)
        entries = list(table.entries)
        ref = 0.0
        for e1, e2, e3, e4 in itertools.product(entries, repeat=4):
            if e1[1] + e2[1] == e3[1] + e4[1]:
                ref += e1[2] * e2[2] * e3[2] * e4[2]
        assert weighted_fourth_moment(table) == pytest.approx(ref, rel=1e-12)


class TestRobertSargos:
    def test_singleton_range(self):
        assert robert_sargos_count(1, 1.5, 0.001).count == 1

    def test_small_against_brute_force(self):
        for Y, c, gamma in ((2, 1.5, 0.1), (3, 1.5, 0.5), (4, 2.2, 1.0)):
            assert robert_sargos_count(Y, c, gamma).count == brute_near_equal(
                Y, c, gamma
            )

    def test_huge_gamma_counts_everything(self):
        Y, c = 5, 1.5
        gamma = 2 * ((2 * Y) ** c - Y**c) + 1
        assert robert_sargos_count(Y, c, gamma).count == Y**4

    def test_monotone_in_gamma(self):
        counts = [robert_sargos_count(16, 1.5, g).count for g in (0.01, 0.1, 1.0, 10.0)]
        assert counts == sorted(counts)

    def test_monotone_in_Y(self):
        counts = [robert_sargos_count(Y, 1.5, 1.0).count for Y in (4, 8, 16, 32)]
        assert counts == sorted(counts)

    def test_tiny_gamma_still_resolves(self):
        # gamma far below double resolution at these magnitudes must
        # still keep only the exactly-equal pair sums
        Y, c = 8, 2.0  # integer powers: equality is exact
        exact_pairs = robert_sargos_count(Y, c, 1e-12).count
        assert exact_pairs == moment4_count(Y, c).count

    def test_validation(self):
        with pytest.raises(ValueError):
            robert_sargos_count(0, 1.5, 0.1)
        with pytest.raises(ValueError):
            robert_sargos_count(4, 1.5, 0.0)


class TestScalingFit:
    def test_exact_power_data(self):
        pts = [(2**k, 2 ** (3 * k)) for k in range(1, 8)]
        assert scaling_fit(pts) == pytest.approx(3.0, abs=1e-9)

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            scaling_fit([(1, 1), (2, 8)])

    def test_needs_increasing_sizes(self):
        with pytest.raises(ValueError):
            scaling_fit([(4, 1), (2, 8), (8, 64)])
