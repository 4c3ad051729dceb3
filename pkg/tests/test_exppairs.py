import random
from fractions import Fraction

import pytest
import sympy

from fplab.exppairs import (
    C_MAX_FIVE_SUMMANDS,
    OPTIMAL_WORD_16,
    TARGET_THETA,
    TYPE_I_DEFAULT,
    TYPE_II_Q_EXPONENT,
    TRIVIAL_PAIR,
    ConstraintReport,
    DegeneratePairError,
    ExponentPair,
    TypeIConstraint,
    WordSyntaxError,
    apply_A,
    apply_B,
    constraint_report,
    eval_word,
    fraction_decimal,
    max_c_type_I,
    parse_word,
    search_optimal_pair,
    type_I_exponent,
    type_I_tail_exponent,
    type_II_theta,
)

F = Fraction


def pair(k, l):
    return ExponentPair(F(*k) if isinstance(k, tuple) else F(k), F(*l) if isinstance(l, tuple) else F(l))


def random_reachable_pairs(n, max_len=12, seed=4):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        word = "".join(rng.choice("AB") for _ in range(rng.randint(0, max_len)))
        out.append(eval_word(word))
    return out


class TestProcesses:
    def test_A_fixes_trivial_pair(self):
        assert apply_A(TRIVIAL_PAIR) == TRIVIAL_PAIR

    def test_A_on_B_pair(self):
        assert apply_A(pair((1, 2), (1, 2))) == pair((1, 6), (2, 3))

    def test_A_second_step(self):
        assert apply_A(pair((1, 6), (2, 3))) == pair((1, 14), (11, 14))

    def test_B_on_trivial(self):
        assert apply_B(TRIVIAL_PAIR) == pair((1, 2), (1, 2))

    def test_B_involution_examples(self):
        assert apply_B(apply_B(TRIVIAL_PAIR)) == TRIVIAL_PAIR
        assert apply_B(pair((1, 2), (1, 2))) == TRIVIAL_PAIR

    def test_B_fixes_diagonal(self):
        # lambda = kappa + 1/2 is the B fixed line
        assert apply_B(pair((1, 6), (2, 3))) == pair((1, 6), (2, 3))

    def test_B_involution_random(self):
        for p in random_reachable_pairs(50):
            assert apply_B(apply_B(p)) == p

    def test_reachable_invariants(self):
        for p in random_reachable_pairs(200, max_len=16, seed=11):
            assert 0 <= p.kappa <= F(1, 2) <= p.lam <= 1
            assert p.kappa + p.lam <= 1

    def test_pair_validation(self):
        with pytest.raises(ValueError):
            ExponentPair(F(2, 3), F(2, 3))
        with pytest.raises(ValueError):
            ExponentPair(F(0), F(1, 3))


class TestWords:
    def test_eval_classic_words(self):
        assert eval_word("AB") == pair((1, 6), (2, 3))
        assert eval_word("AAB") == pair((1, 14), (11, 14))
        assert eval_word(OPTIMAL_WORD_16) == pair((33, 1550), (698, 775))

    def test_rightmost_applied_first(self):
        # under the pinned reading AB(0,1) = A(B(0,1)); the opposite
        # reading gives B(A(0,1)) = (1/2, 1/2) and is rejected
        assert eval_word("AB") == apply_A(apply_B(TRIVIAL_PAIR))
        assert eval_word("AB") != apply_B(apply_A(TRIVIAL_PAIR))

    def test_empty_word_is_identity(self):
        assert eval_word("") == TRIVIAL_PAIR

    def test_compositionality_random_splits(self):
        rng = random.Random(7)
        for _ in range(40):
            word = "".join(rng.choice("AB") for _ in range(rng.randint(1, 14)))
            cut = rng.randint(0, len(word))
            inner = eval_word(word[cut:])
            assert eval_word(word[:cut], start=inner) == eval_word(word)

    def test_parse_exponent_notation(self):
        assert parse_word("A^3BABABABABABAB(0,1)").ops == OPTIMAL_WORD_16
        w = parse_word("A^3BABABABABABAB(0,1)")
        assert w.ops.count("A") == 9 and w.ops.count("B") == 7

    def test_parse_trivia(self):
        assert parse_word("").ops == ""
        assert parse_word("A^2B").ops == "AAB"
        assert parse_word("A B A").ops == "ABA"

    def test_parse_errors_carry_position(self):
        with pytest.raises(WordSyntaxError) as err:
            parse_word("AXB")
        assert err.value.pos == 1
        with pytest.raises(WordSyntaxError):
            parse_word("A^B")


class TestTypeIConstraint:
    def test_trivial_pair_gives_trivial_exponent(self):
        for c in (F(3, 2), F(2), F(5, 2)):
            assert type_I_exponent(TRIVIAL_PAIR, c, TYPE_I_DEFAULT) == 1

    def test_exponent_below_theta_at_c2(self):
        # 2 lies inside the admissible range, so the bound is not tight there
        p = eval_word(OPTIMAL_WORD_16)
        e = type_I_exponent(p, F(2), TYPE_I_DEFAULT)
        assert e < TARGET_THETA
        # independent evaluation of the same rational expression
        k, l = sympy.Rational(33, 1550), sympy.Rational(698, 775)
        h0 = sympy.Rational(38687, 2666036)
        m0 = sympy.Rational(1371705, 2666036)
        ref = k * h0 + k * 2 + l - k + (k + 1 - l) * m0
        assert F(int(ref.p), int(ref.q)) == e

    def test_binding_at_threshold(self):
        p = eval_word(OPTIMAL_WORD_16)
        assert type_I_exponent(p, C_MAX_FIVE_SUMMANDS, TYPE_I_DEFAULT) == TARGET_THETA

    def test_max_c_reproduces_threshold(self):
        p = eval_word(OPTIMAL_WORD_16)
        assert max_c_type_I(p, TYPE_I_DEFAULT) == C_MAX_FIVE_SUMMANDS

    def test_max_c_sympy_oracle(self):
        # solve the linear constraint symbolically as an independent route
        c = sympy.Symbol("c")
        for word in ("AB", "AAB", OPTIMAL_WORD_16):
            p = eval_word(word)
            k = sympy.Rational(p.kappa.numerator, p.kappa.denominator)
            l = sympy.Rational(p.lam.numerator, p.lam.denominator)
            h0 = sympy.Rational(38687, 2666036)
            m0 = sympy.Rational(1371705, 2666036)
            theta = sympy.Rational(2627349, 2666036)
            (sol,) = sympy.solve(k * h0 + k * c + l - k + (k + 1 - l) * m0 - theta, c)
            assert F(int(sol.p), int(sol.q)) == max_c_type_I(p, TYPE_I_DEFAULT)

    def test_short_word_is_strictly_worse(self):
        assert max_c_type_I(eval_word("AB"), TYPE_I_DEFAULT) < C_MAX_FIVE_SUMMANDS

    def test_round_trip_exact(self):
        for p in random_reachable_pairs(60, seed=3):
            if p.kappa == 0:
                continue
            c = max_c_type_I(p, TYPE_I_DEFAULT)
            assert type_I_exponent(p, c, TYPE_I_DEFAULT) == TARGET_THETA

    def test_degenerate_pair_raises(self):
        with pytest.raises(DegeneratePairError, match="independent of c"):
            max_c_type_I(TRIVIAL_PAIR, TYPE_I_DEFAULT)

    def test_useless_pair_signals_below_one(self):
        # (1/2, 1/2) cannot support any c > 1 under the real constants
        c = max_c_type_I(pair((1, 2), (1, 2)), TYPE_I_DEFAULT)
        assert c < 1

    def test_reassociation_stability(self):
        # exact arithmetic is order-independent
        rng = random.Random(12)
        p = eval_word(OPTIMAL_WORD_16)
        cons = TYPE_I_DEFAULT
        terms = [
            p.kappa * cons.h0,
            p.kappa * C_MAX_FIVE_SUMMANDS,
            p.lam,
            -p.kappa,
            (p.kappa + 1 - p.lam) * cons.m0,
        ]
        for _ in range(20):
            rng.shuffle(terms)
            assert sum(terms) == TARGET_THETA

    def test_constraint_invariants_enforced(self):
        with pytest.raises(ValueError):
            TypeIConstraint(h0=F(0), m0=F(0), theta=F(1))
        with pytest.raises(ValueError):
            TypeIConstraint(h0=F(1, 2), m0=F(1, 4), theta=F(3, 4))


class TestTypeII:
    def test_forced_identity(self):
        assert type_II_theta(TYPE_II_Q_EXPONENT) == TARGET_THETA

    def test_boundaries(self):
        assert type_II_theta(F(0)) == 1
        assert type_II_theta(F(1)) == F(1, 2)


class TestConstraintReport:
    def test_report_binds_main_term(self):
        rep = constraint_report(OPTIMAL_WORD_16)
        assert rep.c_max == C_MAX_FIVE_SUMMANDS
        terms = dict(rep.binding_terms)
        assert terms["type-I-main"] == TARGET_THETA
        assert terms["type-I-tail"] < TARGET_THETA
        assert terms["type-II"] == TARGET_THETA

    def test_tail_exponent_small(self):
        tail = type_I_tail_exponent(C_MAX_FIVE_SUMMANDS)
        assert 0 < tail < F(1, 10)

    def test_report_validation(self):
        with pytest.raises(ValueError, match="c_max"):
            ConstraintReport(
                pair=TRIVIAL_PAIR,
                word=parse_word(""),
                c_max=F(1, 2),
                binding_terms=[("x", F(1))],
            )


class TestSearch:
    def test_single_candidate(self):
        word, p, value = search_optimal_pair(lambda q: q.kappa + q.lam, 0)
        assert word.ops == "" and p == TRIVIAL_PAIR and value == 1

    def test_tie_breaks_to_shorter_word(self):
        # A fixes (0,1), so length 1 adds only "B"; kappa objective ties
        # at 0 are resolved to the empty word
        word, p, value = search_optimal_pair(lambda q: q.kappa, 1)
        assert word.ops == "" and p == TRIVIAL_PAIR and value == 0

    def test_search_recovers_threshold_within_16(self):
        word, p, value = search_optimal_pair(
            lambda q: -max_c_type_I(q, TYPE_I_DEFAULT), 16
        )
        assert -value == C_MAX_FIVE_SUMMANDS
        assert p == pair((33, 1550), (698, 775))
        # canonical minimal word: the classical 16-letter word carries
        # one B acting on a B-fixed point and collapses to 15 letters
        assert word.ops == "AAABABABABABAAB"
        assert eval_word(word) == eval_word(OPTIMAL_WORD_16)

    def test_longer_words_improve(self):
        _, _, v18 = search_optimal_pair(lambda q: -max_c_type_I(q, TYPE_I_DEFAULT), 18)
        assert -v18 > C_MAX_FIVE_SUMMANDS

    def test_degenerate_objectives_skipped(self):
        word, p, value = search_optimal_pair(
            lambda q: 1 / q.kappa, 4
        )  # minimizing 1/kappa favors the largest kappa, skipping kappa=0
        assert p.kappa == F(1, 2)

    def test_length_cap(self):
        with pytest.raises(ValueError, match="capped"):
            search_optimal_pair(lambda q: q.kappa, 30)


def test_fraction_decimal_rendering():
    assert fraction_decimal(C_MAX_FIVE_SUMMANDS, 6) == "2.055013"
    assert fraction_decimal(F(1, 3), 4) == "0.3333"
    assert fraction_decimal(F(-1, 2), 3) == "-0.500"
