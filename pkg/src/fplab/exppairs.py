"""Exact van der Corput exponent-pair calculus.

An exponent pair (kappa, lambda) bounds single exponential sums
sum e(f(n)) <<  lambda1^kappa * a^lambda + lambda1^(-1)  for phase
functions with derivative size lambda1 on dyadic ranges [a, 2a].  New
pairs are generated from the trivial pair (0, 1) by the two classical
processes

    A: (kappa, lambda) -> (kappa/(2*kappa + 2), 1/2 + lambda/(2*kappa + 2))
    B: (kappa, lambda) -> (lambda - 1/2, kappa + 1/2)

All arithmetic is exact over ``fractions.Fraction``; nothing in this
module ever rounds.  The module also solves the type-I bilinear
constraint for the largest admissible growth exponent c and evaluates
the type-II saving, which together reproduce the admissible range
1 < c < 4109054/1999527 for the five-summand equation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

HALF = Fraction(1, 2)
ONE = Fraction(1)

# Constraint constants for the five-summand setup.  H and M are the
# sawtooth truncation and the type-I block size as exponents of the
# dyadic length X; theta is the target bound exponent.
TYPE_I_H_EXPONENT = Fraction(38687, 2666036)
TYPE_I_M_MAX_EXPONENT = Fraction(1371705, 2666036)
TARGET_THETA = Fraction(2627349, 2666036)

# Type-II window: admissible block-size exponents [U, V] and the
# bilinear averaging length Q (exponent of X, log factor dropped).
TYPE_II_M_LO_EXPONENT = Fraction(38687, 1333018)
TYPE_II_M_HI_EXPONENT = Fraction(11958325, 23994324)
TYPE_II_Q_EXPONENT = Fraction(38687, 1333018)

# Combinatorial-decomposition split point Z (exponent of X) and the
# smallest dyadic block retained in the prime-sum splitting, as an
# exponent of the full prime limit.
DECOMP_Z_EXPONENT = Fraction(1294331, 2666036)
PRIME_BLOCK_MIN_EXPONENT = Fraction(9449, 10000)

# Largest admissible growth exponent c for five summands; re-derived
# exactly by max_c_type_I with the constants above.
C_MAX_FIVE_SUMMANDS = Fraction(4109054, 1999527)

# The 16-letter process word whose pair realizes C_MAX_FIVE_SUMMANDS.
OPTIMAL_WORD_16 = "AAABABABABABABAB"


class WordSyntaxError(ValueError):
    """Raised by parse_word on malformed input; carries the position."""

    def __init__(self, text: str, pos: int, reason: str):
        self.text = text
        self.pos = pos
        self.reason = reason
        super().__init__(f"bad process word at position {pos}: {reason!s} in {text!r}")


class DegeneratePairError(ValueError):
    """Raised when a pair with kappa = 0 is used where 1/kappa is needed."""


@dataclass(frozen=True)
class ExponentPair:
    """An exponent pair (kappa, lambda), exact rationals.

    Every pair reachable from (0, 1) by A/B processes additionally
    satisfies kappa + lambda <= 1; that is asserted where pairs are
    generated, not here, since the bound is a theorem about reachable
    pairs rather than part of the definition.
    """

    kappa: Fraction
    lam: Fraction

    def __post_init__(self):
        if not (0 <= self.kappa <= HALF):
            raise ValueError(f"kappa out of range [0, 1/2]: {self.kappa}")
        if not (HALF <= self.lam <= ONE):
            raise ValueError(f"lambda out of range [1/2, 1]: {self.lam}")

    def as_tuple(self) -> tuple[Fraction, Fraction]:
        return (self.kappa, self.lam)

    def __str__(self) -> str:
        return f"({self.kappa}, {self.lam})"


TRIVIAL_PAIR = ExponentPair(Fraction(0), Fraction(1))


def apply_A(p: ExponentPair) -> ExponentPair:
    """Weyl/van der Corput A-process."""
    d = 2 * p.kappa + 2
    return ExponentPair(p.kappa / d, HALF + p.lam / d)


def apply_B(p: ExponentPair) -> ExponentPair:
    """Poisson/stationary-phase B-process; an involution."""
    return ExponentPair(p.lam - HALF, p.kappa + HALF)


_OPS = {"A": apply_A, "B": apply_B}


@dataclass(frozen=True)
class ProcessWord:
    """A finite word over {A, B}; the empty word is the identity.

    ``ops[-1]`` is applied first (innermost), ``ops[0]`` last, matching
    functional composition: the word "AB" means A(B(start)).
    """

    ops: str = ""

    def __post_init__(self):
        bad = set(self.ops) - {"A", "B"}
        if bad:
            raise ValueError(f"invalid operators {sorted(bad)} in word {self.ops!r}")

    def __len__(self) -> int:
        return len(self.ops)

    def __str__(self) -> str:
        return self.ops or "(empty)"


_TOKEN = re.compile(r"[AB](?:\^\d+)?")


def parse_word(text: str) -> ProcessWord:
    """Parse operator-word text like "A^3BABABABABABAB(0,1)".

    Grammar: a sequence of ``A`` or ``B`` tokens, each with an optional
    ``^k`` repeat count; an optional trailing "(0,1)" is accepted and
    ignored.  Whitespace between tokens is allowed.
    """
    s = text.strip()
    if s.endswith("(0,1)"):
        s = s[: -len("(0,1)")].rstrip()
    pos = 0
    ops: list[str] = []
    while pos < len(s):
        if s[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(s, pos)
        if not m:
            raise WordSyntaxError(text, pos, f"unexpected character {s[pos]!r}")
        tok = m.group(0)
        if "^" in tok:
            letter, count = tok.split("^")
            ops.append(letter * int(count))
        else:
            ops.append(tok)
        pos = m.end()
    return ProcessWord("".join(ops))


def eval_word(word: ProcessWord | str, start: ExponentPair = TRIVIAL_PAIR) -> ExponentPair:
    """Evaluate a process word on ``start``, rightmost operator first.

    The right-to-left reading is the one under which the classical
    shorthand AB(0,1) = (1/6, 2/3) holds; the left-to-right reading
    gives a different pair and is not used anywhere.
    """
    ops = word.ops if isinstance(word, ProcessWord) else ProcessWord(word).ops
    p = start
    for ch in reversed(ops):
        p = _OPS[ch](p)
        assert p.kappa + p.lam <= ONE, f"unreachable pair {p} from word {ops!r}"
    return p


@dataclass(frozen=True)
class TypeIConstraint:
    """Exponents (of X) describing one type-I bilinear constraint.

    h0: truncation length H = X^h0 of the sawtooth expansion;
    m0: largest admissible block size M = X^m0;
    theta: target bound exponent for the full sum.
    """

    h0: Fraction
    m0: Fraction
    theta: Fraction

    def __post_init__(self):
        if not (0 < self.h0 < self.m0 < 1):
            raise ValueError(f"need 0 < h0 < m0 < 1, got h0={self.h0}, m0={self.m0}")
        if not (HALF < self.theta < 1):
            raise ValueError(f"need 1/2 < theta < 1, got {self.theta}")


TYPE_I_DEFAULT = TypeIConstraint(
    h0=TYPE_I_H_EXPONENT,
    m0=TYPE_I_M_MAX_EXPONENT,
    theta=TARGET_THETA,
)


def type_I_exponent(p: ExponentPair, c: Fraction, cons: TypeIConstraint) -> Fraction:
    """Exponent of X in the type-I bound H^k X^(kc+l-k) M^(k+1-l).

    With H = X^h0 and M = X^m0 the bound is X to the power
    k*h0 + k*c + l - k + (k+1-l)*m0, increasing in c and in m0.
    """
    k, l = p.kappa, p.lam
    return k * cons.h0 + k * c + l - k + (k + 1 - l) * cons.m0


def type_I_tail_exponent(
    c: Fraction, block_exponent: Fraction = PRIME_BLOCK_MIN_EXPONENT
) -> Fraction:
    """Exponent of X in the tail term X^(1-c) / tau at the worst block.

    tau = P^(1-c-eps) and X >= P^block_exponent give the tail exponent
    (c - 1) * (1/block_exponent - 1) up to eps; evaluated at eps = 0,
    its infimum.  Must stay below theta for the main constraint to be
    the binding one.
    """
    return (c - 1) * (1 / block_exponent - 1)


def max_c_type_I(p: ExponentPair, cons: TypeIConstraint) -> Fraction:
    """Largest c with type_I_exponent(p, c, cons) <= cons.theta.

    Solving the linear equation for c gives
    c = (theta - k*h0 - l + k - (k+1-l)*m0) / k; requires kappa > 0.
    """
    k, l = p.kappa, p.lam
    if k == 0:
        raise DegeneratePairError("degenerate pair: constraint independent of c")
    return (cons.theta - k * cons.h0 - l + k - (k + 1 - l) * cons.m0) / k


def type_II_theta(q0: Fraction) -> Fraction:
    """Bound exponent 1 - q0/2 from bilinear averaging of length X^q0."""
    q0 = Fraction(q0)
    if not (0 <= q0 <= 1):
        raise ValueError(f"need 0 <= q0 <= 1, got {q0}")
    return 1 - q0 / 2


@dataclass(frozen=True)
class ConstraintReport:
    """Threshold derivation record for one pair/word.

    binding_terms lists (name, exponent-at-c_max) for every term of the
    combined type-I/type-II bound; each exponent is <= theta and the
    type-I main term meets it with equality.
    """

    pair: ExponentPair
    word: ProcessWord
    c_max: Fraction
    binding_terms: list[tuple[str, Fraction]] = field(default_factory=list)

    def __post_init__(self):
        if not self.c_max > 1:
            raise ValueError(f"c_max must exceed 1, got {self.c_max}")
        theta = max(e for _, e in self.binding_terms)
        if not any(e == theta for _, e in self.binding_terms):
            raise ValueError("no binding term")


def constraint_report(
    word: ProcessWord | str, cons: TypeIConstraint = TYPE_I_DEFAULT
) -> ConstraintReport:
    """Derive c_max for ``word`` and record every term of the bound."""
    w = word if isinstance(word, ProcessWord) else parse_word(word)
    pair = eval_word(w)
    c_max = max_c_type_I(pair, cons)
    terms = [
        ("type-I-main", type_I_exponent(pair, c_max, cons)),
        ("type-I-tail", type_I_tail_exponent(c_max)),
        ("type-II", type_II_theta(TYPE_II_Q_EXPONENT)),
    ]
    for name, e in terms:
        if e > cons.theta:
            raise ValueError(f"term {name} exceeds theta at c_max: {e} > {cons.theta}")
    return ConstraintReport(pair=pair, word=w, c_max=c_max, binding_terms=terms)


def search_optimal_pair(
    objective: Callable[[ExponentPair], Fraction],
    max_word_len: int,
) -> tuple[ProcessWord, ExponentPair, Fraction]:
    """Minimize ``objective`` over all pairs reachable within max_word_len.

    Breadth-first enumeration from (0, 1) with a memo keyed by the exact
    pair: many words alias to the same pair (B is an involution, A fixes
    the trivial pair), so the reachable set is far smaller than 2^len.
    The first word reaching a pair is its canonical word — shortest,
    then lexicographically smallest with A < B, because the frontier is
    expanded in that order.  Pairs on which the objective raises
    DegeneratePairError or ZeroDivisionError are skipped.  Ties in the
    objective are broken by shortest word, then lexicographic order.
    """
    if max_word_len > 24:
        raise ValueError(f"max_word_len capped at 24, got {max_word_len}")
    seen: dict[tuple[Fraction, Fraction], str] = {TRIVIAL_PAIR.as_tuple(): ""}
    frontier: list[tuple[str, ExponentPair]] = [("", TRIVIAL_PAIR)]
    candidates: list[tuple[Fraction, int, str, ExponentPair]] = []

    def consider(word: str, pair: ExponentPair):
        try:
            value = objective(pair)
        except (DegeneratePairError, ZeroDivisionError):
            return
        candidates.append((value, len(word), word, pair))

    consider("", TRIVIAL_PAIR)
    for _ in range(max_word_len):
        nxt: list[tuple[str, ExponentPair]] = []
        for letter, op in (("A", apply_A), ("B", apply_B)):
            for word, pair in frontier:
                q = op(pair)
                assert q.kappa + q.lam <= ONE
                key = q.as_tuple()
                if key in seen:
                    continue
                w = letter + word
                seen[key] = w
                nxt.append((w, q))
                consider(w, q)
        if not nxt:
            break
        frontier = nxt

    if not candidates:
        raise ValueError("objective undefined on every reachable pair")
    value, _, word, pair = min(candidates, key=lambda t: (t[0], t[1], t[2]))
    return ProcessWord(word), pair, value


def fraction_decimal(x: Fraction, digits: int = 6) -> str:
    """Decimal rendering of an exact rational to ``digits`` places."""
    sign = "-" if x < 0 else ""
    x = abs(x)
    scaled = x * 10**digits
    q = scaled.numerator // scaled.denominator
    r = scaled - q
    if 2 * r >= 1:
        q += 1
    whole, frac = divmod(q, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"
