"""Floor-power prime laboratory.

Exact exponent-pair calculus, certified floor-power tables over primes,
representation counting for N = [p1^c] + ... + [ps^c], and numerical
evaluation of the associated exponential sums.
"""

from fplab.exppairs import (
    ExponentPair,
    ProcessWord,
    TypeIConstraint,
    apply_A,
    apply_B,
    eval_word,
    max_c_type_I,
    parse_word,
    search_optimal_pair,
    type_I_exponent,
    type_II_theta,
)
from fplab.floortable import (
    FloorPowerTable,
    PrecisionPolicy,
    build_table,
    chebyshev_theta,
    floor_pow,
    sieve_primes,
)

__version__ = "0.1.0"

__all__ = [
    "ExponentPair",
    "ProcessWord",
    "TypeIConstraint",
    "apply_A",
    "apply_B",
    "eval_word",
    "max_c_type_I",
    "parse_word",
    "search_optimal_pair",
    "type_I_exponent",
    "type_II_theta",
    "FloorPowerTable",
    "PrecisionPolicy",
    "build_table",
    "chebyshev_theta",
    "floor_pow",
    "sieve_primes",
    "__version__",
]
