"""Exact algebra of radial differential operators in n dimensions, with numerical oracles."""

__version__ = "0.1.0"

from .core import (
    N,
    DimPoly,
    Prefactor,
    RadialCoeff,
    RadialOperator,
    Rational,
    coeff_derivative,
    conjugate_by_r_power,
    formal_adjoint,
    op_add,
    op_apply,
    op_commutator,
    op_compose,
    op_scale,
    rational_arith,
    substitute_n,
)
from .expr import evaluate, lower, parse, render
from .quantization import (
    DerivationReport,
    build_momentum_squared,
    build_radial_laplacian,
    build_reduced_momentum,
    compute_discrepancy,
    run_derivation,
)
