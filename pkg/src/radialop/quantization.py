"""Radial Laplacian, radial momentum and the Hamiltonian discrepancy in ``n`` dimensions.

All operators here are real and reduced: the physical factors ``-i*hbar`` and
``-hbar^2/(2m)`` travel separately as :class:`~radialop.core.Prefactor` values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Union

from .core import (
    N,
    DimPoly,
    Prefactor,
    RadialCoeff,
    RadialOperator,
    as_rational,
    conjugate_by_r_power,
    formal_adjoint,
    op_commutator,
    op_compose,
    op_scale,
    substitute_n,
)

D = RadialOperator.derivative()

HAMILTONIAN_PREFACTOR = Prefactor(i_power=0, hbar_power=2, mass_power=-1, scalar=Fraction(-1, 2))
MOMENTUM_PREFACTOR = Prefactor(i_power=3, hbar_power=1, mass_power=0, scalar=Fraction(1))

ANGULAR_TERM = "L^2/(2*m*r^2)"


class DimensionError(ValueError):
    """A concrete dimension that is not a positive integer."""


def divergence_of_unit_radial_field() -> RadialCoeff:
    """div(x/|x|) as a Laurent coefficient.

    Term-wise: sum_i d/dx_i (x_i / r) = n/r - (1/r^2) sum_i x_i dr/dx_i, and
    with dr/dx_i = x_i/r the sum collapses to r^2/r.
    """
    n_over_r = RadialCoeff.monomial(-1, N)
    sum_x_dr = RadialCoeff.monomial(2) * RadialCoeff.monomial(-1)
    return n_over_r - RadialCoeff.monomial(-2) * sum_x_dr


def build_radial_laplacian() -> RadialOperator:
    """r^(1-n) d (r^(n-1) d), obtained by conjugating d with r^(n-1) and composing with d."""
    return op_compose(conjugate_by_r_power(D, N - 1), D)


def build_reduced_momentum() -> RadialOperator:
    """Symmetrized radial derivative ``(1/2)[div(rhat .) + rhat.grad]``.

    In radial form ``div(rhat psi) = psi' + div(rhat) psi`` and
    ``rhat.grad = d``, giving ``d + (n-1)/(2r)``. Multiply by ``-i*hbar`` for
    the momentum itself.
    """
    divergence_part = D + RadialOperator.multiplication(divergence_of_unit_radial_field())
    return op_scale(divergence_part + D, Fraction(1, 2))


def momentum_squared_decomposition() -> Dict[str, RadialOperator]:
    """Pieces of (d + c)^2 = d^2 + 2 c d + [d, c] + c^2 with c = (n-1)/(2r)."""
    c = build_reduced_momentum() - D
    return {
        "second_derivative": op_compose(D, D),
        "cross_term": op_scale(op_compose(c, D), 2),
        "commutator": op_commutator(D, c),
        "square": op_compose(c, c),
    }


def build_momentum_squared() -> RadialOperator:
    momentum = build_reduced_momentum()
    return op_compose(momentum, momentum)


def compute_discrepancy() -> RadialOperator:
    """Radial Laplacian minus the squared reduced momentum."""
    return build_radial_laplacian() - build_momentum_squared()


def correction_coefficient(discrepancy: Optional[RadialOperator] = None) -> DimPoly:
    """Coefficient of r^-2 in the discrepancy, negated: (n-1)(n-3)/4 symbolically."""
    op = compute_discrepancy() if discrepancy is None else discrepancy
    return -op.coefficient(0).coefficient(-2)


def render_correction_term(coefficient: Optional[DimPoly] = None) -> str:
    """The term added on the momentum side, hbar^2 (n-1)(n-3) / (2m * 4 r^2).

    Built from the Hamiltonian prefactor -hbar^2/(2m) times the discrepancy
    coefficient -(n-1)(n-3)/4 so both denominators stay visible.
    """
    coefficient = correction_coefficient() if coefficient is None else coefficient
    if coefficient.is_zero():
        return "0"
    scalar, roots, rest = coefficient.integer_factorization()
    factors = []
    for root in roots:
        if root == 0:
            factors.append("n")
        elif root > 0:
            factors.append(f"(n-{root})")
        else:
            factors.append(f"(n+{-root})")
    if rest.degree >= 1:
        from .expr import render_dimpoly

        factors.append("(" + render_dimpoly(rest) + ")")
    # hbar^2/(2m) * scalar: numerator and denominators kept apart
    h_mag = abs(HAMILTONIAN_PREFACTOR.scalar)
    sign = "" if scalar > 0 else "-"
    num_parts = []
    if scalar.numerator not in (1, -1):
        num_parts.append(str(abs(scalar.numerator)))
    num_parts.append("hbar^2")
    num_parts.extend(factors)
    den_parts = [f"{h_mag.denominator}*m"]
    if scalar.denominator != 1:
        den_parts.append(str(scalar.denominator))
    den_parts.append("r^2")
    return f"{sign}{'*'.join(num_parts)}/({'*'.join(den_parts)})"


Dimension = Union[str, int, Fraction, None]


def _normalize_dimension(dimension: Dimension) -> Optional[int]:
    if dimension is None or dimension == "symbolic":
        return None
    if isinstance(dimension, bool):
        raise DimensionError("dimension must be a positive integer")
    try:
        value = as_rational(dimension)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"invalid dimension {dimension!r}") from exc
    if value.denominator != 1 or value < 1:
        raise DimensionError(f"dimension must be a positive integer, got {value}")
    return int(value)


@dataclass(frozen=True)
class DerivationReport:
    dimension: Optional[int]
    radial_laplacian: RadialOperator
    reduced_momentum: RadialOperator
    momentum_squared: RadialOperator
    momentum_squared_terms: Dict[str, RadialOperator]
    discrepancy: RadialOperator
    correction_term_coefficient: Union[DimPoly, Fraction]
    correction_term: str
    prefactors: Dict[str, Prefactor]
    angular_term: str = ANGULAR_TERM
    symmetry_checks: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def is_symbolic(self) -> bool:
        return self.dimension is None


def run_derivation(dimension: Dimension = "symbolic") -> DerivationReport:
    """Run the full chain symbolically, then specialize when ``dimension`` is an integer."""
    n0 = _normalize_dimension(dimension)

    laplacian = build_radial_laplacian()
    momentum = build_reduced_momentum()
    momentum_sq = build_momentum_squared()
    pieces = momentum_squared_decomposition()
    discrepancy = laplacian - momentum_sq

    symmetry = {
        "momentum_skew_adjoint": formal_adjoint(momentum) == -momentum,
        "laplacian_self_adjoint": formal_adjoint(laplacian) == laplacian,
        "momentum_is_conjugated_derivative": conjugate_by_r_power(D, (N - 1) / 2) == momentum,
        "decomposition_sums_to_square": sum(pieces.values(), RadialOperator.zero()) == momentum_sq,
    }
    notes = [
        "radial Laplacian = r^(1-n) d r^(n-1) d, derived by conjugation",
        "reduced momentum = (d + div(rhat) + d)/2 with div(rhat) = (n-1)/r",
        "momentum squared computed by normal-ordered composition",
        "discrepancy = radial Laplacian - momentum squared; L^2 cancels between the two Hamiltonian forms",
    ]

    coefficient: Union[DimPoly, Fraction] = correction_coefficient(discrepancy)
    correction = render_correction_term(coefficient)
    if n0 is not None:
        laplacian = substitute_n(laplacian, n0)
        momentum = substitute_n(momentum, n0)
        momentum_sq = substitute_n(momentum_sq, n0)
        pieces = {k: substitute_n(v, n0) for k, v in pieces.items()}
        discrepancy = substitute_n(discrepancy, n0)
        symmetry["momentum_skew_adjoint"] = formal_adjoint(momentum, n0) == -momentum
        symmetry["laplacian_self_adjoint"] = formal_adjoint(laplacian, n0) == laplacian
        coefficient = coefficient.eval_at(n0)
        correction = render_correction_term(DimPoly.constant(coefficient))

    return DerivationReport(
        dimension=n0,
        radial_laplacian=laplacian,
        reduced_momentum=momentum,
        momentum_squared=momentum_sq,
        momentum_squared_terms=pieces,
        discrepancy=discrepancy,
        correction_term_coefficient=coefficient,
        correction_term=correction,
        prefactors={
            "hamiltonian": HAMILTONIAN_PREFACTOR,
            "momentum": MOMENTUM_PREFACTOR,
            "momentum_squared_over_2m": MOMENTUM_PREFACTOR * MOMENTUM_PREFACTOR * Prefactor(mass_power=-1, scalar=Fraction(1, 2)),
        },
        symmetry_checks=symmetry,
        notes=notes,
    )
