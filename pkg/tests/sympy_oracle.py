"""Independent sympy route for applying radial operators; used as a test oracle."""

import sympy as sp

from radialop.core import RadialCoeff, RadialOperator

n_sym, r_sym = sp.symbols("n r", positive=True)


def coeff_to_sympy(c: RadialCoeff) -> sp.Expr:
    return sp.Add(
        *[
            sp.Rational(v.numerator, v.denominator) * n_sym**d * r_sym**e
            for e, p in c.items()
            for d, v in p.items()
        ]
    )


def apply_with_sympy(op: RadialOperator, expr: sp.Expr) -> sp.Expr:
    """Independent route: sympy differentiates ``expr`` and multiplies by the coefficients."""
    return sp.Add(*[coeff_to_sympy(c) * sp.diff(expr, r_sym, k) for k, c in op.items()])

