"""Brute-force numerical checks of the symbolic radial identities in Cartesian R^n.

Exact coefficients are converted to floats only here, at the comparison
boundary. Relative errors use ``|a - b| / max(|b|, 1)`` so that identically
vanishing references (e.g. the Laplacian of 1/r in three dimensions) stay
well posed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .core import RadialCoeff, RadialOperator, formal_adjoint, substitute_n
from .geometry import (
    analytic_metric_diagonal,
    closed_form_determinant,
    jacobian_fd,
    metric_determinant,
    random_interior_point,
)
from .quantization import build_momentum_squared, build_radial_laplacian, build_reduced_momentum

LAPLACIAN_STEP = 2e-3
FIRST_DIFF_STEP = 1e-6


class OracleDomainError(ValueError):
    """Evaluation point outside the region where an oracle is valid."""


# --------------------------------------------------------------------------- #
# Test functions
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class RadialTestFunction:
    id: str
    value: Callable
    d1: Callable
    d2: Callable
    support: Tuple[float, float] = (0.5, 5.0)

    def derivative(self, k: int) -> Callable:
        if k == 0:
            return self.value
        if k == 1:
            return self.d1
        if k == 2:
            return self.d2
        raise ValueError(f"no closed-form derivative of order {k}")

    def __call__(self, r):
        return self.value(r)


def _sinc_value(r):
    return np.sin(r) / r


def _sinc_d1(r):
    return np.cos(r) / r - np.sin(r) / r**2


def _sinc_d2(r):
    return -np.sin(r) / r - 2 * np.cos(r) / r**2 + 2 * np.sin(r) / r**3


def standard_suite() -> List[RadialTestFunction]:
    """r^2, r^3, 1/r, exp(-r^2/2), sin(r)/r."""
    return [
        RadialTestFunction("r^2", lambda r: r**2, lambda r: 2 * r, lambda r: 2.0 + 0 * r),
        RadialTestFunction("r^3", lambda r: r**3, lambda r: 3 * r**2, lambda r: 6 * r),
        RadialTestFunction("r^-1", lambda r: 1 / r, lambda r: -1 / r**2, lambda r: 2 / r**3, (0.5, 5.0)),
        RadialTestFunction(
            "gaussian",
            lambda r: np.exp(-(r**2) / 2),
            lambda r: -r * np.exp(-(r**2) / 2),
            lambda r: (r**2 - 1) * np.exp(-(r**2) / 2),
        ),
        RadialTestFunction("sin(r)/r", _sinc_value, _sinc_d1, _sinc_d2),
    ]


def _bump_profile(r, a: float, b: float):
    """exp(-1/(1-t^2)) with t mapping [a, b] to [-1, 1], and its r-derivatives."""
    r = np.asarray(r, dtype=float)
    scale = 2.0 / (b - a)
    t = (2.0 * r - (a + b)) / (b - a)
    s = 1.0 - t * t
    # exp(-1/s) underflows to exactly 0 for 1/s > 745
    inside = s > 1.0 / 745.0
    safe_s = np.where(inside, s, 1.0)
    phi = np.where(inside, np.exp(-1.0 / safe_s), 0.0)
    dphi_dt = phi * (-2.0 * t / safe_s**2)
    d2phi_dt2 = phi * (4.0 * t * t / safe_s**4 - 2.0 / safe_s**2 - 8.0 * t * t / safe_s**3)
    return phi, scale * dphi_dt, scale * scale * d2phi_dt2


def bump_pair(a: float = 1.0, b: float = 3.0) -> Tuple[RadialTestFunction, RadialTestFunction]:
    """Two smooth functions supported in [a, b]: the bump and (1 + r) times the bump."""
    f = RadialTestFunction(
        "bump",
        lambda r: _bump_profile(r, a, b)[0],
        lambda r: _bump_profile(r, a, b)[1],
        lambda r: _bump_profile(r, a, b)[2],
        (a, b),
    )

    def g_parts(r):
        phi, d1, d2 = _bump_profile(r, a, b)
        w = 1.0 + np.asarray(r, dtype=float)
        return w * phi, phi + w * d1, 2.0 * d1 + w * d2

    g = RadialTestFunction(
        "(1+r)*bump",
        lambda r: g_parts(r)[0],
        lambda r: g_parts(r)[1],
        lambda r: g_parts(r)[2],
        (a, b),
    )
    return f, g


# --------------------------------------------------------------------------- #
# Finite-difference oracles
# --------------------------------------------------------------------------- #


def _norm(x: np.ndarray) -> float:
    return float(np.sqrt(np.dot(x, x)))


def _check_support(f: RadialTestFunction, r: float, inset: float) -> None:
    lo, hi = f.support
    if not (lo + inset <= r <= hi - inset):
        raise OracleDomainError(f"|x| = {r} outside support [{lo}, {hi}] of {f.id}")


def fd_cartesian_laplacian(f: RadialTestFunction, x, h: float = LAPLACIAN_STEP) -> float:
    """Sum of second central differences of f(|x|), Richardson-combined over h and h/2."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r0 = _norm(x)
    _check_support(f, r0, h)
    f0 = f(r0)

    def second_diff(step: float) -> float:
        total = 0.0
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = step
            total += f(_norm(x + e)) - 2.0 * f0 + f(_norm(x - e))
        return total / step**2

    return float((4.0 * second_diff(h / 2) - second_diff(h)) / 3.0)


def fd_divergence_rhat(x, h: float = FIRST_DIFF_STEP) -> float:
    """Central-difference divergence of x/|x|."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if _norm(x) <= 10 * h:
        raise OracleDomainError("point too close to the origin")
    total = 0.0
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        xp, xm = x + e, x - e
        total += (xp[i] / _norm(xp) - xm[i] / _norm(xm)) / (2 * h)
    return float(total)


def fd_gradient(f: RadialTestFunction, x, h: float = FIRST_DIFF_STEP) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        grad[i] = (f(_norm(x + e)) - f(_norm(x - e))) / (2 * h)
    return grad


def fd_radial_directional_derivative(f: RadialTestFunction, x, h: float = FIRST_DIFF_STEP) -> float:
    """rhat . grad f at x, gradient by central differences."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r0 = _norm(x)
    if r0 <= 10 * h:
        raise OracleDomainError("point too close to the origin")
    _check_support(f, r0, h)
    return float(np.dot(x / r0, fd_gradient(f, x, h)))


def fd_second_radial_derivative(f: RadialTestFunction, x, h: float = LAPLACIAN_STEP) -> float:
    """Second directional derivative of f(|x|) along rhat, Richardson-combined."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r0 = _norm(x)
    _check_support(f, r0, h)
    rhat = x / r0
    f0 = f(r0)

    def second_diff(step: float) -> float:
        return (f(_norm(x + step * rhat)) - 2.0 * f0 + f(_norm(x - step * rhat))) / step**2

    return float((4.0 * second_diff(h / 2) - second_diff(h)) / 3.0)


def composed_fd_action(op: RadialOperator, f: RadialTestFunction, x) -> float:
    """sum_k c_k(|x|) times the Cartesian FD estimate of the k-th radial derivative."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r0 = _norm(x)
    estimates = {
        0: lambda: float(f(r0)),
        1: lambda: fd_radial_directional_derivative(f, x),
        2: lambda: fd_second_radial_derivative(f, x),
    }
    total = 0.0
    for k, c in op.items():
        total += float(c.eval_float(r0)) * estimates[k]()
    return total


def symbolic_action(op: RadialOperator, f: RadialTestFunction, r):
    """sum_k c_k(r) f^(k)(r) with closed-form derivatives; ``op`` must be concrete."""
    if op.order > 2:
        raise ValueError(f"derivative order {op.order} unsupported (max 2)")
    total = 0.0
    for k, c in op.items():
        total = total + c.eval_float(r) * f.derivative(k)(r)
    return total


def random_point_at_radius(n: int, r: float, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(n)
    while _norm(v) < 1e-8:
        v = rng.standard_normal(n)
    return r * v / _norm(v)


# --------------------------------------------------------------------------- #
# Records and checks
# --------------------------------------------------------------------------- #


@dataclass
class VerificationRecord:
    check_name: str
    dimension: int
    samples: int
    max_abs_error: float
    max_rel_error: float
    tolerance: float
    passed: bool
    error_kind: str = "relative"
    details: Dict[str, object] = field(default_factory=dict)

    @classmethod
    def from_errors(
        cls,
        check_name: str,
        dimension: int,
        abs_errors: Sequence[float],
        rel_errors: Sequence[float],
        tolerance: float,
        error_kind: str = "relative",
        details: Optional[dict] = None,
    ) -> "VerificationRecord":
        max_abs = float(max(abs_errors, default=0.0))
        max_rel = float(max(rel_errors, default=0.0))
        measured = max_rel if error_kind == "relative" else max_abs
        return cls(
            check_name,
            dimension,
            len(abs_errors),
            max_abs,
            max_rel,
            tolerance,
            bool(measured <= tolerance),
            error_kind,
            dict(details or {}),
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


def _errors(estimate: float, reference: float) -> Tuple[float, float]:
    err = abs(estimate - reference)
    return err, err / max(abs(reference), 1.0)


def verify_operator_action(
    op: RadialOperator,
    n: int,
    f: RadialTestFunction,
    radii: Iterable[float],
    rng: Optional[np.random.Generator] = None,
    oracle: Optional[Callable[[RadialTestFunction, np.ndarray], float]] = None,
    tolerance: float = 1e-6,
    check_name: Optional[str] = None,
) -> VerificationRecord:
    """Compare the symbolic action of ``op`` on ``f`` with a Cartesian FD oracle.

    The default oracle applies FD radial derivatives term by term; pass
    ``oracle=fd_cartesian_laplacian`` to test against the full Laplacian.
    """
    if not op.is_concrete():
        op = substitute_n(op, n)
    if op.order > 2:
        raise ValueError(f"derivative order {op.order} unsupported (max 2)")
    rng = np.random.default_rng(0) if rng is None else rng
    oracle = oracle or (lambda g, x: composed_fd_action(op, g, x))
    abs_errs, rel_errs = [], []
    for r in radii:
        x = random_point_at_radius(n, float(r), rng)
        a, b = _errors(oracle(f, x), float(symbolic_action(op, f, float(r))))
        abs_errs.append(a)
        rel_errs.append(b)
    return VerificationRecord.from_errors(
        check_name or f"operator_action[{f.id}]", n, abs_errs, rel_errs, tolerance
    )


def adaptive_simpson(fn: Callable, a: float, b: float, tol: float = 1e-10, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature, refining all open intervals of a level at once.

    ``fn`` must accept numpy arrays.
    """
    lo = np.array([a])
    hi = np.array([b])
    f_lo, f_hi = fn(lo), fn(hi)
    mid = (lo + hi) / 2
    f_mid = fn(mid)
    whole = (hi - lo) / 6 * (f_lo + 4 * f_mid + f_hi)
    tols = np.array([tol])
    total = 0.0
    for depth in range(max_depth + 1):
        lm, rm = (lo + mid) / 2, (mid + hi) / 2
        f_lm, f_rm = fn(lm), fn(rm)
        left = (mid - lo) / 6 * (f_lo + 4 * f_lm + f_mid)
        right = (hi - mid) / 6 * (f_mid + 4 * f_rm + f_hi)
        delta = left + right - whole
        done = (np.abs(delta) <= 15 * tols) | (depth == max_depth)
        total += float(np.sum((left + right + delta / 15)[done]))
        keep = ~done
        if not keep.any():
            break
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        f_lo, f_mid, f_hi = f_lo[keep], f_mid[keep], f_hi[keep]
        lm, rm, f_lm, f_rm = lm[keep], rm[keep], f_lm[keep], f_rm[keep]
        left, right, tols = left[keep], right[keep], tols[keep] / 2
        lo = np.concatenate([lo, mid])
        hi_new = np.concatenate([mid, hi])
        mid = np.concatenate([lm, rm])
        f_lo, f_hi = np.concatenate([f_lo, f_mid]), np.concatenate([f_mid, f_hi])
        f_mid = np.concatenate([f_lm, f_rm])
        whole = np.concatenate([left, right])
        tols = np.concatenate([tols, tols])
        hi = hi_new
    return total


def weighted_inner_product(u: Callable, v: Callable, n: int, a: float, b: float, tol: float = 1e-10) -> float:
    """integral_a^b u(r) v(r) r^(n-1) dr."""
    return adaptive_simpson(lambda r: u(r) * v(r) * r ** (n - 1), a, b, tol)


def quadrature_adjoint_check(
    op: RadialOperator,
    n: int,
    f: RadialTestFunction,
    g: RadialTestFunction,
    tolerance: float = 1e-8,
    quad_tol: float = 1e-10,
    check_name: Optional[str] = None,
) -> VerificationRecord:
    """|<A f, g> - <f, A^+ g>| for the weight r^(n-1), A^+ from the formal adjoint rules."""
    a, b = f.support
    for fn in (f, g):
        lo, hi = fn.support
        edge = np.array([lo, hi])
        if np.any(np.abs(fn.value(edge)) > 0) or np.any(np.abs(fn.d1(edge)) > 0):
            raise OracleDomainError(f"{fn.id} does not vanish at its support endpoints")
        a, b = min(a, lo), max(b, hi)
    concrete = op if op.is_concrete() else substitute_n(op, n)
    adjoint = formal_adjoint(concrete, n)
    lhs = weighted_inner_product(lambda r: symbolic_action(concrete, f, r), g.value, n, a, b, quad_tol)
    rhs = weighted_inner_product(f.value, lambda r: symbolic_action(adjoint, g, r), n, a, b, quad_tol)
    err = abs(lhs - rhs)
    return VerificationRecord.from_errors(
        check_name or "adjoint",
        n,
        [err],
        [err / max(abs(lhs), 1.0)],
        tolerance,
        error_kind="absolute",
        details={"lhs": lhs, "rhs": rhs},
    )


# --------------------------------------------------------------------------- #
# Suites
# --------------------------------------------------------------------------- #

SUITES = ("laplacian", "divergence", "directional", "adjoint", "metric")


def sample_radii(rng: np.random.Generator, count: int = 50, lo: float = 0.51, hi: float = 3.0) -> np.ndarray:
    return np.sort(rng.uniform(lo, hi, size=count))


def laplacian_suite(n: int, rng: np.random.Generator, samples: int = 50) -> List[VerificationRecord]:
    """FD Cartesian Laplacian against the symbolic radial Laplacian, and D_r^2 against both."""
    laplacian = substitute_n(build_radial_laplacian(), n)
    momentum_sq = substitute_n(build_momentum_squared(), n)
    discrepancy = laplacian - momentum_sq
    records = []
    for f in standard_suite():
        radii = sample_radii(rng, samples)
        records.append(
            verify_operator_action(
                laplacian, n, f, radii, rng,
                oracle=fd_cartesian_laplacian,
                check_name=f"laplacian[{f.id}]",
            )
        )
        # Laplacian - D_r^2, both measured numerically, must equal the discrepancy times f
        abs_errs, rel_errs, gaps = [], [], []
        for r in radii:
            x = random_point_at_radius(n, float(r), rng)
            gap = fd_cartesian_laplacian(f, x) - composed_fd_action(momentum_sq, f, x)
            predicted = float(symbolic_action(discrepancy, f, float(r)))
            a, b = _errors(gap, predicted)
            abs_errs.append(a)
            rel_errs.append(b)
            gaps.append(abs(gap))
        records.append(
            VerificationRecord.from_errors(
                f"momentum_squared_gap[{f.id}]", n, abs_errs, rel_errs, 1e-6,
                details={"max_abs_laplacian_minus_momentum_squared": float(max(gaps))},
            )
        )
    return records


def divergence_suite(n: int, rng: np.random.Generator, samples: int = 50) -> List[VerificationRecord]:
    abs_errs = []
    for r in sample_radii(rng, samples, 0.51, 5.0):
        x = random_point_at_radius(n, float(r), rng)
        abs_errs.append(abs(fd_divergence_rhat(x) - (n - 1) / r))
    return [
        VerificationRecord.from_errors(
            "divergence_rhat", n, abs_errs, abs_errs, 1e-6, error_kind="absolute"
        )
    ]


def directional_suite(n: int, rng: np.random.Generator, samples: int = 50) -> List[VerificationRecord]:
    derivative = RadialOperator.derivative()
    records = []
    for f in standard_suite():
        radii = sample_radii(rng, samples)
        records.append(
            verify_operator_action(
                derivative, n, f, radii, rng,
                oracle=fd_radial_directional_derivative,
                check_name=f"directional[{f.id}]",
            )
        )
    return records


def adjoint_suite(n: int, rng: Optional[np.random.Generator] = None) -> List[VerificationRecord]:
    f, g = bump_pair()
    multiplication_r = RadialOperator.multiplication(RadialCoeff.monomial(1))
    momentum = substitute_n(build_reduced_momentum(), n)
    laplacian = substitute_n(build_radial_laplacian(), n)
    records = [
        quadrature_adjoint_check(momentum, n, f, g, check_name="adjoint[reduced_momentum]"),
        quadrature_adjoint_check(laplacian, n, f, g, check_name="adjoint[radial_laplacian]"),
        quadrature_adjoint_check(multiplication_r, n, f, g, check_name="adjoint[r]"),
    ]
    # <D f, g> + <f, D g> = 0 measured directly, without the adjoint rules
    lhs = weighted_inner_product(lambda r: symbolic_action(momentum, f, r), g.value, n, *f.support)
    rhs = weighted_inner_product(f.value, lambda r: symbolic_action(momentum, g, r), n, *f.support)
    err = abs(lhs + rhs)
    records.append(
        VerificationRecord.from_errors(
            "skew[reduced_momentum]", n, [err], [err / max(abs(lhs), 1.0)], 1e-8,
            error_kind="absolute", details={"lhs": lhs, "rhs": rhs},
        )
    )
    return records


def metric_suite(n: int, rng: np.random.Generator, samples: int = 100) -> List[VerificationRecord]:
    """J^T J from the FD Jacobian against the closed-form metric and determinant."""
    off_errs, diag_errs, det_abs, det_rel, closed = [], [], [], [], []
    for _ in range(samples):
        p = random_interior_point(n, rng)
        jac = jacobian_fd(p)
        gram = jac.T @ jac
        analytic = analytic_metric_diagonal(p)
        off = gram - np.diag(np.diag(gram))
        off_errs.append(float(np.max(np.abs(off))) if n > 1 else 0.0)
        diag_errs.append(float(np.max(np.abs(np.diag(gram) - analytic))))
        ref = closed_form_determinant(p)
        num = float(np.linalg.det(gram))
        det_abs.append(abs(num - ref))
        det_rel.append(abs(num - ref) / abs(ref))
        closed.append(abs(metric_determinant(p) - ref) / abs(ref))
    return [
        VerificationRecord.from_errors("metric_offdiagonal", n, off_errs, off_errs, 1e-6, "absolute"),
        VerificationRecord.from_errors("metric_diagonal", n, diag_errs, diag_errs, 1e-6, "absolute"),
        VerificationRecord.from_errors(
            "metric_determinant", n, det_abs, det_rel, 1e-5,
            details={"max_rel_error_analytic_product_vs_closed_form": float(max(closed))},
        ),
    ]


def run_suite(
    suite: str,
    dimensions: Iterable[int],
    seed: int = 0,
    tolerance: Optional[float] = None,
) -> List[VerificationRecord]:
    """Run one named suite (or ``all``) over ``dimensions``.

    Each (suite, n) pair draws from its own generator seeded by ``(seed, n)``,
    so records do not depend on which other suites ran.
    """
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
    records: List[VerificationRecord] = []
    for name in names:
        for n in dimensions:
            rng = np.random.default_rng([seed, SUITES.index(name), n])
            if name == "laplacian":
                records += laplacian_suite(n, rng)
            elif name == "divergence":
                records += divergence_suite(n, rng)
            elif name == "directional":
                records += directional_suite(n, rng)
            elif name == "adjoint":
                records += adjoint_suite(n, rng)
            else:
                records += metric_suite(n, rng)
    if tolerance is not None:
        for rec in records:
            rec.tolerance = tolerance
            measured = rec.max_rel_error if rec.error_kind == "relative" else rec.max_abs_error
            rec.passed = bool(measured <= tolerance)
    return records

