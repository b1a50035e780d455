"""Exact coefficient rings and the normal-ordered algebra of radial differential operators.

Three nested sparse structures:

* ``DimPoly``      -- polynomial in the dimension symbol ``n`` over the rationals,
* ``RadialCoeff``  -- Laurent polynomial in ``r`` with ``DimPoly`` coefficients,
* ``RadialOperator`` -- finite sum ``sum_k c_k(n, r) * d^k`` with the coefficient
  written to the left of the derivative ``d = d/dr``.

Every constructor canonicalizes eagerly (zero entries dropped), so structural
equality decides operator equality. All values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, isqrt
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union

Rational = Fraction

RationalLike = Union[int, Fraction, str]


def as_rational(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact ``Fraction``; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def rational_arith(a: RationalLike, b: RationalLike, op: str) -> Fraction:
    """Exact ``a <op> b`` for op in add/sub/mul/div.

    Raises ZeroDivisionError on division by zero.
    """
    a, b = as_rational(a), as_rational(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise ZeroDivisionError(f"division of {a} by zero")
        return a / b
    raise ValueError(f"unknown rational operation {op!r}")


def falling_factorial(m: int, k: int) -> int:
    """m (m-1) ... (m-k+1); valid for negative ``m``."""
    out = 1
    for i in range(k):
        out *= m - i
    return out


# --------------------------------------------------------------------------- #
# DimPoly
# --------------------------------------------------------------------------- #


class DimPoly:
    """Polynomial in ``n`` with rational coefficients, stored sparsely."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coefficients: Optional[Mapping[int, RationalLike]] = None):
        clean: Dict[int, Fraction] = {}
        for deg, value in (coefficients or {}).items():
            if not isinstance(deg, int) or deg < 0:
                raise ValueError(f"degree must be a non-negative integer, got {deg!r}")
            value = as_rational(value)
            if value:
                clean[deg] = value
        self._c = dict(sorted(clean.items()))
        self._hash: Optional[int] = None

    @classmethod
    def _trusted(cls, coefficients: Dict[int, Fraction]) -> "DimPoly":
        obj = cls.__new__(cls)
        obj._c = dict(sorted((d, c) for d, c in coefficients.items() if c))
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, value: RationalLike) -> "DimPoly":
        return cls({0: value})

    @classmethod
    def symbol(cls) -> "DimPoly":
        """The polynomial ``n``."""
        return cls({1: 1})

    @classmethod
    def coerce(cls, value: Union["DimPoly", RationalLike]) -> "DimPoly":
        if isinstance(value, DimPoly):
            return value
        return cls.constant(value)

    @property
    def coefficients(self) -> Dict[int, Fraction]:
        return dict(self._c)

    def items(self) -> Iterator[Tuple[int, Fraction]]:
        return iter(self._c.items())

    @property
    def degree(self) -> int:
        """Degree in ``n``; -1 for the zero polynomial."""
        return max(self._c) if self._c else -1

    def coefficient(self, degree: int) -> Fraction:
        return self._c.get(degree, Fraction(0))

    @property
    def leading_coefficient(self) -> Fraction:
        return self._c[self.degree] if self._c else Fraction(0)

    def is_zero(self) -> bool:
        return not self._c

    def is_constant(self) -> bool:
        return self.degree <= 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self!r} depends on n")
        return self.coefficient(0)

    def __bool__(self) -> bool:
        return bool(self._c)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = DimPoly.constant(other)
        if not isinstance(other, DimPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._c.items()))
        return self._hash

    def __add__(self, other):
        other = _dimpoly_or_none(other)
        if other is None:
            return NotImplemented
        out = dict(self._c)
        for d, c in other._c.items():
            out[d] = out.get(d, 0) + c
        return DimPoly._trusted(out)

    __radd__ = __add__

    def __neg__(self) -> "DimPoly":
        return DimPoly._trusted({d: -c for d, c in self._c.items()})

    def __sub__(self, other):
        other = _dimpoly_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _dimpoly_or_none(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _dimpoly_or_none(other)
        if other is None:
            return NotImplemented
        out: Dict[int, Fraction] = {}
        for d1, c1 in self._c.items():
            for d2, c2 in other._c.items():
                out[d1 + d2] = out.get(d1 + d2, 0) + c1 * c2
        return DimPoly._trusted(out)

    __rmul__ = __mul__

    def __truediv__(self, other: RationalLike) -> "DimPoly":
        q = as_rational(other)
        if q == 0:
            raise ZeroDivisionError("division of a DimPoly by zero")
        return DimPoly._trusted({d: c / q for d, c in self._c.items()})

    def __pow__(self, k: int) -> "DimPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("DimPoly powers must be non-negative integers")
        out = DimPoly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def eval_at(self, n0: RationalLike) -> Fraction:
        n0 = as_rational(n0)
        acc = Fraction(0)
        for d in range(self.degree, -1, -1):
            acc = acc * n0 + self._c.get(d, 0)
        return acc

    def eval_float(self, n0: float) -> float:
        return float(sum(float(c) * n0**d for d, c in self._c.items()))

    def content(self) -> Fraction:
        """Positive rational ``c`` such that ``self / c`` has coprime integer coefficients."""
        if not self._c:
            return Fraction(0)
        from math import gcd, lcm

        den = 1
        for c in self._c.values():
            den = lcm(den, c.denominator)
        num = 0
        for c in self._c.values():
            num = gcd(num, abs(c.numerator * (den // c.denominator)))
        return Fraction(num, den)

    def integer_coefficients(self) -> Dict[int, int]:
        """Coefficients scaled by the inverse content (primitive integer polynomial)."""
        c = self.content()
        return {d: int(v / c) for d, v in self._c.items()}

    def roots_over_integers(self) -> set:
        """All integer roots, by divisor search on the trailing coefficient."""
        if not self._c:
            raise ValueError("the zero polynomial vanishes at every integer")
        roots = set()
        low = min(self._c)
        if low > 0:
            roots.add(0)
        reduced = DimPoly._trusted({d - low: c for d, c in self._c.items()})
        if reduced.degree <= 0:
            return roots
        trailing = abs(reduced.integer_coefficients()[0])
        for q in _divisors(trailing):
            for cand in (q, -q):
                if reduced.eval_at(cand) == 0:
                    roots.add(cand)
        return roots

    def divide_by_linear(self, root: RationalLike) -> Tuple["DimPoly", Fraction]:
        """Synthetic division by ``(n - root)``; returns (quotient, remainder)."""
        root = as_rational(root)
        deg = self.degree
        if deg < 1:
            return DimPoly(), self.coefficient(0)
        quotient: Dict[int, Fraction] = {}
        carry = Fraction(0)
        for d in range(deg, 0, -1):
            carry = carry * root + self.coefficient(d)
            quotient[d - 1] = carry
        remainder = carry * root + self.coefficient(0)
        return DimPoly._trusted(quotient), remainder

    def integer_factorization(self) -> Tuple[Fraction, list, "DimPoly"]:
        """Split off integer linear factors.

        Returns ``(scalar, roots, rest)`` with
        ``self == scalar * prod(n - root) * rest``; roots repeat by multiplicity,
        ascending, and ``rest`` is primitive with positive leading coefficient.
        """
        if not self._c:
            raise ValueError("cannot factor the zero polynomial")
        roots = []
        rest = self
        for root in sorted(self.roots_over_integers()):
            while rest.degree >= 1:
                q, rem = rest.divide_by_linear(root)
                if rem != 0:
                    break
                roots.append(root)
                rest = q
        scalar = rest.content()
        if rest.leading_coefficient < 0:
            scalar = -scalar
        return scalar, roots, rest / scalar

    def __repr__(self) -> str:
        if not self._c:
            return "DimPoly(0)"
        return "DimPoly({" + ", ".join(f"{d}: {c}" for d, c in self._c.items()) + "})"


def _divisors(m: int):
    if m == 0:
        return []
    small, large = [], []
    for q in range(1, isqrt(m) + 1):
        if m % q == 0:
            small.append(q)
            if q != m // q:
                large.append(m // q)
    return small + large[::-1]


def _dimpoly_or_none(value) -> Optional[DimPoly]:
    if isinstance(value, DimPoly):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return DimPoly.constant(value)
    return None


N = DimPoly.symbol()


# --------------------------------------------------------------------------- #
# RadialCoeff
# --------------------------------------------------------------------------- #


class RadialCoeff:
    """Laurent polynomial ``sum_e p_e(n) r^e``; exponents may be negative."""

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Optional[Mapping[int, Union[DimPoly, RationalLike]]] = None):
        clean: Dict[int, DimPoly] = {}
        for e, p in (terms or {}).items():
            if not isinstance(e, int) or isinstance(e, bool):
                raise ValueError(f"r-exponent must be an integer, got {e!r}")
            p = DimPoly.coerce(p)
            if p:
                clean[e] = p
        self._t = dict(sorted(clean.items()))
        self._hash: Optional[int] = None

    @classmethod
    def _trusted(cls, terms: Dict[int, DimPoly]) -> "RadialCoeff":
        obj = cls.__new__(cls)
        obj._t = dict(sorted((e, p) for e, p in terms.items() if p))
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, exponent: int, coefficient: Union[DimPoly, RationalLike] = 1) -> "RadialCoeff":
        return cls({exponent: coefficient})

    @classmethod
    def coerce(cls, value) -> "RadialCoeff":
        if isinstance(value, RadialCoeff):
            return value
        if isinstance(value, DimPoly):
            return cls({0: value})
        return cls({0: as_rational(value)})

    @property
    def terms(self) -> Dict[int, DimPoly]:
        return dict(self._t)

    def items(self) -> Iterator[Tuple[int, DimPoly]]:
        return iter(self._t.items())

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(self._t)

    def coefficient(self, exponent: int) -> DimPoly:
        return self._t.get(exponent, DimPoly())

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RadialCoeff):
            try:
                other = RadialCoeff.coerce(other)
            except TypeError:
                return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._t.items()))
        return self._hash

    def __add__(self, other):
        other = RadialCoeff.coerce(other)
        out = dict(self._t)
        for e, p in other._t.items():
            out[e] = out[e] + p if e in out else p
        return RadialCoeff._trusted(out)

    __radd__ = __add__

    def __neg__(self) -> "RadialCoeff":
        return RadialCoeff._trusted({e: -p for e, p in self._t.items()})

    def __sub__(self, other):
        return self + (-RadialCoeff.coerce(other))

    def __rsub__(self, other):
        return RadialCoeff.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, RadialOperator):
            return NotImplemented
        other = RadialCoeff.coerce(other)
        out: Dict[int, DimPoly] = {}
        for e1, p1 in self._t.items():
            for e2, p2 in other._t.items():
                prod = p1 * p2
                out[e1 + e2] = out[e1 + e2] + prod if e1 + e2 in out else prod
        return RadialCoeff._trusted(out)

    __rmul__ = __mul__

    def derivative(self) -> "RadialCoeff":
        """Term-wise d/dr."""
        return coeff_derivative(self)

    def substitute_n(self, n0: RationalLike) -> "RadialCoeff":
        return RadialCoeff._trusted(
            {e: DimPoly.constant(p.eval_at(n0)) for e, p in self._t.items()}
        )

    def eval_float(self, r, n0: Optional[float] = None):
        """Floating evaluation; ``n0`` may be omitted when every coefficient is constant.

        ``r`` may be a float or a numpy array.
        """
        total = 0.0
        for e, p in self._t.items():
            c = float(p.constant_value()) if n0 is None else p.eval_float(n0)
            total = total + c * r**e
        return total

    def __repr__(self) -> str:
        return "RadialCoeff({" + ", ".join(f"{e}: {p!r}" for e, p in self._t.items()) + "})"


def coeff_derivative(c: RadialCoeff) -> RadialCoeff:
    return RadialCoeff._trusted({e - 1: p * e for e, p in c.items() if e != 0})


# --------------------------------------------------------------------------- #
# RadialOperator
# --------------------------------------------------------------------------- #

# raw accumulator: order -> exponent -> degree -> coefficient
_Raw = Dict[int, Dict[int, Dict[int, Fraction]]]


def _accumulate(raw: _Raw, k: int, e: int, d: int, value) -> None:
    slot = raw.setdefault(k, {}).setdefault(e, {})
    slot[d] = slot.get(d, 0) + value


class RadialOperator:
    """Normal-ordered differential operator ``sum_k c_k * d^k``.

    ``A * B`` is composition (noncommutative); numbers, ``DimPoly`` and
    ``RadialCoeff`` values act as multiplication operators.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Optional[Mapping[int, Union[RadialCoeff, DimPoly, RationalLike]]] = None):
        clean: Dict[int, RadialCoeff] = {}
        for k, c in (terms or {}).items():
            if not isinstance(k, int) or isinstance(k, bool) or k < 0:
                raise ValueError(f"derivative order must be a non-negative integer, got {k!r}")
            c = RadialCoeff.coerce(c)
            if c:
                clean[k] = c
        self._t = dict(sorted(clean.items()))
        self._hash: Optional[int] = None

    @classmethod
    def _trusted(cls, terms: Dict[int, RadialCoeff]) -> "RadialOperator":
        obj = cls.__new__(cls)
        obj._t = dict(sorted((k, c) for k, c in terms.items() if c))
        obj._hash = None
        return obj

    @classmethod
    def _from_raw(cls, raw: _Raw) -> "RadialOperator":
        terms = {}
        for k, by_exp in raw.items():
            coeff = RadialCoeff._trusted(
                {e: DimPoly._trusted(by_deg) for e, by_deg in by_exp.items()}
            )
            if coeff:
                terms[k] = coeff
        return cls._trusted(terms)

    @classmethod
    def zero(cls) -> "RadialOperator":
        return cls()

    @classmethod
    def identity(cls) -> "RadialOperator":
        return cls({0: 1})

    @classmethod
    def derivative(cls, k: int = 1) -> "RadialOperator":
        """The generator ``d^k``."""
        return cls({k: 1})

    @classmethod
    def multiplication(cls, c) -> "RadialOperator":
        return cls({0: RadialCoeff.coerce(c)})

    @classmethod
    def coerce(cls, value) -> "RadialOperator":
        if isinstance(value, RadialOperator):
            return value
        return cls.multiplication(value)

    @property
    def terms(self) -> Dict[int, RadialCoeff]:
        return dict(self._t)

    def items(self) -> Iterator[Tuple[int, RadialCoeff]]:
        return iter(self._t.items())

    def raw_terms(self) -> Iterator[Tuple[int, int, int, Fraction]]:
        """Flattened ``(order, exponent, degree, coefficient)`` tuples."""
        for k, c in self._t.items():
            for e, p in c.items():
                for d, v in p.items():
                    yield k, e, d, v

    @property
    def order(self) -> int:
        """Highest derivative order; -1 for the zero operator."""
        return max(self._t) if self._t else -1

    def coefficient(self, k: int) -> RadialCoeff:
        return self._t.get(k, RadialCoeff())

    def is_zero(self) -> bool:
        return not self._t

    def is_multiplication(self) -> bool:
        return self.order <= 0

    def is_concrete(self) -> bool:
        """True when no coefficient depends on ``n``."""
        return all(d == 0 for _, _, d, _ in self.raw_terms())

    def __bool__(self) -> bool:
        return bool(self._t)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RadialOperator):
            try:
                other = RadialOperator.coerce(other)
            except TypeError:
                return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._t.items()))
        return self._hash

    def __add__(self, other):
        return op_add(self, RadialOperator.coerce(other))

    __radd__ = __add__

    def __neg__(self) -> "RadialOperator":
        return RadialOperator._trusted({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        return op_add(self, -RadialOperator.coerce(other))

    def __rsub__(self, other):
        return op_add(RadialOperator.coerce(other), -self)

    def __mul__(self, other):
        return op_compose(self, RadialOperator.coerce(other))

    def __rmul__(self, other):
        return op_compose(RadialOperator.coerce(other), self)

    def __pow__(self, k: int) -> "RadialOperator":
        if not isinstance(k, int) or k < 0:
            raise ValueError("operator powers must be non-negative integers")
        out = RadialOperator.identity()
        for _ in range(k):
            out = op_compose(out, self)
        return out

    def __call__(self, p) -> RadialCoeff:
        return op_apply(self, RadialCoeff.coerce(p))

    def __repr__(self) -> str:
        return "RadialOperator({" + ", ".join(f"{k}: {c!r}" for k, c in self._t.items()) + "})"


def op_add(a: RadialOperator, b: RadialOperator) -> RadialOperator:
    out = dict(a.terms)
    for k, c in b.items():
        out[k] = out[k] + c if k in out else c
    return RadialOperator._trusted(out)


def op_scale(a: RadialOperator, c) -> RadialOperator:
    """Left multiplication ``c * A`` by the multiplication operator ``c``."""
    c = RadialCoeff.coerce(c)
    return RadialOperator._trusted({k: c * ck for k, ck in a.items()})


def op_compose(a: RadialOperator, b: RadialOperator) -> RadialOperator:
    """``A o B`` brought to normal order by the Leibniz rule.

    (c d^k) o (p r^e d^l) = sum_j C(k, j) c (p r^e)^{(j)} d^{k-j+l}
    """
    raw: _Raw = {}
    for k, e1, d1, v1 in a.raw_terms():
        for l, e2, d2, v2 in b.raw_terms():
            base = v1 * v2
            for j in range(k + 1):
                ff = falling_factorial(e2, j)
                if ff == 0:
                    break
                _accumulate(raw, k - j + l, e1 + e2 - j, d1 + d2, comb(k, j) * ff * base)
    return RadialOperator._from_raw(raw)


def op_commutator(a: RadialOperator, b: RadialOperator) -> RadialOperator:
    return op_compose(a, b) - op_compose(b, a)


def op_apply(a: RadialOperator, p: RadialCoeff) -> RadialCoeff:
    """Exact action of ``A`` on a Laurent polynomial in ``r``."""
    raw: Dict[int, Dict[int, Fraction]] = {}
    for k, e1, d1, v1 in a.raw_terms():
        for e2, poly in p.items():
            ff = falling_factorial(e2, k)
            if ff == 0:
                continue
            for d2, v2 in poly.items():
                slot = raw.setdefault(e1 + e2 - k, {})
                slot[d1 + d2] = slot.get(d1 + d2, 0) + ff * v1 * v2
    return RadialCoeff._trusted({e: DimPoly._trusted(c) for e, c in raw.items()})


def substitute_n(a: RadialOperator, n0: RationalLike) -> RadialOperator:
    """Specialize the dimension symbol to ``n0``."""
    n0 = as_rational(n0)
    return RadialOperator._trusted({k: c.substitute_n(n0) for k, c in a.items()})


def _dimension_poly(dimension: Optional[RationalLike]) -> DimPoly:
    return N if dimension is None else DimPoly.constant(dimension)


def conjugate_by_r_power(a: RadialOperator, w: Union[DimPoly, RationalLike]) -> RadialOperator:
    """``r^{-w} A r^{w}``, computed through the generator map ``d -> d + w/r``."""
    w = DimPoly.coerce(w)
    gen = RadialOperator({1: 1, 0: RadialCoeff.monomial(-1, w)})
    out = RadialOperator.zero()
    power = RadialOperator.identity()
    for k in range(a.order + 1):
        c = a.coefficient(k)
        if c:
            out = out + op_scale(power, c)
        power = op_compose(power, gen)
    return out


def formal_adjoint(a: RadialOperator, dimension: Optional[RationalLike] = None) -> RadialOperator:
    """Formal adjoint for the weight ``r^(n-1)``.

    Uses ``d^+ = -d - (n-1)/r`` and ``(c d^k)^+ = (d^+)^k o c``. ``dimension``
    fixes ``n``; by default ``n`` stays symbolic.
    """
    n = _dimension_poly(dimension)
    d_adj = RadialOperator({1: -1, 0: RadialCoeff.monomial(-1, -(n - 1))})
    out = RadialOperator.zero()
    power = RadialOperator.identity()
    for k in range(a.order + 1):
        c = a.coefficient(k)
        if c:
            out = out + op_compose(power, RadialOperator.multiplication(c))
        power = op_compose(power, d_adj)
    return out


# --------------------------------------------------------------------------- #
# Prefactor
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Prefactor:
    """Overall factor ``scalar * i^i_power * hbar^hbar_power * m^mass_power``.

    Kept outside the operator algebra so that operator coefficients stay real.
    """

    i_power: int = 0
    hbar_power: int = 0
    mass_power: int = 0
    scalar: Fraction = Fraction(1)

    def __post_init__(self):
        scalar = as_rational(self.scalar)
        i_power = self.i_power % 4
        # fold i^2 = -1 into the scalar so equal factors compare equal
        if i_power >= 2:
            scalar, i_power = -scalar, i_power - 2
        object.__setattr__(self, "scalar", scalar)
        object.__setattr__(self, "i_power", i_power)

    def __mul__(self, other: "Prefactor") -> "Prefactor":
        if not isinstance(other, Prefactor):
            return NotImplemented
        return Prefactor(
            self.i_power + other.i_power,
            self.hbar_power + other.hbar_power,
            self.mass_power + other.mass_power,
            self.scalar * other.scalar,
        )

    def conjugate(self) -> "Prefactor":
        return Prefactor(-self.i_power, self.hbar_power, self.mass_power, self.scalar)

    def render(self) -> str:
        """ASCII form such as ``-i*hbar`` or ``-hbar^2/(2*m)``."""
        if self.scalar == 0:
            return "0"
        sign = "-" if self.scalar < 0 else ""
        mag = abs(self.scalar)
        num = []
        den = []
        if mag.numerator != 1:
            num.append(str(mag.numerator))
        if mag.denominator != 1:
            den.append(str(mag.denominator))
        if self.i_power:
            num.append("i")
        for sym, power in (("hbar", self.hbar_power), ("m", self.mass_power)):
            if power > 0:
                num.append(sym if power == 1 else f"{sym}^{power}")
            elif power < 0:
                den.append(sym if power == -1 else f"{sym}^{-power}")
        top = "*".join(num) or "1"
        if not den:
            return sign + top
        bottom = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
        return f"{sign}{top}/{bottom}"
