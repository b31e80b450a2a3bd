"""Exact arithmetic on Q_p truncations.

Scalars are elements of Z[1/p] stored exactly as unit * p^val with the unit
coprime to p.  The field is fixed to K = Q_p, so the local parameter is p and
the residue field has q = p elements.  Complex numbers enter only when a
root of unity is finally evaluated.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from .errors import DomainError, ResourceCapError

DEFAULT_ANGULAR_PRECISION = 8
DEFAULT_ENUMERATION_CAP = 10**8

Rational = int | Fraction


def _check_prime(p: int) -> None:
    if p < 2:
        raise DomainError(f"prime must be >= 2, got {p}")


def int_valuation(n: int, p: int) -> int:
    """Largest k with p^k | n, for n != 0."""
    if n == 0:
        raise DomainError("valuation of 0 is +infinity; handle separately")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def split_p_part(x: Rational, p: int) -> tuple[int, int]:
    """Write x = unit * p^val with p coprime to unit.

    The denominator of x must be a power of p; anything else is outside the
    a * p^v domain and is rejected.  Returns (unit, val); (0, 0) for x = 0.
    """
    x = Fraction(x)
    if x == 0:
        return 0, 0
    num, den = x.numerator, x.denominator
    dv = 0
    while den % p == 0:
        den //= p
        dv += 1
    if den != 1:
        raise DomainError(
            f"denominator of {x} is not a power of p={p}"
        )
    nv = int_valuation(num, p)
    return num // p**nv, nv - dv


class PadicRational:
    """An element a * p^v of Q_p with a in Z coprime to p (exact).

    The zero element stores unit 0 and reports valuation +infinity.
    """

    __slots__ = ("prime", "unit", "_val")

    def __init__(self, prime: int, value: Rational | "PadicRational" = 0):
        _check_prime(prime)
        if isinstance(value, PadicRational):
            if value.prime != prime:
                raise DomainError("prime mismatch")
            unit, val = value.unit, value._val
        else:
            unit, val = split_p_part(value, prime)
        self.prime = prime
        self.unit = unit
        self._val = val

    @classmethod
    def from_unit_val(cls, prime: int, unit: int, val: int) -> "PadicRational":
        if unit != 0 and unit % prime == 0:
            raise DomainError(f"unit {unit} divisible by p={prime}")
        x = cls.__new__(cls)
        x.prime = prime
        x.unit = unit
        x._val = val if unit != 0 else 0
        return x

    @property
    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def val(self) -> int | float:
        """v(x); +infinity for x = 0."""
        return math.inf if self.unit == 0 else self._val

    @property
    def abs_value(self) -> Fraction:
        """|x|_K = p^(-v(x)) as an exact rational; 0 for x = 0."""
        if self.unit == 0:
            return Fraction(0)
        v = self._val
        return Fraction(1, self.prime**v) if v >= 0 else Fraction(self.prime**-v)

    def angular_component(self, precision: int = DEFAULT_ANGULAR_PRECISION) -> int:
        """ac(x) = x * p^(-v(x)) reduced mod p^precision; 0 for x = 0."""
        if precision < 1:
            raise DomainError("precision must be >= 1")
        return self.unit % self.prime**precision

    def as_fraction(self) -> Fraction:
        if self.unit == 0:
            return Fraction(0)
        v = self._val
        if v >= 0:
            return Fraction(self.unit * self.prime**v)
        return Fraction(self.unit, self.prime**-v)

    def _coerce(self, other) -> "PadicRational":
        if isinstance(other, PadicRational):
            if other.prime != self.prime:
                raise DomainError("prime mismatch")
            return other
        return PadicRational(self.prime, other)

    def __add__(self, other) -> "PadicRational":
        other = self._coerce(other)
        return PadicRational(self.prime, self.as_fraction() + other.as_fraction())

    __radd__ = __add__

    def __neg__(self) -> "PadicRational":
        return PadicRational.from_unit_val(self.prime, -self.unit, self._val)

    def __sub__(self, other) -> "PadicRational":
        other = self._coerce(other)
        return PadicRational(self.prime, self.as_fraction() - other.as_fraction())

    def __rsub__(self, other) -> "PadicRational":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PadicRational":
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return PadicRational(self.prime, 0)
        return PadicRational.from_unit_val(
            self.prime, self.unit * other.unit, self._val + other._val
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PadicRational":
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("division by p-adic zero")
        return PadicRational(self.prime, self.as_fraction() / other.as_fraction())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicRational):
            try:
                other = self._coerce(other)
            except (DomainError, ValueError, TypeError):
                return NotImplemented
        return (self.prime, self.unit, self._val if self.unit else 0) == (
            other.prime,
            other.unit,
            other._val if other.unit else 0,
        )

    def __hash__(self) -> int:
        return hash((self.prime, self.unit, self._val if self.unit else 0))

    def __repr__(self) -> str:
        if self.is_zero:
            return f"PadicRational({self.prime}, 0)"
        return f"PadicRational({self.prime}, {self.unit}*{self.prime}^{self._val})"


def padic_meta(
    x: Rational,
    p: int,
    precision: int = DEFAULT_ANGULAR_PRECISION,
) -> tuple[int | float, Fraction, int]:
    """(v(x), |x|_K, ac(x) mod p^precision) for an exact rational x.

    x must have a p-power denominator.  v(0) = +infinity, |0| = 0 and the
    angular component of 0 is reported as 0.
    """
    y = PadicRational(p, x)
    return y.val, y.abs_value, y.angular_component(precision)


class RootOfUnity:
    """exp(2*pi*i * r / p^m), stored canonically with p coprime to r for m > 0."""

    __slots__ = ("prime", "numerator", "level")

    def __init__(self, prime: int, numerator: int, level: int):
        _check_prime(prime)
        if level < 0:
            raise DomainError("level must be >= 0")
        r = numerator % prime**level if level > 0 else 0
        while level > 0 and r % prime == 0:
            r //= prime
            level -= 1
        if level == 0:
            r = 0
        self.prime = prime
        self.numerator = r
        self.level = level

    @property
    def exponent(self) -> Fraction:
        """The fractional phase r / p^m in [0, 1)."""
        if self.level == 0:
            return Fraction(0)
        return Fraction(self.numerator, self.prime**self.level)

    @property
    def complex_value(self) -> complex:
        if self.level == 0:
            return 1.0 + 0.0j
        return cmath.exp(2j * math.pi * (self.numerator / self.prime**self.level))

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        if not isinstance(other, RootOfUnity):
            return NotImplemented
        if other.prime != self.prime:
            raise DomainError("prime mismatch")
        m = max(self.level, other.level)
        p = self.prime
        r = (
            self.numerator * p ** (m - self.level)
            + other.numerator * p ** (m - other.level)
        )
        return RootOfUnity(p, r, m)

    def conjugate(self) -> "RootOfUnity":
        return RootOfUnity(self.prime, -self.numerator, self.level)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RootOfUnity):
            return NotImplemented
        return (self.prime, self.numerator, self.level) == (
            other.prime,
            other.numerator,
            other.level,
        )

    def __hash__(self) -> int:
        return hash((self.prime, self.numerator, self.level))

    def __repr__(self) -> str:
        if self.level == 0:
            return f"RootOfUnity({self.prime}, 1)"
        return f"RootOfUnity({self.prime}, e(2pi*{self.numerator}/{self.prime}^{self.level}))"


def fractional_part(x: Rational, p: int) -> tuple[int, int]:
    """(r, m) with {x}_p = r / p^m canonical; requires a p-power denominator."""
    unit, val = split_p_part(x, p)
    if unit == 0 or val >= 0:
        return 0, 0
    m = -val
    return unit % p**m, m


def character(x: PadicRational | Rational, p: int | None = None) -> RootOfUnity:
    """The standard additive character Psi(x) = exp(2*pi*i * {x}_p).

    Psi is trivial on Z_p and nontrivial on p^(-1) Z_p; it is additive:
    character(x + y) = character(x) * character(y).
    """
    if isinstance(x, PadicRational):
        prime = x.prime
        if x.is_zero or x._val >= 0:
            return RootOfUnity(prime, 0, 0)
        m = -x._val
        return RootOfUnity(prime, x.unit % prime**m, m)
    if p is None:
        raise DomainError("prime required when x is a plain rational")
    r, m = fractional_part(x, p)
    return RootOfUnity(p, r, m)


@dataclass(frozen=True)
class Ball:
    """The set center + (p^e Z_p)^n; volume p^(-n e) under vol(Z_p^n) = 1."""

    prime: int
    center: tuple[PadicRational, ...]
    radius_exp: int

    def __post_init__(self):
        _check_prime(self.prime)
        if not self.center:
            raise DomainError("ball needs at least one coordinate")
        for c in self.center:
            if c.prime != self.prime:
                raise DomainError("center component prime mismatch")

    @classmethod
    def of(
        cls, prime: int, center: Sequence[Rational | PadicRational], radius_exp: int
    ) -> "Ball":
        comps = tuple(
            c if isinstance(c, PadicRational) else PadicRational(prime, c)
            for c in center
        )
        return cls(prime, comps, radius_exp)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def volume(self) -> Fraction:
        e, n = self.radius_exp, self.dim
        if e >= 0:
            return Fraction(1, self.prime ** (n * e))
        return Fraction(self.prime ** (-n * e))

    def center_fractions(self) -> tuple[Fraction, ...]:
        return tuple(c.as_fraction() for c in self.center)

    def contains_point(self, point: Sequence[Rational]) -> bool:
        for c, x in zip(self.center, point, strict=True):
            d = Fraction(x) - c.as_fraction()
            if d != 0 and split_p_part(d, self.prime)[1] < self.radius_exp:
                return False
        return True

    def contains_ball(self, other: "Ball") -> bool:
        if other.dim != self.dim or other.radius_exp < self.radius_exp:
            return False
        return self.contains_point(other.center_fractions())

    def is_disjoint(self, other: "Ball") -> bool:
        # Ultrametric: two balls are nested or disjoint.
        if other.radius_exp >= self.radius_exp:
            return not self.contains_point(other.center_fractions())
        return not other.contains_point(self.center_fractions())

    def is_integral(self) -> bool:
        """True when the ball sits inside Z_p^n."""
        return self.radius_exp >= 0 and all(
            c.is_zero or c._val >= 0 for c in self.center
        )


def enumerate_residues(
    ball: Ball,
    m: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Iterator[tuple[Fraction, ...]]:
    """Representatives of ball / (p^m Z_p)^n, in lexicographic order.

    Yields exactly p^(n * max(0, m - e)) exact rational vectors of the form
    center + p^e * t with t running over [0, p^(m-e))^n.
    """
    if m < 0:
        raise DomainError("level m must be >= 0")
    p, e, n = ball.prime, ball.radius_exp, ball.dim
    width = p ** max(0, m - e)
    required = width**n
    if required > cap:
        raise ResourceCapError(required, cap)
    center = ball.center_fractions()
    step = Fraction(p**e) if e >= 0 else Fraction(1, p**-e)
    for t in product(range(width), repeat=n):
        yield tuple(c + step * ti for c, ti in zip(center, t))


def residue_count(ball: Ball, m: int) -> int:
    return ball.prime ** (ball.dim * max(0, m - ball.radius_exp))
