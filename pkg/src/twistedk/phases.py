"""Exact circle-group scalars: rational phases and cyclotomic numbers.

A ``Phase`` is a root of unity exp(2*pi*i*p/q) stored as the reduced exponent
p/q in [0, 1), so products and inverses are exact.  ``Cyclotomic`` elements
live in Q(zeta_N) in the power basis 1, zeta, ..., zeta^(phi(N)-1) reduced
modulo the N-th cyclotomic polynomial; the canonical form makes equality a
coefficient comparison and integrality a syntactic check.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

from .errors import ValidationError

__all__ = ["Phase", "Cyclotomic", "euler_phi", "cyclotomic_polynomial"]


class Phase:
    """exp(2*pi*i * exponent) with exponent a Fraction reduced mod 1."""

    __slots__ = ("exponent",)

    def __init__(self, numerator=0, denominator=None):
        if isinstance(numerator, Phase):
            exp = numerator.exponent
        elif denominator is None:
            exp = Fraction(numerator)
        else:
            exp = Fraction(int(numerator), int(denominator))
        object.__setattr__(self, "exponent", exp % 1)

    def __setattr__(self, name, value):
        raise AttributeError("Phase is immutable")

    @classmethod
    def one(cls):
        return cls(0)

    @classmethod
    def parse(cls, text):
        """Parse "p/q" or "p" as the phase exp(2*pi*i*p/q)."""
        try:
            return cls(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse phase {text!r}: {exc}") from exc

    @property
    def is_one(self):
        return self.exponent == 0

    @property
    def order(self):
        return self.exponent.denominator

    def __mul__(self, other):
        if isinstance(other, Phase):
            return Phase(self.exponent + other.exponent)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Phase):
            return Phase(self.exponent - other.exponent)
        return NotImplemented

    def inverse(self):
        return Phase(-self.exponent)

    def conjugate(self):
        return self.inverse()

    def __pow__(self, k):
        return Phase(self.exponent * k)

    def __eq__(self, other):
        if isinstance(other, Phase):
            return self.exponent == other.exponent
        return NotImplemented

    def __hash__(self):
        return hash(("Phase", self.exponent))

    def __complex__(self):
        return cmath.exp(2j * cmath.pi * float(self.exponent))

    def to_cyclotomic(self, order=None):
        n = self.exponent.denominator
        if order is None:
            order = n
        if order % n:
            raise ValidationError(f"phase of order {n} does not embed in Q(zeta_{order})")
        k = int(self.exponent * order)
        return Cyclotomic.zeta_power(order, k)

    def format(self):
        e = self.exponent
        return f"{e.numerator}/{e.denominator}" if e.denominator != 1 else "0"

    def __repr__(self):
        return f"Phase({self.format()})"


def euler_phi(n: int) -> int:
    count = 0
    for k in range(1, n + 1):
        if math.gcd(k, n) == 1:
            count += 1
    return count


def _poly_divmod_int(num, den):
    # exact division of integer polynomials, den monic; coefficients low-to-high
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    assert all(c == 0 for c in num), "non-exact polynomial division"
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple:
    """Integer coefficients (low degree first) of the n-th cyclotomic polynomial."""
    if n == 1:
        return (-1, 1)
    poly = [0] * n + [1]
    poly[0] = -1  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divmod_int(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_reductions(n: int) -> tuple:
    """x^k mod Phi_n as Fraction vectors of length phi(n), for 0 <= k < max(n, 2*phi(n)-1)."""
    phi = euler_phi(n)
    poly = cyclotomic_polynomial(n)
    top = max(n, 2 * phi - 1)
    rows = []
    for k in range(phi):
        row = [Fraction(0)] * phi
        row[k] = Fraction(1)
        rows.append(tuple(row))
    for k in range(phi, top):
        prev = rows[k - 1]
        shifted = [Fraction(0)] + list(prev[: phi - 1])
        lead = prev[phi - 1]
        if lead:
            for j in range(phi):
                shifted[j] -= lead * poly[j]
        rows.append(tuple(shifted))
    return tuple(rows)


class Cyclotomic:
    """Element of Q(zeta_order) in canonical power-basis coordinates."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order, coeffs):
        order = int(order)
        phi = euler_phi(order)
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != phi:
            raise ValidationError(
                f"Q(zeta_{order}) needs {phi} coordinates, got {len(coeffs)}"
            )
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic is immutable")

    @classmethod
    def zero(cls, order):
        return cls(order, [0] * euler_phi(order))

    @classmethod
    def from_rational(cls, order, value):
        coeffs = [Fraction(value)] + [Fraction(0)] * (euler_phi(order) - 1)
        return cls(order, coeffs)

    @classmethod
    def zeta_power(cls, order, k):
        red = _power_reductions(order)
        return cls(order, red[k % order])

    @classmethod
    def from_phase(cls, order, phase: Phase):
        return phase.to_cyclotomic(order)

    def lift(self, order):
        """Embed into the larger field Q(zeta_order); order must be a multiple."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValidationError(f"cannot lift from order {self.order} to {order}")
        step = order // self.order
        out = Cyclotomic.zero(order)
        for k, c in enumerate(self.coeffs):
            if c:
                out = out + Cyclotomic.zeta_power(order, k * step) * c
        return out

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            n = self.order * other.order // math.gcd(self.order, other.order)
            return self.lift(n), other.lift(n)
        if isinstance(other, Phase):
            n = self.order * other.order // math.gcd(self.order, other.order)
            return self.lift(n), other.to_cyclotomic(n)
        if isinstance(other, (int, Fraction)):
            return self, Cyclotomic.from_rational(self.order, other)
        return None, None

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return Cyclotomic(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [c * other for c in self.coeffs])
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        phi = len(a.coeffs)
        conv = [Fraction(0)] * (2 * phi - 1)
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    conv[i + j] += x * y
        red = _power_reductions(a.order)
        out = [Fraction(0)] * phi
        for k, c in enumerate(conv):
            if c:
                row = red[k]
                for j in range(phi):
                    out[j] += c * row[j]
        return Cyclotomic(a.order, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Phase, Cyclotomic)):
            a, b = self._coerce(other)
            return a.order == b.order and a.coeffs == b.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(("Cyclotomic", self.order, self.coeffs))

    @property
    def is_rational(self):
        return all(c == 0 for c in self.coeffs[1:])

    @property
    def is_integer(self):
        return self.is_rational and self.coeffs[0].denominator == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValidationError(f"{self!r} is not rational")
        return self.coeffs[0]

    def __complex__(self):
        zeta = cmath.exp(2j * cmath.pi / self.order)
        return sum(float(c) * zeta**k for k, c in enumerate(self.coeffs))

    def __repr__(self):
        terms = [f"{c}*z^{k}" for k, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms) if terms else "0"
        return f"Cyclotomic[{self.order}]({body})"
