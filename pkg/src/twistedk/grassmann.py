"""Rank-2 Grassmann coefficients for super parallel transport.

Transport operators are polynomials in two formal odd variables theta, eta
(theta^2 = eta^2 = 0, theta*eta = -eta*theta) with operator-valued
coefficients.  Odd variables anticommute with odd operators, so multiplying
components picks up a sign from moving the left factor's odd part past the
right factor's odd variables.

Atoms (the coefficient operators) need ``__matmul__``, ``parity_split``,
``__add__``, ``__mul__`` by scalars, and ``max_abs``; both plain
parity-tagged matrices (:class:`FlatOperator`) and
:class:`~twistedk.forms.OmegaMatrix` qualify.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

__all__ = ["FlatOperator", "GrassmannOperator", "SuperTime", "WORDS"]

WORDS = ("", "t", "e", "te")  # 1, theta, eta, theta*eta


_LETTER_RANK = {"t": 0, "e": 1}  # theta before eta in the canonical monomial


def _merge_words(w1, w2):
    """(sign, normal form) of the concatenation, or (0, None) if it vanishes."""
    letters = list(w1 + w2)
    if len(set(letters)) != len(letters):
        return 0, None
    sign = 1
    # bubble sort, counting transpositions of the odd letters
    for i in range(len(letters)):
        for j in range(len(letters) - 1 - i):
            if _LETTER_RANK[letters[j]] > _LETTER_RANK[letters[j + 1]]:
                letters[j], letters[j + 1] = letters[j + 1], letters[j]
                sign = -sign
    return sign, "".join(letters)


class FlatOperator:
    """A plain complex matrix with Z/2-graded rows and columns."""

    def __init__(self, matrix, row_par, col_par):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.row_par = np.asarray(row_par, dtype=int)
        self.col_par = np.asarray(col_par, dtype=int)
        if self.matrix.shape != (len(self.row_par), len(self.col_par)):
            raise ValidationError("FlatOperator shape does not match gradings")

    @classmethod
    def identity(cls, parities):
        n = len(parities)
        return cls(np.eye(n, dtype=complex), parities, parities)

    def __matmul__(self, other):
        if not np.array_equal(self.col_par, other.row_par):
            raise ValidationError("grading mismatch in composition")
        return FlatOperator(self.matrix @ other.matrix, self.row_par, other.col_par)

    def __add__(self, other):
        return FlatOperator(self.matrix + other.matrix, self.row_par, self.col_par)

    def __mul__(self, scalar):
        return FlatOperator(self.matrix * complex(scalar), self.row_par, self.col_par)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1)

    def parity_split(self):
        mask = (self.row_par[:, None] == self.col_par[None, :])
        even = self.matrix * mask
        return (
            FlatOperator(even, self.row_par, self.col_par),
            FlatOperator(self.matrix - even, self.row_par, self.col_par),
        )

    def supertrace(self):
        signs = np.where(self.row_par % 2, -1.0, 1.0)
        return complex(np.sum(np.diagonal(self.matrix) * signs))

    def max_abs(self):
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0

    def allclose(self, other, tol=1e-9):
        return np.allclose(self.matrix, other.matrix, atol=tol)

    def __repr__(self):
        return f"FlatOperator({self.matrix.shape})"


class GrassmannOperator:
    """Sum over WORDS of (odd monomial) x (operator atom)."""

    def __init__(self, components):
        self.components = {w: v for w, v in components.items() if v is not None}
        for w in self.components:
            if w not in WORDS:
                raise ValidationError(f"unknown odd monomial {w!r}")

    @classmethod
    def constant(cls, atom):
        return cls({"": atom})

    def __add__(self, other):
        out = dict(self.components)
        for w, v in other.components.items():
            out[w] = out[w] + v if w in out else v
        return GrassmannOperator(out)

    def __mul__(self, scalar):
        return GrassmannOperator({w: v * scalar for w, v in self.components.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        out = {}
        for w1, T in self.components.items():
            t_even, t_odd = T.parity_split()
            for w2, U in other.components.items():
                sign, word = _merge_words(w1, w2)
                if sign == 0:
                    continue
                # moving the odd part of T past the odd letters of w2
                odd_sign = (-1) ** len(w2)
                term = sign * ((t_even @ U) + odd_sign * (t_odd @ U))
                out[word] = out[word] + term if word in out else term
        return GrassmannOperator(out)

    def component(self, word):
        return self.components.get(word)

    def deviation(self, other):
        """Max entry deviation across all four components."""
        dev = 0.0
        for w in WORDS:
            a = self.components.get(w)
            b = other.components.get(w)
            if a is None and b is None:
                continue
            if a is None:
                dev = max(dev, b.max_abs())
            elif b is None:
                dev = max(dev, a.max_abs())
            else:
                dev = max(dev, (a + (-1) * b).max_abs())
        return dev

    def __repr__(self):
        return f"GrassmannOperator(words={sorted(self.components)})"


class SuperTime:
    """A point of super time: t + (a*theta + b*eta) with a theta*eta component.

    ``compose`` implements (t, theta).(s, eta) = (t + s + theta*eta, theta + eta)
    in coordinates: odd parts add, and the bilinear theta-eta cross term feeds
    the even part.
    """

    def __init__(self, t, odd=(0.0, 0.0), top=0.0):
        self.t = float(t)
        self.odd = (complex(odd[0]), complex(odd[1]))
        self.top = complex(top)
        if self.t < 0:
            raise ValidationError("super time needs t >= 0")

    @classmethod
    def theta(cls, t):
        return cls(t, (1.0, 0.0))

    @classmethod
    def eta(cls, t):
        return cls(t, (0.0, 1.0))

    def compose(self, other: "SuperTime") -> "SuperTime":
        a1, b1 = self.odd
        a2, b2 = other.odd
        cross = a1 * b2 - b1 * a2  # (a1 th + b1 et)(a2 th + b2 et)
        return SuperTime(
            self.t + other.t,
            (a1 + a2, b1 + b2),
            self.top + other.top + cross,
        )

    def __repr__(self):
        return f"SuperTime(t={self.t}, odd={self.odd}, top={self.top})"
