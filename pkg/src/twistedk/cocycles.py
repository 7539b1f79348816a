"""U(1)-valued 2-cocycles on finite groups, with exact phase arithmetic.

All cocycle values are roots of unity stored as ``Phase``; equality tests and
the |G|^3 cocycle-identity scan are exact.  Downstream modules assume
normalized cocycles (beta(g,e) = beta(e,g) = 1); ``normalize_cocycle``
produces one from any valid cocycle.
"""

from __future__ import annotations

import numpy as np

from .errors import TwistedKError, ValidationError
from .groups import FiniteGroup, Subgroup
from .phases import Phase

__all__ = [
    "TwoCocycle",
    "validate_cocycle",
    "trivial_cocycle",
    "normalize_cocycle",
    "coboundary_twist",
    "transgression_character",
    "is_beta_regular",
    "beta_regular_classes",
    "lbeta_cocycle",
    "restrict_cocycle",
    "pauli_cocycle",
    "bilinear_cocycle",
    "pullback_cocycle",
]


class TwoCocycle:
    """A validated 2-cocycle beta: G x G -> U(1)."""

    def __init__(self, group: FiniteGroup, values, check=True):
        self.group = group
        n = group.n
        table = np.empty((n, n), dtype=object)
        for g in range(n):
            for h in range(n):
                v = values[g][h]
                table[g, h] = v if isinstance(v, Phase) else Phase.parse(str(v))
        self.values = table
        if check:
            self._validate()

    def _validate(self):
        G, b = self.group, self.values
        for g in range(G.n):
            for h in range(G.n):
                gh = G.mul(g, h)
                for k in range(G.n):
                    lhs = b[g, h] * b[gh, k]
                    rhs = b[h, k] * b[g, G.mul(h, k)]
                    if lhs != rhs:
                        raise ValidationError(
                            "cocycle identity fails at "
                            f"({G.names[g]},{G.names[h]},{G.names[k]})",
                            witness=(g, h, k),
                        )

    def __call__(self, g, h) -> Phase:
        return self.values[g, h]

    @property
    def normalized(self):
        G = self.group
        e = G.identity
        return all(
            self.values[g, e].is_one and self.values[e, g].is_one for g in range(G.n)
        )

    def fingerprint(self):
        return (
            self.group.n,
            tuple(self.values[g, h].exponent for g in range(self.group.n) for h in range(self.group.n)),
        )

    @property
    def max_order(self):
        return max(p.order for p in self.values.flat)

    def __eq__(self, other):
        if isinstance(other, TwoCocycle):
            return self.group is other.group and self.fingerprint() == other.fingerprint()
        return NotImplemented

    def __repr__(self):
        tag = "normalized" if self.normalized else "non-normalized"
        return f"TwoCocycle({tag}, |G|={self.group.n})"


def validate_cocycle(group: FiniteGroup, values) -> TwoCocycle:
    """Check the cocycle identity on all |G|^3 triples; witness on failure.

    A valid but non-normalized cocycle is returned as-is; callers that need
    normalization use :func:`normalize_cocycle`.
    """
    return TwoCocycle(group, values, check=True)


def trivial_cocycle(group: FiniteGroup) -> TwoCocycle:
    one = Phase.one()
    vals = [[one] * group.n for _ in range(group.n)]
    return TwoCocycle(group, vals, check=False)


def normalize_cocycle(beta: TwoCocycle) -> TwoCocycle:
    """Divide by beta(e,e); the cocycle identity forces the result normalized.

    The coboundary used (the constant function g -> beta(e,e)^-1) is recorded
    on the result as ``normalizing_coboundary``.
    """
    G = beta.group
    c = beta(G.identity, G.identity)
    if c.is_one:
        out = beta
        cob = [Phase.one()] * G.n
    else:
        inv = c.inverse()
        vals = [[beta(g, h) * inv for h in range(G.n)] for g in range(G.n)]
        out = TwoCocycle(G, vals, check=False)
        cob = [inv] * G.n
    if not out.normalized:
        raise TwistedKError("normalization failed; input was not a valid cocycle")
    out.normalizing_coboundary = cob
    return out


def coboundary_twist(beta: TwoCocycle, b) -> TwoCocycle:
    """beta * db with (db)(g,h) = b(g) b(h) b(gh)^-1; requires b(e) = 1."""
    G = beta.group
    b = [v if isinstance(v, Phase) else Phase.parse(str(v)) for v in b]
    if not b[G.identity].is_one:
        raise ValidationError("coboundary function must send the identity to 1")
    vals = [
        [beta(g, h) * b[g] * b[h] * b[G.mul(g, h)].inverse() for h in range(G.n)]
        for g in range(G.n)
    ]
    return TwoCocycle(G, vals, check=False)


def transgression_character(beta: TwoCocycle, g) -> dict:
    """The character chi(h) = beta(h,g) * beta(g,h)^-1 of the centralizer of g.

    The homomorphism property on C_G(g) is re-verified; a failure can only
    come from an invalid cocycle slipping past validation.
    """
    G = beta.group
    cent = G.centralizer(g)
    chi = {h: beta(h, g) / beta(g, h) for h in cent}
    for h in cent:
        for k in cent:
            if chi[h] * chi[k] != chi[G.mul(h, k)]:
                raise TwistedKError(
                    "transgressed character is not a homomorphism; "
                    "cocycle validation is broken"
                )
    return chi


def is_beta_regular(beta: TwoCocycle, g) -> bool:
    """True iff the transgressed character of g is trivial on its centralizer."""
    chi = transgression_character(beta, g)
    return all(p.is_one for p in chi.values())


def beta_regular_classes(beta: TwoCocycle):
    """Representatives of the beta-regular conjugacy classes.

    Regularity is constant on classes; this is re-checked on every member.
    """
    G = beta.group
    reps = []
    for cls in G.conjugacy_classes():
        flags = {is_beta_regular(beta, g) for g in cls}
        if len(flags) != 1:
            raise TwistedKError("beta-regularity not constant on a conjugacy class")
        if flags.pop():
            reps.append(cls[0])
    return reps


def lbeta_cocycle(beta: TwoCocycle, h, g) -> Phase:
    """Groupoid cocycle of the character line bundle: beta(hgh^-1, h) / beta(h, g)."""
    G = beta.group
    return beta(G.conj(h, g), h) / beta(h, g)


def restrict_cocycle(beta: TwoCocycle, sub: Subgroup) -> TwoCocycle:
    """Restriction to a validated subgroup, relabeled to the subgroup's own ids."""
    H = sub.group
    vals = [
        [beta(sub.to_parent(i), sub.to_parent(j)) for j in range(H.n)]
        for i in range(H.n)
    ]
    return TwoCocycle(H, vals, check=False)


# -- constructors -------------------------------------------------------------


def bilinear_cocycle(group: FiniteGroup, pairing) -> TwoCocycle:
    """Cocycle from an explicit bimultiplicative pairing (g,h) -> Phase.

    Bimultiplicativity makes the cocycle identity automatic, but it is checked
    anyway.
    """
    vals = [[pairing(g, h) for h in range(group.n)] for g in range(group.n)]
    return TwoCocycle(group, vals, check=True)


def pauli_cocycle(group: FiniteGroup) -> TwoCocycle:
    """The sign cocycle (-1)^(b1*a2) on Z/2 x Z/2 (elements ordered as in
    ``direct_product(cyclic(2), cyclic(2))``: id = 2*a + b for (a, b))."""
    if group.n != 4:
        raise ValidationError("pauli_cocycle expects a group of order 4")

    def pairing(g, h):
        b1 = g % 2
        a2 = h // 2
        return Phase(b1 * a2, 2)

    return bilinear_cocycle(group, pairing)


def pullback_cocycle(beta: TwoCocycle, group: FiniteGroup, hom) -> TwoCocycle:
    """Pull back along a homomorphism ``hom``: group -> beta.group (verified)."""
    target = beta.group
    for a in range(group.n):
        for b in range(group.n):
            if hom[group.mul(a, b)] != target.mul(hom[a], hom[b]):
                raise ValidationError("map is not a homomorphism", witness=(a, b))
    vals = [[beta(hom[a], hom[b]) for b in range(group.n)] for a in range(group.n)]
    return TwoCocycle(group, vals, check=False)
