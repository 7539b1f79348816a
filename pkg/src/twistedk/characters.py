"""Characters as sections over the inertia groupoid.

Per conjugacy-class representative g the character of a bundle is the even
form Z_g = sTr(exp(-F) rho(g)) over the model of the g-fixed set.  Values at
other elements of the class are determined by the conjugation covariance
Z_(hgh^-1)(h.x) = lbeta(h, g) * Z_g(x), which ``check_covariance`` verifies
wherever the data allows: over the whole group on the exact tier, over each
centralizer on the graded tier.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .bundles import GradedBundle, TwistedBundle
from .cocycles import lbeta_cocycle
from .errors import NumericalError, ValidationError
from .forms import Form, zero_dim_model

__all__ = [
    "InertiaContext",
    "InertiaSection",
    "CovarianceReport",
    "character",
    "check_covariance",
    "partition_function",
]


class InertiaContext:
    """Shared indexing for sections: class representatives and their models."""

    def __init__(self, group, cocycle, models, gset=None):
        self.group = group
        self.cocycle = cocycle
        self.models = dict(models)
        self.gset = gset
        self.class_reps = group.class_representatives()
        missing = [g for g in self.class_reps if g not in self.models]
        if missing:
            raise ValidationError(
                "missing fixed-set models for class representatives "
                + ", ".join(group.names[g] for g in missing)
            )

    @classmethod
    def from_gset(cls, gset, cocycle):
        group = gset.group
        models = {}
        for g in group.class_representatives():
            fixed = gset.fixed_points(g)
            index = {x: i for i, x in enumerate(fixed)}
            actions = {}
            for h in group.centralizer(g):
                mat = np.zeros((len(fixed), len(fixed)), dtype=complex)
                for x in fixed:
                    mat[index[gset.act(h, x)], index[x]] = 1.0
                actions[h] = mat
            model = zero_dim_model(
                len(fixed), names=[gset.point_names[x] for x in fixed]
            )
            if fixed:
                model = model.with_actions(actions)
            models[g] = model
        ctx = cls(group, cocycle, models, gset=gset)
        ctx.fixed_sets = {g: gset.fixed_points(g) for g in ctx.class_reps}
        return ctx

    @classmethod
    def from_graded(cls, bundle: GradedBundle):
        models = {g: pk.algebra for g, pk in bundle.packets.items()}
        return cls(bundle.group, bundle.cocycle, models)

    def zero_section(self, parity) -> "InertiaSection":
        forms = {g: self.models[g].zero() for g in self.class_reps}
        return InertiaSection(self, parity, forms, check=False)


def context_for(e) -> InertiaContext:
    if isinstance(e, TwistedBundle):
        return InertiaContext.from_gset(e.gset, e.cocycle)
    if isinstance(e, GradedBundle):
        return InertiaContext.from_graded(e)
    raise ValidationError("expected a bundle")


class InertiaSection:
    """A family of forms indexed by class representatives, with a parity tag."""

    def __init__(self, context: InertiaContext, parity, forms, check=True):
        if parity not in (0, 1):
            raise ValidationError("section parity must be 0 (even) or 1 (odd)")
        self.context = context
        self.parity = parity
        self.forms = dict(forms)
        if set(self.forms) != set(context.class_reps):
            raise ValidationError("section components must cover every class")
        if check:
            for g, form in self.forms.items():
                live = np.abs(form.coeffs) > 1e-12
                bad = live & (form.algebra.parities != parity)
                if bad.any():
                    raise ValidationError(
                        f"component at {context.group.names[g]} has parity-"
                        f"{1 - parity} terms in a parity-{parity} section"
                    )

    def _binary(self, other, op):
        if self.context.group is not other.context.group:
            raise ValidationError("sections live over different groups")
        forms = {g: op(self.forms[g], other.forms[g]) for g in self.forms}
        return InertiaSection(self.context, self.parity, forms, check=False)

    def __add__(self, other):
        if other.parity != self.parity:
            raise ValidationError("cannot add sections of opposite parity")
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        if other.parity != self.parity:
            raise ValidationError("cannot subtract sections of opposite parity")
        return self._binary(other, lambda a, b: a - b)

    def __neg__(self):
        return InertiaSection(
            self.context, self.parity, {g: -f for g, f in self.forms.items()}, check=False
        )

    def __mul__(self, scalar):
        return InertiaSection(
            self.context,
            self.parity,
            {g: f * scalar for g, f in self.forms.items()},
            check=False,
        )

    __rmul__ = __mul__

    def d(self) -> "InertiaSection":
        return InertiaSection(
            self.context,
            1 - self.parity,
            {g: f.d() for g, f in self.forms.items()},
            check=False,
        )

    def norm(self):
        return max((f.norm() for f in self.forms.values()), default=0.0)

    def allclose(self, other, tol=1e-9):
        return all(self.forms[g].allclose(other.forms[g], tol) for g in self.forms)

    def modulo_exact(self) -> "InertiaSection":
        return InertiaSection(
            self.context,
            self.parity,
            {g: f.modulo_exact() for g, f in self.forms.items()},
            check=False,
        )

    def is_exact(self, tol=1e-9):
        return all(f.is_exact(tol)[0] for f in self.forms.values())

    def to_jsonable(self):
        comps = {}
        for g, form in self.forms.items():
            comps[str(g)] = {
                "class_representative": self.context.group.names[g],
                "basis": list(form.algebra.names),
                "coefficients": [[repr(c.real), repr(c.imag)] for c in form.coeffs],
            }
        return {"parity": "odd" if self.parity else "even", "components": comps}

    def __repr__(self):
        tag = "odd" if self.parity else "even"
        return f"InertiaSection({tag}, classes={len(self.forms)})"


class CovarianceReport:
    def __init__(self, max_deviation, pairs_checked, worst_pair=None):
        self.max_deviation = max_deviation
        self.pairs_checked = pairs_checked
        self.worst_pair = worst_pair

    def ok(self, tol=1e-9):
        return self.max_deviation <= tol

    def to_jsonable(self):
        return {
            "max_deviation": repr(float(self.max_deviation)),
            "pairs_checked": self.pairs_checked,
            "worst_pair": self.worst_pair,
        }

    def __repr__(self):
        return (
            f"CovarianceReport(max_deviation={self.max_deviation:.3e}, "
            f"pairs={self.pairs_checked})"
        )


def _pointwise_character(e: TwistedBundle, g, t):
    """Values of sTr(exp(-t A0^2) rho(g)) at each g-fixed point."""
    values = []
    for x in e.gset.fixed_points(g):
        a0 = e.conn[x]
        f = a0 @ a0
        if f.size:
            kernel = scipy.linalg.expm(-t * f) @ e.rho[g][x]
        else:
            kernel = e.rho[g][x]
        signs = np.where(e.fiber_parity(x) % 2, -1.0, 1.0)
        values.append(complex(np.sum(np.diagonal(kernel) * signs)))
    return np.array(values, dtype=complex)


def character(e, t=1.0, tol=1e-9, context=None, verify=True) -> InertiaSection:
    """Z(E): per class representative the even form sTr(exp(-t*F) rho(g)).

    Closedness of every component is verified; a violation beyond tolerance
    means the input data is inconsistent and raises NumericalError.
    """
    context = context or context_for(e)
    forms = {}
    if isinstance(e, TwistedBundle):
        for g in context.class_reps:
            forms[g] = Form(context.models[g], _pointwise_character(e, g, t))
    else:
        for g in context.class_reps:
            pk = e.packets.get(g)
            if pk is None:
                raise ValidationError(
                    f"bundle lacks the packet for class [{e.group.names[g]}]"
                )
            F = pk.curvature()
            kernel = ((-t) * F).exp_even() @ pk.rho[g]
            forms[g] = kernel.supertrace()
    section = InertiaSection(context, 0, forms, check=False)
    if verify:
        closedness = section.d().norm()
        if closedness > tol * (1 + section.norm()):
            raise NumericalError(
                f"character is not closed (|dZ| = {closedness:.3e}); "
                "the bundle data is inconsistent"
            )
    return section


def check_covariance(e, section=None, t=1.0, tol=1e-9) -> CovarianceReport:
    """Verify Z_(hgh^-1) pulled back along x -> h.x equals lbeta(h,g) Z_g.

    Exact tier: all (g, h) pairs in G x G.  Graded tier: the centralizer of
    each packet's representative (the only covariance visible per packet).
    """
    beta = e.cocycle
    max_dev, worst, pairs = 0.0, None, 0
    if isinstance(e, TwistedBundle):
        G, X = e.group, e.gset
        values = {g: _pointwise_character(e, g, t) for g in range(G.n)}
        fixed = {g: X.fixed_points(g) for g in range(G.n)}
        for g in range(G.n):
            index_g = {x: i for i, x in enumerate(fixed[g])}
            for h in range(G.n):
                gp = G.conj(h, g)
                index_gp = {x: i for i, x in enumerate(fixed[gp])}
                scalar = complex(lbeta_cocycle(beta, h, g))
                pairs += 1
                for x in fixed[g]:
                    lhs = values[gp][index_gp[X.act(h, x)]]
                    rhs = scalar * values[g][index_g[x]]
                    dev = abs(lhs - rhs)
                    if dev > max_dev:
                        max_dev, worst = dev, (G.names[h], G.names[g])
        return CovarianceReport(max_dev, pairs, worst)
    if isinstance(e, GradedBundle):
        section = section if section is not None else character(e, t=t, tol=tol)
        G = e.group
        for g in e.packets:
            z = section.forms[g]
            for h in G.centralizer(g):
                scalar = complex(lbeta_cocycle(beta, h, g))
                lhs = z
                rhs = scalar * z.act(h)
                dev = (lhs - rhs).norm()
                pairs += 1
                if dev > max_dev:
                    max_dev, worst = dev, (G.names[h], G.names[g])
        return CovarianceReport(max_dev, pairs, worst)
    raise ValidationError("expected a bundle")


def partition_function(e, eta: InertiaSection = None, t=1.0, tol=1e-9) -> InertiaSection:
    """Z(E, eta) = Z(E) + d(eta)."""
    z = character(e, t=t, tol=tol)
    if eta is None:
        return z
    if eta.parity != 1:
        raise ValidationError("eta must be an odd section")
    return z + eta.d()
