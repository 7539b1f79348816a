"""Chern-Simons transgression forms for linear paths of superconnections.

For M(lam) = (1-lam) M0 + lam M1' (with M1' the pullback of E1's
superconnection along a fixed equivariant isomorphism phi) the transgression

    CS_g = - integral_0^1 sTr(M'(lam) exp(-F(lam)) rho(g)) dlam

satisfies d(CS) = Z(E1) - Z(E0); that contract, not a sign convention, is the
definition, and the acceptance tests pin it.  Quadrature is Gauss-Legendre
with an automatic order-doubling convergence check.
"""

from __future__ import annotations

import numpy as np

from .bundles import GradedBundle, GradedPacket, TwistedBundle
from .characters import InertiaContext, InertiaSection, character, context_for
from .errors import NumericalError, ValidationError
from .forms import OmegaMatrix

__all__ = [
    "ConnectionPath",
    "cs_form",
    "cs_between",
    "cs_class",
    "sections_equivalent",
    "rg_flow_cs",
]


def _gauss_nodes(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights  # mapped to [0, 1]


class ConnectionPath:
    """Linear interpolation between two odd superconnection matrices on one packet."""

    def __init__(self, packet: GradedPacket, m0: OmegaMatrix, m1: OmegaMatrix, order=32):
        self.packet = packet
        self.m0 = m0
        self.m1 = m1
        self.order = int(order)
        # convexity preserves equivariance, so endpoint validation suffices
        packet.with_connection(m0)
        packet.with_connection(m1)

    def at(self, lam) -> OmegaMatrix:
        return (1.0 - lam) * self.m0 + lam * self.m1

    def velocity(self) -> OmegaMatrix:
        return self.m1 - self.m0


def _packet_cs_form(packet: GradedPacket, m0, m1, order):
    """-int_0^1 sTr(Mdot exp(-F(lam)) rho(g)) dlam on one packet."""
    path = ConnectionPath(packet, m0, m1, order)
    mdot = path.velocity()
    rho_g = packet.rho[packet.class_rep]
    nodes, weights = _gauss_nodes(order)
    total = packet.algebra.zero()
    for lam, w in zip(nodes, weights):
        m = path.at(lam)
        f = m.d() + m @ m
        kernel = mdot @ ((-1.0) * f).exp_even() @ rho_g
        total = total + (-w) * kernel.supertrace()
    return total


def _odd_part(form):
    out = form.coeffs.copy()
    out[form.algebra.parities == 0] = 0.0
    return form.algebra.form(out)


def cs_between(e, connections0, connections1, order=32, conv_tol=1e-8,
               context=None, check_convergence=True) -> InertiaSection:
    """CS section for a linear path between two superconnections on one bundle.

    ``connections0/1``: per class representative, the endpoint odd matrices
    (exact tier: ignored -- odd forms vanish and the section is zero).
    """
    context = context or context_for(e)
    if isinstance(e, TwistedBundle):
        return context.zero_section(1)
    forms = {}
    for g, pk in e.packets.items():
        coarse = _packet_cs_form(pk, connections0[g], connections1[g], order)
        if check_convergence:
            fine = _packet_cs_form(pk, connections0[g], connections1[g], 2 * order)
            drift = (coarse - fine).norm()
            if drift > conv_tol * (1 + fine.norm()):
                raise NumericalError(
                    f"quadrature has not converged at order {order} "
                    f"(doubling moves the result by {drift:.3e})"
                )
            coarse = fine
        # the transgression of an even character is odd; clip even-degree noise
        forms[g] = _odd_part(coarse)
    return InertiaSection(context, 1, forms, check=False)


def _check_iso(e0, e1, phi, tol):
    """phi: E0 -> E1 equivariant even isomorphism, packetwise."""
    for g, pk0 in e0.packets.items():
        pk1 = e1.packets[g]
        p = phi[g]
        if p.operator_parity() not in (0,):
            raise ValidationError("isomorphism must be even")
        try:
            p.inverse()
        except NumericalError as exc:
            raise ValidationError(f"candidate map is not an isomorphism: {exc}") from exc
        for h in e0.group.centralizer(g):
            lhs = p @ pk0.rho[h]
            rhs = pk1.rho[h] @ p.act(h)
            if not lhs.allclose(rhs, tol):
                raise ValidationError(
                    f"candidate map is not equivariant at {e0.group.names[h]}",
                    witness=(g, h),
                )


def identity_iso(e) -> dict:
    """The identity map, usable as phi when E0 and E1 share a twisted structure."""
    if isinstance(e, TwistedBundle):
        return {
            g: np.eye(d, dtype=complex)
            for g, d in enumerate([])  # exact tier never consumes phi contents
        }
    return {
        g: OmegaMatrix.identity(pk.algebra, pk.parities) for g, pk in e.packets.items()
    }


def cs_form(e0, e1, phi=None, order=32, conv_tol=1e-8, tol=1e-9,
            context=None) -> InertiaSection:
    """CS(E0, E1, phi): the odd transgression with d(CS) = Z(E1) - Z(E0).

    ``phi`` is an equivariant isomorphism E0 -> E1 (per class representative
    on the graded tier); omit it when the two bundles share their twisted
    structure, in which case the identity is used.
    """
    if isinstance(e0, TwistedBundle) and isinstance(e1, TwistedBundle):
        # odd forms on a zero-dimensional base vanish identically
        context = context or context_for(e0)
        return context.zero_section(1)
    if not (isinstance(e0, GradedBundle) and isinstance(e1, GradedBundle)):
        raise ValidationError("cs_form needs two bundles of the same tier")
    if set(e0.packets) != set(e1.packets):
        raise ValidationError("bundles carry packets for different classes")
    if phi is None:
        phi = identity_iso(e0)
        for g, pk0 in e0.packets.items():
            pk1 = e1.packets[g]
            if (pk0.even_rank, pk0.odd_rank) != (pk1.even_rank, pk1.odd_rank):
                raise ValidationError("bundles differ in rank; an isomorphism is required")
            for h in e0.group.centralizer(g):
                if not pk0.rho[h].allclose(pk1.rho[h], tol):
                    raise ValidationError(
                        "twisted structures differ; supply an explicit isomorphism"
                    )
    _check_iso(e0, e1, phi, tol)
    conns0, conns1 = {}, {}
    for g, pk0 in e0.packets.items():
        pk1 = e1.packets[g]
        p = phi[g]
        p_inv = p.inverse()
        conns0[g] = pk0.m
        conns1[g] = p_inv @ pk1.m @ p + p_inv @ p.d()
    return cs_between(e0, conns0, conns1, order=order, conv_tol=conv_tol, context=context)


def cs_class(section: InertiaSection) -> InertiaSection:
    """Canonical representative modulo exact forms (least-squares against im d)."""
    return section.modulo_exact()


def sections_equivalent(s0: InertiaSection, s1: InertiaSection, tol=1e-9) -> bool:
    """Equality modulo exact forms, decided by is_exact of the difference."""
    return (s0 - s1).is_exact(tol)


def rg_flow_cs(eps_v, lam_max, order=32, conv_tol=1e-8) -> InertiaSection:
    """CS along the renormalization flow A(lam) = lam*A0 + A1 from lam=1 to lam_max.

    For a trivial theory the even and odd blocks cancel and the section is
    zero; the caller asserts that, this function just computes.
    """
    if lam_max <= 0:
        raise ValidationError("lam_max must be positive")
    if isinstance(eps_v, TwistedBundle):
        return context_for(eps_v).zero_section(1)
    conns0, conns1 = {}, {}
    for g, pk in eps_v.packets.items():
        deg0 = pk.algebra.degrees == 0
        t0 = pk.m.tensor.copy()
        t1 = pk.m.tensor.copy()
        t1[deg0] *= lam_max
        conns0[g] = OmegaMatrix(pk.algebra, t0, pk.parities, pk.parities)
        conns1[g] = OmegaMatrix(pk.algebra, t1, pk.parities, pk.parities)
    return cs_between(eps_v, conns0, conns1, order=order, conv_tol=conv_tol)
