"""Seeded random instances: groups with cocycles, G-sets, bundles, graded packets.

Everything is driven by a numpy Generator so corpora are reproducible; the
test suite and the demo scripts build their instance families from here.
"""

from __future__ import annotations

import numpy as np

from .bundles import GradedBundle, GradedPacket, TwistedBundle, direct_sum, induced_bundle
from .cocycles import (
    TwoCocycle,
    bilinear_cocycle,
    coboundary_twist,
    pullback_cocycle,
    trivial_cocycle,
)
from .diff_k import twisted_irrep_table
from .forms import OmegaMatrix, exterior_model
from .groups import FiniteGroup, cyclic, dihedral, direct_product, quaternion8, symmetric
from .gsets import FiniteGSet, coset_gset, disjoint_union, point_gset, trivial_gset
from .phases import Phase

__all__ = [
    "group_catalog",
    "random_group",
    "random_cocycle",
    "random_coboundary",
    "random_gset",
    "random_bundle",
    "random_exact_instance",
    "random_graded_cs_instance",
]

_CATALOG = None


def group_catalog():
    """Small named groups (order <= 8) with their natural nontrivial cocycles."""
    global _CATALOG
    if _CATALOG is not None:
        return _CATALOG
    entries = []

    def add(name, group, extra_cocycles=()):
        entries.append((name, group, list(extra_cocycles)))

    for n in (1, 2, 3, 4, 5, 6, 7, 8):
        add(f"Z{n}", cyclic(n))
    v4 = direct_product(cyclic(2), cyclic(2))
    add("Z2xZ2", v4, [_pairing_cocycle(v4, 2, 2)])
    z4z2 = direct_product(cyclic(4), cyclic(2))
    add("Z4xZ2", z4z2, [_pairing_cocycle(z4z2, 4, 2)])
    z2c = direct_product(v4, cyclic(2))
    add("Z2xZ2xZ2", z2c, [pullback_cocycle(_pairing_cocycle(v4, 2, 2), z2c, [g // 2 for g in range(8)])])
    z3z3 = direct_product(cyclic(3), cyclic(3))
    add("Z3xZ3", z3z3, [_pairing_cocycle(z3z3, 3, 3)])
    s3 = symmetric(3)
    add("S3", s3)
    d4 = dihedral(4)
    hom_d4 = [(g // 2 % 2) * 2 + g % 2 for g in range(8)]  # (r mod 2, s)
    add("D4", d4, [pullback_cocycle(_pairing_cocycle(v4, 2, 2), d4, hom_d4)])
    q8 = quaternion8()
    hom_q8 = {0: 0, 1: 0, 2: 2, 3: 2, 4: 1, 5: 1, 6: 3, 7: 3}  # i->(1,0), j->(0,1)
    add("Q8", q8, [pullback_cocycle(_pairing_cocycle(v4, 2, 2), q8, [hom_q8[g] for g in range(8)])])
    _CATALOG = entries
    return entries


def _pairing_cocycle(group, m, n) -> TwoCocycle:
    """Bimultiplicative cocycle zeta^(b1*a2) on Z/m x Z/n (zeta of order gcd)."""
    d = np.gcd(m, n)

    def pairing(g, h):
        b1 = g % n
        a2 = h // n
        return Phase(b1 * a2, d)

    return bilinear_cocycle(group, pairing)


def random_group(rng, max_order=8):
    names = [entry for entry in group_catalog() if entry[1].n <= max_order]
    name, group, extras = names[rng.integers(0, len(names))]
    return name, group, extras


def random_coboundary(rng, group, order=12):
    values = [Phase(0)] * group.n
    for g in range(group.n):
        if g != group.identity:
            values[g] = Phase(int(rng.integers(0, order)), order)
    return values


def random_cocycle(rng, group, extras=(), twist=True) -> TwoCocycle:
    """A validated normalized cocycle: a catalog seed times a random coboundary."""
    seeds = [trivial_cocycle(group), *extras]
    beta = seeds[rng.integers(0, len(seeds))]
    if twist:
        beta = coboundary_twist(beta, random_coboundary(rng, group))
    return beta


def _subgroup_catalog(group):
    subs = [group.subgroup([group.identity]), group.subgroup(range(group.n))]
    for g in range(group.n):
        subs.append(group.generated_subgroup([g]))
    uniq = {}
    for s in subs:
        uniq[tuple(s.elements)] = s
    return list(uniq.values())


def random_gset(rng, group, max_points=4) -> FiniteGSet:
    subs = [s for s in _subgroup_catalog(group) if group.n // len(s) <= max_points]
    pieces = []
    total = 0
    for _ in range(int(rng.integers(1, 3))):
        s = subs[rng.integers(0, len(subs))]
        size = group.n // len(s)
        if total + size > max_points:
            continue
        pieces.append(coset_gset(group, s))
        total += size
    if not pieces:
        pieces = [point_gset(group)]
    return disjoint_union(*pieces) if len(pieces) > 1 else pieces[0]


def _random_conjugator(rng, n, spread=0.4):
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    t = np.eye(n, dtype=complex) + spread * (
        rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    ) / max(n, 1)
    if abs(np.linalg.det(t)) < 1e-3:
        t = np.eye(n, dtype=complex)
    return t


def _random_stab_rep(rng, stab, beta_sub, dim_budget, seed):
    """Random twisted representation blocks (parent-keyed) within a dim budget."""
    table = twisted_irrep_table(stab.group, beta_sub, seed=seed)
    dims = table.dims
    mults = [0] * len(dims)
    budget = dim_budget
    while budget > 0:
        options = [i for i, d in enumerate(dims) if d <= budget]
        if not options or rng.random() < 0.25:
            break
        pick = options[rng.integers(0, len(options))]
        mults[pick] += 1
        budget -= dims[pick]
    total = sum(m * d for m, d in zip(mults, dims))
    blocks = {}
    t = _random_conjugator(rng, total)
    t_inv = np.linalg.inv(t) if total else t
    for h_sub in range(stab.group.n):
        mat = np.zeros((total, total), dtype=complex)
        pos = 0
        for i, m in enumerate(mults):
            for _ in range(m):
                d = dims[i]
                mat[pos : pos + d, pos : pos + d] = table.matrices[i][h_sub]
                pos += d
        blocks[stab.to_parent(h_sub)] = t @ mat @ t_inv if total else mat
    return total, blocks


def random_bundle(rng, gset, cocycle, max_fiber_dim=6, with_connection=True, seed=0) -> TwistedBundle:
    """A random valid bundle: orbitwise induced from random stabilizer reps."""
    total = None
    for orbit in gset.orbits():
        x0 = orbit[0]
        stab = gset.stabilizer(x0)
        from .cocycles import restrict_cocycle

        beta_sub = restrict_cocycle(cocycle, stab)
        budget = int(rng.integers(0, max_fiber_dim + 1))
        p, sigma_even = _random_stab_rep(rng, stab, beta_sub, budget, seed)
        q, sigma_odd = _random_stab_rep(rng, stab, beta_sub, max_fiber_dim - p, seed)
        conn_rep = None
        if with_connection and p + q:
            d = p + q
            raw = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            averaged = np.zeros((d, d), dtype=complex)
            for h in stab.elements:
                full = np.zeros((d, d), dtype=complex)
                full[:p, :p] = sigma_even[h]
                full[p:, p:] = sigma_odd[h]
                averaged += full @ raw @ np.linalg.inv(full)
            averaged /= len(stab.elements)
            par = np.array([0] * p + [1] * q)
            averaged[par[:, None] == par[None, :]] = 0.0  # keep the odd part
            norm = np.abs(averaged).max()
            if norm > 2.0:
                averaged *= 2.0 / norm
            conn_rep = averaged
        piece = induced_bundle(gset, cocycle, x0, sigma_even, sigma_odd, conn_rep=conn_rep)
        total = piece if total is None else direct_sum(total, piece)
    return total


def random_exact_instance(rng, max_order=8, max_points=4, max_fiber_dim=6, seed=0):
    name, group, extras = random_group(rng, max_order)
    beta = random_cocycle(rng, group, extras)
    gset = random_gset(rng, group, max_points)
    bundle = random_bundle(rng, gset, beta, max_fiber_dim, seed=seed)
    return name, group, beta, gset, bundle


# -- graded-tier instances ------------------------------------------------------


def _random_omega(rng, algebra, parities, parity, scale=0.8):
    shape = (algebra.dim, len(parities), len(parities))
    t = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    m = OmegaMatrix(algebra, t * scale / max(algebra.dim, 1), parities, parities)
    even, odd = m.parity_split()
    return even if parity == 0 else odd


def random_graded_cs_instance(rng, max_generators=3, max_rank=4):
    """(E0, E1, phi) over an exterior model with the trivial group.

    phi is None (identity) half the time, otherwise a random even invertible
    constant-entry isomorphism transporting E0's structure.
    """
    k = int(rng.integers(1, max_generators + 1))
    algebra = exterior_model([1] * k).with_actions({0: np.eye(2**k)})
    group = cyclic(1)
    beta = trivial_cocycle(group)
    p = int(rng.integers(1, max_rank))
    q = int(rng.integers(0, max_rank - p + 1))
    parities = [0] * p + [1] * q
    ident = OmegaMatrix.identity(algebra, parities)
    m0 = _random_omega(rng, algebra, parities, 1)
    m1 = _random_omega(rng, algebra, parities, 1)
    pk0 = GradedPacket(group, beta, 0, algebra, p, q, m0, {0: ident})
    if rng.random() < 0.5:
        phi = None
        pk1 = GradedPacket(group, beta, 0, algebra, p, q, m1, {0: ident})
    else:
        t = _random_conjugator(rng, p + q)
        par = np.array(parities)
        t[par[:, None] != par[None, :]] = 0.0  # even map
        phi_m = OmegaMatrix.from_constant(algebra, t, parities, parities)
        m1_t = phi_m @ m1 @ phi_m.inverse()
        pk1 = GradedPacket(group, beta, 0, algebra, p, q, m1_t, {0: ident})
        phi = {0: phi_m}
    e0 = GradedBundle(group, beta, {0: pk0})
    e1 = GradedBundle(group, beta, {0: pk1})
    return e0, e1, phi
