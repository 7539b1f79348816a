"""Effective field theories, stable isomorphism, and differential K classes.

On the exact tier everything is decided: twisted irreducibles of each
stabilizer are extracted numerically from the twisted regular representation,
bundles reduce orbitwise to virtual multiplicity vectors, and stable
isomorphism is equivalent to equality of those vectors together with the
(vanishing) odd form data.  The rationalized rank comes from the fixed-point
formula

    rank = sum over classes [g] of (1/|C(g)|) sum_h chi_g(h) |X^g & X^h|

evaluated in exact cyclotomic arithmetic and cross-checked against the
orbitwise count of twisted irreducibles.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .bundles import (
    GradedBundle,
    TwistedBundle,
    direct_sum,
    induced_bundle,
    trivial_theory,
)
from .characters import InertiaSection, character, context_for
from .chern_simons import cs_class, cs_form, sections_equivalent, _check_iso
from .cocycles import (
    TwoCocycle,
    beta_regular_classes,
    restrict_cocycle,
    transgression_character,
)
from .errors import NumericalError, TwistedKError, ValidationError
from .phases import Cyclotomic
from .gsets import FiniteGSet

__all__ = [
    "TwistedIrrepTable",
    "twisted_irrep_table",
    "twisted_irrep_count",
    "khat_rank",
    "EffectiveTheory",
    "eft_sum",
    "IsoResult",
    "is_isomorphic",
    "is_stably_isomorphic",
    "DiffKClass",
    "khat_class",
]

_TABLE_CACHE = {}
_FINGERPRINT_DECIMALS = 6


class TwistedIrrepTable:
    """Irreducible twisted characters of (H, beta), in a canonical order.

    ``matrices[i][g]`` is a concrete (unitary) matrix model of the i-th
    irreducible, extracted from an invariant subspace of the regular
    representation.
    """

    def __init__(self, group, cocycle, characters, dims, matrices=None):
        self.group = group
        self.cocycle = cocycle
        self.characters = characters  # (k, |H|) complex
        self.dims = dims
        self.matrices = matrices

    @property
    def count(self):
        return self.characters.shape[0]

    def fingerprints(self):
        rounded = np.round(self.characters, _FINGERPRINT_DECIMALS)
        return tuple(
            tuple((float(c.real), float(c.imag)) for c in row) for row in rounded
        )

    def multiplicities(self, char_vector, tol=1e-6):
        """Integer multiplicities of each irreducible in a (virtual) character."""
        char_vector = np.asarray(char_vector, dtype=complex)
        raw = self.characters.conj() @ char_vector / self.group.n
        mults = np.round(raw.real).astype(int)
        if np.max(np.abs(raw - mults)) > tol:
            raise NumericalError(
                "character does not decompose integrally over the twisted "
                "irreducibles; the data is inconsistent with the cocycle"
            )
        recon = mults @ self.characters
        if np.max(np.abs(recon - char_vector)) > 1e-5 * (1 + np.max(np.abs(char_vector))):
            raise NumericalError(
                "character is not a virtual combination of twisted irreducibles"
            )
        return mults


def _regular_representations(group, cocycle):
    n = group.n
    left = np.zeros((n, n, n), dtype=complex)
    right = np.zeros((n, n, n), dtype=complex)
    for g in range(n):
        for h in range(n):
            left[g, group.mul(g, h), h] = complex(cocycle(g, h))
            right[g, group.mul(h, g), h] = complex(cocycle(h, g))
    return left, right


def _cluster_eigenvalues(w, gap=1e-7):
    order = np.argsort(w)
    clusters = [[order[0]]]
    for idx in order[1:]:
        if w[idx] - w[clusters[-1][-1]] <= gap:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    return clusters


def twisted_irrep_table(group, cocycle: TwoCocycle, seed=0) -> TwistedIrrepTable:
    """Decompose the beta-twisted regular representation numerically.

    A random Hermitian element of the commutant is diagonalized; its
    eigenspaces carry single irreducible copies, whose characters are read off
    and deduplicated.  Degenerate random draws are retried with fresh jitter,
    and the block count is asserted against the independent count of
    beta-regular classes.
    """
    key = (cocycle.fingerprint(), int(seed))
    if key in _TABLE_CACHE:
        return _TABLE_CACHE[key]
    if not cocycle.normalized:
        raise ValidationError("twisted irreducibles need a normalized cocycle")
    n = group.n
    left, right = _regular_representations(group, cocycle)
    regular_count = len(beta_regular_classes(cocycle))
    failure = None
    for attempt in range(8):
        rng = np.random.default_rng([int(seed), attempt, n])
        coeff = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        commutant = np.einsum("k,kij->ij", coeff, right)
        herm = commutant + commutant.conj().T
        w, v = np.linalg.eigh(herm)
        clusters = _cluster_eigenvalues(w)
        try:
            chars = []
            dims = []
            reps = []
            for idx in clusters:
                u = v[:, idx]
                blocks = np.array([u.conj().T @ left[g] @ u for g in range(n)])
                chars.append(np.trace(blocks, axis1=1, axis2=2))
                dims.append(len(idx))
                reps.append(blocks)
            rounded = [
                tuple(np.round(c, _FINGERPRINT_DECIMALS).tolist()) for c in chars
            ]
            distinct = {}
            for r, c, d, rep in zip(rounded, chars, dims, reps):
                distinct.setdefault(r, []).append((c, d, rep))
            table_rows = []
            table_dims = []
            table_reps = []
            for copies in distinct.values():
                vecs = [c for c, _, _ in copies]
                dim_set = {d for _, d, _ in copies}
                mean = np.mean(vecs, axis=0)
                dim = int(round(mean[group.identity].real))
                if dim_set != {dim} or len(copies) != dim:
                    raise NumericalError("eigenvalue clusters mixed irreducible blocks")
                table_rows.append(mean)
                table_dims.append(dim)
                table_reps.append(copies[0][2])
            if sum(d * d for d in table_dims) != n:
                raise NumericalError("block dimensions do not fill the group algebra")
            if len(table_rows) != regular_count:
                raise NumericalError(
                    "numeric block count disagrees with the beta-regular class count"
                )
            table = np.array(table_rows)
            gram = table @ table.conj().T / n
            if not np.allclose(gram, np.eye(len(table_rows)), atol=1e-6):
                raise NumericalError("twisted characters are not orthonormal")
            rounded_rows = np.round(table, _FINGERPRINT_DECIMALS)
            order = sorted(
                range(len(table_rows)),
                key=lambda i: tuple(
                    (float(c.real), float(c.imag)) for c in rounded_rows[i]
                ),
            )
            result = TwistedIrrepTable(
                group,
                cocycle,
                table[order],
                [table_dims[i] for i in order],
                matrices=[table_reps[i] for i in order],
            )
            _TABLE_CACHE[key] = result
            return result
        except NumericalError as exc:
            failure = exc
            continue
    raise NumericalError(
        f"twisted regular representation did not decompose after retries: {failure}"
    )


def twisted_irrep_count(group, cocycle: TwoCocycle, seed=0) -> int:
    """Number of irreducible beta-projective representations.

    Computed from the regular-representation decomposition; the equality with
    the beta-regular class count is asserted inside the decomposition.
    """
    return twisted_irrep_table(group, cocycle, seed=seed).count


def khat_rank(group, cocycle: TwoCocycle, gset: FiniteGSet, cross_check=True, seed=0) -> int:
    """Rank of the twisted equivariant K-group of a finite G-set.

    Exact cyclotomic evaluation of the fixed-point formula; raises if the
    result is not a nonnegative rational integer, and (by default) verifies
    the orbitwise count of twisted stabilizer irreducibles agrees.
    """
    if gset.group is not group:
        raise ValidationError("G-set and cocycle must share the group")
    order = 1
    for p in cocycle.values.flat:
        order = order * p.order // math.gcd(order, p.order)
    total = Cyclotomic.zero(order)
    for g in group.class_representatives():
        cent = group.centralizer(g)
        fixed_g = set(gset.fixed_points(g))
        chi = transgression_character(cocycle, g)
        contribution = Cyclotomic.zero(order)
        for h in cent:
            count = sum(1 for x in fixed_g if gset.act(h, x) == x)
            if count:
                contribution = contribution + chi[h].to_cyclotomic(order) * count
        total = total + contribution * Fraction(1, len(cent))
    if not total.is_integer:
        raise NumericalError(
            "fixed-point rank formula did not produce an integer; "
            "the cocycle and action data are inconsistent"
        )
    rank = int(total.as_fraction())
    if rank < 0:
        raise NumericalError("fixed-point rank formula produced a negative integer")
    if cross_check:
        by_orbits = 0
        for orbit in gset.orbits():
            stab = gset.stabilizer(orbit[0])
            by_orbits += twisted_irrep_count(
                stab.group, restrict_cocycle(cocycle, stab), seed=seed
            )
        if by_orbits != rank:
            raise TwistedKError(
                f"rank formula ({rank}) disagrees with the orbitwise twisted "
                f"irreducible count ({by_orbits})"
            )
    return rank


# -- effective theories ---------------------------------------------------------


class EffectiveTheory:
    """A bundle together with an odd section class (stored in normal form)."""

    def __init__(self, bundle, eta: InertiaSection = None):
        self.bundle = bundle
        if eta is None:
            eta = context_for(bundle).zero_section(1)
        if eta.parity != 1:
            raise ValidationError("eta must be odd")
        self.eta = cs_class(eta)

    @property
    def tier(self):
        return self.bundle.tier

    def partition_function(self, t=1.0):
        return character(self.bundle, t=t) + self.eta.d()

    def __repr__(self):
        return f"EffectiveTheory({self.bundle!r}, |eta|={self.eta.norm():.3g})"


def _as_theory(t) -> EffectiveTheory:
    if isinstance(t, EffectiveTheory):
        return t
    return EffectiveTheory(t)


def eft_sum(t0, t1) -> EffectiveTheory:
    t0, t1 = _as_theory(t0), _as_theory(t1)
    return EffectiveTheory(direct_sum(t0.bundle, t1.bundle), t0.eta + t1.eta)


class IsoResult:
    def __init__(self, ok, reason="", certificate=None):
        self.ok = bool(ok)
        self.reason = reason
        self.certificate = certificate

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"IsoResult({self.ok}, {self.reason!r})"


def _orbit_block_characters(e: TwistedBundle, x0, stab):
    """(even, odd) character vectors of the stabilizer rep at an orbit point."""
    p = e.even_dims[x0]
    even, odd = [], []
    for h_sub in range(stab.group.n):
        h = stab.to_parent(h_sub)
        r = e.rho[h][x0]
        even.append(np.trace(r[:p, :p]) if p else 0.0)
        odd.append(np.trace(r[p:, p:]) if e.odd_dims[x0] else 0.0)
    return np.array(even, dtype=complex), np.array(odd, dtype=complex)


def _orbit_multiplicities(e: TwistedBundle, seed=0):
    """Per canonical orbit representative: irrep table and (even, odd) multiplicities."""
    out = {}
    for orbit in e.gset.orbits():
        x0 = orbit[0]
        stab = e.gset.stabilizer(x0)
        beta_h = restrict_cocycle(e.cocycle, stab)
        table = twisted_irrep_table(stab.group, beta_h, seed=seed)
        even, odd = _orbit_block_characters(e, x0, stab)
        out[x0] = (table, table.multiplicities(even), table.multiplicities(odd))
    return out


def _even_intertwiner_space(e0: TwistedBundle, e1: TwistedBundle):
    """Basis of the space of even bundle maps phi with phi rho0 = rho1 phi."""
    X, G = e0.gset, e0.group
    slots = []  # (x, i, j) for parity-matching entries
    for x in range(X.n_points):
        par0 = e0.fiber_parity(x)
        par1 = e1.fiber_parity(x)
        for i in range(e1.dims[x]):
            for j in range(e0.dims[x]):
                if par1[i] == par0[j]:
                    slots.append((x, i, j))
    if not slots:
        return slots, np.zeros((0, 0))

    def apply_constraints(phi):
        rows = []
        for g in range(G.n):
            for x in range(X.n_points):
                gx = X.act(g, x)
                rows.append((phi[gx] @ e0.rho[g][x] - e1.rho[g][x] @ phi[x]).ravel())
        return np.concatenate(rows)

    columns = []
    zero_phi = [np.zeros((e1.dims[x], e0.dims[x]), dtype=complex) for x in range(X.n_points)]
    for x, i, j in slots:
        phi = [m.copy() for m in zero_phi]
        phi[x][i, j] = 1.0
        columns.append(apply_constraints(phi))
    system = np.array(columns).T
    if system.shape[0] == 0:
        null = np.eye(len(slots))
    else:
        _, s, vh = np.linalg.svd(system)
        rank = int(np.sum(s > 1e-9 * max(1.0, s[0] if s.size else 1.0)))
        null = vh[rank:].conj().T
    return slots, null


def _materialize(e0, e1, slots, vector):
    phi = [np.zeros((e1.dims[x], e0.dims[x]), dtype=complex) for x in range(e0.gset.n_points)]
    for (x, i, j), value in zip(slots, vector):
        phi[x][i, j] = value
    return phi


def _find_equivariant_iso(e0: TwistedBundle, e1: TwistedBundle, seed=0, tries=32):
    if e0.dims != e1.dims or e0.even_dims != e1.even_dims:
        return None
    slots, null = _even_intertwiner_space(e0, e1)
    if null.size == 0 and any(d for d in e0.dims):
        return None
    if not any(d for d in e0.dims):
        return [np.zeros((0, 0), dtype=complex) for _ in range(e0.gset.n_points)]
    rng = np.random.default_rng([int(seed), 7])
    for _ in range(tries):
        vec = null @ (rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1]))
        phi = _materialize(e0, e1, slots, vec)
        dets = [abs(np.linalg.det(m)) if m.size else 1.0 for m in phi]
        scale = max(np.abs(vec)) if vec.size else 0.0
        if scale and min(dets) > 1e-9 * scale ** max(e0.dims, default=1):
            return phi
    return None


def _verify_iso(e0, e1, phi, tol=1e-8):
    X, G = e0.gset, e0.group
    for g in range(G.n):
        for x in range(X.n_points):
            gx = X.act(g, x)
            if not np.allclose(phi[gx] @ e0.rho[g][x], e1.rho[g][x] @ phi[x], atol=tol * 10):
                return False
    return all(
        (not phi[x].size) or abs(np.linalg.det(phi[x])) > 1e-12 for x in range(X.n_points)
    )


def is_isomorphic(t0, t1, phi=None, tol=1e-9, seed=0) -> IsoResult:
    """Decide isomorphism of effective theories.

    Exact tier: complete decision -- orbitwise twisted-character comparison of
    the even and odd parts separately, then an explicit intertwiner from the
    equivariance linear system (eta and CS vanish there).  Graded tier: a
    certificate check of a supplied candidate ``phi``.
    """
    t0, t1 = _as_theory(t0), _as_theory(t1)
    e0, e1 = t0.bundle, t1.bundle
    if e0.tier != e1.tier:
        return IsoResult(False, "bundles live on different tiers")
    if isinstance(e0, TwistedBundle):
        if e0.cocycle != e1.cocycle or not np.array_equal(e0.gset.action, e1.gset.action):
            return IsoResult(False, "different base or twist")
        m0 = _orbit_multiplicities(e0, seed=seed)
        m1 = _orbit_multiplicities(e1, seed=seed)
        for x0, (table, even0, odd0) in m0.items():
            _, even1, odd1 = m1[x0]
            if not (np.array_equal(even0, even1) and np.array_equal(odd0, odd1)):
                return IsoResult(
                    False,
                    f"twisted character mismatch at orbit of "
                    f"{e0.gset.point_names[x0]}",
                )
        phi = _find_equivariant_iso(e0, e1, seed=seed)
        if phi is None or not _verify_iso(e0, e1, phi, tol=max(tol, 1e-9)):
            return IsoResult(False, "no invertible equivariant intertwiner found")
        return IsoResult(True, "equivariant intertwiner constructed", certificate=phi)
    if phi is None:
        return IsoResult(
            False, "graded-tier decision needs a candidate isomorphism to check"
        )
    try:
        _check_iso(e0, e1, phi, tol=max(tol, 1e-8))
    except ValidationError as exc:
        return IsoResult(False, f"candidate map rejected: {exc}")
    cs = cs_class(cs_form(e0, e1, phi))
    if sections_equivalent(t0.eta, t1.eta + cs, tol=max(tol, 1e-8)):
        return IsoResult(True, "eta matches up to the transgression", certificate=phi)
    return IsoResult(False, "eta does not match eta' + CS(E0, E1)")


def _ungraded_part(e: TwistedBundle, part):
    """The even or odd block of a bundle as an ungraded bundle (no connection)."""
    X = e.gset
    if part == "even":
        dims = e.even_dims
        pick = lambda x: slice(0, e.even_dims[x])
    else:
        dims = e.odd_dims
        pick = lambda x: slice(e.even_dims[x], e.dims[x])
    rho = {
        g: [e.rho[g][x][pick(X.act(g, x)), pick(x)] for x in range(X.n_points)]
        for g in e.rho
    }
    return TwistedBundle(X, e.cocycle, dims, [0] * X.n_points, rho, tol=e.tol)


def is_stably_isomorphic(t0, t1, tol=1e-9, seed=0) -> IsoResult:
    """Decide stable isomorphism on the exact tier (symmetrized relation).

    True iff the eta classes agree and the per-orbit virtual twisted
    characters (even minus odd) agree; the certificate realizes
    E0 + eps_V ~ E1 + eps_W with V, W the odd parts of E1, E0.
    """
    t0, t1 = _as_theory(t0), _as_theory(t1)
    e0, e1 = t0.bundle, t1.bundle
    if not (isinstance(e0, TwistedBundle) and isinstance(e1, TwistedBundle)):
        raise ValidationError("stable isomorphism is decided on the exact tier only")
    if e0.cocycle != e1.cocycle or not np.array_equal(e0.gset.action, e1.gset.action):
        return IsoResult(False, "different base or twist")
    if not sections_equivalent(t0.eta, t1.eta, tol=tol):
        return IsoResult(False, "eta classes differ")
    m0 = _orbit_multiplicities(e0, seed=seed)
    m1 = _orbit_multiplicities(e1, seed=seed)
    for x0, (table, even0, odd0) in m0.items():
        _, even1, odd1 = m1[x0]
        if not np.array_equal(even0 - odd0, even1 - odd1):
            stab = e0.gset.stabilizer(x0)
            ve0, vo0 = _orbit_block_characters(e0, x0, stab)
            ve1, vo1 = _orbit_block_characters(e1, x0, stab)
            gap = np.abs((ve0 - vo0) - (ve1 - vo1))
            bad = stab.to_parent(int(np.argmax(gap)))
            return IsoResult(
                False,
                "virtual character mismatch at class "
                f"[{e0.group.names[bad]}] (orbit of {e0.gset.point_names[x0]})",
            )
    v = _ungraded_part(e1, "odd")
    w = _ungraded_part(e0, "odd")
    left = direct_sum(e0, trivial_theory(v))
    right = direct_sum(e1, trivial_theory(w))
    iso = is_isomorphic(EffectiveTheory(left), EffectiveTheory(right), tol=tol, seed=seed)
    if not iso.ok:
        raise TwistedKError(
            "virtual characters agree but the witness construction failed: "
            + iso.reason
        )
    return IsoResult(
        True,
        "stably isomorphic",
        certificate={"V": v, "W": w, "intertwiner": iso.certificate},
    )


class DiffKClass:
    """Per-orbit virtual multiplicities over twisted stabilizer irreducibles."""

    def __init__(self, entries):
        # entries: orbit rep -> (fingerprints, virtual tuple, stabilizer order)
        self.entries = dict(entries)

    def __eq__(self, other):
        if not isinstance(other, DiffKClass):
            return NotImplemented
        return self.entries == other.entries

    @property
    def is_zero(self):
        return all(all(v == 0 for v in virt) for _, virt, _ in self.entries.values())

    def to_jsonable(self, gset=None):
        out = {}
        for x0, (fps, virt, stab_order) in self.entries.items():
            name = gset.point_names[x0] if gset is not None else str(x0)
            out[str(x0)] = {
                "orbit_representative": name,
                "stabilizer_order": stab_order,
                "virtual_multiplicities": list(virt),
                "irrep_dimensions": [int(round(fp[0][0])) for fp in fps],
            }
        return out

    def __repr__(self):
        body = ", ".join(f"{x0}: {list(v)}" for x0, (_, v, _) in sorted(self.entries.items()))
        return f"DiffKClass({body})"


def khat_class(t, seed=0) -> DiffKClass:
    """The differential K normal form of an exact-tier effective theory."""
    t = _as_theory(t)
    e = t.bundle
    if not isinstance(e, TwistedBundle):
        raise ValidationError("khat_class is defined on the exact tier only")
    if t.eta.norm() > 1e-9:
        raise ValidationError("exact-tier eta classes vanish; got a nonzero eta")
    entries = {}
    for x0, (table, even, odd) in _orbit_multiplicities(e, seed=seed).items():
        entries[x0] = (
            table.fingerprints(),
            tuple(int(v) for v in (even - odd)),
            table.group.n,
        )
    return DiffKClass(entries)
