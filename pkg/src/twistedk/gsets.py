"""Finite G-sets: the exact, zero-dimensional tier of base spaces.

Points are integer ids; the action is a dense |G| x |X| table.  Fixed-point
sets and the conjugation maps between them feed the inertia-groupoid
machinery.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .groups import FiniteGroup, Subgroup

__all__ = [
    "FiniteGSet",
    "GSetMap",
    "point_gset",
    "trivial_gset",
    "left_translation_gset",
    "coset_gset",
    "natural_sn_gset",
    "disjoint_union",
]


class FiniteGSet:
    """A finite set with a validated action of a finite group."""

    def __init__(self, group: FiniteGroup, action, point_names=None, check=True):
        self.group = group
        action = np.asarray(action, dtype=int)
        if action.ndim != 2 or action.shape[0] != group.n:
            raise ValidationError(
                f"action table must be |G| x |X|, got {action.shape} with |G|={group.n}"
            )
        self.action = action
        self.n_points = action.shape[1]
        self.point_names = (
            list(point_names)
            if point_names is not None
            else [str(i) for i in range(self.n_points)]
        )
        if check:
            self._validate()

    def _validate(self):
        G, a = self.group, self.action
        if self.n_points and (a.min() < 0 or a.max() >= self.n_points):
            raise ValidationError("action entries must be point ids")
        ids = np.arange(self.n_points)
        if not np.array_equal(a[G.identity], ids):
            raise ValidationError("identity does not act trivially")
        for g in range(G.n):
            for h in range(G.n):
                if not np.array_equal(a[g][a[h]], a[G.mul(g, h)]):
                    bad = int(np.argwhere(a[g][a[h]] != a[G.mul(g, h)])[0][0])
                    raise ValidationError(
                        f"action law fails at (g={G.names[g]}, h={G.names[h]}, "
                        f"x={self.point_names[bad]})",
                        witness=(g, h, bad),
                    )
        for g in range(G.n):
            if len(set(a[g])) != self.n_points:
                raise ValidationError(f"element {G.names[g]} does not act bijectively")

    def act(self, g, x):
        return int(self.action[g, x])

    def orbits(self):
        """Orbits as sorted lists, ordered by least point."""
        seen = set()
        out = []
        for x in range(self.n_points):
            if x in seen:
                continue
            orb = sorted({self.act(g, x) for g in range(self.group.n)})
            out.append(orb)
            seen.update(orb)
        return out

    def orbit_representatives(self):
        return [o[0] for o in self.orbits()]

    def stabilizer(self, x) -> Subgroup:
        members = [g for g in range(self.group.n) if self.act(g, x) == x]
        return self.group.subgroup(members)

    def fixed_points(self, g):
        return [x for x in range(self.n_points) if self.act(g, x) == x]

    def conj_map(self, g, h):
        """The bijection X^g -> X^(hgh^-1), x -> h.x, with both checks run."""
        G = self.group
        source = self.fixed_points(g)
        target = set(self.fixed_points(G.conj(h, g)))
        mapping = {}
        for x in source:
            y = self.act(h, x)
            if y not in target:
                raise ValidationError(
                    "conjugation map leaves the target fixed-point set",
                    witness=(g, h, x),
                )
            mapping[x] = y
        if len(set(mapping.values())) != len(source) or len(source) != len(target):
            raise ValidationError("conjugation map is not bijective", witness=(g, h))
        return mapping

    def __repr__(self):
        return f"FiniteGSet(|G|={self.group.n}, |X|={self.n_points})"


class GSetMap:
    """An equivariant map of G-sets over the same group."""

    def __init__(self, source: FiniteGSet, target: FiniteGSet, mapping, check=True):
        if source.group is not target.group:
            raise ValidationError("equivariant maps need a shared group")
        self.source = source
        self.target = target
        self.mapping = [int(mapping[x]) for x in range(source.n_points)]
        if check:
            for g in range(source.group.n):
                for x in range(source.n_points):
                    if self.mapping[source.act(g, x)] != target.act(g, self.mapping[x]):
                        raise ValidationError(
                            "map is not equivariant", witness=(g, x)
                        )

    def __call__(self, x):
        return self.mapping[x]


# -- constructors -------------------------------------------------------------


def point_gset(group: FiniteGroup) -> FiniteGSet:
    return trivial_gset(group, 1)


def trivial_gset(group: FiniteGroup, k: int) -> FiniteGSet:
    action = [[x for x in range(k)] for _ in range(group.n)]
    return FiniteGSet(group, action, check=False)


def left_translation_gset(group: FiniteGroup) -> FiniteGSet:
    return FiniteGSet(group, group.mult, point_names=group.names, check=False)


def coset_gset(group: FiniteGroup, sub: Subgroup) -> FiniteGSet:
    """Left cosets gH with the translation action."""
    hset = set(sub.elements)
    cosets = []
    seen = set()
    for g in range(group.n):
        if g in seen:
            continue
        coset = frozenset(group.mul(g, h) for h in hset)
        cosets.append(coset)
        seen.update(coset)
    index = {c: i for i, c in enumerate(cosets)}
    action = [
        [index[frozenset(group.mul(g, x) for x in c)] for c in cosets]
        for g in range(group.n)
    ]
    names = ["{" + ",".join(group.names[x] for x in sorted(c)) + "}" for c in cosets]
    return FiniteGSet(group, action, point_names=names, check=False)


def natural_sn_gset(sym_group: FiniteGroup, n: int) -> FiniteGSet:
    """S_n (as built by ``symmetric``) acting on {0..n-1}; permutation read off names."""
    action = []
    for g in range(sym_group.n):
        perm = [int(ch) for ch in sym_group.names[g]]
        action.append([perm[x] for x in range(n)])
    return FiniteGSet(sym_group, action, check=True)


def disjoint_union(*gsets: FiniteGSet) -> FiniteGSet:
    group = gsets[0].group
    if any(x.group is not group for x in gsets):
        raise ValidationError("disjoint union needs a shared group")
    offsets = np.cumsum([0] + [x.n_points for x in gsets])
    total = int(offsets[-1])
    action = np.empty((group.n, total), dtype=int)
    names = []
    for i, xs in enumerate(gsets):
        action[:, offsets[i] : offsets[i + 1]] = xs.action + offsets[i]
        names.extend(f"{i}:{p}" for p in xs.point_names)
    return FiniteGSet(group, action, point_names=names, check=False)
