"""Finite groups as dense multiplication tables, with conjugacy machinery.

Elements are integer ids 0..n-1.  All validation is brute force over the
table; at |G| <= 48 the O(|G|^3) associativity scan is immediate.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import ValidationError

__all__ = [
    "FiniteGroup",
    "Subgroup",
    "validate_group",
    "cyclic",
    "direct_product",
    "symmetric",
    "dihedral",
    "quaternion8",
]


class FiniteGroup:
    """A finite group given by its multiplication table."""

    def __init__(self, mult, names=None, check=True):
        mult = np.asarray(mult, dtype=int)
        if mult.ndim != 2 or mult.shape[0] != mult.shape[1]:
            raise ValidationError(f"multiplication table must be square, got {mult.shape}")
        self.mult = mult
        self.n = mult.shape[0]
        self.names = list(names) if names is not None else [str(i) for i in range(self.n)]
        if len(self.names) != self.n:
            raise ValidationError("element name list does not match table size")
        if check:
            self._validate()
        self.identity = self._find_identity()
        self.inverse = self._build_inverses()
        self._classes = None

    # -- validation -------------------------------------------------------

    def _validate(self):
        m = self.mult
        if m.min() < 0 or m.max() >= self.n:
            raise ValidationError("table entries must be element ids")
        e = self._find_identity()
        if e is None:
            raise ValidationError("no two-sided identity element")
        left = m[m, :]  # left[a,b,c] = (a*b)*c
        right = m[:, m]  # right[a,b,c] = a*(b*c)
        bad = np.argwhere(left != right)
        if bad.size:
            a, b, c = (int(v) for v in bad[0])
            raise ValidationError(
                f"non-associative triple ({self.names[a]},{self.names[b]},{self.names[c]})",
                witness=(a, b, c),
            )
        for a in range(self.n):
            row = np.where(m[a] == e)[0]
            ok = [b for b in row if m[b, a] == e]
            if not ok:
                raise ValidationError(
                    f"element {self.names[a]} has no two-sided inverse", witness=(a,)
                )

    def _find_identity(self):
        ids = np.arange(self.n)
        for e in range(self.n):
            if np.array_equal(self.mult[e], ids) and np.array_equal(self.mult[:, e], ids):
                return e
        return None

    def _build_inverses(self):
        inv = np.empty(self.n, dtype=int)
        for a in range(self.n):
            row = np.where(self.mult[a] == self.identity)[0]
            found = [b for b in row if self.mult[b, a] == self.identity]
            inv[a] = found[0]
        return inv

    # -- basic operations --------------------------------------------------

    def mul(self, a, b):
        return int(self.mult[a, b])

    def inv(self, a):
        return int(self.inverse[a])

    def conj(self, h, g):
        """h g h^-1"""
        return self.mul(self.mul(h, g), self.inv(h))

    def elements(self):
        return range(self.n)

    def element_order(self, g):
        k, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            k += 1
        return k

    @property
    def is_abelian(self):
        return np.array_equal(self.mult, self.mult.T)

    # -- conjugacy ----------------------------------------------------------

    def conjugacy_classes(self):
        """Partition of element ids into conjugacy classes, sorted by least member."""
        if self._classes is None:
            seen = set()
            classes = []
            for g in range(self.n):
                if g in seen:
                    continue
                cls = sorted({self.conj(h, g) for h in range(self.n)})
                classes.append(cls)
                seen.update(cls)
            self._classes = sorted(classes, key=lambda c: c[0])
        return self._classes

    def class_representatives(self):
        return [c[0] for c in self.conjugacy_classes()]

    def class_of(self, g):
        for c in self.conjugacy_classes():
            if g in c:
                return c
        raise ValidationError(f"unknown element {g}")

    def centralizer(self, g):
        return [h for h in range(self.n) if self.mul(h, g) == self.mul(g, h)]

    # -- subgroups -----------------------------------------------------------

    def subgroup(self, elements):
        """Validated subgroup on the given element ids."""
        elems = sorted(set(int(x) for x in elements))
        index = {g: i for i, g in enumerate(elems)}
        table = np.empty((len(elems), len(elems)), dtype=int)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                p = self.mul(a, b)
                if p not in index:
                    raise ValidationError(
                        f"subset not closed: {self.names[a]}*{self.names[b]} escapes",
                        witness=(a, b),
                    )
                table[i, j] = index[p]
        sub = FiniteGroup(table, names=[self.names[g] for g in elems], check=True)
        return Subgroup(self, elems, sub)

    def generated_subgroup(self, generators):
        current = {self.identity, *(int(g) for g in generators)}
        while True:
            new = {self.mul(a, b) for a in current for b in current} | {
                self.inv(a) for a in current
            }
            if new <= current:
                break
            current |= new
        return self.subgroup(current)

    def all_subgroups(self, max_index=None):
        """All subgroups, found by closing subsets of up to two generators plus joins."""
        found = {tuple(sorted({self.identity}))}
        for g in range(self.n):
            found.add(tuple(self.generated_subgroup([g]).elements))
        grown = True
        while grown:
            grown = False
            for a, b in itertools.combinations(list(found), 2):
                key = tuple(self.generated_subgroup(set(a) | set(b)).elements)
                if key not in found:
                    found.add(key)
                    grown = True
        return [self.subgroup(list(k)) for k in sorted(found, key=lambda k: (len(k), k))]

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"FiniteGroup(order={self.n})"


class Subgroup:
    """A subgroup H <= G carrying both the parent ids and a relabeled group."""

    def __init__(self, parent, elements, group):
        self.parent = parent
        self.elements = elements  # sorted parent ids
        self.group = group  # FiniteGroup on 0..|H|-1
        self._to_sub = {g: i for i, g in enumerate(elements)}

    def to_sub(self, parent_id):
        return self._to_sub[parent_id]

    def to_parent(self, sub_id):
        return self.elements[sub_id]

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"Subgroup(order={len(self.elements)} of {self.parent!r})"


def validate_group(table, names=None) -> FiniteGroup:
    """Check all group axioms on a raw table; raises ValidationError with witness."""
    return FiniteGroup(table, names=names, check=True)


# -- constructors ------------------------------------------------------------


def cyclic(n):
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, names=[f"c{i}" for i in range(n)], check=False)


def direct_product(g1, g2):
    n1, n2 = g1.n, g2.n
    table = np.empty((n1 * n2, n1 * n2), dtype=int)
    for a1 in range(n1):
        for a2 in range(n2):
            for b1 in range(n1):
                for b2 in range(n2):
                    table[a1 * n2 + a2, b1 * n2 + b2] = (
                        g1.mul(a1, b1) * n2 + g2.mul(a2, b2)
                    )
    names = [f"({g1.names[a]},{g2.names[b]})" for a in range(n1) for b in range(n2)]
    return FiniteGroup(table, names=names, check=False)


def symmetric(n):
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    size = len(perms)
    table = np.empty((size, size), dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            table[i, j] = index[tuple(p[q[k]] for k in range(n))]
    names = ["".join(str(v) for v in p) for p in perms]
    return FiniteGroup(table, names=names, check=False)


def dihedral(n):
    """Symmetries of the n-gon, order 2n; element (r, s) acts as rotation^r * flip^s."""
    size = 2 * n

    def compose(a, b):
        r1, s1 = divmod(a, 2)
        r2, s2 = divmod(b, 2)
        # (r1,s1)*(r2,s2): flip conjugates rotation
        r = (r1 + (r2 if s1 == 0 else -r2)) % n
        return r * 2 + (s1 + s2) % 2

    table = [[compose(a, b) for b in range(size)] for a in range(size)]
    return FiniteGroup(table, check=False)


def quaternion8():
    """Q8 = {1, -1, i, -i, j, -j, k, -k}."""
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    # encode as pairs (unit, sign): products of quaternion units
    unit = {"1": 0, "i": 1, "j": 2, "k": 3}
    mul_unit = {
        (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
        (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
        (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
        (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
    }

    def decode(i):
        u, neg = divmod(i, 2)
        return u, -1 if neg else 1

    def encode(u, s):
        return u * 2 + (0 if s == 1 else 1)

    table = np.empty((8, 8), dtype=int)
    for a in range(8):
        for b in range(8):
            u1, s1 = decode(a)
            u2, s2 = decode(b)
            u, s = mul_unit[(u1, u2)]
            table[a, b] = encode(u, s * s1 * s2)
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return FiniteGroup(table, names=names, check=False)
