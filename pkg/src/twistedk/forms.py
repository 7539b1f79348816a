"""Finite-dimensional graded-commutative differential algebras and matrices over them.

An algebra is given by a homogeneous basis with structure constants; elements
of End(E)-valued forms are stored as tensors T[m, i, j]: the coefficient of
basis form m in the (i, j) entry.  Products follow the graded tensor-product
rule (w (x) A)(t (x) B) = (-1)^(|A||t|) wt (x) AB, where |A| is the block
parity of the matrix part; this is what makes the supertrace super-cyclic and
the curvature formula F = dM + M^2 come out right.

Matrix exponentials of even matrices are computed through the regular
representation: the matrix acts as a plain complex operator on the free
module, is exponentiated by scaling-and-squaring, and the form entries are
read back against the unit.
"""

from __future__ import annotations

import itertools

import numpy as np
import scipy.linalg

from .errors import NumericalError, ValidationError

__all__ = [
    "FormAlgebra",
    "Form",
    "OmegaMatrix",
    "zero_dim_model",
    "exterior_model",
    "interval_model",
    "acyclic_model",
]

_STRUCT_TOL = 1e-10
_EXP_NORM_LIMIT = 300.0


class FormAlgebra:
    """Graded-commutative differential algebra with dense structure constants."""

    def __init__(self, names, degrees, struct, diff=None, actions=None, check=True):
        self.names = list(names)
        self.degrees = np.asarray(degrees, dtype=int)
        self.dim = len(self.names)
        self.struct = np.asarray(struct, dtype=complex)
        self.diff = (
            np.zeros((self.dim, self.dim), dtype=complex)
            if diff is None
            else np.asarray(diff, dtype=complex)
        )
        self.actions = {}
        if actions:
            for key, mat in actions.items():
                self.actions[key] = np.asarray(mat, dtype=complex)
        if self.struct.shape != (self.dim, self.dim, self.dim):
            raise ValidationError(f"structure constants must be {self.dim}^3")
        if self.diff.shape != (self.dim, self.dim):
            raise ValidationError("differential matrix has wrong shape")
        self.parities = self.degrees % 2
        self.top_degree = int(self.degrees.max()) if self.dim else 0
        self.unit = self._solve_unit()
        if check:
            self._validate()

    # -- construction checks ------------------------------------------------

    def _solve_unit(self):
        if self.dim == 0:
            return np.zeros(0, dtype=complex)
        S = self.struct
        left = S.transpose(1, 2, 0).reshape(self.dim * self.dim, self.dim)
        right = S.transpose(0, 2, 1).reshape(self.dim * self.dim, self.dim)
        target = np.eye(self.dim, dtype=complex).reshape(-1)
        A = np.vstack([left, right])
        b = np.concatenate([target, target])
        u, *_ = np.linalg.lstsq(A, b, rcond=None)
        if np.linalg.norm(A @ u - b) > 1e-8 * (1 + np.linalg.norm(b)):
            raise ValidationError("algebra has no two-sided unit")
        return u

    def _validate(self):
        if self.dim == 0:
            return
        S, D, deg = self.struct, self.diff, self.degrees
        if (deg < 0).any():
            raise ValidationError("basis degrees must be nonnegative")
        support = np.abs(S) > _STRUCT_TOL
        for i, j, k in zip(*np.nonzero(support)):
            if deg[k] != deg[i] + deg[j]:
                raise ValidationError(
                    f"product {self.names[i]}*{self.names[j]} hits wrong degree "
                    f"at {self.names[k]}",
                    witness=(int(i), int(j), int(k)),
                )
        sign = np.where((deg[:, None] * deg[None, :]) % 2, -1.0, 1.0)
        if not np.allclose(S, sign[:, :, None] * S.transpose(1, 0, 2), atol=_STRUCT_TOL):
            bad = np.argwhere(
                ~np.isclose(S, sign[:, :, None] * S.transpose(1, 0, 2), atol=_STRUCT_TOL)
            )[0]
            raise ValidationError(
                "graded commutativity fails", witness=tuple(int(v) for v in bad)
            )
        assoc_l = np.einsum("ijm,mkl->ijkl", S, S)
        assoc_r = np.einsum("jkm,iml->ijkl", S, S)
        if not np.allclose(assoc_l, assoc_r, atol=1e-8):
            bad = np.argwhere(~np.isclose(assoc_l, assoc_r, atol=1e-8))[0]
            raise ValidationError(
                "associativity fails on basis triple",
                witness=tuple(int(v) for v in bad[:3]),
            )
        for l, m in zip(*np.nonzero(np.abs(D) > _STRUCT_TOL)):
            if deg[l] != deg[m] + 1:
                raise ValidationError(
                    f"differential does not raise degree by one at "
                    f"{self.names[m]} -> {self.names[l]}",
                    witness=(int(l), int(m)),
                )
        if not np.allclose(D @ D, 0, atol=1e-9):
            raise ValidationError("d^2 != 0")
        leib_l = np.einsum("ijk,lk->ijl", S, D)
        leib_r = np.einsum("mi,mjl->ijl", D, S) + np.einsum(
            "i,mj,iml->ijl", np.where(deg % 2, -1.0, 1.0), D, S
        )
        if not np.allclose(leib_l, leib_r, atol=1e-8):
            bad = np.argwhere(~np.isclose(leib_l, leib_r, atol=1e-8))[0]
            raise ValidationError(
                "Leibniz rule fails on basis pair",
                witness=tuple(int(v) for v in bad[:2]),
            )
        for key, A in self.actions.items():
            self._validate_action(key, A)

    def _validate_action(self, key, A):
        S, D, deg = self.struct, self.diff, self.degrees
        if A.shape != (self.dim, self.dim):
            raise ValidationError(f"action {key!r} has wrong shape")
        for l, m in zip(*np.nonzero(np.abs(A) > _STRUCT_TOL)):
            if deg[l] != deg[m]:
                raise ValidationError(f"action {key!r} does not preserve degree")
        if abs(np.linalg.det(A)) < 1e-12:
            raise ValidationError(f"action {key!r} is not invertible")
        hom_l = np.einsum("ijk,lk->ijl", S, A)
        hom_r = np.einsum("pi,qj,pql->ijl", A, A, S)
        if not np.allclose(hom_l, hom_r, atol=1e-8):
            raise ValidationError(f"action {key!r} is not an algebra map")
        if not np.allclose(A @ D, D @ A, atol=1e-9):
            raise ValidationError(f"action {key!r} does not commute with d")

    # -- arithmetic on coefficient vectors -----------------------------------

    def mul_vec(self, a, b):
        return np.einsum("p,q,pqk->k", a, b, self.struct)

    def d_vec(self, a):
        return self.diff @ a

    def act_vec(self, key, a):
        if key not in self.actions:
            raise ValidationError(f"no action installed for {key!r}")
        return self.actions[key] @ a

    def with_actions(self, actions):
        """A copy carrying (validated) extra automorphisms."""
        merged = dict(self.actions)
        merged.update(actions)
        return FormAlgebra(self.names, self.degrees, self.struct, self.diff, merged, check=True)

    # -- element constructors -------------------------------------------------

    def zero(self) -> "Form":
        return Form(self, np.zeros(self.dim, dtype=complex))

    def one(self) -> "Form":
        return Form(self, self.unit.copy())

    def basis_form(self, index) -> "Form":
        c = np.zeros(self.dim, dtype=complex)
        c[index] = 1.0
        return Form(self, c)

    def form(self, coeffs) -> "Form":
        return Form(self, np.asarray(coeffs, dtype=complex))

    def same_as(self, other: "FormAlgebra", tol=1e-9) -> bool:
        return (
            self.dim == other.dim
            and np.array_equal(self.degrees, other.degrees)
            and np.allclose(self.struct, other.struct, atol=tol)
            and np.allclose(self.diff, other.diff, atol=tol)
        )

    def __repr__(self):
        return f"FormAlgebra(dim={self.dim}, top_degree={self.top_degree})"


class Form:
    """An element of a FormAlgebra, stored as basis coefficients."""

    def __init__(self, algebra: FormAlgebra, coeffs):
        self.algebra = algebra
        self.coeffs = np.asarray(coeffs, dtype=complex)
        if self.coeffs.shape != (algebra.dim,):
            raise ValidationError("coefficient vector has wrong length")

    def _like(self, coeffs):
        return Form(self.algebra, coeffs)

    def __add__(self, other):
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self):
        return self._like(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Form):
            return self._like(self.algebra.mul_vec(self.coeffs, other.coeffs))
        return self._like(self.coeffs * complex(other))

    __rmul__ = __mul__

    def d(self) -> "Form":
        return self._like(self.algebra.d_vec(self.coeffs))

    def act(self, key) -> "Form":
        return self._like(self.algebra.act_vec(key, self.coeffs))

    @property
    def parity(self):
        """0, 1, or None for mixed parity (at tolerance 1e-12)."""
        live = np.abs(self.coeffs) > 1e-12
        pars = set(self.algebra.parities[live])
        if not pars:
            return 0
        if len(pars) == 1:
            return int(pars.pop())
        return None

    def norm(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def is_closed(self, tol=1e-9) -> bool:
        return self.d().norm() <= tol * (1 + self.norm())

    def is_exact(self, tol=1e-9):
        """(flag, witness): witness w has d(w) = self when the flag is True."""
        D = self.algebra.diff
        x, *_ = np.linalg.lstsq(D, self.coeffs, rcond=None)
        residual = np.linalg.norm(D @ x - self.coeffs)
        if residual <= tol * (1 + np.linalg.norm(self.coeffs)):
            return True, self._like(x)
        return False, None

    def modulo_exact(self):
        """Canonical representative modulo im(d): subtract the orthogonal projection."""
        D = self.algebra.diff
        x, *_ = np.linalg.lstsq(D, self.coeffs, rcond=None)
        return self._like(self.coeffs - D @ x)

    def allclose(self, other, tol=1e-9):
        return np.allclose(self.coeffs, other.coeffs, atol=tol)

    def __repr__(self):
        terms = [
            f"({c:.6g})*{self.algebra.names[k]}"
            for k, c in enumerate(self.coeffs)
            if abs(c) > 1e-12
        ]
        return "Form(" + (" + ".join(terms) if terms else "0") + ")"


class OmegaMatrix:
    """A matrix of forms: an element of Omega (x) Hom(C^(r_in), C^(r_out)).

    ``row_par``/``col_par`` record the Z/2-grading of the free module basis.
    """

    def __init__(self, algebra: FormAlgebra, tensor, row_par, col_par):
        self.algebra = algebra
        self.tensor = np.asarray(tensor, dtype=complex)
        self.row_par = np.asarray(row_par, dtype=int)
        self.col_par = np.asarray(col_par, dtype=int)
        expected = (algebra.dim, len(self.row_par), len(self.col_par))
        if self.tensor.shape != expected:
            raise ValidationError(
                f"OmegaMatrix tensor must have shape {expected}, got {self.tensor.shape}"
            )

    # -- constructors --------------------------------------------------------

    @classmethod
    def zeros(cls, algebra, row_par, col_par):
        t = np.zeros((algebra.dim, len(row_par), len(col_par)), dtype=complex)
        return cls(algebra, t, row_par, col_par)

    @classmethod
    def identity(cls, algebra, parities):
        n = len(parities)
        t = algebra.unit[:, None, None] * np.eye(n, dtype=complex)[None, :, :]
        return cls(algebra, t, parities, parities)

    @classmethod
    def from_constant(cls, algebra, matrix, row_par, col_par):
        matrix = np.asarray(matrix, dtype=complex)
        t = algebra.unit[:, None, None] * matrix[None, :, :]
        return cls(algebra, t, row_par, col_par)

    def _like(self, tensor, row_par=None, col_par=None):
        return OmegaMatrix(
            self.algebra,
            tensor,
            self.row_par if row_par is None else row_par,
            self.col_par if col_par is None else col_par,
        )

    # -- linear structure ------------------------------------------------------

    def __add__(self, other):
        self._check_compatible(other)
        return self._like(self.tensor + other.tensor)

    def __sub__(self, other):
        self._check_compatible(other)
        return self._like(self.tensor - other.tensor)

    def __neg__(self):
        return self._like(-self.tensor)

    def __mul__(self, scalar):
        return self._like(self.tensor * complex(scalar))

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if self.algebra is not other.algebra and not self.algebra.same_as(other.algebra):
            raise ValidationError("OmegaMatrix algebras differ")
        if not (
            np.array_equal(self.row_par, other.row_par)
            and np.array_equal(self.col_par, other.col_par)
        ):
            raise ValidationError("OmegaMatrix gradings differ")

    # -- graded multiplication ---------------------------------------------------

    def _end_split(self):
        """Split each matrix coefficient into block-even and block-odd parts."""
        mask = (self.row_par[:, None] == self.col_par[None, :]).astype(float)
        even = self.tensor * mask[None, :, :]
        return even, self.tensor - even

    def __matmul__(self, other: "OmegaMatrix") -> "OmegaMatrix":
        if self.algebra is not other.algebra and not self.algebra.same_as(other.algebra):
            raise ValidationError("OmegaMatrix algebras differ")
        if not np.array_equal(self.col_par, other.row_par):
            raise ValidationError("grading mismatch in composition")
        S = self.algebra.struct
        sgn = np.where(self.algebra.degrees % 2, -1.0, 1.0)
        even, odd = self._end_split()
        out = np.einsum("mik,lkj,mlr->rij", even, other.tensor, S, optimize=True)
        out += np.einsum("mik,l,lkj,mlr->rij", odd, sgn, other.tensor, S, optimize=True)
        return OmegaMatrix(self.algebra, out, self.row_par, other.col_par)

    # -- structure maps --------------------------------------------------------

    def supertrace(self) -> Form:
        if not np.array_equal(self.row_par, self.col_par):
            raise ValidationError("supertrace needs a square, grading-aligned matrix")
        signs = np.where(self.row_par % 2, -1.0, 1.0)
        diag = np.einsum("mii,i->m", self.tensor, signs)
        return Form(self.algebra, diag)

    def d(self) -> "OmegaMatrix":
        return self._like(np.einsum("lm,mij->lij", self.algebra.diff, self.tensor))

    def act(self, key) -> "OmegaMatrix":
        A = self.algebra.actions.get(key)
        if A is None:
            raise ValidationError(f"no action installed for {key!r}")
        return self._like(np.einsum("lm,mij->lij", A, self.tensor))

    def operator_parity(self):
        """Total parity (form degree + block parity): 0, 1, or None if mixed."""
        deg = self.algebra.degrees
        pattern = (
            deg[:, None, None] + self.row_par[None, :, None] + self.col_par[None, None, :]
        ) % 2
        live = np.abs(self.tensor) > 1e-12
        pars = set(pattern[live].ravel().tolist())
        if not pars:
            return 0
        if len(pars) == 1:
            return int(pars.pop())
        return None

    def parity_split(self):
        """(even, odd) by total operator parity."""
        deg = self.algebra.degrees
        pattern = (
            deg[:, None, None] + self.row_par[None, :, None] + self.col_par[None, None, :]
        ) % 2
        even = self.tensor * (pattern == 0)
        return self._like(even), self._like(self.tensor - even)

    # -- regular representation -------------------------------------------------

    def to_operator(self) -> np.ndarray:
        """The plain complex matrix of left multiplication on the free module."""
        S = self.algebra.struct
        sgn = np.where(self.algebra.degrees % 2, -1.0, 1.0)
        even, odd = self._end_split()
        big = np.einsum("mij,mlk->kilj", even, S, optimize=True)
        big += np.einsum("mij,l,mlk->kilj", odd, sgn, S, optimize=True)
        d, r, c = self.algebra.dim, len(self.row_par), len(self.col_par)
        return big.reshape(d * r, d * c)

    def _from_operator(self, big, row_par, col_par):
        d = self.algebra.dim
        cube = big.reshape(d, len(row_par), d, len(col_par))
        tensor = np.einsum("kilj,l->kij", cube, self.algebra.unit)
        return OmegaMatrix(self.algebra, tensor, row_par, col_par)

    def exp_even(self) -> "OmegaMatrix":
        """exp of an even square matrix, via the regular representation."""
        if not np.array_equal(self.row_par, self.col_par):
            raise ValidationError("exp_even needs a square, grading-aligned matrix")
        if self.operator_parity() not in (0,):
            raise ValidationError("exp_even requires total parity even")
        big = self.to_operator()
        norm = np.linalg.norm(big, np.inf)
        if norm > _EXP_NORM_LIMIT:
            raise NumericalError(
                f"matrix norm {norm:.3g} too large for a reliable exponential; "
                "rescale the superconnection data"
            )
        if big.size == 0:
            return self._like(self.tensor.copy())
        return self._from_operator(scipy.linalg.expm(big), self.row_par, self.col_par)

    def inverse(self) -> "OmegaMatrix":
        if not np.array_equal(self.row_par, self.col_par):
            raise ValidationError("inverse needs a square, grading-aligned matrix")
        big = self.to_operator()
        d, n = self.algebra.dim, len(self.row_par)
        if n == 0:
            return self._like(self.tensor.copy())
        rhs = np.zeros((d * n, n), dtype=complex)
        for j in range(n):
            rhs[:, j].reshape(d, n)[:, j] = self.algebra.unit
        try:
            sol = np.linalg.solve(big, rhs)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"OmegaMatrix is not invertible: {exc}") from exc
        cube = sol.reshape(d, n, n)
        return OmegaMatrix(self.algebra, cube, self.row_par, self.col_par)

    def max_abs(self):
        return float(np.max(np.abs(self.tensor))) if self.tensor.size else 0.0

    def allclose(self, other, tol=1e-9):
        return (
            np.array_equal(self.row_par, other.row_par)
            and np.array_equal(self.col_par, other.col_par)
            and np.allclose(self.tensor, other.tensor, atol=tol)
        )

    def __repr__(self):
        return (
            f"OmegaMatrix({len(self.row_par)}x{len(self.col_par)} over "
            f"dim-{self.algebra.dim} algebra)"
        )


# -- stock models ---------------------------------------------------------------


def zero_dim_model(points, names=None) -> FormAlgebra:
    """Functions on a finite set: all degree 0, d = 0, pointwise product.

    The empty set gives the zero algebra; supertraces over it vanish and no
    error is raised.
    """
    if isinstance(points, int):
        count = points
        names = names or [f"p{i}" for i in range(count)]
    else:
        pts = list(points)
        count = len(pts)
        names = names or [str(p) for p in pts]
    struct = np.zeros((count, count, count), dtype=complex)
    for i in range(count):
        struct[i, i, i] = 1.0
    return FormAlgebra(names, [0] * count, struct, check=count > 0)


def exterior_model(generator_degrees, generator_names=None) -> FormAlgebra:
    """Exterior algebra on odd-degree generators with d = 0."""
    degs = list(generator_degrees)
    for d in degs:
        if d % 2 == 0:
            raise ValidationError("exterior_model generators must have odd degree")
    k = len(degs)
    gnames = generator_names or [chr(ord("a") + i) for i in range(k)]
    masks = list(range(2**k))
    subsets = [[i for i in range(k) if m >> i & 1] for m in masks]
    names = ["1" if not s else "".join(gnames[i] for i in s) for s in subsets]
    degrees = [sum(degs[i] for i in s) for s in subsets]
    index = {tuple(s): m for m, s in enumerate(subsets)}
    dim = len(masks)
    struct = np.zeros((dim, dim, dim), dtype=complex)
    for a, sa in enumerate(subsets):
        for b, sb in enumerate(subsets):
            if set(sa) & set(sb):
                continue
            inversions = sum(1 for x in sa for y in sb if x > y)
            target = index[tuple(sorted(sa + sb))]
            struct[a, b, target] = (-1.0) ** inversions
    return FormAlgebra(names, degrees, struct)


def acyclic_model(n_generators=1) -> FormAlgebra:
    """Generators a_i in degree 1 with d(a_i) = b_i in degree 2, all products zero.

    The minimal model whose exact forms include even degrees, so the
    transgression contract d(CS) = Z1 - Z0 is numerically nontrivial on it.
    """
    names = ["1"]
    degrees = [0]
    for i in range(n_generators):
        names += [f"a{i}", f"da{i}"]
        degrees += [1, 2]
    dim = len(names)
    struct = np.zeros((dim, dim, dim), dtype=complex)
    for j in range(dim):
        struct[0, j, j] = 1.0
        struct[j, 0, j] = 1.0
    diff = np.zeros((dim, dim), dtype=complex)
    for i in range(n_generators):
        diff[2 + 2 * i, 1 + 2 * i] = 1.0
    return FormAlgebra(names, degrees, struct, diff)


def interval_model() -> FormAlgebra:
    """Truncated forms on a line, C[t]/(t^3) with dt: a 5-dim model with d != 0.

    Truncation happens along the differential ideal (t^3, t^2 dt), so the
    Leibniz rule survives the quotient.
    """
    names = ["1", "t", "t2", "dt", "tdt"]
    degrees = [0, 0, 0, 1, 1]
    dim = 5
    struct = np.zeros((dim, dim, dim), dtype=complex)
    for j in range(dim):  # unit
        struct[0, j, j] = 1.0
        struct[j, 0, j] = 1.0
    struct[1, 1, 2] = 1.0  # t*t = t^2
    struct[1, 3, 4] = 1.0  # t*dt
    struct[3, 1, 4] = 1.0
    diff = np.zeros((dim, dim), dtype=complex)
    diff[3, 1] = 1.0  # d(t) = dt
    diff[4, 2] = 2.0  # d(t^2) = 2 t dt
    return FormAlgebra(names, degrees, struct, diff)
