"""Concrete C*-categories of complex matrices and their basic constructions.

A category here is a finite object list with per-object dimensions plus, for
every ordered pair of objects, a Frobenius-orthonormal basis of a matrix
subspace.  Closure under composition and involution, presence of units, the
C*-identity and the positivity of spectra are *verified properties* of the
data, not type guarantees: ``verify_category`` completes the contract for
user-supplied generators.

Also in this module: factorization and polar decomposition of morphisms, the
additive hull (finite object lists with block matrices and the column-sup
norm), the one-object matrix algebra, the idempotent completion, and
C*-functors with their verification.
"""

from __future__ import annotations

import numpy as np

from .errors import ClosureViolation, CompositionMismatch, InvalidInput, NotInvertible
from .linalg import (
    Tolerance,
    as_cmatrix,
    frac_power,
    frobenius_norm,
    min_herm_eig,
    op_norm,
    orthonormal_span,
    resolve_tol,
    span_coords,
    span_eval,
    span_project,
    span_residual,
)
from .report import Report

__all__ = [
    "CStarCategory",
    "Morphism",
    "CStarFunctor",
    "compose",
    "involute",
    "verify_category",
    "verify_functor",
    "identity_functor",
    "factorize",
    "cofactorize",
    "polar_unitary",
    "AdditiveHull",
    "additive_hull",
    "column_sup_norm",
    "MatrixAlgebra",
    "matrix_algebra",
    "IdempotentCompletion",
    "idempotent_completion",
    "list_dim",
    "block_slices",
    "block_project",
    "block_residual",
    "block_basis_stack",
    "random_block",
]


class CStarCategory:
    """Finite object set with *-closed matrix hom-spaces.

    Parameters
    ----------
    objects : sequence of (label, dim)
        Object table; every dimension must be a positive integer.
    homs : mapping (src, dst) -> sequence of matrices
        Generators of each hom-space, each of shape (dim(dst), dim(src)).
        Missing pairs default to the zero space.  Generators are
        orthonormalized (Frobenius) at ingestion unless
        ``assume_orthonormal`` is set.
    tol : Tolerance, optional
        Default tolerance for all membership and verification decisions.
    """

    def __init__(self, objects, homs, tol=None, assume_orthonormal=False):
        tol = resolve_tol(tol)
        self.tol = tol
        self._labels: list[str] = []
        self._dims: list[int] = []
        for label, dim in objects:
            dim = int(dim)
            if dim <= 0:
                raise InvalidInput(f"object {label!r} has non-positive dimension {dim}")
            self._labels.append(str(label))
            self._dims.append(dim)
        if not self._dims:
            raise InvalidInput("a category needs at least one object")
        n = len(self._dims)
        self._basis: dict[tuple[int, int], np.ndarray] = {}
        for x in range(n):
            for y in range(n):
                dy, dx = self._dims[y], self._dims[x]
                gens = homs.get((x, y)) if homs is not None else None
                if gens is None or len(gens) == 0:
                    self._basis[(x, y)] = np.zeros((0, dy, dx), dtype=np.complex128)
                    continue
                stack = np.stack([as_cmatrix(g, dy, dx) for g in gens])
                if assume_orthonormal:
                    # trusted verbatim; verify_category reports the residual
                    self._basis[(x, y)] = stack
                else:
                    basis = orthonormal_span(stack, tol)
                    if basis.shape[0] == 0:
                        basis = np.zeros((0, dy, dx), dtype=np.complex128)
                    self._basis[(x, y)] = basis

    # -- object table ------------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self._dims)

    @property
    def objects(self) -> list[tuple[str, int]]:
        return list(zip(self._labels, self._dims))

    def dim(self, x: int) -> int:
        return self._dims[x]

    def label(self, x: int) -> str:
        return self._labels[x]

    def check_object(self, x: int) -> int:
        if not 0 <= x < self.n_objects:
            raise InvalidInput(f"object index {x} out of range")
        return x

    # -- hom-spaces --------------------------------------------------------

    def hom_basis(self, x: int, y: int) -> np.ndarray:
        """Orthonormal basis stack of hom(x, y), shape (k, dim(y), dim(x))."""
        return self._basis[(self.check_object(x), self.check_object(y))]

    def hom_dim(self, x: int, y: int) -> int:
        return self.hom_basis(x, y).shape[0]

    def hom_project(self, x: int, y: int, mat) -> np.ndarray:
        return span_project(mat, self.hom_basis(x, y))

    def hom_residual(self, x: int, y: int, mat) -> float:
        return span_residual(mat, self.hom_basis(x, y))

    def hom_coords(self, x: int, y: int, mat) -> np.ndarray:
        return span_coords(mat, self.hom_basis(x, y))

    def hom_element(self, x: int, y: int, coords) -> "Morphism":
        mat = span_eval(coords, self.hom_basis(x, y), shape=(self.dim(y), self.dim(x)))
        return Morphism(self, x, y, mat, validate=False)

    # -- morphisms ---------------------------------------------------------

    def morphism(self, src: int, dst: int, mat, validate: bool = True) -> "Morphism":
        return Morphism(self, src, dst, mat, validate=validate)

    def unit(self, x: int) -> "Morphism":
        d = self.dim(self.check_object(x))
        return Morphism(self, x, x, np.eye(d, dtype=np.complex128), validate=False)

    def zero(self, x: int, y: int) -> "Morphism":
        return Morphism(
            self, x, y, np.zeros((self.dim(y), self.dim(x)), dtype=np.complex128), validate=False
        )

    def random_morphism(self, rng: np.random.Generator, x: int, y: int) -> "Morphism":
        basis = self.hom_basis(x, y)
        k = basis.shape[0]
        if k == 0:
            return self.zero(x, y)
        coords = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / np.sqrt(2 * k)
        return self.hom_element(x, y, coords)

    def __repr__(self) -> str:
        objs = ", ".join(f"{l}:{d}" for l, d in zip(self._labels, self._dims))
        return f"CStarCategory({objs})"


class Morphism:
    """A (source, target, matrix) triple constrained to lie in a hom-space."""

    __slots__ = ("cat", "src", "dst", "mat")

    def __init__(self, cat: CStarCategory, src: int, dst: int, mat, validate: bool = True):
        self.cat = cat
        self.src = cat.check_object(src)
        self.dst = cat.check_object(dst)
        self.mat = as_cmatrix(mat, cat.dim(dst), cat.dim(src))
        if validate:
            res = cat.hom_residual(src, dst, self.mat)
            if res > cat.tol.bound(frobenius_norm(self.mat)):
                raise ClosureViolation(
                    f"matrix is not in the span of hom({src},{dst}); residual {res:.3e}"
                )

    def adjoint(self) -> "Morphism":
        return Morphism(self.cat, self.dst, self.src, self.mat.conj().T, validate=False)

    def norm(self) -> float:
        return op_norm(self.mat)

    def is_zero(self, tol: Tolerance | None = None) -> bool:
        tol = resolve_tol(tol) if tol is not None else self.cat.tol
        return frobenius_norm(self.mat) <= tol.bound(1.0)

    def __matmul__(self, other: "Morphism") -> "Morphism":
        return compose(self, other)

    def __add__(self, other: "Morphism") -> "Morphism":
        if (other.src, other.dst) != (self.src, self.dst):
            raise CompositionMismatch("can only add parallel morphisms")
        return Morphism(self.cat, self.src, self.dst, self.mat + other.mat, validate=False)

    def __sub__(self, other: "Morphism") -> "Morphism":
        if (other.src, other.dst) != (self.src, self.dst):
            raise CompositionMismatch("can only subtract parallel morphisms")
        return Morphism(self.cat, self.src, self.dst, self.mat - other.mat, validate=False)

    def __mul__(self, scalar) -> "Morphism":
        return Morphism(self.cat, self.src, self.dst, self.mat * complex(scalar), validate=False)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return (
            f"Morphism({self.cat.label(self.src)} -> {self.cat.label(self.dst)}, "
            f"norm={self.norm():.4g})"
        )


def compose(f: Morphism, g: Morphism, validate: bool = True) -> Morphism:
    """The composite ``f after g``; requires ``g.dst == f.src``."""
    if f.cat is not g.cat:
        raise CompositionMismatch("morphisms live in different categories")
    if g.dst != f.src:
        raise CompositionMismatch(
            f"cannot compose: inner objects differ ({g.dst} vs {f.src})"
        )
    return Morphism(f.cat, g.src, f.dst, f.mat @ g.mat, validate=validate)


def involute(f: Morphism) -> Morphism:
    """Conjugate-transpose with source and target swapped."""
    return f.adjoint()


# ---------------------------------------------------------------------------
# verification


def verify_category(cat: CStarCategory, tol: Tolerance | None = None,
                    samples: int = 2, seed: int = 0) -> Report:
    """Check the axioms of a concrete C*-category on the stored data.

    Residuals reported: hom-basis orthonormality, unit membership,
    involution closure, composition closure, the C*-identity and spectrum
    positivity on sampled elements.
    """
    tol = resolve_tol(tol if tol is not None else cat.tol)
    rng = np.random.default_rng(seed)
    report = Report(context="category")
    n = cat.n_objects

    ortho = 0.0
    for x in range(n):
        for y in range(n):
            basis = cat.hom_basis(x, y)
            k = basis.shape[0]
            if k == 0:
                continue
            gram = np.tensordot(basis.conj(), basis, axes=([1, 2], [1, 2]))
            ortho = max(ortho, op_norm(gram - np.eye(k)))
    report.add("hom-orthonormality", ortho, tol.bound(1.0))

    unit_res = 0.0
    for x in range(n):
        unit_res = max(unit_res, cat.hom_residual(x, x, np.eye(cat.dim(x))))
    report.add("unit-membership", unit_res, tol.bound(np.sqrt(max(cat.dim(x) for x in range(n)))))

    inv_res = 0.0
    for x in range(n):
        for y in range(n):
            basis = cat.hom_basis(x, y)
            for b in basis:
                inv_res = max(inv_res, cat.hom_residual(y, x, b.conj().T))
    report.add("involution-closure", inv_res, tol.bound(1.0))

    comp_res = 0.0
    for x in range(n):
        for y in range(n):
            for z in range(n):
                gb = cat.hom_basis(x, y)
                fb = cat.hom_basis(y, z)
                if gb.shape[0] == 0 or fb.shape[0] == 0:
                    continue
                for f in fb:
                    prods = np.einsum("ij,kjl->kil", f, gb)
                    for p in prods:
                        comp_res = max(comp_res, cat.hom_residual(x, z, p))
    report.add("composition-closure", comp_res, tol.bound(1.0))

    cstar_res = 0.0
    spec_res = 0.0
    for x in range(n):
        for y in range(n):
            if cat.hom_dim(x, y) == 0:
                continue
            for _ in range(samples):
                a = cat.random_morphism(rng, x, y)
                gram = a.mat.conj().T @ a.mat
                na = op_norm(a.mat)
                cstar_res = max(cstar_res, abs(op_norm(gram) - na**2) / max(na**2, 1.0))
                spec_res = max(spec_res, max(-min_herm_eig(gram), 0.0) / max(na**2, 1.0))
    report.add("cstar-identity", cstar_res, tol.bound(1.0))
    report.add("spectrum-positivity", spec_res, tol.bound(1.0))
    return report


# ---------------------------------------------------------------------------
# factorization and polar decomposition


def factorize(u: Morphism, tol: Tolerance | None = None) -> tuple[Morphism, Morphism]:
    """Split ``u = v  w`` with ``w = (u*u)^(1/4)`` an endomorphism of the source.

    ``v`` is ``u`` times the Moore-Penrose quarter-inverse of ``u*u``; both
    factors are validated against their hom-spans.
    """
    tol = resolve_tol(tol if tol is not None else u.cat.tol)
    gram = u.mat.conj().T @ u.mat
    w_mat = frac_power(gram, 0.25, tol)
    v_mat = u.mat @ frac_power(gram, -0.25, tol)
    v = Morphism(u.cat, u.src, u.dst, v_mat)
    w = Morphism(u.cat, u.src, u.src, w_mat)
    return v, w


def cofactorize(u: Morphism, tol: Tolerance | None = None) -> tuple[Morphism, Morphism]:
    """Mirrored split ``u = s  t`` with ``s`` an endomorphism of the target."""
    v, w = factorize(involute(u), tol)
    return involute(w), involute(v)


def polar_unitary(a: Morphism, tol: Tolerance | None = None) -> Morphism:
    """Unitary part ``a (a*a)^(-1/2)`` of an invertible morphism."""
    tol = resolve_tol(tol if tol is not None else a.cat.tol)
    if a.mat.shape[0] != a.mat.shape[1]:
        raise NotInvertible("polar unitary needs equal source and target dimensions")
    svals = np.linalg.svd(a.mat, compute_uv=False)
    if svals.size == 0 or svals[-1] <= tol.atol:
        raise NotInvertible("morphism is not invertible at the configured cutoff")
    u_mat = a.mat @ frac_power(a.mat.conj().T @ a.mat, -0.5, tol)
    return Morphism(a.cat, a.src, a.dst, u_mat)


# ---------------------------------------------------------------------------
# C*-functors


class CStarFunctor:
    """Linear *-preserving functor between concrete C*-categories.

    ``action[(x, y)]`` holds the images of the source basis of hom(x, y) as a
    stack of matrices over the target; the functor extends complex-linearly.
    """

    def __init__(self, source: CStarCategory, target: CStarCategory,
                 object_map, action):
        self.source = source
        self.target = target
        self.object_map = tuple(target.check_object(int(v)) for v in object_map)
        if len(self.object_map) != source.n_objects:
            raise InvalidInput("object map must cover every source object")
        self._action: dict[tuple[int, int], np.ndarray] = {}
        for x in range(source.n_objects):
            for y in range(source.n_objects):
                k = source.hom_dim(x, y)
                fx, fy = self.object_map[x], self.object_map[y]
                dy, dx = target.dim(fy), target.dim(fx)
                imgs = action.get((x, y)) if action is not None else None
                if imgs is None:
                    if k != 0:
                        raise InvalidInput(f"missing action on hom({x},{y})")
                    self._action[(x, y)] = np.zeros((0, dy, dx), dtype=np.complex128)
                    continue
                stack = np.stack([as_cmatrix(im, dy, dx) for im in imgs]) if len(imgs) else \
                    np.zeros((0, dy, dx), dtype=np.complex128)
                if stack.shape[0] != k:
                    raise InvalidInput(
                        f"action on hom({x},{y}) has {stack.shape[0]} images, expected {k}"
                    )
                self._action[(x, y)] = stack

    def image_stack(self, x: int, y: int) -> np.ndarray:
        return self._action[(x, y)]

    def apply(self, m: Morphism, validate: bool = False) -> Morphism:
        if m.cat is not self.source:
            raise InvalidInput("morphism does not live in the functor source")
        coords = self.source.hom_coords(m.src, m.dst, m.mat)
        recon = span_eval(coords, self.source.hom_basis(m.src, m.dst), shape=m.mat.shape)
        if frobenius_norm(recon - m.mat) > self.source.tol.bound(frobenius_norm(m.mat)):
            raise ClosureViolation("morphism is outside its hom-span; cannot apply functor")
        fx, fy = self.object_map[m.src], self.object_map[m.dst]
        stack = self._action[(m.src, m.dst)]
        mat = span_eval(coords, stack, shape=(self.target.dim(fy), self.target.dim(fx)))
        return Morphism(self.target, fx, fy, mat, validate=validate)

    def __repr__(self) -> str:
        return f"CStarFunctor({self.source!r} -> {self.target!r})"


def identity_functor(cat: CStarCategory) -> CStarFunctor:
    action = {
        (x, y): cat.hom_basis(x, y)
        for x in range(cat.n_objects)
        for y in range(cat.n_objects)
    }
    return CStarFunctor(cat, cat, range(cat.n_objects), action)


def verify_functor(F: CStarFunctor, tol: Tolerance | None = None,
                   samples: int = 3, seed: int = 0) -> Report:
    """Check multiplicativity, *-preservation, norm-decrease and the
    isometry property on hom-spaces where the action is injective."""
    tol = resolve_tol(tol)
    rng = np.random.default_rng(seed)
    report = Report(context="functor")
    src = F.source
    n = src.n_objects

    mult_res = 0.0
    for x in range(n):
        for y in range(n):
            for z in range(n):
                gb, fb = src.hom_basis(x, y), src.hom_basis(y, z)
                if gb.shape[0] == 0 or fb.shape[0] == 0:
                    continue
                for i in range(fb.shape[0]):
                    f = src.hom_element(y, z, np.eye(fb.shape[0])[i])
                    Ff = F.apply(f)
                    for j in range(gb.shape[0]):
                        g = src.hom_element(x, y, np.eye(gb.shape[0])[j])
                        lhs = F.apply(compose(f, g, validate=False))
                        rhs = compose(Ff, F.apply(g), validate=False)
                        mult_res = max(mult_res, op_norm(lhs.mat - rhs.mat))
    report.add("multiplicativity", mult_res, tol.bound(1.0))

    star_res = 0.0
    for x in range(n):
        for y in range(n):
            basis = src.hom_basis(x, y)
            for i in range(basis.shape[0]):
                b = src.hom_element(x, y, np.eye(basis.shape[0])[i])
                lhs = F.apply(involute(b))
                rhs = involute(F.apply(b))
                star_res = max(star_res, op_norm(lhs.mat - rhs.mat))
    report.add("star-preservation", star_res, tol.bound(1.0))

    decrease = 0.0
    isometry = 0.0
    for x in range(n):
        for y in range(n):
            k = src.hom_dim(x, y)
            if k == 0:
                continue
            stack = F.image_stack(x, y)
            injective = (
                np.linalg.matrix_rank(stack.reshape(k, -1), tol=tol.atol) == k
                if stack.size
                else k == 0
            )
            for _ in range(samples):
                a = src.random_morphism(rng, x, y)
                na, nfa = a.norm(), F.apply(a).norm()
                decrease = max(decrease, (nfa - na) / max(na, 1.0))
                if injective:
                    isometry = max(isometry, abs(nfa - na) / max(na, 1.0))
    report.add("norm-decrease", decrease, tol.bound(1.0))
    report.add("isometry-on-injective", isometry, tol.bound(1.0))
    return report


# ---------------------------------------------------------------------------
# block machinery for finite object lists


def list_dim(cat: CStarCategory, lst) -> int:
    return int(sum(cat.dim(x) for x in lst))


def block_slices(cat: CStarCategory, lst) -> list[slice]:
    offs = np.concatenate([[0], np.cumsum([cat.dim(x) for x in lst])])
    return [slice(int(offs[i]), int(offs[i + 1])) for i in range(len(lst))]


def block_project(cat: CStarCategory, src_lst, dst_lst, mat) -> np.ndarray:
    """Blockwise orthogonal projection onto the hull hom-space."""
    arr = as_cmatrix(mat, list_dim(cat, dst_lst), list_dim(cat, src_lst))
    out = np.zeros_like(arr)
    rows = block_slices(cat, dst_lst)
    cols = block_slices(cat, src_lst)
    for j, y in enumerate(dst_lst):
        for i, x in enumerate(src_lst):
            out[rows[j], cols[i]] = cat.hom_project(x, y, arr[rows[j], cols[i]])
    return out


def block_residual(cat: CStarCategory, src_lst, dst_lst, mat) -> float:
    arr = as_cmatrix(mat, list_dim(cat, dst_lst), list_dim(cat, src_lst))
    return frobenius_norm(arr - block_project(cat, src_lst, dst_lst, arr))


def block_basis_stack(cat: CStarCategory, src_lst, dst_lst) -> np.ndarray:
    """Orthonormal basis of the block hom-space as embedded full matrices."""
    D_dst, D_src = list_dim(cat, dst_lst), list_dim(cat, src_lst)
    rows = block_slices(cat, dst_lst)
    cols = block_slices(cat, src_lst)
    mats = []
    for j, y in enumerate(dst_lst):
        for i, x in enumerate(src_lst):
            for b in cat.hom_basis(x, y):
                mat = np.zeros((D_dst, D_src), dtype=np.complex128)
                mat[rows[j], cols[i]] = b
                mats.append(mat)
    if not mats:
        return np.zeros((0, D_dst, D_src), dtype=np.complex128)
    return np.stack(mats)


def random_block(rng: np.random.Generator, cat: CStarCategory, src_lst, dst_lst) -> np.ndarray:
    """Random element of the block hom-space (blockwise basis combinations)."""
    arr = np.zeros((list_dim(cat, dst_lst), list_dim(cat, src_lst)), dtype=np.complex128)
    rows = block_slices(cat, dst_lst)
    cols = block_slices(cat, src_lst)
    for j, y in enumerate(dst_lst):
        for i, x in enumerate(src_lst):
            arr[rows[j], cols[i]] = cat.random_morphism(rng, x, y).mat
    return arr


class AdditiveHull:
    """Additive hull over a chosen finite family of object lists.

    Objects of the hull category are finite lists of base objects; morphisms
    are block matrices whose (j, i) block lies in hom(x_i, y_j).  At minimum
    the singleton lists and the full object list are materialized; all other
    lists are equivalent to sublists of these.
    """

    def __init__(self, base: CStarCategory, lists=None, tol: Tolerance | None = None):
        tol = resolve_tol(tol if tol is not None else base.tol)
        self.base = base
        if lists is None:
            lists = [(x,) for x in range(base.n_objects)]
            if base.n_objects > 1:
                lists.append(tuple(range(base.n_objects)))
        self.lists: tuple[tuple[int, ...], ...] = tuple(
            tuple(base.check_object(x) for x in lst) for lst in lists
        )
        if any(len(lst) == 0 for lst in self.lists):
            raise InvalidInput("hull object lists must be non-empty")
        self._index = {lst: i for i, lst in enumerate(self.lists)}

        objects = []
        for lst in self.lists:
            label = "(" + "+".join(base.label(x) for x in lst) + ")"
            objects.append((label, list_dim(base, lst)))
        homs = {}
        for i, src in enumerate(self.lists):
            for j, dst in enumerate(self.lists):
                homs[(i, j)] = block_basis_stack(base, src, dst)
        self.cat = CStarCategory(objects, homs, tol=tol, assume_orthonormal=True)

        if all((x,) in self._index for x in range(base.n_objects)):
            object_map = [self._index[(x,)] for x in range(base.n_objects)]
            action = {
                (x, y): base.hom_basis(x, y)
                for x in range(base.n_objects)
                for y in range(base.n_objects)
            }
            self.embedding = CStarFunctor(base, self.cat, object_map, action)
        else:
            self.embedding = None

    def list_index(self, lst) -> int:
        key = tuple(lst)
        if key not in self._index:
            raise InvalidInput(f"object list {key} was not materialized in this hull")
        return self._index[key]

    def morphism(self, src_lst, dst_lst, mat, validate: bool = True) -> Morphism:
        return self.cat.morphism(self.list_index(src_lst), self.list_index(dst_lst),
                                 mat, validate=validate)

    def __repr__(self) -> str:
        return f"AdditiveHull({self.base!r}, lists={self.lists})"


def additive_hull(cat: CStarCategory, lists=None, tol: Tolerance | None = None) -> AdditiveHull:
    """Materialize the additive hull of ``cat`` over the given object lists."""
    return AdditiveHull(cat, lists=lists, tol=tol)


def column_sup_norm(cat: CStarCategory, src_lst, block, probes: int = 48,
                    seed: int = 0, tol: Tolerance | None = None) -> float:
    """Norm of a block morphism as a supremum over admissible columns.

    Evaluates ``sup ||f b|| / ||b||`` where ``b`` runs over block columns
    with i-th entry in hom(w, x_i), for every base object ``w``; column norms
    are the Hermitian ones, i.e. operator norms of the stacked matrices.
    Random probes sample the supremum directly; the final ascent step solves
    the projected quadratic relaxation exactly per probe object (an
    eigenproblem, which is where projected-gradient ascent on the Rayleigh
    quotient converges).  The best value found is returned.  It never exceeds
    the operator norm of the assembled block matrix, and agrees with it at
    convergence.
    """
    tol = resolve_tol(tol if tol is not None else cat.tol)
    rng = np.random.default_rng(seed)
    src_lst = tuple(src_lst)
    arr = as_cmatrix(block, None, list_dim(cat, src_lst))
    if frobenius_norm(arr) == 0.0:
        return 0.0
    gram = arr.conj().T @ arr
    rows = block_slices(cat, src_lst)
    D = list_dim(cat, src_lst)

    best = 0.0
    per_object = max(1, probes // cat.n_objects)
    for w in range(cat.n_objects):
        dw = cat.dim(w)
        col_basis = []
        for i, x in enumerate(src_lst):
            for b in cat.hom_basis(w, x):
                col = np.zeros((D, dw), dtype=np.complex128)
                col[rows[i], :] = b
                col_basis.append(col)
        if not col_basis:
            continue
        stack = np.stack(col_basis)

        for _ in range(per_object):
            k = stack.shape[0]
            coords = rng.standard_normal(k) + 1j * rng.standard_normal(k)
            b_col = np.tensordot(coords, stack, axes=(0, 0))
            nb = op_norm(b_col)
            if nb <= tol.atol:
                continue
            best = max(best, op_norm(arr @ b_col) / nb)

        projected = np.einsum("ij,kjl->kil", gram, stack)
        form = np.tensordot(stack.conj(), projected, axes=([1, 2], [1, 2]))
        form = 0.5 * (form + form.conj().T)
        evals, evecs = np.linalg.eigh(form)
        b_col = np.tensordot(evecs[:, -1], stack, axes=(0, 0))
        nb = op_norm(b_col)
        if nb > tol.atol:
            best = max(best, op_norm(arr @ b_col) / nb)
    return best


class MatrixAlgebra:
    """The endomorphism algebra of the full non-repeating object list.

    Attributes
    ----------
    cat : CStarCategory
        One-object category whose single hom-space is the block algebra.
    full_list : tuple of int
        The non-repeating list of all base objects, in order.
    """

    def __init__(self, base: CStarCategory, tol: Tolerance | None = None):
        tol = resolve_tol(tol if tol is not None else base.tol)
        self.base = base
        self.full_list = tuple(range(base.n_objects))
        stack = block_basis_stack(base, self.full_list, self.full_list)
        label = "Mat(" + "+".join(base.label(x) for x in self.full_list) + ")"
        self.cat = CStarCategory(
            [(label, list_dim(base, self.full_list))],
            {(0, 0): stack},
            tol=tol,
            assume_orthonormal=True,
        )
        self._slices = block_slices(base, self.full_list)

    def position(self, x: int, y: int) -> tuple[slice, slice]:
        """(row, column) block of hom(x, y) inside the algebra."""
        return self._slices[y], self._slices[x]

    def embed(self, m: Morphism) -> Morphism:
        if m.cat is not self.base:
            raise InvalidInput("morphism does not live in the base category")
        D = self.cat.dim(0)
        mat = np.zeros((D, D), dtype=np.complex128)
        rows, cols = self.position(m.src, m.dst)
        mat[rows, cols] = m.mat
        return self.cat.morphism(0, 0, mat, validate=False)

    @property
    def dimension(self) -> int:
        return self.cat.hom_dim(0, 0)


def matrix_algebra(cat: CStarCategory, tol: Tolerance | None = None) -> MatrixAlgebra:
    """The one-object matrix algebra of a category with finitely many objects."""
    return MatrixAlgebra(cat, tol=tol)


class IdempotentCompletion:
    """Category of pairs (object, projection) with compressed hom-spaces.

    Each pair is realized concretely on the range of its projection through
    an isometry ``u`` with ``u u* = p``; hom((x,p),(y,q)) is the compression
    ``u_q* hom(x,y) u_p``.  The pair (x, id) is always present, and the
    embedding x -> (x, id) is isometric and full.
    """

    def __init__(self, base: CStarCategory, projections=None, tol: Tolerance | None = None):
        tol = resolve_tol(tol if tol is not None else base.tol)
        self.base = base
        self.pairs: list[tuple[int, np.ndarray, np.ndarray]] = []
        for x in range(base.n_objects):
            d = base.dim(x)
            eye = np.eye(d, dtype=np.complex128)
            self.pairs.append((x, eye, eye))
            supplied = projections.get(x, []) if projections else []
            for p in supplied:
                mat = p.mat if isinstance(p, Morphism) else as_cmatrix(p, d, d)
                scale = max(op_norm(mat), 1.0)
                if base.hom_residual(x, x, mat) > tol.bound(scale):
                    raise InvalidInput("supplied projection is not in hom(x,x)")
                if op_norm(mat - mat.conj().T) > tol.bound(scale) or \
                        op_norm(mat @ mat - mat) > tol.bound(scale):
                    raise InvalidInput("supplied morphism is not a projection")
                if op_norm(mat - eye) <= tol.bound(1.0):
                    continue
                evals, evecs = np.linalg.eigh(0.5 * (mat + mat.conj().T))
                isometry = evecs[:, evals > 0.5]
                self.pairs.append((x, mat, isometry))

        objects = []
        counters: dict[int, int] = {}
        for x, p, u in self.pairs:
            rank = u.shape[1]
            if p.shape[0] == rank and op_norm(p - np.eye(p.shape[0])) <= tol.bound(1.0):
                tag = "id"
            else:
                counters[x] = counters.get(x, 0) + 1
                tag = f"p{counters[x]}(rk{rank})"
            objects.append((f"({base.label(x)}|{tag})", rank))
        homs = {}
        for a, (x, p, u) in enumerate(self.pairs):
            for b, (y, q, v) in enumerate(self.pairs):
                compressed = [v.conj().T @ m @ u for m in base.hom_basis(x, y)]
                homs[(a, b)] = orthonormal_span(compressed, tol) if compressed else None
        self.cat = CStarCategory(objects, homs, tol=tol)

        object_map = [self._identity_pair(x) for x in range(base.n_objects)]
        action = {}
        for x in range(base.n_objects):
            for y in range(base.n_objects):
                action[(x, y)] = base.hom_basis(x, y)
        self.embedding = CStarFunctor(base, self.cat, object_map, action)

    def _identity_pair(self, x: int) -> int:
        for idx, (obj, p, _) in enumerate(self.pairs):
            if obj == x and op_norm(p - np.eye(p.shape[0])) <= self.base.tol.bound(1.0):
                return idx
        raise InvalidInput(f"no identity pair for object {x}")

    def pair_index(self, x: int, p_mat) -> int:
        for idx, (obj, p, _) in enumerate(self.pairs):
            if obj == x and op_norm(p - p_mat) <= self.base.tol.bound(1.0):
                return idx
        raise InvalidInput("no pair matches the given projection")


def idempotent_completion(cat: CStarCategory, projections=None,
                          tol: Tolerance | None = None) -> IdempotentCompletion:
    """Complete ``cat`` at a supplied finite set of projections."""
    return IdempotentCompletion(cat, projections=projections, tol=tol)
