"""Imprimitivity structure, conjugates, and Morita-equivalence witnesses.

A bimodule whose action is faithful and surjects onto the compact operators
between the modules in its image carries a forced left product
(the preimage of the single-rank operators); together with fullness on both
sides this is exactly the data of an imprimitivity bimodule, and tensoring
with it is invertible up to the explicit witness maps built here.  The
reconstruction map expressing any tensor functor through its restriction to
representables closes the loop.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput, NotInvertible
from .linalg import Tolerance, frac_power, op_norm, resolve_tol
from .category import (
    CStarCategory,
    MatrixAlgebra,
    Morphism,
    block_basis_stack,
    block_slices,
    list_dim,
    matrix_algebra,
)
from .modules import (
    HilbertModule,
    ModuleElement,
    ModuleOperator,
    bounded_operator_basis,
    inner_product,
    single_rank,
    unitary_operator_report,
)
from .bimodules import (
    Bimodule,
    BimoduleMap,
    TensorModule,
    tensor_bimodule_bimodule,
    tensor_cross_check,
    tensor_module_bimodule,
    yoneda_bimodule,
)
from .report import Report

__all__ = [
    "BiHilbertData",
    "check_full",
    "check_imprimitivity",
    "ConjugateBimodule",
    "conjugate_bimodule",
    "morita_target_map",
    "morita_source_map",
    "mat_equivalence",
    "eilenberg_watts_map",
    "WhiskeredTransform",
    "whisker_transform",
]


class BiHilbertData:
    """A bimodule together with its forced left products.

    The left product of elements e, f (at one target object, over fibers
    x and x') is the unique source morphism acting as the single-rank
    operator theta^{e,f}; it exists exactly when the action is faithful and
    onto the compacts, which ``check_imprimitivity`` certifies.
    """

    def __init__(self, bimodule: Bimodule, tol: Tolerance | None = None):
        self.bimodule = bimodule
        self.tol = resolve_tol(tol if tol is not None else bimodule.tol)
        self._solvers: dict[tuple[int, int], tuple[np.ndarray, int]] = {}

    def _solver(self, src: int, dst: int) -> tuple[np.ndarray, int]:
        """Pseudo-inverse of the flattened action on hom(src, dst)."""
        key = (src, dst)
        if key not in self._solvers:
            stack = self.bimodule.mor_stack(src, dst)
            k = stack.shape[0]
            flat = stack.reshape(k, -1).T if k else np.zeros((0, 0))
            rank = int(np.linalg.matrix_rank(flat, tol=self.tol.atol)) if k else 0
            if rank != k:
                raise NotInvertible(
                    f"action on hom({src},{dst}) is not injective; "
                    "left products are undefined"
                )
            self._solvers[key] = (np.linalg.pinv(flat), k)
        return self._solvers[key]

    def left_product(self, e: ModuleElement, f: ModuleElement) -> Morphism:
        """The source morphism with action theta^{e,f}, from f's fiber to e's."""
        E = self.bimodule
        x = self._fiber_of(e)
        xp = self._fiber_of(f)
        if e.at != f.at:
            raise InvalidInput("left products need elements at one target object")
        theta = e.col @ f.col.conj().T
        pinv, k = self._solver(xp, x)
        if k == 0:
            if op_norm(theta) > self.tol.bound(max(e.norm() * f.norm(), 1.0)) * 100:
                raise NotInvertible(
                    "nonzero single-rank operator over an empty hom-space"
                )
            return E.source.zero(xp, x)
        coords = pinv @ theta.ravel()
        candidate = E.source.hom_element(xp, x, coords)
        residual = op_norm(E.mor(candidate).block - theta)
        if residual > self.tol.bound(max(op_norm(theta), 1.0)) * 100:
            raise NotInvertible(
                f"single-rank operator is outside the action image ({residual:.3e})"
            )
        return candidate

    def _fiber_of(self, e: ModuleElement) -> int:
        for x in range(self.bimodule.source.n_objects):
            if e.module is self.bimodule.ob(x) or \
                    e.module.same_presentation(self.bimodule.ob(x)):
                return x
        raise InvalidInput("element does not live in a fiber of the bimodule")


def check_full(E: Bimodule, tol: Tolerance | None = None) -> tuple[bool, Report]:
    """Do the target-valued products span every hom-space of the target?"""
    tol = resolve_tol(tol if tol is not None else E.tol)
    dst = E.target
    report = Report(context="fullness")
    deficit = 0
    for y in range(dst.n_objects):
        for yp in range(dst.n_objects):
            target_dim = dst.hom_dim(y, yp)
            if target_dim == 0:
                continue
            coords = []
            for x in range(E.source.n_objects):
                fiber = E.ob(x)
                for e in fiber.eval_basis(yp):
                    for f in fiber.eval_basis(y):
                        prod = e.col.conj().T @ f.col
                        coords.append(dst.hom_coords(y, yp, prod))
            rank = 0
            if coords:
                rank = int(np.linalg.matrix_rank(np.stack(coords), tol=tol.atol))
            deficit = max(deficit, target_dim - rank)
    report.add("product-span-deficit", float(deficit), 0.5)
    return deficit == 0, report


def check_imprimitivity(E: Bimodule, tol: Tolerance | None = None,
                        samples: int = 4, seed: int = 0) -> tuple[BiHilbertData | None, Report]:
    """Certify imprimitivity: faithful, onto compacts, full; then build the
    forced left product and verify its identity and the norm equality.

    Returns the bi-Hilbert data when the action is faithful and onto the
    compact operators (left products are then defined), else ``None``.
    """
    tol = resolve_tol(tol if tol is not None else E.tol)
    rng = np.random.default_rng(seed)
    src = E.source
    report = Report(context="imprimitivity")

    faithful_deficit = 0
    onto_deficit = 0
    for x in range(src.n_objects):
        for xp in range(src.n_objects):
            stack = E.mor_stack(x, xp)
            k = stack.shape[0]
            rank = int(np.linalg.matrix_rank(stack.reshape(k, -1), tol=tol.atol)) if k else 0
            faithful_deficit = max(faithful_deficit, k - rank)
            compacts = bounded_operator_basis(E.ob(x), E.ob(xp), tol)
            onto_deficit = max(onto_deficit, compacts.shape[0] - rank)
    report.add("faithful-deficit", float(faithful_deficit), 0.5)
    report.add("onto-compacts-deficit", float(onto_deficit), 0.5)

    full_ok, full_report = check_full(E, tol)
    report.extend(full_report)

    if faithful_deficit > 0 or onto_deficit > 0:
        return None, report

    data = BiHilbertData(E, tol)
    ident_res = 0.0
    norm_res = 0.0
    for _ in range(samples):
        x = int(rng.integers(0, src.n_objects))
        xp = int(rng.integers(0, src.n_objects))
        y = int(rng.integers(0, E.target.n_objects))
        fiber_e, fiber_f = E.ob(x), E.ob(xp)
        e = fiber_e.random_element(rng, y)
        f = fiber_f.random_element(rng, y)
        if e.norm() <= 1e-12 or f.norm() <= 1e-12:
            continue
        prod = data.left_product(e, f)
        theta = single_rank(e, f)
        scale = max(e.norm() * f.norm(), 1.0)
        ident_res = max(ident_res, op_norm(E.mor(prod).block - theta.block) / scale)
        own = data.left_product(e, e)
        norm_res = max(
            norm_res,
            abs(own.norm() - op_norm(inner_product(e, e).mat)) / max(e.norm() ** 2, 1.0),
        )
    report.add("left-product-identity", ident_res, tol.bound(1.0) * 100)
    report.add("norm-equality", norm_res, tol.bound(1.0) * 100)
    return data, report


# ---------------------------------------------------------------------------
# the conjugate bimodule


class ConjugateBimodule:
    """Conjugate of an imprimitivity bimodule, with element translations.

    For each target object y the conjugate fiber is presented on the list of
    fiber objects carrying an evaluation basis at y, with projection the
    support of the left-product Gram matrix; the generator with index α is
    the conjugate of the α-th basis element.  ``element_of`` and
    ``element_to`` translate between presentation columns and the elements
    of the original bimodule they conjugate.
    """

    def __init__(self, data: BiHilbertData, tol: Tolerance | None = None):
        E = data.bimodule
        self.original = data
        self.tol = resolve_tol(tol if tol is not None else data.tol)
        src, dst = E.source, E.target

        self.gens: dict[int, list[ModuleElement]] = {}
        self.gen_objects: dict[int, tuple[int, ...]] = {}
        self.supp: dict[int, np.ndarray] = {}
        self.sqrt: dict[int, np.ndarray] = {}
        self.isqrt: dict[int, np.ndarray] = {}
        ob_map = []
        for y in range(dst.n_objects):
            gens = []
            objects = []
            for x in range(src.n_objects):
                for e in E.ob(x).eval_basis(y):
                    gens.append(e)
                    objects.append(x)
            self.gens[y] = gens
            self.gen_objects[y] = tuple(objects)
            if not gens:
                # the zero fiber, presented on a singleton base
                d0 = src.dim(0)
                zero = np.zeros((d0, d0), dtype=np.complex128)
                self.gen_objects[y] = (0,)
                self.supp[y] = zero
                self.sqrt[y] = zero
                self.isqrt[y] = zero
                ob_map.append(HilbertModule(src, (0,), zero, tol=self.tol, validate=False))
                continue
            slices = block_slices(src, objects)
            total = list_dim(src, objects)
            gram = np.zeros((total, total), dtype=np.complex128)
            for a, ea in enumerate(gens):
                for b, eb in enumerate(gens):
                    if b < a:
                        continue
                    prod = data.left_product(ea, eb)
                    gram[slices[a], slices[b]] = prod.mat
                    if b > a:
                        gram[slices[b], slices[a]] = prod.mat.conj().T
            gram = 0.5 * (gram + gram.conj().T)
            self.sqrt[y] = frac_power(gram, 0.5, self.tol)
            self.isqrt[y] = frac_power(gram, -0.5, self.tol)
            self.supp[y] = self.sqrt[y] @ self.isqrt[y]
            ob_map.append(HilbertModule(src, objects, self.supp[y], tol=self.tol))

        mor_blocks: dict[tuple[int, int], np.ndarray] = {}
        for y in range(dst.n_objects):
            for yp in range(dst.n_objects):
                k = dst.hom_dim(y, yp)
                dy = ob_map[yp].total_dim
                dx = ob_map[y].total_dim
                stack = np.zeros((k, dy, dx), dtype=np.complex128)
                for i in range(k):
                    b = dst.hom_element(y, yp, np.eye(k)[i])
                    lam = self._coefficient_pattern(E, y, yp, b)
                    raw = self.sqrt[yp] @ lam @ self.isqrt[y]
                    stack[i] = self.supp[yp] @ raw @ self.supp[y]
                mor_blocks[(y, yp)] = stack
        self.bimodule = Bimodule(dst, src, ob_map, mor_blocks, tol=self.tol, validate=False)

    def _coefficient_pattern(self, E: Bimodule, y: int, yp: int, b: Morphism) -> np.ndarray:
        """Blocks of conjugated coefficients of e_α · b* in the y' basis."""
        src = E.source
        gens_y, objs_y = self.gens[y], self.gen_objects[y]
        gens_yp, objs_yp = self.gens[yp], self.gen_objects[yp]
        rows = block_slices(src, objs_yp)
        cols = block_slices(src, objs_y)
        out = np.zeros((list_dim(src, objs_yp), list_dim(src, objs_y)), dtype=np.complex128)
        for a, (e, x) in enumerate(zip(gens_y, objs_y)):
            moved = e.col @ b.mat.conj().T  # e · b*, an element at yp
            for ap, (ep, xp) in enumerate(zip(gens_yp, objs_yp)):
                if xp != x:
                    continue
                coeff = np.vdot(ep.col, moved)
                if abs(coeff) < 1e-16:
                    continue
                out[rows[ap], cols[a]] = np.conj(coeff) * np.eye(src.dim(x))
        return out

    def element_of(self, f: ModuleElement) -> ModuleElement:
        """Presentation column of the conjugate of an original element."""
        E = self.original.bimodule
        x = self.original._fiber_of(f)
        y = f.at
        gens, objs = self.gens[y], self.gen_objects[y]
        cols = block_slices(E.source, objs)
        pattern = np.zeros((list_dim(E.source, objs), E.source.dim(x)), dtype=np.complex128)
        for a, (e, xa) in enumerate(zip(gens, objs)):
            if xa != x:
                continue
            coeff = np.vdot(e.col, f.col)
            if abs(coeff) < 1e-16:
                continue
            pattern[cols[a], :] = np.conj(coeff) * np.eye(E.source.dim(x))
        module = self.bimodule.ob(y)
        return ModuleElement(module, x, self.sqrt[y] @ pattern, validate=False)

    def element_to(self, c: ModuleElement) -> ModuleElement:
        """Original element conjugated by a presentation column."""
        E = self.original.bimodule
        y = None
        for cand in range(E.target.n_objects):
            if c.module is self.bimodule.ob(cand) or \
                    c.module.same_presentation(self.bimodule.ob(cand)):
                y = cand
                break
        if y is None:
            raise InvalidInput("element does not live in a conjugate fiber")
        x = c.at
        gens, objs = self.gens[y], self.gen_objects[y]
        slices = block_slices(E.source, objs)
        coeffs = self.isqrt[y] @ c.col
        out = None
        for a, (e, xa) in enumerate(zip(gens, objs)):
            a_mat = coeffs[slices[a], :]  # morphism x -> x_a
            if not np.any(a_mat):
                continue
            piece = E.mor(Morphism(E.source, xa, x, a_mat.conj().T, validate=False)).block @ e.col
            out = piece if out is None else out + piece
        if out is None:
            out = np.zeros((E.ob(x).total_dim, E.target.dim(y)), dtype=np.complex128)
        return ModuleElement(E.ob(x), y, out, validate=False)


def conjugate_bimodule(data: BiHilbertData, tol: Tolerance | None = None) -> ConjugateBimodule:
    """Build the conjugate of an imprimitivity bimodule."""
    return ConjugateBimodule(data, tol=tol)


# ---------------------------------------------------------------------------
# Morita witness maps


def morita_target_map(data: BiHilbertData,
                      conj: ConjugateBimodule | None = None) -> BimoduleMap:
    """The map conj(E) ⊗ E -> Yoneda(target) sending ẽ ⊗ f to ⟨e, f⟩.

    In the presentation the component at y is the row of adjoint evaluation
    operators of the conjugate generators, corrected by the extended
    inverse-root of the generator Gram and compressed; it is unitary exactly
    when the bimodule is full on the target side.
    """
    E = data.bimodule
    conj = conj if conj is not None else conjugate_bimodule(data)
    dom = tensor_bimodule_bimodule(conj.bimodule, E)
    cod = yoneda_bimodule(E.target)
    comps = []
    for y in range(E.target.n_objects):
        gens = conj.gens[y]
        objs = conj.gen_objects[y]
        if not gens:
            block = np.zeros((E.target.dim(y), dom.ob(y).total_dim), dtype=np.complex128)
        else:
            row = np.concatenate([e.col.conj().T for e in gens], axis=1)
            ext_isqrt = E.hull_extend(objs, objs, conj.isqrt[y])
            block = row @ ext_isqrt @ dom.ob(y).proj
        comps.append(ModuleOperator(dom.ob(y), cod.ob(y), block, validate=False))
    return BimoduleMap(dom, cod, comps)


def morita_source_map(data: BiHilbertData,
                      conj: ConjugateBimodule | None = None) -> BimoduleMap:
    """The map E ⊗ conj(E) -> Yoneda(source) sending e ⊗ f̃ to the left product.

    Components are solved from the simple-tensor correspondence (least
    squares over the compressed block space); the solve residual is part of
    the naturality/unitarity verification downstream.  Unitary exactly when
    the bimodule is full on the source side.
    """
    E = data.bimodule
    src, dst = E.source, E.target
    conj = conj if conj is not None else conjugate_bimodule(data)
    dom = tensor_bimodule_bimodule(E, conj.bimodule)
    cod = yoneda_bimodule(src)
    comps = []
    for x in range(src.n_objects):
        tensor: TensorModule = dom.ob_tensors[x]
        d_s = dom.ob(x).total_dim
        second_moment = np.zeros((d_s, d_s), dtype=np.complex128)
        cross = np.zeros((src.dim(x), d_s), dtype=np.complex128)
        seen = False
        for y in range(dst.n_objects):
            conj_fiber = conj.bimodule.ob(y)
            gens, objs = conj.gens[y], conj.gen_objects[y]
            slices = block_slices(src, objs)
            for m in E.ob(x).eval_basis(y):
                for beta, (e_beta, x_beta) in enumerate(zip(gens, objs)):
                    gcol = conj.sqrt[y][:, slices[beta]]
                    gen_elem = ModuleElement(conj_fiber, x_beta, gcol, validate=False)
                    v = tensor.simple(m, gen_elem).col
                    t = data.left_product(m, e_beta).mat
                    second_moment += v @ v.conj().T
                    cross += t @ v.conj().T
                    seen = True
        stack = block_basis_stack(src, dom.ob(x).base, (x,))
        proj = dom.ob(x).proj
        if stack.shape[0] == 0 or not seen:
            block = np.zeros((src.dim(x), d_s), dtype=np.complex128)
        else:
            # normal equations of the least-squares system over the
            # compressed block space: gram w = rhs
            compressed = np.einsum("kij,jl->kil", stack, proj)
            moved = np.einsum("kij,jl->kil", compressed, second_moment)
            gram = np.tensordot(compressed.conj(), moved, axes=([1, 2], [1, 2]))
            rhs = np.tensordot(compressed.conj(), cross, axes=([1, 2], [0, 1]))
            coeffs, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
            block = np.tensordot(coeffs, compressed, axes=(0, 0))
        comps.append(ModuleOperator(dom.ob(x), cod.ob(x), block, validate=False))
    return BimoduleMap(dom, cod, comps)


def mat_equivalence(cat: CStarCategory,
                    tol: Tolerance | None = None) -> tuple[MatrixAlgebra, BiHilbertData]:
    """The equivalence bimodule between the matrix algebra and its category.

    The one-object algebra acts on the free module over the full object
    list; the resulting bimodule is faithful, onto compacts and full on both
    sides, so both witness maps are unitary.
    """
    tol = resolve_tol(tol if tol is not None else cat.tol)
    alg = matrix_algebra(cat, tol)
    free = HilbertModule(
        cat, alg.full_list,
        np.eye(list_dim(cat, alg.full_list), dtype=np.complex128),
        tol=tol, validate=False,
    )
    mor_blocks = {(0, 0): alg.cat.hom_basis(0, 0).copy()}
    E = Bimodule(alg.cat, cat, [free], mor_blocks, tol=tol, validate=False)
    data, report = check_imprimitivity(E, tol)
    if data is None or not report.passed:
        raise InvalidInput(f"matrix algebra bimodule failed its own certificate:\n{report}")
    return alg, data


# ---------------------------------------------------------------------------
# the reconstruction map


def eilenberg_watts_map(M: HilbertModule, E: Bimodule,
                        tol: Tolerance | None = None) -> tuple[ModuleOperator, Report]:
    """Comparison map from the tensor product onto the functor value.

    With functors represented as tensoring against a bimodule, the functor
    value on M *is* the projection-presentation tensor product, and the
    comparison map materializes as its identity operator.  The content is in
    the verification: images of simple tensors (built through the action,
    i.e. through the evaluation operators of elements of M) must preserve
    the formula-defined inner products and exhaust every evaluation space.
    """
    tol = resolve_tol(tol if tol is not None else M.tol)
    report = Report(context="eilenberg-watts")
    cross = tensor_cross_check(M, E, tol)
    report.extend(cross, prefix="reconstruction:")
    tensor = tensor_module_bimodule(M, E)
    op = tensor.module.identity()
    report.extend(unitary_operator_report(op, tol), prefix="comparison:")
    return op, report


class WhiskeredTransform:
    """Extension of a transformation between tensor functors from
    representables to every f.g.p. module."""

    def __init__(self, tau: BimoduleMap, tol: Tolerance | None = None):
        self.tau = tau
        self.tol = resolve_tol(tol if tol is not None else tau.dom.tol)
        natural = tau.verify_natural(self.tol)
        if not natural.passed:
            raise InvalidInput(f"transformation is not natural on representables:\n{natural}")

    def component(self, M: HilbertModule) -> ModuleOperator:
        """Direct extension: block diagonal of components, compressed."""
        tau = self.tau
        dom_t = tensor_module_bimodule(M, tau.dom)
        cod_t = tensor_module_bimodule(M, tau.cod)
        dims_in = [tau.dom.ob(b).total_dim for b in M.base]
        dims_out = [tau.cod.ob(b).total_dim for b in M.base]
        block = np.zeros((sum(dims_out), sum(dims_in)), dtype=np.complex128)
        ro = np.concatenate([[0], np.cumsum(dims_out)]).astype(int)
        co = np.concatenate([[0], np.cumsum(dims_in)]).astype(int)
        for i, b in enumerate(M.base):
            block[ro[i]:ro[i + 1], co[i]:co[i + 1]] = tau.components[b].block
        block = cod_t.module.proj @ block @ dom_t.module.proj
        return ModuleOperator(dom_t.module, cod_t.module, block, validate=False)

    def component_via_cover(self, M: HilbertModule, seed: int = 0) -> ModuleOperator:
        """Second route: pull the free-module extension through a random
        co-isometric cover of M; must agree with the direct route."""
        from .category import random_block

        rng = np.random.default_rng(seed)
        base2 = M.base + M.base
        free2 = HilbertModule(
            M.cat, base2, np.eye(list_dim(M.cat, base2), dtype=np.complex128),
            tol=M.tol, validate=False,
        )
        raw = M.proj @ random_block(rng, M.cat, base2, M.base)
        gram = raw @ raw.conj().T
        phi = frac_power(gram, -0.5, Tolerance(atol=1e-8, rtol=M.tol.rtol)) @ raw
        if op_norm(phi @ phi.conj().T - M.proj) > 1e-6:
            raise NotInvertible("random cover is not co-isometric; retry with another seed")
        cover = ModuleOperator(free2, M, phi, validate=False)

        tau_free = self.component(free2)
        dom_t = tensor_module_bimodule(M, self.tau.dom)
        cod_t = tensor_module_bimodule(M, self.tau.cod)
        lift_dom = self.tau.dom.hull_extend(base2, M.base, cover.block)
        lift_cod = self.tau.cod.hull_extend(base2, M.base, cover.block)
        block = cod_t.module.proj @ lift_cod @ tau_free.block @ lift_dom.conj().T @ dom_t.module.proj
        return ModuleOperator(dom_t.module, cod_t.module, block, validate=False)


def whisker_transform(tau: BimoduleMap, tol: Tolerance | None = None) -> WhiskeredTransform:
    """Extend a natural transformation given on representables to all modules."""
    return WhiskeredTransform(tau, tol=tol)
