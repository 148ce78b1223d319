"""Bimodules: functors from a category into the Hilbert modules of another.

A bimodule stores one f.g.p. module per source object and, for every source
hom-basis element, an operator block between the corresponding modules; the
action extends complex-linearly.  Tensor products are computed by the
projection method: extend the right factor over block matrices, apply it to
the presentation projection of the left factor, and take the image.  The
quotient construction (span of simple tensors modulo the null space of the
semi-inner product) is kept alongside as an independent oracle.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput
from .linalg import Tolerance, as_cmatrix, op_norm, resolve_tol
from .category import (
    CStarCategory,
    Morphism,
    block_residual,
    block_slices,
    list_dim,
)
from .modules import (
    HilbertModule,
    ModuleElement,
    ModuleOperator,
    direct_sum,
    inner_product,
    representable,
    unitary_operator_report,
)
from .report import Report

__all__ = [
    "Bimodule",
    "BimoduleMap",
    "verify_bimodule",
    "yoneda_bimodule",
    "check_nondegenerate",
    "TensorModule",
    "tensor_module_bimodule",
    "QuotientTensor",
    "tensor_quotient_oracle",
    "tensor_cross_check",
    "tensor_bimodule_bimodule",
    "tensor_map_right",
    "tensor_map_left",
    "associator",
    "left_unitor",
    "right_unitor",
]


class Bimodule:
    """C*-functor from ``source`` into the Hilbert modules over ``target``.

    Parameters
    ----------
    ob_map : list of HilbertModule over ``target``, one per source object
    mor_blocks : mapping (x, y) -> stack of operator blocks
        Block k is the image of the k-th basis element of hom(x, y), as a
        matrix from ob_map[x]'s ambient space to ob_map[y]'s.
    """

    def __init__(self, source: CStarCategory, target: CStarCategory,
                 ob_map, mor_blocks, tol: Tolerance | None = None,
                 validate: bool = True):
        self.source = source
        self.target = target
        self.tol = resolve_tol(tol)
        self.ob_map: list[HilbertModule] = list(ob_map)
        if len(self.ob_map) != source.n_objects:
            raise InvalidInput("need one module per source object")
        for module in self.ob_map:
            if module.cat is not target:
                raise InvalidInput("object images must be modules over the target")
        self._blocks: dict[tuple[int, int], np.ndarray] = {}
        for x in range(source.n_objects):
            for y in range(source.n_objects):
                k = source.hom_dim(x, y)
                dx = self.ob_map[x].total_dim
                dy = self.ob_map[y].total_dim
                stack = mor_blocks.get((x, y)) if mor_blocks is not None else None
                if stack is None:
                    if k != 0:
                        raise InvalidInput(f"missing action blocks for hom({x},{y})")
                    stack = np.zeros((0, dy, dx), dtype=np.complex128)
                stack = np.asarray(stack, dtype=np.complex128)
                if stack.shape != (k, dy, dx):
                    raise InvalidInput(
                        f"action blocks for hom({x},{y}) have shape {stack.shape}, "
                        f"expected {(k, dy, dx)}"
                    )
                self._blocks[(x, y)] = stack
        if validate:
            res = 0.0
            for (x, y), stack in self._blocks.items():
                for blk in stack:
                    res = max(res, block_residual(
                        target, self.ob_map[x].base, self.ob_map[y].base, blk
                    ))
            if res > self.tol.bound(1.0) * 10:
                raise InvalidInput(f"action blocks leave their hom-spaces ({res:.3e})")

    def ob(self, x: int) -> HilbertModule:
        return self.ob_map[self.source.check_object(x)]

    def mor_stack(self, x: int, y: int) -> np.ndarray:
        return self._blocks[(x, y)]

    def mor(self, a: Morphism) -> ModuleOperator:
        """Linear extension of the basis action to an arbitrary morphism."""
        if a.cat is not self.source:
            raise InvalidInput("morphism does not live in the bimodule source")
        coords = self.source.hom_coords(a.src, a.dst, a.mat)
        stack = self._blocks[(a.src, a.dst)]
        dom, cod = self.ob_map[a.src], self.ob_map[a.dst]
        if stack.shape[0] == 0:
            block = np.zeros((cod.total_dim, dom.total_dim), dtype=np.complex128)
        else:
            block = np.tensordot(coords, stack, axes=(0, 0))
        return ModuleOperator(dom, cod, block, validate=False)

    def hull_extend(self, src_list, dst_list, block) -> np.ndarray:
        """Apply the action blockwise to a block matrix over object lists.

        ``block`` is a hull morphism of the source from ``src_list`` to
        ``dst_list``; the result maps the direct sum of the corresponding
        image modules accordingly.
        """
        src_list, dst_list = tuple(src_list), tuple(dst_list)
        arr = as_cmatrix(block, list_dim(self.source, dst_list), list_dim(self.source, src_list))
        rows = block_slices(self.source, dst_list)
        cols = block_slices(self.source, src_list)
        dims_out = [self.ob_map[y].total_dim for y in dst_list]
        dims_in = [self.ob_map[x].total_dim for x in src_list]
        out = np.zeros((sum(dims_out), sum(dims_in)), dtype=np.complex128)
        row_off = np.concatenate([[0], np.cumsum(dims_out)]).astype(int)
        col_off = np.concatenate([[0], np.cumsum(dims_in)]).astype(int)
        for j, y in enumerate(dst_list):
            for i, x in enumerate(src_list):
                piece = arr[rows[j], cols[i]]
                if not np.any(piece):
                    continue
                coords = self.source.hom_coords(x, y, piece)
                stack = self._blocks[(x, y)]
                if stack.shape[0] == 0:
                    continue
                out[row_off[j]:row_off[j + 1], col_off[i]:col_off[i + 1]] = \
                    np.tensordot(coords, stack, axes=(0, 0))
        return out

    def __repr__(self) -> str:
        return f"Bimodule({self.source!r} -> Hilb[{self.target!r}])"


def verify_bimodule(E: Bimodule, tol: Tolerance | None = None,
                    samples: int = 3, seed: int = 0) -> Report:
    """Functoriality, *-preservation and norm-decrease of a bimodule action."""
    tol = resolve_tol(tol if tol is not None else E.tol)
    rng = np.random.default_rng(seed)
    src = E.source
    report = Report(context="bimodule")

    compress_res = 0.0
    for x in range(src.n_objects):
        for y in range(src.n_objects):
            stack = E.mor_stack(x, y)
            P, Q = E.ob(x).proj, E.ob(y).proj
            for blk in stack:
                compress_res = max(compress_res, op_norm(Q @ blk @ P - blk))
    report.add("block-compression", compress_res, tol.bound(1.0))

    mult_res = 0.0
    for x in range(src.n_objects):
        for y in range(src.n_objects):
            for z in range(src.n_objects):
                kg, kf = src.hom_dim(x, y), src.hom_dim(y, z)
                if kg == 0 or kf == 0:
                    continue
                for i in range(kf):
                    f = src.hom_element(y, z, np.eye(kf)[i])
                    Ff = E.mor(f)
                    for j in range(kg):
                        g = src.hom_element(x, y, np.eye(kg)[j])
                        lhs = E.mor(Morphism(src, x, z, f.mat @ g.mat, validate=False))
                        rhs = Ff @ E.mor(g)
                        mult_res = max(mult_res, op_norm(lhs.block - rhs.block))
    report.add("functoriality", mult_res, tol.bound(1.0))

    star_res = 0.0
    for x in range(src.n_objects):
        for y in range(src.n_objects):
            k = src.hom_dim(x, y)
            for i in range(k):
                a = src.hom_element(x, y, np.eye(k)[i])
                lhs = E.mor(a.adjoint())
                rhs = E.mor(a).adjoint()
                star_res = max(star_res, op_norm(lhs.block - rhs.block))
    report.add("star-preservation", star_res, tol.bound(1.0))

    decrease = 0.0
    for x in range(src.n_objects):
        for y in range(src.n_objects):
            if src.hom_dim(x, y) == 0:
                continue
            for _ in range(samples):
                a = src.random_morphism(rng, x, y)
                na = a.norm()
                decrease = max(decrease, (E.mor(a).norm() - na) / max(na, 1.0))
    report.add("norm-decrease", decrease, tol.bound(1.0))
    return report


def yoneda_bimodule(cat: CStarCategory, tol: Tolerance | None = None) -> Bimodule:
    """The self-bimodule sending x to its representable module.

    The action is post-composition, an isometry whose image is exactly the
    compact operators between representables; its products are full.
    """
    ob_map = [representable(cat, x) for x in range(cat.n_objects)]
    mor_blocks = {
        (x, y): cat.hom_basis(x, y).copy()
        for x in range(cat.n_objects)
        for y in range(cat.n_objects)
    }
    return Bimodule(cat, cat, ob_map, mor_blocks, tol=tol, validate=False)


def check_nondegenerate(E: Bimodule, tol: Tolerance | None = None) -> tuple[bool, Report]:
    """Unit criterion and span-rank criterion for non-degeneracy; both are
    computed and must agree (the report carries the comparison)."""
    tol = resolve_tol(tol if tol is not None else E.tol)
    src, dst = E.source, E.target
    report = Report(context="nondegenerate")
    unit_res = 0.0
    unit_ok = True
    for x in range(src.n_objects):
        module = E.ob(x)
        image = E.mor(src.unit(x))
        res = op_norm(image.block - module.proj)
        unit_res = max(unit_res, res)
        unit_ok = unit_ok and res <= tol.bound(1.0) * 10
    report.add("unit-acts-as-identity", unit_res, tol.bound(1.0) * 10)

    rank_ok = True
    deficit = 0
    for x in range(src.n_objects):
        module = E.ob(x)
        for z in range(dst.n_objects):
            target_dim = module.eval_dim(z)
            images = []
            for y in range(src.n_objects):
                k = src.hom_dim(y, x)
                source_mod = E.ob(y)
                for i in range(k):
                    a = src.hom_element(y, x, np.eye(k)[i])
                    T = E.mor(a)
                    for e in source_mod.eval_basis(z):
                        images.append((T.block @ e.col).ravel())
            rank = 0
            if images:
                rank = np.linalg.matrix_rank(np.stack(images), tol=tol.atol)
            deficit = max(deficit, target_dim - int(rank))
    rank_ok = deficit == 0
    report.add("span-rank-deficit", float(deficit), 0.5)
    report.add("criteria-agree", float(unit_ok != rank_ok), 0.5)
    return unit_ok, report


# ---------------------------------------------------------------------------
# tensor products


class TensorModule:
    """Module tensor product in projection presentation, with provenance.

    ``module`` is the image of the extended projection on the direct sum of
    the fiber modules; ``simple`` realizes a simple tensor m ⊗ e as a column.
    """

    def __init__(self, M: HilbertModule, E: Bimodule):
        if M.cat is not E.source:
            raise InvalidInput("module and bimodule live over different categories")
        self.M = M
        self.E = E
        fibers = [E.ob(x) for x in M.base]
        self.sum_module, self.inclusions = direct_sum(fibers)
        proj = E.hull_extend(M.base, M.base, M.proj)
        proj = 0.5 * (proj + proj.conj().T)
        self.module = HilbertModule(E.target, self.sum_module.base, proj,
                                    tol=M.tol, validate=True)
        self._offsets = np.concatenate(
            [[0], np.cumsum([f.total_dim for f in fibers])]
        ).astype(int)

    def simple(self, m: ModuleElement, e: ModuleElement) -> ModuleElement:
        """Presentation column of the simple tensor m ⊗ e.

        ``m`` lives in the left module at some source object x; ``e`` in the
        bimodule fiber at x, evaluated anywhere.
        """
        if m.module is not self.M and not m.module.same_presentation(self.M):
            raise InvalidInput("left element does not live in the tensor's module")
        x = m.at
        fiber = self.E.ob(x)
        if e.module is not fiber and not e.module.same_presentation(fiber):
            raise InvalidInput("right element does not live in the fiber at the left's object")
        out = np.zeros((self.module.total_dim, self.E.target.dim(e.at)), dtype=np.complex128)
        rows = block_slices(self.M.cat, self.M.base)
        for i, xi in enumerate(self.M.base):
            piece = m.col[rows[i], :]
            if not np.any(piece):
                continue
            a = Morphism(self.M.cat, x, xi, piece, validate=False)
            out[self._offsets[i]:self._offsets[i + 1], :] = self.E.mor(a).block @ e.col
        return ModuleElement(self.module, e.at, self.module.proj @ out, validate=False)


def tensor_module_bimodule(M: HilbertModule, E: Bimodule) -> TensorModule:
    """Tensor a module with a bimodule by the projection method."""
    return TensorModule(M, E)


class QuotientTensor:
    """Quotient-presentation tensor product, used as an independent oracle.

    For each evaluation object it records the generating simple tensors, the
    assembled block Gram matrix of their formula-defined inner products, and
    the dimension of the quotient by the Gram radical.  It never touches the
    projection construction.
    """

    def __init__(self, M: HilbertModule, E: Bimodule, tol: Tolerance | None = None):
        if M.cat is not E.source:
            raise InvalidInput("module and bimodule live over different categories")
        self.M = M
        self.E = E
        tol = resolve_tol(tol if tol is not None else M.tol)
        self.tol = tol
        src, dst = E.source, E.target
        self.generators: dict[int, list[tuple[ModuleElement, ModuleElement]]] = {}
        self.gram: dict[int, np.ndarray] = {}
        self.dims: dict[int, int] = {}
        for z in range(dst.n_objects):
            gens: list[tuple[ModuleElement, ModuleElement]] = []
            for x in range(src.n_objects):
                fiber = E.ob(x)
                for m in M.eval_basis(x):
                    for e in fiber.eval_basis(z):
                        gens.append((m, e))
            dz = dst.dim(z)
            n = len(gens)
            gram = np.zeros((n * dz, n * dz), dtype=np.complex128)
            for a, (ma, ea) in enumerate(gens):
                for b, (mb, eb) in enumerate(gens):
                    if b < a:
                        continue
                    inner_m = inner_product(ma, mb)
                    acted = E.mor(inner_m).block @ eb.col
                    entry = ea.col.conj().T @ acted
                    gram[a * dz:(a + 1) * dz, b * dz:(b + 1) * dz] = entry
                    if b > a:
                        gram[b * dz:(b + 1) * dz, a * dz:(a + 1) * dz] = entry.conj().T
            self.generators[z] = gens
            self.gram[z] = gram
            if n == 0:
                self.dims[z] = 0
                continue
            scalar = np.zeros((n, n), dtype=np.complex128)
            for a in range(n):
                for b in range(n):
                    scalar[a, b] = np.trace(gram[a * dz:(a + 1) * dz, b * dz:(b + 1) * dz])
            self.dims[z] = int(np.linalg.matrix_rank(scalar, tol=tol.atol, hermitian=True))


def tensor_quotient_oracle(M: HilbertModule, E: Bimodule,
                           tol: Tolerance | None = None) -> QuotientTensor:
    """Build the quotient-presentation tensor product (oracle route)."""
    return QuotientTensor(M, E, tol=tol)


def tensor_cross_check(M: HilbertModule, E: Bimodule,
                       tol: Tolerance | None = None) -> Report:
    """Compare the projection construction against the quotient oracle.

    Checks, per evaluation object: equal dimensions, agreement of the Gram
    spectra of the generating simple tensors, and entrywise agreement of the
    oracle Gram with the inner products of the realized columns.
    """
    tol = resolve_tol(tol if tol is not None else M.tol)
    tensor = tensor_module_bimodule(M, E)
    oracle = tensor_quotient_oracle(M, E, tol)
    report = Report(context="tensor-cross-check")
    dim_gap = 0
    spec_res = 0.0
    entry_res = 0.0
    for z in range(E.target.n_objects):
        proj_dim = tensor.module.eval_dim(z)
        dim_gap = max(dim_gap, abs(proj_dim - oracle.dims[z]))
        gens = oracle.generators[z]
        if not gens:
            continue
        dz = E.target.dim(z)
        n = len(gens)
        images = [tensor.simple(m, e) for (m, e) in gens]
        gram2 = np.zeros_like(oracle.gram[z])
        for a in range(n):
            for b in range(n):
                gram2[a * dz:(a + 1) * dz, b * dz:(b + 1) * dz] = \
                    images[a].col.conj().T @ images[b].col
        scale = max(op_norm(oracle.gram[z]), 1.0)
        entry_res = max(entry_res, op_norm(gram2 - oracle.gram[z]) / scale)
        ev1 = np.linalg.eigvalsh(0.5 * (oracle.gram[z] + oracle.gram[z].conj().T))
        ev2 = np.linalg.eigvalsh(0.5 * (gram2 + gram2.conj().T))
        spec_res = max(spec_res, float(np.max(np.abs(ev1 - ev2))) / scale)
    report.add("evaluation-dimension-gap", float(dim_gap), 0.5)
    report.add("gram-entry-agreement", entry_res, tol.bound(1.0) * 10)
    report.add("gram-spectrum-agreement", spec_res, tol.bound(1.0) * 10)
    return report


class BimoduleTensor(Bimodule):
    """Composite bimodule E ⊗ F with the fiber tensors kept for reuse."""

    def __init__(self, E: Bimodule, F: Bimodule):
        if E.target is not F.source:
            raise InvalidInput("tensor factors do not compose")
        self.left = E
        self.right = F
        self.ob_tensors = [
            tensor_module_bimodule(E.ob(x), F) for x in range(E.source.n_objects)
        ]
        ob_map = [t.module for t in self.ob_tensors]
        mor_blocks = {}
        for x in range(E.source.n_objects):
            for y in range(E.source.n_objects):
                k = E.source.hom_dim(x, y)
                dx = ob_map[x].total_dim
                dy = ob_map[y].total_dim
                stack = np.zeros((k, dy, dx), dtype=np.complex128)
                for i in range(k):
                    a = E.source.hom_element(x, y, np.eye(k)[i])
                    T = E.mor(a)
                    extended = F.hull_extend(E.ob(x).base, E.ob(y).base, T.block)
                    stack[i] = ob_map[y].proj @ extended @ ob_map[x].proj
                mor_blocks[(x, y)] = stack
        super().__init__(E.source, F.target, ob_map, mor_blocks,
                         tol=E.tol, validate=False)


def tensor_bimodule_bimodule(E: Bimodule, F: Bimodule) -> BimoduleTensor:
    """Tensor product of composable bimodules (projection method throughout)."""
    return BimoduleTensor(E, F)


class BimoduleMap:
    """Natural family of module operators between two parallel bimodules."""

    def __init__(self, dom: Bimodule, cod: Bimodule, components):
        if dom.source is not cod.source or dom.target is not cod.target:
            raise InvalidInput("bimodule maps need parallel bimodules")
        self.dom = dom
        self.cod = cod
        self.components: list[ModuleOperator] = list(components)
        if len(self.components) != dom.source.n_objects:
            raise InvalidInput("need one component per source object")

    def component(self, x: int) -> ModuleOperator:
        return self.components[x]

    def verify_natural(self, tol: Tolerance | None = None) -> Report:
        tol = resolve_tol(tol if tol is not None else self.dom.tol)
        report = Report(context="bimodule-map-naturality")
        res = 0.0
        src = self.dom.source
        for x in range(src.n_objects):
            for y in range(src.n_objects):
                k = src.hom_dim(x, y)
                for i in range(k):
                    a = src.hom_element(x, y, np.eye(k)[i])
                    lhs = self.cod.mor(a).block @ self.components[x].block
                    rhs = self.components[y].block @ self.dom.mor(a).block
                    res = max(res, op_norm(lhs - rhs))
        report.add("naturality", res, tol.bound(1.0) * 10)
        return report

    def unitary_report(self, tol: Tolerance | None = None) -> Report:
        tol = resolve_tol(tol if tol is not None else self.dom.tol)
        report = Report(context="bimodule-map-unitarity")
        for x, comp in enumerate(self.components):
            part = unitary_operator_report(comp, tol)
            report.extend(part, prefix=f"x{x}:")
        return report

    def compose(self, other: "BimoduleMap") -> "BimoduleMap":
        if other.cod is not self.dom and not all(
            other.cod.ob(x).same_presentation(self.dom.ob(x))
            for x in range(self.dom.source.n_objects)
        ):
            raise InvalidInput("bimodule maps do not compose")
        comps = []
        for x in range(self.dom.source.n_objects):
            a, b = self.components[x], other.components[x]
            comps.append(ModuleOperator(b.dom, a.cod, a.block @ b.block, validate=False))
        return BimoduleMap(other.dom, self.cod, comps)

    def norm_distance(self, other: "BimoduleMap") -> float:
        return max(
            op_norm(a.block - b.block)
            for a, b in zip(self.components, other.components)
        )


def _presentation_bridge(dom_mod: HilbertModule, cod_mod: HilbertModule) -> ModuleOperator:
    if dom_mod.base != cod_mod.base:
        raise InvalidInput("presentations do not share a base list")
    return ModuleOperator(dom_mod, cod_mod, cod_mod.proj @ dom_mod.proj, validate=False)


def tensor_map_right(tau: BimoduleMap, F: Bimodule) -> BimoduleMap:
    """Whisker a map of A-B bimodules with a B-C bimodule on the right."""
    dom = tensor_bimodule_bimodule(tau.dom, F)
    cod = tensor_bimodule_bimodule(tau.cod, F)
    comps = []
    for x in range(tau.dom.source.n_objects):
        block = F.hull_extend(tau.dom.ob(x).base, tau.cod.ob(x).base,
                              tau.components[x].block)
        block = cod.ob(x).proj @ block @ dom.ob(x).proj
        comps.append(ModuleOperator(dom.ob(x), cod.ob(x), block, validate=False))
    return BimoduleMap(dom, cod, comps)


def tensor_map_left(G: Bimodule, tau: BimoduleMap) -> BimoduleMap:
    """Whisker a map of B-C bimodules with an A-B bimodule on the left."""
    dom = tensor_bimodule_bimodule(G, tau.dom)
    cod = tensor_bimodule_bimodule(G, tau.cod)
    comps = []
    for x in range(G.source.n_objects):
        base = G.ob(x).base
        dims_in = [tau.dom.ob(b).total_dim for b in base]
        dims_out = [tau.cod.ob(b).total_dim for b in base]
        block = np.zeros((sum(dims_out), sum(dims_in)), dtype=np.complex128)
        ro = np.concatenate([[0], np.cumsum(dims_out)]).astype(int)
        co = np.concatenate([[0], np.cumsum(dims_in)]).astype(int)
        for i, b in enumerate(base):
            block[ro[i]:ro[i + 1], co[i]:co[i + 1]] = tau.components[b].block
        block = cod.ob(x).proj @ block @ dom.ob(x).proj
        comps.append(ModuleOperator(dom.ob(x), cod.ob(x), block, validate=False))
    return BimoduleMap(dom, cod, comps)


def associator(E: Bimodule, F: Bimodule, G: Bimodule) -> BimoduleMap:
    """Canonical map (E⊗F)⊗G -> E⊗(F⊗G).

    Both presentations share one ambient free module; the map is the
    composition of the two projections, unitary exactly when the two
    extension routes agree.
    """
    dom = tensor_bimodule_bimodule(tensor_bimodule_bimodule(E, F), G)
    cod = tensor_bimodule_bimodule(E, tensor_bimodule_bimodule(F, G))
    comps = [
        _presentation_bridge(dom.ob(x), cod.ob(x))
        for x in range(E.source.n_objects)
    ]
    return BimoduleMap(dom, cod, comps)


def left_unitor(E: Bimodule) -> BimoduleMap:
    """Canonical map (Yoneda ⊗ E) -> E; unitary when E is non-degenerate."""
    dom = tensor_bimodule_bimodule(yoneda_bimodule(E.source), E)
    comps = [
        _presentation_bridge(dom.ob(x), E.ob(x))
        for x in range(E.source.n_objects)
    ]
    return BimoduleMap(dom, E, comps)


def right_unitor(E: Bimodule) -> BimoduleMap:
    """Canonical map (E ⊗ Yoneda) -> E."""
    dom = tensor_bimodule_bimodule(E, yoneda_bimodule(E.target))
    comps = [
        _presentation_bridge(dom.ob(x), E.ob(x))
        for x in range(E.source.n_objects)
    ]
    return BimoduleMap(dom, E, comps)
