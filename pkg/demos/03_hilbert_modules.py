"""Hilbert modules in finitely-generated-projective presentation.

Every module is the image of a projection over a finite direct sum of
representables: elements are projection-invariant columns, inner products
are matrix products, and module operators are compressed block matrices.
This makes the classical inequalities exact matrix computations.
"""

import numpy as np

from cstarcat import (
    direct_sum,
    free_cover,
    gram_matrix,
    inner_product,
    random_block_category,
    random_module,
    representable,
    single_rank,
    split_projection,
    unitary_operator_report,
    yoneda_element,
    yoneda_operator,
)
from cstarcat.generators import random_subprojection
from cstarcat.linalg import min_herm_eig, op_norm

cat, _ = random_block_category(seed=5)
rng = np.random.default_rng(5)

# representables and their reproducing product
h0 = representable(cat, 0)
a = h0.random_element(rng, 1)
b = h0.random_element(rng, 1)
print(f"<a,b> on a representable equals a* b: "
      f"{np.allclose(inner_product(a, b).mat, a.col.conj().T @ b.col)}")

# a random f.g.p. module and the Cauchy-Schwarz inequality
M = random_module(17, cat)
e, f = M.random_element(rng, 0), M.random_element(rng, 0)
ef = inner_product(e, f).mat
lhs = op_norm(inner_product(f, f).mat) * inner_product(e, e).mat - ef @ ef.conj().T
print(f"Cauchy-Schwarz minimum eigenvalue: {min_herm_eig(lhs):.2e} (>= ~-1e-9)")

elements = [M.random_element(rng, int(rng.integers(0, cat.n_objects))) for _ in range(4)]
_, gram = gram_matrix(elements)
print(f"4-element Gram matrix minimum eigenvalue: {min_herm_eig(gram):.2e}\n")

# the module Yoneda maps: operators from a representable <-> elements
x = 0
el = M.random_element(rng, x)
op = yoneda_operator(el)
back = yoneda_element(op)
print(f"yoneda round trip exact: {np.allclose(back.col, el.col)}; "
      f"isometric: {abs(op.norm() - el.norm()):.2e}")
theta = single_rank(el, M.random_element(rng, x))
print(f"single-rank operators factor through the representable: "
      f"norm {theta.norm():.3f}\n")

# every module is split off a finite free module, exactly
free, phi = free_cover(M)
print(f"free cover: ||phi phi* - id|| = "
      f"{op_norm((phi @ phi.adjoint()).block - M.proj):.2e}, "
      f"||phi* phi - P|| = {op_norm((phi.adjoint() @ phi).block - M.proj):.2e}")

# projections of modules split into kernel and image summands
proj_op = random_subprojection(rng, M)
ker, img, unitary = split_projection(proj_op)
report = unitary_operator_report(unitary)
print(f"splitting unitary: {'pass' if report.passed else 'fail'}")
for y in range(cat.n_objects):
    assert ker.eval_dim(y) + img.eval_dim(y) == M.eval_dim(y)
print("evaluation dimensions add up across the splitting")

# direct sums come with isometric inclusions
S, iotas = direct_sum([M, img])
print(f"direct sum inclusions satisfy iota*iota = id: "
      f"{all(op_norm((i.adjoint() @ i).block - m.proj) < 1e-10 for i, m in zip(iotas, (M, img)))}")
