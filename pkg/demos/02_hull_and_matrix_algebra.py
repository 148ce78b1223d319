"""The additive hull, its column-sup norm, and the one-object matrix algebra.

The hull's objects are finite lists of base objects with block matrices as
morphisms.  Its norm is defined as a supremum over admissible columns; the
demo evaluates that formula against the operator norm of the assembled
block matrix, which it must reproduce because C*-norms are unique.
"""

import numpy as np

from cstarcat import (
    additive_hull,
    column_sup_norm,
    idempotent_completion,
    matrix_algebra,
    random_block_category,
    verify_category,
    verify_functor,
)
from cstarcat.category import random_block
from cstarcat.generators import random_block_projection
from cstarcat.linalg import op_norm

cat, _ = random_block_category(seed=7, n_objects=2)
hull = additive_hull(cat)
print(f"hull objects: {[label for label, _ in hull.cat.objects]}")
print(f"hull verification: {'pass' if verify_category(hull.cat).passed else 'fail'}")
print(f"embedding is a *-functor: {'pass' if verify_functor(hull.embedding).passed else 'fail'}\n")

# the column-sup norm reproduces the block operator norm
rng = np.random.default_rng(1)
src = (0, 1, 0)
dst = (1, 0)
block = random_block(rng, cat, src, dst)
estimate = column_sup_norm(cat, src, block, probes=32, seed=2)
exact = op_norm(block)
print(f"column-sup norm {estimate:.12f} vs block operator norm {exact:.12f}")
print(f"relative gap {abs(estimate - exact) / exact:.2e}\n")

# the matrix algebra is the endomorphism algebra of the full list
alg = matrix_algebra(cat)
total = sum(cat.hom_dim(x, y) for x in range(2) for y in range(2))
print(f"matrix algebra dimension {alg.dimension} = sum of hom dims {total}")

# idempotent completion: a proper projection becomes an object of its own
p = random_block_projection(np.random.default_rng(3), cat, (0,))
eye = np.eye(cat.dim(0))
comp = idempotent_completion(cat, {0: [p, eye - p]})
print(f"completion objects: {[label for label, _ in comp.cat.objects]}")
idx = comp.pair_index(0, p)
print(f"corner at the projection has dimension {comp.cat.dim(idx)} "
      f"(ambient {cat.dim(0)})")
