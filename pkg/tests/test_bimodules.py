"""Bimodule axioms, non-degeneracy, tensor products and their coherence."""

import numpy as np
import pytest

from cstarcat.bimodules import (
    associator,
    check_nondegenerate,
    left_unitor,
    right_unitor,
    tensor_bimodule_bimodule,
    tensor_cross_check,
    tensor_map_left,
    tensor_map_right,
    tensor_module_bimodule,
    tensor_quotient_oracle,
    verify_bimodule,
    yoneda_bimodule,
)
from cstarcat.generators import (
    bimodule_from_functor,
    degenerate_double,
    random_block_category,
    random_module,
    unitary_twist_functor,
)
from cstarcat.linalg import op_norm
from cstarcat.modules import representable, single_rank


@pytest.fixture
def cat():
    return random_block_category(60)[0]


def test_yoneda_bimodule_passes(cat):
    E = yoneda_bimodule(cat)
    assert verify_bimodule(E).passed


def test_yoneda_action_is_single_rank(cat):
    # the action of a morphism on representables is a single-rank operator
    E = yoneda_bimodule(cat)
    rng = np.random.default_rng(0)
    x, y = 0, cat.n_objects - 1
    a = cat.random_morphism(rng, x, y)
    v, w = None, None
    from cstarcat.category import cofactorize

    s, t = cofactorize(a)
    hx, hy = representable(cat, x), representable(cat, y)
    f = hy.element(y, s.mat)
    e = hx.element(y, t.adjoint().mat)
    theta = single_rank(f, e)
    assert op_norm(theta.block - E.mor(a).block) <= 1e-8
    del v, w


def test_yoneda_is_isometric(cat):
    E = yoneda_bimodule(cat)
    rng = np.random.default_rng(1)
    for _ in range(5):
        x, y = rng.integers(0, cat.n_objects, 2)
        a = cat.random_morphism(rng, int(x), int(y))
        assert E.mor(a).norm() == pytest.approx(a.norm(), abs=1e-10)


def test_perturbed_bimodule_fails(cat):
    E = yoneda_bimodule(cat)
    x = 0
    stack = E.mor_stack(x, x).copy()
    if stack.shape[0] == 0:
        pytest.skip("empty hom")
    stack[0] = stack[0] + 0.05 * np.eye(stack.shape[1])
    blocks = {
        (a, b): (stack if (a, b) == (x, x) else E.mor_stack(a, b))
        for a in range(cat.n_objects)
        for b in range(cat.n_objects)
    }
    from cstarcat.bimodules import Bimodule

    bad = Bimodule(cat, cat, [E.ob(i) for i in range(cat.n_objects)], blocks)
    report = verify_bimodule(bad)
    assert not report.passed
    worst = report.worst()
    assert worst.residual > 1e-3


def test_functor_bimodule_passes(cat):
    F = unitary_twist_functor(cat, seed=2)
    E = bimodule_from_functor(F)
    assert verify_bimodule(E).passed


def test_nondegenerate_yoneda(cat):
    ok, report = check_nondegenerate(yoneda_bimodule(cat))
    assert ok and report.passed


def test_degenerate_control_fails(cat):
    E = degenerate_double(cat)
    assert verify_bimodule(E).passed  # still a C*-functor
    ok, report = check_nondegenerate(E)
    assert not ok
    # unit criterion and rank criterion must agree on the failure
    names = {c.name: c for c in report.checks}
    assert names["criteria-agree"].passed


def test_tensor_with_yoneda_is_module(cat):
    # M ⊗ Yoneda has the same presentation as M
    M = random_module(61, cat)
    tensor = tensor_module_bimodule(M, yoneda_bimodule(cat))
    assert tensor.module.base == M.base
    assert op_norm(tensor.module.proj - M.proj) <= 1e-9


def test_representable_tensor_is_evaluation(cat):
    # h_x ⊗ E is E(x), with matching inner products
    E = bimodule_from_functor(unitary_twist_functor(cat, seed=3))
    rng = np.random.default_rng(3)
    x = 0
    hx = representable(cat, x)
    tensor = tensor_module_bimodule(hx, E)
    fiber = E.ob(x)
    assert tensor.module.base == fiber.base
    assert op_norm(tensor.module.proj - fiber.proj) <= 1e-9
    for _ in range(5):
        z = int(rng.integers(0, cat.n_objects))
        a = hx.random_element(rng, x)
        e = fiber.random_element(rng, z)
        image = tensor.simple(a, e)
        # rho_x(a ⊗ e) = a · e, acting through the bimodule
        expected = E.mor(
            cat.morphism(x, x, a.col, validate=False)
        ).block @ e.col
        assert op_norm(image.col - tensor.module.proj @ expected) <= 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_tensor_cross_validation(seed):
    cat, _ = random_block_category(62 + seed, n_objects=2)
    M = random_module(70 + seed, cat)
    E = bimodule_from_functor(unitary_twist_functor(cat, seed=80 + seed))
    report = tensor_cross_check(M, E)
    assert report.passed, str(report)


def test_zero_module_tensor(cat):
    from cstarcat.modules import HilbertModule

    zero = HilbertModule(cat, (0,), np.zeros((cat.dim(0), cat.dim(0))), validate=False)
    E = yoneda_bimodule(cat)
    oracle = tensor_quotient_oracle(zero, E)
    tensor = tensor_module_bimodule(zero, E)
    for z in range(cat.n_objects):
        assert oracle.dims[z] == 0
        assert tensor.module.eval_dim(z) == 0


def test_unitors_are_unitary(cat):
    E = bimodule_from_functor(unitary_twist_functor(cat, seed=4))
    for unitor in (left_unitor(E), right_unitor(E)):
        assert unitor.verify_natural().passed
        report = unitor.unitary_report()
        assert report.passed, str(report)


def test_associator_unitary_and_natural():
    cat, _ = random_block_category(63, n_objects=2)
    E = bimodule_from_functor(unitary_twist_functor(cat, seed=5))
    F = bimodule_from_functor(unitary_twist_functor(cat, seed=6))
    G = yoneda_bimodule(cat)
    alpha = associator(E, F, G)
    assert alpha.verify_natural().passed
    assert alpha.unitary_report().passed


def test_pentagon_and_triangle():
    cat, _ = random_block_category(64, n_objects=2)
    E = bimodule_from_functor(unitary_twist_functor(cat, seed=7))
    F = bimodule_from_functor(unitary_twist_functor(cat, seed=8))
    G = bimodule_from_functor(unitary_twist_functor(cat, seed=9))
    H = yoneda_bimodule(cat)

    # pentagon: two routes ((EF)G)H -> E(F(GH))
    route1 = associator(E, F, tensor_bimodule_bimodule(G, H)).compose(
        associator(tensor_bimodule_bimodule(E, F), G, H)
    )
    route2 = tensor_map_left(E, associator(F, G, H)).compose(
        associator(E, tensor_bimodule_bimodule(F, G), H)
    ).compose(tensor_map_right(associator(E, F, G), H))
    assert route1.norm_distance(route2) <= 1e-7

    # triangle: (E ⊗ Yoneda) ⊗ F -> E ⊗ F via the two canonical routes
    tri1 = tensor_map_right(right_unitor(E), F)
    tri2 = tensor_map_left(E, left_unitor(F)).compose(
        associator(E, yoneda_bimodule(cat), F)
    )
    assert tri1.norm_distance(tri2) <= 1e-7


def test_operator_tensor_contracts():
    # ||T ⊗ id|| <= ||T||
    cat, _ = random_block_category(65, n_objects=2)
    E = bimodule_from_functor(unitary_twist_functor(cat, seed=10))
    M = random_module(66, cat)
    N = random_module(67, cat)
    rng = np.random.default_rng(11)
    from cstarcat.category import random_block
    from cstarcat.modules import ModuleOperator
    from cstarcat.bimodules import BimoduleMap

    raw = random_block(rng, cat, M.base, N.base)
    T = ModuleOperator(M, N, N.proj @ raw @ M.proj, validate=False)
    tm = tensor_module_bimodule(M, E)
    tn = tensor_module_bimodule(N, E)
    block = E.hull_extend(M.base, N.base, T.block)
    lifted = ModuleOperator(tm.module, tn.module,
                            tn.module.proj @ block @ tm.module.proj, validate=False)
    assert lifted.norm() <= T.norm() + 1e-9
    del BimoduleMap


def test_bimodule_tensor_functoriality():
    cat, _ = random_block_category(68, n_objects=2)
    E = bimodule_from_functor(unitary_twist_functor(cat, seed=12))
    F = bimodule_from_functor(unitary_twist_functor(cat, seed=13))
    EF = tensor_bimodule_bimodule(E, F)
    assert verify_bimodule(EF).passed
    ok, _ = check_nondegenerate(EF)
    assert ok
