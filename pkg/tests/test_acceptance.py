"""Acceptance suite: the shipping gate, one test per criterion.

Each criterion runs at its stated tolerance over the stated sweep sizes and
prints one PASS/FAIL line (visible under ``pytest -s``).  Scales are desk
size: small object counts and dimensions, many seeds.
"""

import pathlib
import time

import numpy as np
import pytest

from cstarcat.category import (
    AdditiveHull,
    column_sup_norm,
    compose,
    factorize,
    polar_unitary,
    random_block,
    verify_category,
)
from cstarcat.bimodules import (
    Bimodule,
    associator,
    check_nondegenerate,
    left_unitor,
    right_unitor,
    tensor_bimodule_bimodule,
    tensor_cross_check,
    tensor_map_left,
    tensor_map_right,
    yoneda_bimodule,
)
from cstarcat.generators import (
    FiniteGroupoid,
    bimodule_from_functor,
    degenerate_double,
    groupoid_category,
    random_block_category,
    random_module,
    unitary_twist_functor,
)
from cstarcat.io import dumps_canonical, load_specfile, specfile_for
from cstarcat.linalg import Tolerance, min_herm_eig, op_norm
from cstarcat.modules import (
    direct_sum,
    free_cover,
    gram_matrix,
    inner_product,
    representable,
    single_rank,
    yoneda_element,
    yoneda_operator,
)
from cstarcat.morita import (
    conjugate_bimodule,
    eilenberg_watts_map,
    mat_equivalence,
    morita_source_map,
    morita_target_map,
)
from cstarcat.multipliers import (
    compose_multipliers,
    kappa,
    multiplier_category,
)

FIXTURES = pathlib.Path(__file__).resolve().parent / "fixtures"


def _record(number: int, description: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number}: {verdict} - {description}{suffix}")
    assert ok, f"criterion {number} failed: {description}{suffix}"


def _groupoid_zoo():
    zoo = [FiniteGroupoid.cyclic(n) for n in range(2, 9)]
    zoo += [FiniteGroupoid.codiscrete(n) for n in range(2, 6)]
    for n in range(2, 8):
        names = [f"r{i}" for i in range(n)] + [f"s{i}" for i in range(n)]
        table = [[0] * 2 * n for _ in range(2 * n)]
        for i in range(n):
            for j in range(n):
                table[i][j] = (i + j) % n
                table[i][j + n] = n + (i + j) % n
                table[i + n][j] = n + (i - j) % n
                table[i + n][j + n] = (i - j) % n
        zoo.append(FiniteGroupoid.from_group_table(names, table))
    zoo += [FiniteGroupoid.codiscrete(6), FiniteGroupoid.cyclic(9), FiniteGroupoid.cyclic(10)]
    return zoo[:20]


def test_criterion_1_cstar_axiom_suite():
    started = time.time()
    tol = Tolerance(atol=0.0, rtol=1e-8)
    worst = 0.0
    for seed in range(100):
        cat, _ = random_block_category(seed)
        report = verify_category(cat, tol, samples=2, seed=seed)
        worst = max(worst, max(c.residual for c in report.checks))
        assert report.passed, f"seed {seed}:\n{report}"
    zoo = _groupoid_zoo()
    assert len(zoo) == 20
    for i, g in enumerate(zoo):
        report = verify_category(groupoid_category(g), tol, samples=2, seed=i)
        worst = max(worst, max(c.residual for c in report.checks))
        assert report.passed, f"groupoid {i}:\n{report}"
    elapsed = time.time() - started
    _record(1, "C*-axiom suite over 100 block + 20 groupoid categories",
            worst <= 1e-8 and elapsed <= 60.0,
            f"worst residual {worst:.2e}, {elapsed:.1f}s")


def test_criterion_2_hull_norm_formula():
    worst = 0.0
    for seed in range(100):
        cat, _ = random_block_category(seed, n_objects=2 + seed % 2)
        rng = np.random.default_rng(1000 + seed)
        n_lists = 2 + seed % 2
        src = tuple(int(x) for x in rng.integers(0, cat.n_objects, n_lists))
        dst = tuple(int(x) for x in rng.integers(0, cat.n_objects, n_lists))
        block = random_block(rng, cat, src, dst)
        exact = op_norm(block)
        if exact <= 1e-6:
            continue
        estimate = column_sup_norm(cat, src, block, probes=16, seed=seed)
        assert estimate <= exact + 1e-9
        worst = max(worst, abs(estimate - exact) / exact)
    _record(2, "hull norm formula matches block operator norm (rel 1e-6)",
            worst <= 1e-6, f"worst relative gap {worst:.2e}")


def test_criterion_3_factorization_and_polar():
    worst_fact = 0.0
    worst_polar = 0.0
    for seed in range(200):
        cat, _ = random_block_category(seed % 40)
        rng = np.random.default_rng(2000 + seed)
        x, y = (int(v) for v in rng.integers(0, cat.n_objects, 2))
        u = cat.random_morphism(rng, x, y)
        v, w = factorize(u)
        worst_fact = max(
            worst_fact,
            op_norm(u.mat - v.mat @ w.mat) / max(u.norm(), 1.0),
        )
        a = cat.random_morphism(rng, x, x)
        shifted = a + (a.norm() + 0.3) * cat.unit(x)
        pu = polar_unitary(shifted)
        d = cat.dim(x)
        worst_polar = max(
            worst_polar,
            op_norm(pu.mat.conj().T @ pu.mat - np.eye(d)),
            op_norm(pu.mat @ pu.mat.conj().T - np.eye(d)),
        )
    _record(3, "factorization recomposition and polar unitarity (1e-8)",
            worst_fact <= 1e-8 and worst_polar <= 1e-8,
            f"factorize {worst_fact:.2e}, polar {worst_polar:.2e}")


def test_criterion_4_multiplier_collapse():
    worst_structure = 0.0
    for seed in range(50):
        cat, _ = random_block_category(seed, n_objects=2, max_mult=2)
        mult = multiplier_category(cat)
        assert mult.verify().passed, f"seed {seed}"
        for x in range(cat.n_objects):
            for y in range(cat.n_objects):
                assert mult.dim(x, y) == cat.hom_dim(x, y)
        rng = np.random.default_rng(3000 + seed)
        x, y, z = (int(v) for v in rng.integers(0, cat.n_objects, 3))
        b = cat.random_morphism(rng, x, y)
        a = cat.random_morphism(rng, y, z)
        lhs = compose_multipliers(kappa(cat, a), kappa(cat, b))
        rhs = kappa(cat, compose(a, b))
        scale = max(np.linalg.norm(rhs.vec()), 1.0)
        worst_structure = max(
            worst_structure, np.linalg.norm(lhs.vec() - rhs.vec()) / scale
        )
    worst_hull = 0.0
    for seed in range(20):
        cat, _ = random_block_category(seed, n_objects=2, max_mult=1)
        hull = AdditiveHull(cat)
        mult_hull = multiplier_category(hull.cat)
        assert mult_hull.verify().passed
        full = hull.list_index(tuple(range(cat.n_objects)))
        expected = sum(
            cat.hom_dim(x, y)
            for x in range(cat.n_objects) for y in range(cat.n_objects)
        )
        assert mult_hull.dim(full, full) == expected
        rng = np.random.default_rng(4000 + seed)
        b1 = hull.cat.random_morphism(rng, full, full)
        b2 = hull.cat.random_morphism(rng, full, full)
        lhs = compose_multipliers(kappa(hull.cat, b1), kappa(hull.cat, b2))
        rhs = kappa(hull.cat, compose(b1, b2))
        scale = max(np.linalg.norm(rhs.vec()), 1.0)
        worst_hull = max(worst_hull, np.linalg.norm(lhs.vec() - rhs.vec()) / scale)
    _record(4, "multiplier collapse and hull/multiplier swap (1e-8)",
            worst_structure <= 1e-8 and worst_hull <= 1e-8,
            f"kappa transport {worst_structure:.2e}, hull swap {worst_hull:.2e}")


def test_criterion_5_hilbert_module_suite():
    worst_cs = 0.0
    pairs = 0
    rng = np.random.default_rng(5000)
    while pairs < 500:
        seed = pairs % 30
        cat, _ = random_block_category(seed)
        module = random_module(5000 + pairs, cat)
        y = int(rng.integers(0, cat.n_objects))
        e = module.random_element(rng, y)
        f = module.random_element(rng, y)
        ef = inner_product(e, f).mat
        ff = inner_product(f, f).mat
        ee = inner_product(e, e).mat
        lhs = op_norm(ff) * ee - ef @ ef.conj().T
        scale = max(op_norm(ff) * op_norm(ee), 1.0)
        worst_cs = min(worst_cs, min_herm_eig(0.5 * (lhs + lhs.conj().T)) / scale)
        pairs += 1
        if pairs % 100 == 0:
            elements = [
                module.random_element(rng, int(rng.integers(0, cat.n_objects)))
                for _ in range(5)
            ]
            _, gram = gram_matrix(elements)
            gscale = max(op_norm(gram), 1.0)
            worst_cs = min(worst_cs, min_herm_eig(gram) / gscale)
    cs_ok = worst_cs >= -1e-9

    worst_round = 0.0
    worst_iso = 0.0
    for k in range(200):
        cat, _ = random_block_category(k % 25)
        module = random_module(6000 + k, cat)
        rng2 = np.random.default_rng(6000 + k)
        x = int(rng2.integers(0, cat.n_objects))
        f = module.random_element(rng2, x)
        eps = yoneda_operator(f)
        back = yoneda_element(eps)
        worst_round = max(worst_round, op_norm(back.col - f.col))
        worst_iso = max(worst_iso, abs(eps.norm() - f.norm()))
        hx = representable(cat, x)
        theta = single_rank(f, hx.random_element(rng2, x))
        again = yoneda_operator(yoneda_element(theta))
        worst_round = max(worst_round, op_norm(again.block - theta.block))
        worst_iso = max(worst_iso, abs(yoneda_element(theta).norm() - theta.norm()))
    _record(5, "Cauchy-Schwarz/Gram positivity and module Yoneda maps",
            cs_ok and worst_round <= 1e-9 and worst_iso <= 1e-8,
            f"min eig {worst_cs:.2e}, round-trip {worst_round:.2e}, isometry {worst_iso:.2e}")


def test_criterion_6_free_cover():
    worst = 0.0
    for seed in range(100):
        cat, _ = random_block_category(seed % 40)
        module = random_module(7000 + seed, cat)
        _, phi = free_cover(module)
        worst = max(
            worst,
            op_norm((phi @ phi.adjoint()).block - module.proj),
            op_norm((phi.adjoint() @ phi).block - module.proj),
        )
    _record(6, "free cover identities on 100 random modules (1e-9)",
            worst <= 1e-9, f"worst residual {worst:.2e}")


def test_criterion_7_tensor_cross_validation():
    dim_gap = 0.0
    worst_spec = 0.0
    for seed in range(50):
        cat, _ = random_block_category(seed % 20, n_objects=2)
        M = random_module(8000 + seed, cat, max_base=2)
        E = bimodule_from_functor(unitary_twist_functor(cat, seed=8100 + seed))
        report = tensor_cross_check(M, E)
        checks = {c.name: c.residual for c in report.checks}
        dim_gap = max(dim_gap, checks["evaluation-dimension-gap"])
        worst_spec = max(worst_spec, checks["gram-spectrum-agreement"])
    tensors_ok = dim_gap == 0 and worst_spec <= 1e-7

    worst_unitor = 0.0
    worst_coherence = 0.0
    for seed in range(20):
        cat, _ = random_block_category(seed % 10, n_objects=2)
        E = bimodule_from_functor(unitary_twist_functor(cat, seed=8200 + seed))
        F = bimodule_from_functor(unitary_twist_functor(cat, seed=8300 + seed))
        G = yoneda_bimodule(cat)
        for m in (left_unitor(E), right_unitor(E), associator(E, F, G)):
            rep = m.unitary_report()
            worst_unitor = max(
                worst_unitor,
                max(c.residual for c in rep.checks if "deficit" not in c.name),
            )
            assert rep.passed
        H = bimodule_from_functor(unitary_twist_functor(cat, seed=8400 + seed))
        route1 = associator(E, F, tensor_bimodule_bimodule(G, H)).compose(
            associator(tensor_bimodule_bimodule(E, F), G, H)
        )
        route2 = tensor_map_left(E, associator(F, G, H)).compose(
            associator(E, tensor_bimodule_bimodule(F, G), H)
        ).compose(tensor_map_right(associator(E, F, G), H))
        worst_coherence = max(worst_coherence, route1.norm_distance(route2))
        tri1 = tensor_map_right(right_unitor(E), F)
        tri2 = tensor_map_left(E, left_unitor(F)).compose(
            associator(E, yoneda_bimodule(cat), F)
        )
        worst_coherence = max(worst_coherence, tri1.norm_distance(tri2))
    _record(7, "tensor product: oracle agreement, unitors/associator, coherence",
            tensors_ok and worst_unitor <= 1e-8 and worst_coherence <= 1e-7,
            f"spectra {worst_spec:.2e}, unitors {worst_unitor:.2e}, "
            f"coherence {worst_coherence:.2e}")


def test_criterion_8_morita_pipeline():
    started = time.time()
    for seed in range(50):
        cat, _ = random_block_category(seed, n_objects=2, max_mult=2)
        alg, data = mat_equivalence(cat)
        expected = sum(
            cat.hom_dim(x, y)
            for x in range(cat.n_objects) for y in range(cat.n_objects)
        )
        assert alg.dimension == expected
        conj = conjugate_bimodule(data)
        phi = morita_target_map(data, conj)
        psi = morita_source_map(data, conj)
        for name, m in (("phi", phi), ("psi", psi)):
            assert m.verify_natural().passed, f"seed {seed} {name} naturality"
            rep = m.unitary_report()
            assert rep.passed, f"seed {seed} {name}:\n{rep}"
    elapsed = time.time() - started
    _record(8, "matrix-algebra Morita equivalence over 50 categories",
            elapsed <= 120.0, f"{elapsed:.1f}s")


def test_criterion_9_eilenberg_watts():
    def double_yoneda(cat):
        ob_map = []
        for x in range(cat.n_objects):
            summed, _ = direct_sum([representable(cat, x), representable(cat, x)])
            ob_map.append(summed)
        blocks = {}
        for x in range(cat.n_objects):
            for y in range(cat.n_objects):
                basis = cat.hom_basis(x, y)
                dx, dy = cat.dim(x), cat.dim(y)
                stack = np.zeros((basis.shape[0], 2 * dy, 2 * dx), dtype=np.complex128)
                stack[:, :dy, :dx] = basis
                stack[:, dy:, dx:] = basis
                blocks[(x, y)] = stack
        return Bimodule(cat, cat, ob_map, blocks)

    worst_entry = 0.0
    count = 0
    non_free = 0
    for seed in range(25):
        cat, _ = random_block_category(seed % 12, n_objects=2)
        choices = [
            yoneda_bimodule(cat),
            bimodule_from_functor(unitary_twist_functor(cat, seed=9100 + seed)),
            tensor_bimodule_bimodule(
                bimodule_from_functor(unitary_twist_functor(cat, seed=9200 + seed)),
                yoneda_bimodule(cat),
            ),
            double_yoneda(cat),
        ]
        for j, E in enumerate(choices):
            ok, _ = check_nondegenerate(E)
            assert ok
            M = random_module(9300 + 4 * seed + j, cat, max_base=2)
            if op_norm(M.proj - np.eye(M.total_dim)) > 1e-6:
                non_free += 1
            _, report = eilenberg_watts_map(M, E)
            checks = {c.name: c.residual for c in report.checks}
            assert checks["reconstruction:evaluation-dimension-gap"] == 0
            assert checks["comparison:surjectivity-deficit"] == 0
            worst_entry = max(worst_entry, checks["reconstruction:gram-entry-agreement"])
            count += 1
    # negative control: the degenerate bimodule is excluded by precondition
    cat, _ = random_block_category(3, n_objects=2)
    ok, _ = check_nondegenerate(degenerate_double(cat))
    _record(9, "reconstruction map unitary over 100 module/bimodule pairs",
            count == 100 and non_free >= 20 and worst_entry <= 1e-8 and not ok,
            f"pairs {count}, non-free {non_free}, worst product residual {worst_entry:.2e}")


def test_criterion_10_determinism_and_round_trip(tmp_path):
    from cstarcat.cli import main

    a, b = tmp_path / "a.cstar.json", tmp_path / "b.cstar.json"
    for seed in (0, 7, 13):
        args = ["gen", "category", "--seed", str(seed), "--objects", "2"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
    fixtures = sorted(FIXTURES.glob("*.cstar.json"))
    count_ok = len(fixtures) >= 20
    rt_ok = all(
        dumps_canonical(load_specfile(p).to_obj()).encode() == p.read_bytes()
        for p in fixtures
    )
    regen_ok = all(
        dumps_canonical(specfile_for(_realize_fixture(p)).to_obj()).encode() == p.read_bytes()
        for p in fixtures
    )
    _record(10, "determinism and byte-identical round-trips on the corpus",
            count_ok and rt_ok and regen_ok,
            f"{len(fixtures)} fixtures")


def _realize_fixture(path):
    from cstarcat.io import realize

    return realize(load_specfile(path))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-s", "-q"]))
