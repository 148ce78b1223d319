"""Command line: verify, construct, tensor, morita, ew, gen.

Exit status is a stable contract: 0 when every check passes, 1 when a
mathematical verification fails, 2 when an input cannot be parsed.  Reports
are machine-readable and always include every residual.  Tolerances come
from flags, falling back to the CSTARCAT_TOL_ABS environment variable and
then the library default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .errors import EngineError, InvalidInput, NotInvertible, ParseError
from .linalg import Tolerance, default_tolerance, op_norm
from .category import (
    AdditiveHull,
    idempotent_completion,
    matrix_algebra,
    verify_category,
)

from .bimodules import (
    tensor_bimodule_bimodule,
    tensor_cross_check,
    tensor_module_bimodule,
    verify_bimodule,
    check_nondegenerate,
)
from .multipliers import multiplier_space
from .morita import (
    check_imprimitivity,
    conjugate_bimodule,
    eilenberg_watts_map,
    morita_source_map,
    morita_target_map,
)
from .generators import (
    FiniteGroupoid,
    groupoid_category,
    random_block_category,
    random_module,
    unitary_twist_functor,
    bimodule_from_functor,
)
from .io import (
    SpecFile,
    FORMAT_VERSION,
    bimodule_from_payload,
    category_from_payload,
    decode_matrix,
    digest_file,
    load_specfile,
    module_from_payload,
    realize,
    save_specfile,
    specfile_for,
)
from .linalg import orthonormal_span
from .report import Report


def _tolerance(args) -> Tolerance:
    base = default_tolerance()
    atol = args.tol_abs
    if atol is None:
        env = os.environ.get("CSTARCAT_TOL_ABS")
        atol = float(env) if env else base.atol
    rtol = args.tol_rel if args.tol_rel is not None else base.rtol
    return Tolerance(atol=float(atol), rtol=float(rtol))


def _emit(command: str, inputs: list[str], report: Report, started: float,
          fmt: str) -> int:
    payload = {
        "command": command,
        "inputs": [digest_file(p) for p in inputs],
        "verdict": "pass" if report.passed else "fail",
        "checks": [c.to_dict() for c in report.checks],
        "timing": round(time.time() - started, 6),
    }
    if fmt == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(str(report))
        print(f"verdict: {payload['verdict']} ({payload['timing']}s)")
    return 0 if report.passed else 1


def _save(args, spec: SpecFile) -> None:
    if args.out:
        save_specfile(args.out, spec)


def _load_kind(path, kinds) -> SpecFile:
    spec = load_specfile(path)
    if spec.kind not in kinds:
        raise ParseError(f"{path}: expected one of {kinds}, got {spec.kind!r}")
    return spec


# -- verify -----------------------------------------------------------------


def _verify_module_payload(payload, tol) -> Report:
    report = Report(context="module")
    cat = category_from_payload(payload["category"], tol)
    base = tuple(int(x) for x in payload["base"])
    proj = decode_matrix(payload["proj"])
    from .category import block_residual, list_dim

    expected = list_dim(cat, base)
    if proj.shape != (expected, expected):
        raise ParseError(f"projection has shape {proj.shape}, expected {expected}")
    scale = max(op_norm(proj), 1.0)
    report.add("proj-hermitian", op_norm(proj - proj.conj().T), tol.bound(scale))
    report.add("proj-idempotent", op_norm(proj @ proj - proj), tol.bound(scale))
    report.add("proj-in-hom-span", block_residual(cat, base, base, proj),
               tol.bound(float(np.linalg.norm(proj))))
    return report


def cmd_verify(args) -> int:
    started = time.time()
    tol = _tolerance(args)
    spec = load_specfile(args.path)
    if spec.kind == "category":
        cat = category_from_payload(spec.payload, tol)
        report = verify_category(cat, tol, seed=args.seed)
    elif spec.kind == "module":
        report = _verify_module_payload(spec.payload, tol)
    elif spec.kind == "bimodule":
        E = realize(spec, tol)
        report = verify_bimodule(E, tol, seed=args.seed)
    else:
        report = Report(context="groupoid")
        try:
            G = realize(spec)
            report.add("groupoid-axioms", 0.0, 0.5)
            cat_report = verify_category(groupoid_category(G, tol), tol, seed=args.seed)
            report.extend(cat_report, prefix="category:")
        except InvalidInput:
            report.add("groupoid-axioms", 1.0, 0.5)
    return _emit("verify", [args.path], report, started, args.format)


# -- construct ----------------------------------------------------------------


def _multiplier_realization(cat, tol) -> SpecFile:
    """Category realized through the multiplier solve and κ-inverse."""
    homs = {}
    for x in range(cat.n_objects):
        for y in range(cat.n_objects):
            space = multiplier_space(cat, x, y, tol)
            if len(space) != cat.hom_dim(x, y):
                raise InvalidInput(
                    f"multiplier space at ({x},{y}) has dimension {len(space)}, "
                    f"hom-space has {cat.hom_dim(x, y)}; unital collapse failed"
                )
            mats = [m.apply_L(cat.unit(x)).mat for m in space]
            if mats:
                homs[(x, y)] = orthonormal_span(mats, tol)
    from .category import CStarCategory

    realized = CStarCategory(cat.objects, homs, tol=tol)
    return specfile_for(realized)


def cmd_construct(args) -> int:
    started = time.time()
    tol = _tolerance(args)
    report = Report(context=f"construct-{args.what}")
    if args.what in ("hull", "matalg", "idem", "multiplier"):
        spec = _load_kind(args.path, ("category",))
        cat = category_from_payload(spec.payload, tol)
        if args.what == "hull":
            out = specfile_for(AdditiveHull(cat, tol=tol).cat)
        elif args.what == "matalg":
            out = specfile_for(matrix_algebra(cat, tol).cat)
        elif args.what == "idem":
            projections = None
            if args.projections:
                with open(args.projections, "r", encoding="utf-8") as fh:
                    raw = json.load(fh)
                projections = {}
                for entry in raw:
                    projections.setdefault(int(entry["object"]), []).append(
                        decode_matrix(entry["mat"])
                    )
            out = specfile_for(idempotent_completion(cat, projections, tol).cat)
        else:
            out = _multiplier_realization(cat, tol)
        check = verify_category(category_from_payload(out.payload, tol), tol)
        report.extend(check, prefix="output:")
    elif args.what == "conjugate":
        spec = _load_kind(args.path, ("bimodule",))
        E = realize(spec, tol)
        data, cert = check_imprimitivity(E, tol)
        report.extend(cert, prefix="certificate:")
        if data is None:
            return _emit("construct-conjugate", [args.path], report, started, args.format)
        conj = conjugate_bimodule(data, tol)
        out = specfile_for(conj.bimodule)
        report.extend(verify_bimodule(conj.bimodule, tol), prefix="output:")
    else:
        raise ParseError(f"unknown construct verb {args.what!r}")
    _save(args, out)
    return _emit(f"construct-{args.what}", [args.path], report, started, args.format)


# -- tensor -------------------------------------------------------------------


def cmd_tensor(args) -> int:
    started = time.time()
    tol = _tolerance(args)
    left = load_specfile(args.left)
    right = _load_kind(args.right, ("bimodule",))
    E = realize(right, tol)
    report = Report(context="tensor")
    if left.kind == "module":
        if left.payload.get("category") != right.payload["source"]:
            raise ParseError("module category and bimodule source do not match")
        M = module_from_payload(left.payload, tol, cat=E.source)
        tensor = tensor_module_bimodule(M, E)
        out = specfile_for(tensor.module)
        if args.oracle:
            report.extend(tensor_cross_check(M, E, tol), prefix="oracle:")
        else:
            report.add("tensor-built", 0.0, 0.5)
    elif left.kind == "bimodule":
        F = realize(left, tol)
        E = bimodule_from_payload(right.payload, tol, source=F.target)
        composite = tensor_bimodule_bimodule(F, E)
        out = specfile_for(composite)
        report.extend(verify_bimodule(composite, tol), prefix="output:")
    else:
        raise ParseError("tensor needs a module or bimodule on the left")
    _save(args, out)
    return _emit("tensor", [args.left, args.right], report, started, args.format)


# -- morita -------------------------------------------------------------------


def cmd_morita(args) -> int:
    started = time.time()
    tol = _tolerance(args)
    spec = _load_kind(args.path, ("bimodule",))
    E = realize(spec, tol)
    report = Report(context="morita")
    report.extend(verify_bimodule(E, tol), prefix="bimodule:")
    data, cert = check_imprimitivity(E, tol, seed=args.seed)
    report.extend(cert, prefix="imprimitivity:")
    if data is not None:
        conj = conjugate_bimodule(data, tol)
        phi = morita_target_map(data, conj)
        psi = morita_source_map(data, conj)
        report.extend(phi.verify_natural(tol), prefix="target-map:")
        report.extend(phi.unitary_report(tol), prefix="target-map:")
        report.extend(psi.verify_natural(tol), prefix="source-map:")
        report.extend(psi.unitary_report(tol), prefix="source-map:")
    return _emit("morita", [args.path], report, started, args.format)


# -- eilenberg-watts ------------------------------------------------------------


def cmd_ew(args) -> int:
    started = time.time()
    tol = _tolerance(args)
    spec = _load_kind(args.path, ("bimodule",))
    E = realize(spec, tol)
    ok, nd_report = check_nondegenerate(E, tol)
    report = Report(context="eilenberg-watts")
    report.extend(nd_report, prefix="precondition:")
    if ok:
        worst: dict[str, tuple[float, float]] = {}
        for k in range(args.count):
            M = random_module(args.seed + k, E.source)
            _, sub = eilenberg_watts_map(M, E, tol)
            for check in sub.checks:
                prev = worst.get(check.name)
                if prev is None or check.residual > prev[0]:
                    worst[check.name] = (check.residual, check.threshold)
        for name in sorted(worst):
            residual, threshold = worst[name]
            report.add(f"worst:{name}", residual, threshold)
    return _emit("ew", [args.path], report, started, args.format)


# -- gen ------------------------------------------------------------------------


def cmd_gen(args) -> int:
    started = time.time()
    tol = _tolerance(args)
    report = Report(context=f"gen-{args.kind}")
    if args.kind == "category":
        cat, _ = random_block_category(
            args.seed, n_objects=args.objects, n_sectors=args.sectors,
            max_mult=args.max_mult, max_sector_dim=args.max_sector_dim, tol=tol,
        )
        out = specfile_for(cat)
        report.extend(verify_category(cat, tol), prefix="output:")
    elif args.kind == "groupoid":
        if args.family == "cyclic":
            G = FiniteGroupoid.cyclic(args.n)
        else:
            G = FiniteGroupoid.codiscrete(args.n)
        out = specfile_for(G)
        report.add("groupoid-axioms", 0.0, 0.5)
    elif args.kind == "module":
        spec = _load_kind(args.category, ("category",))
        cat = category_from_payload(spec.payload, tol)
        module = random_module(args.seed, cat, max_base=args.max_base)
        out = specfile_for(module)
        report.add("module-built", 0.0, 0.5)
    elif args.kind == "bimodule":
        spec = _load_kind(args.category, ("category",))
        cat = category_from_payload(spec.payload, tol)
        E = bimodule_from_functor(unitary_twist_functor(cat, seed=args.seed), tol)
        out = specfile_for(E)
        report.extend(verify_bimodule(E, tol), prefix="output:")
    else:
        raise ParseError(f"unknown generator kind {args.kind!r}")
    _save(args, out)
    inputs = [args.category] if getattr(args, "category", None) else []
    return _emit(f"gen-{args.kind}", inputs, report, started, args.format)


# -- entry ----------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-abs", type=float, default=None,
                   help="absolute tolerance (overrides CSTARCAT_TOL_ABS)")
    p.add_argument("--tol-rel", type=float, default=None, help="relative tolerance")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cstarcat",
        description=f"Finite-dimensional C*-category engine (format v{FORMAT_VERSION})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify a serialized object")
    p.add_argument("path")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", help="build a derived object")
    p.add_argument("what", choices=("hull", "matalg", "idem", "multiplier", "conjugate"))
    p.add_argument("path")
    p.add_argument("--out", default=None)
    p.add_argument("--projections", default=None,
                   help="JSON list of {object, mat} for idem")
    _add_common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("tensor", help="tensor a module or bimodule with a bimodule")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--out", default=None)
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against the quotient construction")
    _add_common(p)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("morita", help="imprimitivity certificate and witness maps")
    p.add_argument("path")
    _add_common(p)
    p.set_defaults(func=cmd_morita)

    p = sub.add_parser("ew", help="reconstruction check over random modules")
    p.add_argument("path")
    p.add_argument("--count", type=int, default=5)
    _add_common(p)
    p.set_defaults(func=cmd_ew)

    p = sub.add_parser("gen", help="generate a deterministic test object")
    p.add_argument("kind", choices=("category", "groupoid", "module", "bimodule"))
    p.add_argument("--out", default=None)
    p.add_argument("--objects", type=int, default=3)
    p.add_argument("--sectors", type=int, default=2)
    p.add_argument("--max-mult", type=int, default=2)
    p.add_argument("--max-sector-dim", type=int, default=2)
    p.add_argument("--family", choices=("cyclic", "codiscrete"), default="codiscrete")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--category", default=None,
                   help="category file for module/bimodule generation")
    p.add_argument("--max-base", type=int, default=3)
    _add_common(p)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NotInvertible as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
