"""Serialization: one self-describing JSON format for every object kind.

Complex scalars are stored as two-element [re, im] arrays; files carry an
explicit kind and format version and use the extension ``.cstar.json``.
Serialization is canonical (sorted keys, fixed separators), so identical
inputs produce byte-identical files and serialize/deserialize round-trips
exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .linalg import Tolerance, resolve_tol
from .category import CStarCategory
from .modules import HilbertModule
from .bimodules import Bimodule
from .generators import FiniteGroupoid

__all__ = [
    "FORMAT_VERSION",
    "FILE_EXTENSION",
    "SpecFile",
    "encode_matrix",
    "decode_matrix",
    "category_payload",
    "category_from_payload",
    "module_payload",
    "module_from_payload",
    "bimodule_payload",
    "bimodule_from_payload",
    "groupoid_payload",
    "groupoid_from_payload",
    "specfile_for",
    "realize",
    "dumps_canonical",
    "save_specfile",
    "load_specfile",
    "digest_bytes",
    "digest_file",
]

FORMAT_VERSION = "1"
FILE_EXTENSION = ".cstar.json"
_KINDS = ("category", "module", "bimodule", "groupoid")


@dataclass
class SpecFile:
    kind: str
    version: str
    payload: dict

    def to_obj(self) -> dict:
        return {"kind": self.kind, "version": self.version, "payload": self.payload}


def encode_matrix(mat) -> list:
    arr = np.asarray(mat, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def decode_matrix(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError("matrix entries must be [re, im] pairs")
        return arr[..., 0] + 1j * arr[..., 1]
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad matrix data: {exc}") from exc


def category_payload(cat: CStarCategory) -> dict:
    homs = []
    for x in range(cat.n_objects):
        for y in range(cat.n_objects):
            basis = cat.hom_basis(x, y)
            if basis.shape[0] == 0:
                continue
            homs.append({
                "src": x,
                "dst": y,
                "basis": [encode_matrix(b) for b in basis],
            })
    return {
        "objects": [{"label": l, "dim": d} for l, d in cat.objects],
        "homs": homs,
    }


def category_from_payload(payload: dict, tol: Tolerance | None = None) -> CStarCategory:
    try:
        objects = [(o["label"], int(o["dim"])) for o in payload["objects"]]
        homs = {}
        for entry in payload["homs"]:
            key = (int(entry["src"]), int(entry["dst"]))
            homs[key] = [decode_matrix(b) for b in entry["basis"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad category payload: {exc}") from exc
    # files always carry orthonormal bases; keeping them verbatim preserves
    # the alignment of any coordinates stored alongside (bimodule actions)
    return CStarCategory(objects, homs, tol=resolve_tol(tol), assume_orthonormal=True)


def module_payload(module: HilbertModule) -> dict:
    return {
        "category": category_payload(module.cat),
        "base": list(module.base),
        "proj": encode_matrix(module.proj),
    }


def module_from_payload(payload: dict, tol: Tolerance | None = None,
                        cat: CStarCategory | None = None) -> HilbertModule:
    """Accepts a (base, projection) presentation or a generating-element form
    (base plus columns), which is converted by taking the support of the
    generators' outer Gram."""
    tol = resolve_tol(tol)
    try:
        if cat is None:
            cat = category_from_payload(payload["category"], tol)
        base = tuple(int(x) for x in payload["base"])
        if "proj" in payload:
            proj = decode_matrix(payload["proj"])
        else:
            cols = [decode_matrix(g["col"]) for g in payload["generators"]]
            stack = np.concatenate(cols, axis=1) if cols else None
            if stack is None:
                raise ParseError("generating form needs at least one element")
            from .linalg import range_projection

            proj = range_projection(stack @ stack.conj().T, tol)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad module payload: {exc}") from exc
    return HilbertModule(cat, base, proj, tol=tol)


def bimodule_payload(E: Bimodule) -> dict:
    mor = []
    for x in range(E.source.n_objects):
        for y in range(E.source.n_objects):
            stack = E.mor_stack(x, y)
            if stack.shape[0] == 0:
                continue
            mor.append({
                "src": x,
                "dst": y,
                "blocks": [encode_matrix(b) for b in stack],
            })
    return {
        "source": category_payload(E.source),
        "target": category_payload(E.target),
        "ob_map": [
            {"base": list(E.ob(x).base), "proj": encode_matrix(E.ob(x).proj)}
            for x in range(E.source.n_objects)
        ],
        "mor_map": mor,
    }


def bimodule_from_payload(payload: dict, tol: Tolerance | None = None,
                          source: CStarCategory | None = None,
                          target: CStarCategory | None = None) -> Bimodule:
    """Rebuild a bimodule; pass ``source``/``target`` to share category
    instances, which requires their payloads to match exactly."""
    tol = resolve_tol(tol)
    try:
        if source is not None and category_payload(source) != payload["source"]:
            raise ParseError("provided source category does not match the payload")
        if target is not None and category_payload(target) != payload["target"]:
            raise ParseError("provided target category does not match the payload")
        if source is None:
            source = category_from_payload(payload["source"], tol)
        if target is None:
            target = category_from_payload(payload["target"], tol)
        ob_map = [
            HilbertModule(target, tuple(int(i) for i in spec["base"]),
                          decode_matrix(spec["proj"]), tol=tol)
            for spec in payload["ob_map"]
        ]
        mor_blocks = {}
        for entry in payload["mor_map"]:
            key = (int(entry["src"]), int(entry["dst"]))
            mor_blocks[key] = np.stack([decode_matrix(b) for b in entry["blocks"]])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad bimodule payload: {exc}") from exc
    return Bimodule(source, target, ob_map, mor_blocks, tol=tol)


def groupoid_payload(G: FiniteGroupoid) -> dict:
    comp = [[G.comp.get((g, h), -1) for h in range(G.n_morphisms)]
            for g in range(G.n_morphisms)]
    return {
        "objects": list(G.objects),
        "morphisms": [{"name": n, "src": s, "dst": d} for n, s, d in G.morphisms],
        "comp": comp,
        "inv": list(G.inv),
        "identity": list(G.identity),
    }


def groupoid_from_payload(payload: dict) -> FiniteGroupoid:
    try:
        morphisms = [(m["name"], int(m["src"]), int(m["dst"]))
                     for m in payload["morphisms"]]
        comp = {}
        for g, row in enumerate(payload["comp"]):
            for h, k in enumerate(row):
                if int(k) >= 0:
                    comp[(g, h)] = int(k)
        return FiniteGroupoid(payload["objects"], morphisms, comp,
                              payload["inv"], payload["identity"])
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"bad groupoid payload: {exc}") from exc


def specfile_for(obj) -> SpecFile:
    if isinstance(obj, CStarCategory):
        return SpecFile("category", FORMAT_VERSION, category_payload(obj))
    if isinstance(obj, HilbertModule):
        return SpecFile("module", FORMAT_VERSION, module_payload(obj))
    if isinstance(obj, Bimodule):
        return SpecFile("bimodule", FORMAT_VERSION, bimodule_payload(obj))
    if isinstance(obj, FiniteGroupoid):
        return SpecFile("groupoid", FORMAT_VERSION, groupoid_payload(obj))
    raise ParseError(f"no file format for objects of type {type(obj).__name__}")


def realize(spec: SpecFile, tol: Tolerance | None = None):
    """Instantiate the object a spec file describes."""
    if spec.kind == "category":
        return category_from_payload(spec.payload, tol)
    if spec.kind == "module":
        return module_from_payload(spec.payload, tol)
    if spec.kind == "bimodule":
        return bimodule_from_payload(spec.payload, tol)
    if spec.kind == "groupoid":
        return groupoid_from_payload(spec.payload)
    raise ParseError(f"unknown kind {spec.kind!r}")


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def save_specfile(path, spec: SpecFile) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(spec.to_obj()))


def load_specfile(path) -> SpecFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    kind = obj.get("kind")
    version = obj.get("version")
    payload = obj.get("payload")
    if kind not in _KINDS:
        raise ParseError(f"unknown kind {kind!r}")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {version!r}")
    if not isinstance(payload, dict):
        raise ParseError("payload must be an object")
    return SpecFile(kind, version, payload)


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_file(path) -> str:
    with open(path, "rb") as fh:
        return digest_bytes(fh.read())
