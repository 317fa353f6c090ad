"""JSON file formats for algebras, representations and partial groups.

Everything is referenced by element name.  :func:`dumps` is the canonical
serialisation (sorted keys, sorted pair lists, two-space indent, trailing
newline); parse followed by canonical dump is a fixed point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .algebra import (
    COMPLEMENT, JOIN, MEET, ORDER, FiniteAlgebra, Signature,
)
from .errors import AlgebraError, ParseError, PartialGroupError, RelrepError
from .partial_group import PartialGroup
from .relations import Relation, check_semantics
from .representation import Representation


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{source}:{exc.lineno}:{exc.colno}") from None


def read_json(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(exc.strerror or exc), str(path)) from None
    except UnicodeDecodeError:
        raise ParseError("file is not UTF-8", str(path)) from None
    return loads(text, str(path))


class _Names:
    def __init__(self, names, where="elements"):
        if not isinstance(names, list) or not names:
            raise ParseError("must be a non-empty list of names", where)
        for i, x in enumerate(names):
            if not isinstance(x, str):
                raise ParseError("element names must be strings", f"{where}[{i}]")
        if len(set(names)) != len(names):
            dup = next(x for x in names if names.count(x) > 1)
            raise ParseError(f"duplicate element name {dup!r}", where)
        self.names = names
        self.pos = {x: i for i, x in enumerate(names)}

    def __call__(self, name, where):
        if not isinstance(name, str) or name not in self.pos:
            raise ParseError(f"unknown element {name!r}", where)
        return self.pos[name]


def _expect(doc, key, kind, where):
    if key not in doc:
        raise ParseError(f"missing field {key!r}", where or "<root>")
    val = doc[key]
    if not isinstance(val, kind):
        raise ParseError(f"expected {kind.__name__}", f"{where + '.' if where else ''}{key}")
    return val


def _square_table(raw, idx, n, where):
    if not isinstance(raw, list) or len(raw) != n:
        raise ParseError(f"expected {n} rows", where)
    out = []
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"expected {n} entries", f"{where}[{i}]")
        out.append([idx(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)])
    return out


# -- algebras ---------------------------------------------------------------

@dataclass
class AlgebraFile:
    algebra: FiniteAlgebra
    signature: Signature | None = None


def algebra_from_json(doc, where: str = "") -> AlgebraFile:
    if not isinstance(doc, dict):
        raise ParseError("algebra document must be an object", where or "<root>")
    pre = f"{where}." if where else ""
    names = _Names(_expect(doc, "elements", list, where), f"{pre}elements")
    n = len(names.names)
    tables = _expect(doc, "tables", dict, where)
    unknown = set(tables) - {"compose", MEET, JOIN, COMPLEMENT, ORDER}
    if unknown:
        raise ParseError(f"unknown table {sorted(unknown)[0]!r}", f"{pre}tables")
    if "compose" not in tables:
        raise ParseError("missing compose table", f"{pre}tables")
    kw: dict[str, Any] = {}
    kw["compose"] = _square_table(tables["compose"], names, n, f"{pre}tables.compose")
    for op in (MEET, JOIN):
        if op in tables:
            kw[op] = _square_table(tables[op], names, n, f"{pre}tables.{op}")
    if COMPLEMENT in tables:
        raw = tables[COMPLEMENT]
        w = f"{pre}tables.complement"
        if not isinstance(raw, dict):
            raise ParseError("expected an object mapping each element to its complement", w)
        comp = [None] * n
        for k, v in raw.items():
            comp[names(k, w)] = names(v, f"{w}.{k}")
        if None in comp:
            raise ParseError(f"no complement for {names.names[comp.index(None)]!r}", w)
        kw[COMPLEMENT] = comp
    if ORDER in tables:
        raw = tables[ORDER]
        w = f"{pre}tables.order"
        if not isinstance(raw, list):
            raise ParseError("expected a list of [lower, upper] pairs", w)
        mat = [[False] * n for _ in range(n)]
        for i, pair in enumerate(raw):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ParseError("expected a [lower, upper] pair", f"{w}[{i}]")
            mat[names(pair[0], f"{w}[{i}][0]")][names(pair[1], f"{w}[{i}][1]")] = True
        kw[ORDER] = mat
    constants = {}
    for k, v in doc.get("constants", {}).items():
        if k not in ("e", "zero", "top"):
            raise ParseError(f"unknown constant {k!r}", f"{pre}constants")
        constants[k] = names(v, f"{pre}constants.{k}")
    designated = {k: names(v, f"{pre}designated.{k}") for k, v in doc.get("designated", {}).items()}
    sig = None
    if "signature" in doc:
        try:
            sig = Signature.parse(doc["signature"])
        except AlgebraError as exc:
            raise ParseError(str(exc), f"{pre}signature") from None
    try:
        alg = FiniteAlgebra(names=names.names, constants=constants, designated=designated, **kw)
    except AlgebraError as exc:
        raise ParseError(str(exc), where or "<root>") from None
    return AlgebraFile(alg, sig)


def algebra_to_json(alg: FiniteAlgebra, sig: Signature | None = None) -> dict:
    nm = alg.names
    tables: dict[str, Any] = {"compose": [[nm[v] for v in row] for row in alg.compose]}
    for op in (MEET, JOIN):
        t = getattr(alg, op)
        if t is not None:
            tables[op] = [[nm[v] for v in row] for row in t]
    if alg.complement is not None:
        tables[COMPLEMENT] = {nm[a]: nm[c] for a, c in enumerate(alg.complement)}
    if alg.order is not None:
        tables[ORDER] = [[nm[a], nm[b]] for a in range(alg.n) for b in range(alg.n) if alg.order[a][b]]
    doc = {
        "elements": list(nm),
        "tables": tables,
        "constants": {k: nm[v] for k, v in alg.constants.items()},
        "designated": {k: nm[v] for k, v in alg.designated.items()},
    }
    if sig is not None:
        doc["signature"] = sig.as_list()
    return doc


def load_algebra(path) -> AlgebraFile:
    return algebra_from_json(read_json(path))


# -- representations ----------------------------------------------------------

@dataclass
class RepresentationFile:
    representation: Representation
    algebra_path: str | None = None


def representation_from_json(doc, base_dir: Path | None = None) -> RepresentationFile:
    if not isinstance(doc, dict):
        raise ParseError("representation document must be an object", "<root>")
    ref = doc.get("algebra")
    algebra_path = None
    if isinstance(ref, str):
        algebra_path = ref
        p = Path(ref)
        if not p.is_absolute() and base_dir is not None:
            p = base_dir / p
        alg_file = algebra_from_json(read_json(p))
    elif isinstance(ref, dict):
        alg_file = algebra_from_json(ref, "algebra")
    else:
        raise ParseError("expected a path or an inline algebra object", "algebra")
    alg = alg_file.algebra
    m = _expect(doc, "base_size", int, "")
    if m < 1:
        raise ParseError("must be positive", "base_size")
    mapping = _expect(doc, "map", dict, "")
    names = _Names(list(alg.names))
    images: list = [None] * alg.n
    for name, pairs in mapping.items():
        a = names(name, "map")
        w = f"map.{name}"
        if not isinstance(pairs, list):
            raise ParseError("expected a list of [x, y] pairs", w)
        checked = []
        for i, pr in enumerate(pairs):
            if (not isinstance(pr, list) or len(pr) != 2
                    or not all(isinstance(v, int) and not isinstance(v, bool) for v in pr)):
                raise ParseError("expected an [x, y] pair of integers", f"{w}[{i}]")
            if not all(0 <= v < m for v in pr):
                raise ParseError(f"pair {pr} outside base of size {m}", f"{w}[{i}]")
            checked.append(tuple(pr))
        images[a] = Relation.from_pairs(m, checked)
    if None in images:
        raise ParseError(f"no image for element {alg.names[images.index(None)]!r}", "map")
    sig_raw = doc.get("signature", alg_file.signature.as_list() if alg_file.signature else ["compose"])
    try:
        sig = Signature.parse(sig_raw)
        semantics = check_semantics(doc.get("semantics", "universal"))
        rep = Representation(alg, m, images, sig, semantics)
    except RelrepError as exc:
        raise ParseError(str(exc), "signature") from None
    return RepresentationFile(rep, algebra_path)


def representation_to_json(rep: Representation, algebra_path: str | None = None) -> dict:
    nm = rep.algebra.names
    return {
        "algebra": algebra_path if algebra_path is not None else algebra_to_json(rep.algebra),
        "base_size": rep.base_size,
        "map": {nm[a]: [list(p) for p in r.pairs()] for a, r in enumerate(rep.images)},
        "semantics": rep.semantics,
        "signature": rep.signature.as_list(),
    }


def load_representation(path) -> RepresentationFile:
    path = Path(path)
    return representation_from_json(read_json(path), path.parent)


# -- partial groups -------------------------------------------------------------

def partial_group_from_json(doc) -> PartialGroup:
    if not isinstance(doc, dict):
        raise ParseError("partial group document must be an object", "<root>")
    names = _Names(_expect(doc, "elements", list, ""))
    n = len(names.names)
    raw = _expect(doc, "table", list, "")
    if len(raw) != n:
        raise ParseError(f"expected {n} rows", "table")
    table = []
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"expected {n} entries", f"table[{i}]")
        table.append([None if v is None else names(v, f"table[{i}][{j}]") for j, v in enumerate(row)])
    ident = names(_expect(doc, "identity", str, ""), "identity")
    sqrt = None
    if doc.get("sqrt") is not None:
        if not isinstance(doc["sqrt"], list):
            raise ParseError("expected a list of element names", "sqrt")
        sqrt = frozenset(names(v, f"sqrt[{i}]") for i, v in enumerate(doc["sqrt"]))
    try:
        return PartialGroup(tuple(map(tuple, table)), ident, sqrt, tuple(names.names))
    except PartialGroupError as exc:
        raise ParseError(str(exc), "<root>") from None


def partial_group_to_json(pg: PartialGroup) -> dict:
    nm = pg.names
    doc = {
        "elements": list(nm),
        "identity": nm[pg.identity],
        "table": [[None if v is None else nm[v] for v in row] for row in pg.table],
    }
    if pg.sqrt is not None:
        doc["sqrt"] = [nm[a] for a in sorted(pg.sqrt)]
    return doc


def load_partial_group(path) -> PartialGroup:
    return partial_group_from_json(read_json(path))


def embedding_to_json(pg: PartialGroup, phi, degree: int) -> dict:
    return {"degree": degree, "embedding": {pg.names[a]: list(p) for a, p in enumerate(phi)}}
