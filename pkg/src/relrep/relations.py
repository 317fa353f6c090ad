"""Concrete binary relations over a finite base ``{0, ..., m-1}``.

A relation is an ``m*m`` bit set in row-major order: pair ``(x, y)`` is bit
``x*m + y``.  The integer doubles as the canonical form used to deduplicate
relations inside closures.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    COMPLEMENT, COMPOSE, CONST_E, CONST_TOP, CONST_ZERO, JOIN, MEET, ORDER,
    FiniteAlgebra, Signature,
)
from .errors import BaseMismatch, CapExceeded, RelrepError, UniverseViolation

RELATIVE = "relative"
UNIVERSAL = "universal"
SEMANTICS = (RELATIVE, UNIVERSAL)


def check_semantics(semantics: str) -> str:
    if semantics not in SEMANTICS:
        raise RelrepError(f"complement semantics must be one of {SEMANTICS}, not {semantics!r}")
    return semantics


@dataclass(frozen=True, order=True)
class Relation:
    base_size: int
    bits: int = 0

    def __post_init__(self):
        if self.base_size < 1:
            raise RelrepError("base size must be positive")
        if self.bits < 0 or self.bits >> (self.base_size * self.base_size):
            raise RelrepError("relation bits outside the base square")

    @classmethod
    def from_pairs(cls, m: int, pairs: Iterable[tuple[int, int]]) -> "Relation":
        bits = 0
        for x, y in pairs:
            if not (0 <= x < m and 0 <= y < m):
                raise RelrepError(f"pair ({x}, {y}) outside base of size {m}")
            bits |= 1 << (x * m + y)
        return cls(m, bits)

    @classmethod
    def from_matrix(cls, matrix) -> "Relation":
        mat = np.asarray(matrix, dtype=bool)
        m = mat.shape[0]
        if mat.shape != (m, m):
            raise RelrepError("relation matrix must be square")
        return cls.from_pairs(m, map(tuple, np.argwhere(mat)))

    @classmethod
    def empty(cls, m: int) -> "Relation":
        return cls(m, 0)

    @classmethod
    def full(cls, m: int) -> "Relation":
        return cls(m, (1 << (m * m)) - 1)

    @classmethod
    def identity(cls, m: int) -> "Relation":
        return cls.from_pairs(m, ((x, x) for x in range(m)))

    def __contains__(self, pair) -> bool:
        x, y = pair
        return bool(self.bits >> (x * self.base_size + y) & 1)

    def __len__(self):
        return bin(self.bits).count("1")

    def __iter__(self):
        return iter(self.pairs())

    def pairs(self) -> list[tuple[int, int]]:
        m, b = self.base_size, self.bits
        return [divmod(k, m) for k in range(m * m) if b >> k & 1]

    def rows(self) -> list[int]:
        m = self.base_size
        mask = (1 << m) - 1
        return [(self.bits >> (x * m)) & mask for x in range(m)]

    def matrix(self) -> np.ndarray:
        m = self.base_size
        k = np.arange(m * m)
        return ((self.bits >> k) & 1).astype(bool).reshape(m, m) if m * m <= 62 else \
            np.array([[(x, y) in self for y in range(m)] for x in range(m)], dtype=bool)

    def domain(self) -> frozenset:
        return frozenset(x for x, r in enumerate(self.rows()) if r)

    def range(self) -> frozenset:
        return frozenset(y for _, y in self.pairs())

    def field(self) -> frozenset:
        return self.domain() | self.range()

    def issubset(self, other: "Relation") -> bool:
        _same_base(self, other)
        return self.bits & ~other.bits == 0

    def __and__(self, other):
        return meet_rel(self, other)

    def __or__(self, other):
        return join_rel(self, other)

    def __matmul__(self, other):
        return compose_rel(self, other)

    def __repr__(self):
        return f"Relation({self.base_size}, {self.pairs()})"


def _same_base(r: Relation, s: Relation):
    if r.base_size != s.base_size:
        raise BaseMismatch(r.base_size, s.base_size)


def compose_rel(r: Relation, s: Relation) -> Relation:
    """(x, y) is related iff some z has (x, z) in r and (z, y) in s."""
    _same_base(r, s)
    m = r.base_size
    srows = s.rows()
    bits = 0
    for x, row in enumerate(r.rows()):
        acc = 0
        z = 0
        while row:
            if row & 1:
                acc |= srows[z]
            row >>= 1
            z += 1
        bits |= acc << (x * m)
    return Relation(m, bits)


def meet_rel(r: Relation, s: Relation) -> Relation:
    _same_base(r, s)
    return Relation(r.base_size, r.bits & s.bits)


def join_rel(r: Relation, s: Relation) -> Relation:
    _same_base(r, s)
    return Relation(r.base_size, r.bits | s.bits)


def complement_rel(r: Relation, universe: Relation | None = None) -> Relation:
    """``universe \\ r``; the universe defaults to the full square."""
    if universe is None:
        universe = Relation.full(r.base_size)
    _same_base(r, universe)
    if r.bits & ~universe.bits:
        raise UniverseViolation("relation is not contained in the complement universe")
    return Relation(r.base_size, universe.bits & ~r.bits)


def converse_rel(r: Relation) -> Relation:
    return Relation.from_pairs(r.base_size, ((y, x) for x, y in r.pairs()))


def symmetric_part(r: Relation) -> Relation:
    """Pairs of r whose reverse is also in r."""
    return Relation(r.base_size, r.bits & converse_rel(r).bits)


def is_injective_partial_function(r: Relation) -> bool:
    ident = Relation.identity(r.base_size)
    conv = converse_rel(r)
    return compose_rel(r, conv).issubset(ident) and compose_rel(conv, r).issubset(ident)


def is_symmetric(r: Relation) -> bool:
    return converse_rel(r).bits == r.bits


def is_transitive(r: Relation) -> bool:
    return compose_rel(r, r).issubset(r)


def is_equivalence(r: Relation) -> bool:
    return Relation.identity(r.base_size).issubset(r) and is_symmetric(r) and is_transitive(r)


def is_equivalence_on_domain(r: Relation) -> bool:
    if not (is_symmetric(r) and is_transitive(r)):
        return False
    return all((x, x) in r for x in r.field())


def acts_universally(r: Relation, points: Iterable[int]) -> bool:
    pts = list(points)
    for x in pts:
        if not 0 <= x < r.base_size:
            raise RelrepError(f"point {x} outside base of size {r.base_size}")
    return all((x, y) in r for x in pts for y in pts)


# -- vectorised kernels (bit sets as int64, m*m <= 62) -------------------

_MAX_VEC_BASE = 7


def unpack_bits(bits: np.ndarray, m: int) -> np.ndarray:
    """int64 bit sets -> (N, m, m) bool matrices."""
    bits = np.asarray(bits, dtype=np.int64)
    k = np.arange(m * m, dtype=np.int64)
    return ((bits[:, None] >> k) & 1).astype(bool).reshape(-1, m, m)


def pack_bits(mats: np.ndarray) -> np.ndarray:
    n = mats.shape[0]
    m = mats.shape[-1]
    weights = np.left_shift(np.int64(1), np.arange(m * m, dtype=np.int64))
    return mats.reshape(n, m * m).astype(np.int64) @ weights


def _compose_mats(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.matmul(a.astype(np.uint8), b.astype(np.uint8)) > 0


@lru_cache(maxsize=None)
def _full_compose_table(m: int) -> np.ndarray:
    size = 1 << (m * m)
    mats = unpack_bits(np.arange(size, dtype=np.int64), m)
    table = np.empty((size, size), dtype=np.int64)
    for a in range(size):
        table[a] = pack_bits(_compose_mats(np.broadcast_to(mats[a], mats.shape), mats))
    table.flags.writeable = False
    return table


def compose_bits(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Elementwise composition of two equal-length arrays of bit sets."""
    if m <= 3:
        return _full_compose_table(m)[a, b]
    if m > _MAX_VEC_BASE:
        raise RelrepError(f"vectorised relation kernels support bases up to {_MAX_VEC_BASE}")
    return pack_bits(_compose_mats(unpack_bits(a, m), unpack_bits(b, m)))


# -- concrete algebras ---------------------------------------------------

@dataclass(frozen=True)
class ConcreteAlgebra:
    """Relations closed under the operations of ``signature``.

    ``algebra`` carries the abstract tables, element ``i`` of which is
    ``relations[i]``.
    """

    base_size: int
    relations: tuple
    semantics: str
    signature: Signature
    algebra: FiniteAlgebra

    def universe(self) -> Relation:
        if self.semantics == UNIVERSAL:
            return Relation.full(self.base_size)
        bits = 0
        for r in self.relations:
            bits |= r.bits
        return Relation(self.base_size, bits)

    def index(self, r: Relation) -> int:
        return self.relations.index(r)

    def __len__(self):
        return len(self.relations)


def _pairwise(op, left: np.ndarray, right: np.ndarray):
    """op over every (l, r) in left x right plus right x left."""
    l1 = np.repeat(left, len(right))
    r1 = np.tile(right, len(left))
    return np.concatenate([op(l1, r1), op(r1, l1)])


def closure_generate(
    generators: Sequence[Relation],
    sig: Signature,
    semantics: str = UNIVERSAL,
    cap: int = 1024,
) -> ConcreteAlgebra:
    """Least set of relations containing the generators (and the constants
    of ``sig``) closed under the operations of ``sig``.

    Under relative semantics complements are taken in the union ``U`` of the
    current set and ⊤ is ``U``; the loop runs until complements with respect
    to the final union are present, so the result is closed for its own ``U``.
    Elements are ordered by their canonical bit value.
    """
    check_semantics(semantics)
    if not generators:
        raise RelrepError("closure needs at least one generator")
    m = generators[0].base_size
    for g in generators:
        _same_base(generators[0], g)
    if m > _MAX_VEC_BASE:
        raise RelrepError(f"closure supports bases up to {_MAX_VEC_BASE}")
    full = (1 << (m * m)) - 1
    ident = Relation.identity(m).bits

    seen: dict[int, None] = {}

    def add(values) -> list[int]:
        fresh = []
        for v in np.unique(np.asarray(values, dtype=np.int64)).tolist():
            if v not in seen:
                seen[v] = None
                fresh.append(v)
                if len(seen) > cap:
                    raise CapExceeded(cap)
        return fresh

    start = [g.bits for g in generators]
    if CONST_E in sig:
        start.append(ident)
    if CONST_ZERO in sig:
        start.append(0)
    if CONST_TOP in sig and semantics == UNIVERSAL:
        start.append(full)
    frontier = add(start)
    while True:
        allv = np.fromiter(seen, dtype=np.int64, count=len(seen))
        union = int(np.bitwise_or.reduce(allv)) if semantics == RELATIVE else full
        cands = []
        if frontier:
            front = np.asarray(frontier, dtype=np.int64)
            if COMPOSE in sig:
                cands.append(_pairwise(lambda a, b: compose_bits(a, b, m), front, allv))
            if MEET in sig:
                cands.append(_pairwise(np.bitwise_and, front, allv))
            if JOIN in sig:
                cands.append(_pairwise(np.bitwise_or, front, allv))
        if COMPLEMENT in sig:
            # every element is inside the union, so xor is set difference
            cands.append(allv ^ np.int64(union))
        if CONST_TOP in sig and semantics == RELATIVE:
            cands.append(np.array([union], dtype=np.int64))
        frontier = add(np.concatenate(cands)) if cands else []
        if not frontier:
            break
    bits = np.array(sorted(seen), dtype=np.int64)
    relations = tuple(Relation(m, int(b)) for b in bits)
    return ConcreteAlgebra(
        base_size=m,
        relations=relations,
        semantics=semantics,
        signature=sig,
        algebra=_tables(bits, m, sig, semantics, union),
    )


def _lookup(bits: np.ndarray, values: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(bits, values)
    if np.any(idx >= len(bits)) or np.any(bits[np.minimum(idx, len(bits) - 1)] != values):
        raise RelrepError("relation set is not closed under a signature operation")
    return idx


def _tables(bits: np.ndarray, m: int, sig: Signature, semantics: str, union: int) -> FiniteAlgebra:
    n = len(bits)
    a = np.repeat(bits, n)
    b = np.tile(bits, n)
    kw = {}
    kw["compose"] = _lookup(bits, compose_bits(a, b, m)).reshape(n, n).tolist()
    if MEET in sig:
        kw["meet"] = _lookup(bits, a & b).reshape(n, n).tolist()
    if JOIN in sig:
        kw["join"] = _lookup(bits, a | b).reshape(n, n).tolist()
    if COMPLEMENT in sig:
        kw["complement"] = _lookup(bits, bits ^ np.int64(union)).tolist()
    if ORDER in sig:
        kw["order"] = ((a & ~b) == 0).reshape(n, n).tolist()
    pos = {int(v): i for i, v in enumerate(bits)}
    constants = {}
    ident = Relation.identity(m).bits
    if CONST_E in sig:
        constants["e"] = pos[ident]
    if CONST_ZERO in sig:
        constants["zero"] = pos[0]
    if CONST_TOP in sig:
        constants["top"] = pos[union]
    designated = {}
    div = union & ~ident if semantics == RELATIVE else ((1 << (m * m)) - 1) & ~ident
    if div in pos and CONST_E in sig:
        designated["div"] = pos[div]
    names = [f"r{int(v)}" for v in bits]
    return FiniteAlgebra(kw.pop("compose"), names=names, constants=constants,
                         designated=designated, **kw)


def all_relations(m: int) -> list[Relation]:
    return [Relation(m, b) for b in range(1 << (m * m))]


def full_algebra(m: int, sig: Signature | None = None, semantics: str = UNIVERSAL) -> ConcreteAlgebra:
    """The algebra of all relations over a base of size ``m``."""
    from .algebra import FULL
    return closure_generate(all_relations(m), sig or FULL, semantics, cap=1 << (m * m))
