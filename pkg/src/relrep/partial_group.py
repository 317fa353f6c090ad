"""Partial groups and bounded search for embeddings into finite groups.

Target groups are realised as permutations of ``k`` points; a permutation
is a tuple in one-line notation and ``p * q`` applies ``q`` first.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algebra import Check, Violation
from .errors import CapExceeded, PartialGroupError

FOUND = "found"
NOT_FOUND = "not_found"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class PartialGroup:
    """Carrier ``0..n-1`` with a partial product table (``None`` = undefined)."""

    table: tuple
    identity: int = 0
    sqrt: frozenset | None = None
    names: tuple | None = None

    def __post_init__(self):
        table = tuple(tuple(None if v is None else int(v) for v in row) for row in self.table)
        n = len(table)
        if n == 0:
            raise PartialGroupError("a partial group needs at least one element")
        if any(len(row) != n for row in table):
            raise PartialGroupError(f"product table must be {n}x{n}")
        for row in table:
            for v in row:
                if v is not None and not 0 <= v < n:
                    raise PartialGroupError(f"product {v} out of range")
        if not 0 <= self.identity < n:
            raise PartialGroupError("identity out of range")
        object.__setattr__(self, "table", table)
        if self.sqrt is not None:
            sq = frozenset(int(a) for a in self.sqrt)
            if any(not 0 <= a < n for a in sq):
                raise PartialGroupError("sqrt mentions an element outside the carrier")
            object.__setattr__(self, "sqrt", sq)
        names = self.names if self.names is not None else tuple(str(i) for i in range(n))
        names = tuple(str(x) for x in names)
        if len(names) != n or len(set(names)) != n:
            raise PartialGroupError("names must be n distinct labels")
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return len(self.table)

    def product(self, a: int, b: int):
        return self.table[a][b]

    def defined_products(self):
        for a, row in enumerate(self.table):
            for b, c in enumerate(row):
                if c is not None:
                    yield a, b, c


@dataclass
class PartialGroupReport:
    violations: list
    sqrt: frozenset | None

    @property
    def ok(self) -> bool:
        return not self.violations


def _square_violations(pg: PartialGroup, sq: frozenset) -> list[Violation]:
    out = []
    if pg.identity not in sq:
        out.append(Violation("square-identity", (pg.identity,)))
    for a in range(pg.n):
        for b in range(pg.n):
            if (pg.table[a][b] is not None) != (a in sq and b in sq):
                out.append(Violation("square-defined", (a, b)))
                break
        else:
            continue
        break
    covered = {pg.table[a][b] for a in sq for b in sq} - {None}
    missing = sorted(set(range(pg.n)) - covered)
    if missing:
        out.append(Violation("square-cover", (missing[0],)))
    return out


def validate_partial_group(pg: PartialGroup) -> PartialGroupReport:
    """Identity, weak associativity, both cancellation laws and squareness.

    Without a given sqrt the only candidate is ``{a : a*a defined}`` (any
    valid sqrt must contain exactly the elements whose square is defined),
    so it is inferred and reported when it works.
    """
    t, e, n = pg.table, pg.identity, pg.n
    out: list[Violation] = []
    for a in range(n):
        if (t[e][a] is not None and t[e][a] != a) or (t[a][e] is not None and t[a][e] != a):
            out.append(Violation("identity", (e, a)))
            break
    assoc = _first_assoc_failure(t)
    if assoc:
        out.append(Violation("associativity", assoc))
    for x in range(n):
        seen = {}
        for y in range(n):
            v = t[x][y]
            if v is None:
                continue
            if v in seen:
                out.append(Violation("left-cancellation", (x, seen[v], y)))
                break
            seen[v] = y
        else:
            continue
        break
    for y in range(n):
        seen = {}
        for x in range(n):
            v = t[x][y]
            if v is None:
                continue
            if v in seen:
                out.append(Violation("right-cancellation", (seen[v], x, y)))
                break
            seen[v] = x
        else:
            continue
        break
    if pg.sqrt is not None:
        sq = pg.sqrt
        out += _square_violations(pg, sq)
    else:
        cand = frozenset(a for a in range(n) if t[a][a] is not None)
        bad = _square_violations(pg, cand)
        sq = None if bad else cand
        if bad:
            out.append(Violation("square", bad[0].witness))
    return PartialGroupReport(out, sq)


def _first_assoc_failure(t):
    n = len(t)
    for a in range(n):
        for b in range(n):
            ab = t[a][b]
            if ab is None:
                continue
            for c in range(n):
                bc = t[b][c]
                if bc is None:
                    continue
                left, right = t[ab][c], t[a][bc]
                if left is not None and right is not None and left != right:
                    return (a, b, c)
    return None


# -- groups ---------------------------------------------------------------

def group_identity(G: Sequence[Sequence[int]]) -> int:
    n = len(G)
    for e in range(n):
        if all(G[e][a] == a and G[a][e] == a for a in range(n)):
            return e
    raise PartialGroupError("table has no identity element")


def restrict_group(G: Sequence[Sequence[int]], sqrt: Iterable[int], names=None) -> PartialGroup:
    """Partial group on sqrt·sqrt with products defined exactly on sqrt × sqrt."""
    e = group_identity(G)
    sq = sorted(set(sqrt))
    if e not in sq:
        raise PartialGroupError("sqrt must contain the identity")
    carrier = sorted({G[a][b] for a in sq for b in sq})
    pos = {g: i for i, g in enumerate(carrier)}
    k = len(carrier)
    table = [[None] * k for _ in range(k)]
    for a in sq:
        for b in sq:
            table[pos[a]][pos[b]] = pos[G[a][b]]
    label = [names[g] if names else str(g) for g in carrier]
    return PartialGroup(tuple(map(tuple, table)), pos[e], frozenset(pos[a] for a in sq), tuple(label))


def perm_mul(p: tuple, q: tuple) -> tuple:
    """p * q: apply q, then p."""
    return tuple(p[i] for i in q)


def cayley_table(elements: Sequence[tuple]) -> list[list[int]]:
    pos = {p: i for i, p in enumerate(elements)}
    return [[pos[perm_mul(p, q)] for q in elements] for p in elements]


def generate_group(generators: Sequence[tuple]) -> list[tuple]:
    """Closure of permutations under product, identity first."""
    k = len(generators[0])
    ident = tuple(range(k))
    elems = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in generators:
                q = perm_mul(p, g)
                if q not in seen:
                    seen.add(q)
                    elems.append(q)
                    nxt.append(q)
        frontier = nxt
    return elems


def cyclic_group(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def regular_permutations(G: Sequence[Sequence[int]]) -> list[tuple]:
    """Left regular action: g ↦ (x ↦ g·x)."""
    return [tuple(row) for row in G]


# -- embeddings -----------------------------------------------------------

@dataclass
class EmbedOutcome:
    status: str
    embedding: list | None = None
    degree: int = 0
    nodes: int = 0
    nodes_per_degree: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def describe(self) -> str:
        if self.status == FOUND:
            return f"Found at degree {self.degree}"
        if self.status == NOT_FOUND:
            return f"NotFoundUpTo({self.degree})"
        return f"ResourceExhausted({self.nodes} nodes, at degree {self.degree})"


def check_embedding(pg: PartialGroup, phi: Sequence[tuple]) -> Check:
    """Injective, identity to the identity permutation, and φ(a)φ(b) = φ(a*b)
    for every defined product."""
    bad = []
    if len(phi) != pg.n:
        return Check(False, (("arity", len(phi)),))
    k = len(phi[0])
    for a, p in enumerate(phi):
        if len(p) != k or sorted(p) != list(range(k)):
            bad.append(("not-permutation", a))
    if bad:
        return Check(False, tuple(bad))
    if tuple(phi[pg.identity]) != tuple(range(k)):
        bad.append(("identity", pg.identity))
    first = {}
    for a, p in enumerate(phi):
        p = tuple(p)
        if p in first:
            bad.append(("collision", first[p], a))
        else:
            first[p] = a
    for a, b, c in pg.defined_products():
        if perm_mul(tuple(phi[a]), tuple(phi[b])) != tuple(phi[c]):
            bad.append(("product", a, b))
    return Check(not bad, tuple(bad))


def _cycle_type_representatives(k: int) -> list[tuple]:
    """One permutation per conjugacy class of S_k."""
    reps = []

    def partitions(n, largest):
        if n == 0:
            yield []
            return
        for part in range(min(n, largest), 0, -1):
            for rest in partitions(n - part, part):
                yield [part] + rest

    for shape in partitions(k, k):
        p = list(range(k))
        start = 0
        for length in shape:
            for i in range(length):
                p[start + i] = start + (i + 1) % length
            start += length
        reps.append(tuple(p))
    return reps


class _Budget(Exception):
    pass


def _embed_degree(pg: PartialGroup, k: int, budget: int):
    """Backtracking over images; returns (phi | None, nodes) or raises _Budget."""
    n = pg.n
    perms = list(itertools.permutations(range(k)))
    ident = tuple(range(k))
    phi: list = [None] * n
    owner: dict = {}
    nodes = 0
    factors = sorted({a for a, _, _ in pg.defined_products()} | {b for _, b, _ in pg.defined_products()})
    order = [pg.identity] + [a for a in factors if a != pg.identity] + \
        [a for a in range(n) if a != pg.identity and a not in factors]
    by_factor: list[list] = [[] for _ in range(n)]
    for a, b, c in pg.defined_products():
        by_factor[a].append((a, b, c))
        if b != a:
            by_factor[b].append((a, b, c))

    def assign(a, p, undo) -> bool:
        queue = [(a, p)]
        while queue:
            a, p = queue.pop()
            cur = phi[a]
            if cur is not None:
                if cur != p:
                    return False
                continue
            if p in owner:
                return False
            phi[a] = p
            owner[p] = a
            undo.append(a)
            for x, y, c in by_factor[a]:
                if phi[x] is not None and phi[y] is not None:
                    queue.append((c, perm_mul(phi[x], phi[y])))
        return True

    def rollback(undo):
        for a in undo:
            del owner[phi[a]]
            phi[a] = None

    def rec(i, first_branch):
        nonlocal nodes
        while i < n and phi[order[i]] is not None:
            i += 1
        if i == n:
            return True
        a = order[i]
        # conjugating an embedding gives an embedding: the first free choice
        # only needs one permutation per cycle type
        cands = _cycle_type_representatives(k) if first_branch else perms
        for p in cands:
            if p in owner:
                continue
            nodes += 1
            if nodes > budget:
                raise _Budget(nodes)
            undo: list = []
            if assign(a, p, undo) and rec(i + 1, False):
                return True
            rollback(undo)
        return False

    undo0: list = []
    if not assign(pg.identity, ident, undo0):
        return None, nodes
    if rec(0, True):
        return list(phi), nodes
    return None, nodes


def embed_search(pg: PartialGroup, max_degree: int, node_limit: int = 1_000_000) -> EmbedOutcome:
    """Embedding into permutations of k points for k = 1..max_degree."""
    if max_degree < 1:
        raise PartialGroupError("max_degree must be at least 1")
    report = validate_partial_group(pg)
    if not report.ok:
        raise PartialGroupError(f"invalid partial group: {report.violations[0]}")
    total = 0
    per = {}
    for k in range(1, max_degree + 1):
        try:
            phi, nodes = _embed_degree(pg, k, node_limit - total)
        except _Budget as exc:
            per[k] = exc.args[0]
            return EmbedOutcome(EXHAUSTED, None, k, node_limit, per)
        total += nodes
        per[k] = nodes
        if phi is not None:
            if not check_embedding(pg, phi):
                raise RuntimeError("embedding search returned an invalid map")
            return EmbedOutcome(FOUND, phi, k, total, per)
    return EmbedOutcome(NOT_FOUND, None, max_degree, total, per)


ORACLE_MAX_CARRIER = 3
ORACLE_MAX_DEGREE = 3


def embed_oracle(pg: PartialGroup, degree: int) -> list[list[tuple]]:
    """All maps carrier -> S_degree that pass :func:`check_embedding`."""
    if pg.n > ORACLE_MAX_CARRIER:
        raise CapExceeded(ORACLE_MAX_CARRIER, "oracle carrier size")
    if degree > ORACLE_MAX_DEGREE:
        raise CapExceeded(ORACLE_MAX_DEGREE, "oracle degree")
    perms = list(itertools.permutations(range(degree)))
    return [list(phi) for phi in itertools.product(perms, repeat=pg.n) if check_embedding(pg, phi)]
