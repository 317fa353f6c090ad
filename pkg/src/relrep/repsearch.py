"""Bounded search for faithful representations over small finite bases.

For a base of size m the unknowns are the booleans ``v[a][x][y]`` meaning
``(x, y) ∈ h(a)``.  Every requirement of the signature is written as CNF
clauses; the existential in ``h(ab) ⊆ h(a)∘h(b)`` gets one witness literal
per middle point.  A small DPLL solver with watched literals decides the
clauses, branching on memberships first and on witnesses last.

``NotFoundUpTo(k)`` only ever means that no representation exists on bases
of size at most k.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .algebra import (
    COMPLEMENT, COMPOSE, CONST_E, CONST_TOP, CONST_ZERO, JOIN, MEET, ORDER,
    FiniteAlgebra, Signature, validate_algebra,
)
from .errors import AlgebraError, CapExceeded, MissingTop, RelrepError
from .relations import UNIVERSAL, Relation, check_semantics, compose_rel
from .representation import Representation, verify_representation

LOG = logging.getLogger(__name__)

FOUND = "found"
NOT_FOUND = "not_found"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class SearchConfig:
    max_base: int = 4
    semantics: str = UNIVERSAL
    require_top_equiv: bool = False
    node_limit: int = 1_000_000
    symmetry_breaking: bool = True

    def __post_init__(self):
        if self.max_base < 1:
            raise RelrepError("max_base must be at least 1")
        if self.node_limit < 1:
            raise RelrepError("node_limit must be at least 1")
        check_semantics(self.semantics)


@dataclass
class SearchOutcome:
    status: str
    representation: Representation | None = None
    bound: int = 0
    nodes: int = 0
    nodes_per_base: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def describe(self) -> str:
        if self.status == FOUND:
            return f"Found at base size {self.representation.base_size}"
        if self.status == NOT_FOUND:
            return f"NotFoundUpTo({self.bound})"
        return f"ResourceExhausted({self.nodes} nodes, at base size {self.bound})"


# -- DPLL -----------------------------------------------------------------

class _Solver:
    """DPLL over clauses of signed ints with two watched literals per clause.

    ``order`` fixes the branching sequence and ``polarity`` the first value
    tried for each variable.  ``check`` is an extra pruning predicate run
    after each propagation.
    """

    def __init__(self, nvars, clauses, order, polarity, check=None):
        self.nvars = nvars
        self.val = [0] * (nvars + 1)
        self.order = order
        self.pos = [0] * (nvars + 1)
        for i, v in enumerate(order):
            self.pos[v] = i
        self.polarity = polarity
        self.check = check
        self.trail: list[int] = []
        self.qhead = 0
        self.watches: list[list[int]] = [[] for _ in range(2 * nvars + 2)]
        self.clauses: list[list[int]] = []
        self.units: list[int] = []
        self.unsat = False
        self.nodes = 0
        self.cursor = 0
        for c in clauses:
            if not c:
                self.unsat = True
            elif len(c) == 1:
                self.units.append(c[0])
            else:
                ci = len(self.clauses)
                self.clauses.append(list(c))
                self.watches[self._w(c[0])].append(ci)
                self.watches[self._w(c[1])].append(ci)

    @staticmethod
    def _w(lit):
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _assign(self, lit):
        v = lit if lit > 0 else -lit
        self.val[v] = 1 if lit > 0 else -1
        self.trail.append(lit)

    def _propagate(self) -> bool:
        val = self.val
        clauses = self.clauses
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            lit = trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            wi = 2 * false_lit if false_lit > 0 else -2 * false_lit + 1
            wl = watches[wi]
            keep = []
            i = 0
            n = len(wl)
            while i < n:
                ci = wl[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                fv = val[first] if first > 0 else -val[-first]
                if fv == 1:
                    keep.append(ci)
                    continue
                moved = False
                for k in range(2, len(c)):
                    lk = c[k]
                    if (val[lk] if lk > 0 else -val[-lk]) != -1:
                        c[1], c[k] = lk, false_lit
                        watches[2 * lk if lk > 0 else -2 * lk + 1].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(ci)
                if fv == -1:
                    keep.extend(wl[i:])
                    watches[wi] = keep
                    return False
                self._assign(first)
            watches[wi] = keep
        return True

    def _undo(self, size):
        val = self.val
        pos = self.pos
        cursor = self.cursor
        trail = self.trail
        while len(trail) > size:
            lit = trail.pop()
            v = lit if lit > 0 else -lit
            val[v] = 0
            if pos[v] < cursor:
                cursor = pos[v]
        self.cursor = cursor
        self.qhead = len(trail)

    def _pick(self):
        order, val = self.order, self.val
        i = self.cursor
        while i < len(order) and val[order[i]] != 0:
            i += 1
        self.cursor = i
        return order[i] if i < len(order) else None

    def _consistent(self) -> bool:
        return self._propagate() and (self.check is None or self.check(self.val))

    def solve(self, node_limit: int):
        """Return (True, assignment), (False, None), or (None, None) at the node limit."""
        if self.unsat:
            return False, None
        for u in self.units:
            v = abs(u)
            if self.val[v] == 0:
                self._assign(u)
            elif self.val[v] != (1 if u > 0 else -1):
                return False, None
        if not self._consistent():
            return False, None
        # decision stack entries: (trail size before, literal, flipped)
        stack: list[tuple[int, int, bool]] = []
        while True:
            var = self._pick()
            if var is None:
                return True, list(self.val)
            if self.nodes >= node_limit:
                return None, None
            self.nodes += 1
            lit = var if self.polarity[var] else -var
            stack.append((len(self.trail), lit, False))
            self._assign(lit)
            while not self._consistent():
                while True:
                    if not stack:
                        return False, None
                    size, lit, flipped = stack.pop()
                    self._undo(size)
                    if not flipped:
                        stack.append((size, -lit, True))
                        self._assign(-lit)
                        break
                # loop re-checks consistency of the flipped literal


# -- encoding -------------------------------------------------------------

def _element_order(alg: FiniteAlgebra, sig: Signature) -> list[int]:
    """Constants first, then by how often an element is a product."""
    degree = [0] * alg.n
    for row in alg.compose:
        for c in row:
            degree[c] += 1
    for name in (MEET, JOIN):
        if name in sig:
            for row in getattr(alg, name):
                for c in row:
                    degree[c] += 1
    consts = {alg.constants[k] for k in ("e", "zero", "top") if k in alg.constants}
    return sorted(range(alg.n), key=lambda a: (a not in consts, -degree[a], a))


class _Encoding:
    def __init__(self, alg: FiniteAlgebra, sig: Signature, m: int, cfg: SearchConfig):
        self.alg, self.sig, self.m, self.cfg = alg, sig, m, cfg
        n = alg.n
        self.nvars = n * m * m
        self.clauses: list[list[int]] = []
        self.witness_vars: list[int] = []
        self.other_aux: list[int] = []
        self._build()

    def A(self, a, x, y):
        m = self.m
        return 1 + a * m * m + x * m + y

    def _new(self, bucket):
        self.nvars += 1
        bucket.append(self.nvars)
        return self.nvars

    def _add(self, *lits):
        s = set(lits)
        if any(-l in s for l in s):
            return
        self.clauses.append(sorted(s, key=abs))

    def _build(self):
        alg, sig, m = self.alg, self.sig, self.m
        n = alg.n
        A = self.A
        pts = range(m)
        pairs = [(x, y) for x in pts for y in pts]

        if CONST_E in sig:
            for x, y in pairs:
                self._add(A(alg.e, x, y) if x == y else -A(alg.e, x, y))
        if CONST_ZERO in sig:
            for x, y in pairs:
                self._add(-A(alg.zero, x, y))

        if COMPOSE in sig:
            comp = alg.compose
            for a in range(n):
                for b in range(n):
                    c = comp[a][b]
                    for x, y in pairs:
                        ws = []
                        for z in pts:
                            # h(a)∘h(b) ⊆ h(ab)
                            self._add(-A(a, x, z), -A(b, z, y), A(c, x, y))
                            w = self._new(self.witness_vars)
                            self._add(-w, A(a, x, z))
                            self._add(-w, A(b, z, y))
                            ws.append(w)
                        # h(ab) ⊆ h(a)∘h(b)
                        self._add(-A(c, x, y), *ws)

        if MEET in sig:
            for a in range(n):
                for b in range(a, n):
                    c = alg.meet[a][b]
                    for x, y in pairs:
                        self._add(-A(c, x, y), A(a, x, y))
                        self._add(-A(c, x, y), A(b, x, y))
                        self._add(-A(a, x, y), -A(b, x, y), A(c, x, y))
        if JOIN in sig:
            for a in range(n):
                for b in range(a, n):
                    c = alg.join[a][b]
                    for x, y in pairs:
                        self._add(-A(a, x, y), A(c, x, y))
                        self._add(-A(b, x, y), A(c, x, y))
                        self._add(-A(c, x, y), A(a, x, y), A(b, x, y))

        if COMPLEMENT in sig:
            neg = alg.complement
            if self.cfg.semantics == UNIVERSAL:
                for a in range(n):
                    for x, y in pairs:
                        self._add(A(a, x, y), A(neg[a], x, y))
                        self._add(-A(a, x, y), -A(neg[a], x, y))
            else:
                for x, y in pairs:
                    u = self._new(self.other_aux)
                    for d in range(n):
                        self._add(-A(d, x, y), u)
                    self._add(-u, *(A(d, x, y) for d in range(n)))
                    for a in range(n):
                        self._add(-A(a, x, y), -A(neg[a], x, y))
                        self._add(-u, A(a, x, y), A(neg[a], x, y))

        if ORDER in sig:
            for a in range(n):
                for b in range(n):
                    if a == b:
                        continue
                    if alg.order[a][b]:
                        for x, y in pairs:
                            self._add(-A(a, x, y), A(b, x, y))
                    else:
                        ds = []
                        for x, y in pairs:
                            d = self._new(self.other_aux)
                            self._add(-d, A(a, x, y))
                            self._add(-d, -A(b, x, y))
                            ds.append(d)
                        self._add(*ds)

        if CONST_TOP in sig:
            t = alg.top
            for a in range(n):
                for x, y in pairs:
                    self._add(-A(a, x, y), A(t, x, y))

        if self.cfg.require_top_equiv:
            t = alg.top
            for x in pts:
                self._add(A(t, x, x))
            for x, y in pairs:
                self._add(-A(t, x, y), A(t, y, x))
                for z in pts:
                    self._add(-A(t, x, y), -A(t, y, z), A(t, x, z))

        # faithfulness: some pair separates each pair of elements
        for a in range(n):
            for b in range(a + 1, n):
                ds = []
                for x, y in pairs:
                    d = self._new(self.other_aux)
                    self._add(-d, A(a, x, y), A(b, x, y))
                    self._add(-d, -A(a, x, y), -A(b, x, y))
                    ds.append(d)
                self._add(*ds)

    def membership_order(self) -> list[int]:
        m = self.m
        return [self.A(a, x, y) for a in _element_order(self.alg, self.sig)
                for x in range(m) for y in range(m)]

    def decode(self, val) -> list[Relation]:
        m = self.m
        return [
            Relation.from_pairs(m, ((x, y) for x in range(m) for y in range(m)
                                    if val[self.A(a, x, y)] == 1))
            for a in range(self.alg.n)
        ]


def _lex_leader_check(enc: _Encoding, vector: list[int]):
    """Pruning predicate: the membership vector must be lexicographically no
    larger (false < true) than its image under each adjacent transposition
    of base points.  Sound because every constraint is invariant under
    permuting base points."""
    m = enc.m
    if m < 2:
        return None
    perms = []
    for x in range(m - 1):
        sigma = list(range(m))
        sigma[x], sigma[x + 1] = x + 1, x
        image = []
        for v in vector:
            a, rest = divmod(v - 1, m * m)
            p, q = divmod(rest, m)
            image.append(enc.A(a, sigma[p], sigma[q]))
        perms.append(image)

    def check(val):
        for image in perms:
            for v, w in zip(vector, image):
                a, b = val[v], val[w]
                if a == 0 or b == 0:
                    break
                if a != b:
                    if a > b:
                        return False
                    break
        return True

    return check


def _search_base(alg, sig, m, cfg, node_budget):
    enc = _Encoding(alg, sig, m, cfg)
    membership = enc.membership_order()
    order = membership + enc.witness_vars + enc.other_aux
    polarity = [False] * (enc.nvars + 1)
    for w in enc.witness_vars:
        polarity[w] = True
    check = _lex_leader_check(enc, membership) if cfg.symmetry_breaking else None
    solver = _Solver(enc.nvars, enc.clauses, order, polarity, check)
    sat, val = solver.solve(node_budget)
    images = enc.decode(val) if sat else None
    return sat, images, solver.nodes


def _check_inputs(alg, sig, cfg):
    violations = validate_algebra(alg, sig)
    if violations:
        raise AlgebraError(f"algebra fails validation: {violations[0]}")
    if cfg.require_top_equiv and alg.top is None:
        raise MissingTop("require_top_equiv needs the constant top")


def search_representation(alg: FiniteAlgebra, sig: Signature, cfg: SearchConfig | None = None) -> SearchOutcome:
    """Look for a faithful representation respecting ``sig`` on bases 1..max_base."""
    cfg = cfg or SearchConfig()
    _check_inputs(alg, sig, cfg)
    return _search_range(alg, sig, cfg, range(1, cfg.max_base + 1))


def search_base(alg: FiniteAlgebra, sig: Signature, base_size: int,
                cfg: SearchConfig | None = None) -> SearchOutcome:
    """Like :func:`search_representation` but for exactly one base size."""
    cfg = cfg or SearchConfig()
    if base_size < 1:
        raise RelrepError("base_size must be at least 1")
    _check_inputs(alg, sig, cfg)
    return _search_range(alg, sig, cfg, [base_size])


def _search_range(alg, sig, cfg, bases) -> SearchOutcome:
    start = time.perf_counter()
    total = 0
    per_base = {}
    m = 0
    for m in bases:
        sat, images, nodes = _search_base(alg, sig, m, cfg, cfg.node_limit - total)
        total += nodes
        per_base[m] = nodes
        LOG.debug("base %d: %s after %d nodes", m, sat, nodes)
        if sat is None:
            return SearchOutcome(EXHAUSTED, None, m, total, per_base, time.perf_counter() - start)
        if sat:
            rep = Representation(alg, m, images, sig, cfg.semantics)
            report = verify_representation(rep, require_top_equiv=cfg.require_top_equiv)
            if not report.ok:
                raise RuntimeError(f"search produced an invalid representation: {report.failed_checks()}")
            return SearchOutcome(FOUND, rep, m, total, per_base, time.perf_counter() - start)
    return SearchOutcome(NOT_FOUND, None, m, total, per_base, time.perf_counter() - start)


# -- exhaustive oracle ----------------------------------------------------

ORACLE_MAX_ELEMENTS = 4
ORACLE_MAX_BASE = 2


def exhaustive_oracle(
    alg: FiniteAlgebra,
    sig: Signature,
    base_size: int,
    semantics: str = UNIVERSAL,
    require_top_equiv: bool = False,
) -> list[Representation]:
    """Every faithful representation on exactly ``base_size`` points.

    Plain enumeration of maps element -> relation in index order; a partial
    map is dropped as soon as a law among its already-mapped elements fails,
    and complete maps are filtered through :func:`verify_representation`.
    """
    if alg.n > ORACLE_MAX_ELEMENTS:
        raise CapExceeded(ORACLE_MAX_ELEMENTS, "oracle element count")
    if base_size > ORACLE_MAX_BASE:
        raise CapExceeded(ORACLE_MAX_BASE, "oracle base size")
    m = base_size
    n = alg.n
    rels = [Relation(m, b) for b in range(1 << (m * m))]
    ident = Relation.identity(m)
    h: list[Relation] = []
    out = []

    def consistent(k):
        r = h[k]
        if r in h[:k]:
            return False
        if CONST_E in sig and alg.e == k and r != ident:
            return False
        if CONST_ZERO in sig and alg.zero == k and r.bits:
            return False
        for a in range(k + 1):
            for b in range(k + 1):
                c = alg.compose[a][b]
                if max(a, b, c) == k and compose_rel(h[a], h[b]) != h[c]:
                    return False
                if MEET in sig:
                    c = alg.meet[a][b]
                    if max(a, b, c) == k and (h[a] & h[b]) != h[c]:
                        return False
                if JOIN in sig:
                    c = alg.join[a][b]
                    if max(a, b, c) == k and (h[a] | h[b]) != h[c]:
                        return False
                if ORDER in sig and k in (a, b) and alg.order[a][b] != h[a].issubset(h[b]):
                    return False
        return True

    def rec(k):
        if k == n:
            rep = Representation(alg, m, list(h), sig, semantics)
            if verify_representation(rep, require_top_equiv=require_top_equiv).ok:
                out.append(rep)
            return
        for r in rels:
            h.append(r)
            if consistent(k):
                rec(k + 1)
            h.pop()

    rec(0)
    return out

