"""Abstract finite algebras in reduct signatures of relation algebra.

Elements are the integers ``0..n-1``; names only matter for I/O.  Tables are
stored as tuples so that hot loops index plain Python ints, and numpy copies
are built lazily for the exhaustive law checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AlgebraError, MissingTable, Unavailable

COMPOSE = "compose"
MEET = "meet"
JOIN = "join"
COMPLEMENT = "complement"
ORDER = "order"
CONST_E = "const_e"
CONST_ZERO = "const_zero"
CONST_TOP = "const_top"

SYMBOLS = (COMPOSE, MEET, JOIN, COMPLEMENT, ORDER, CONST_E, CONST_ZERO, CONST_TOP)

_ALIASES = {
    "·": COMPOSE, ".": COMPOSE, "*": COMPOSE,
    "∧": MEET, "∨": JOIN, "-": COMPLEMENT, "−": COMPLEMENT,
    "<=": ORDER, "≤": ORDER, "leq": ORDER,
    "e": CONST_E, "0": CONST_ZERO, "zero": CONST_ZERO, "top": CONST_TOP, "⊤": CONST_TOP,
}

# constant symbol -> key in FiniteAlgebra.constants
CONSTANT_KEYS = {CONST_E: "e", CONST_ZERO: "zero", CONST_TOP: "top"}


@dataclass(frozen=True)
class Signature:
    """The operation and constant symbols a representation has to respect."""

    symbols: frozenset = field(default_factory=lambda: frozenset({COMPOSE}))

    def __post_init__(self):
        syms = frozenset(self.symbols)
        unknown = syms - set(SYMBOLS)
        if unknown:
            raise AlgebraError(f"unknown signature symbols: {sorted(unknown)}")
        if COMPOSE not in syms:
            raise AlgebraError("a signature always contains compose")
        object.__setattr__(self, "symbols", syms)

    @classmethod
    def of(cls, *symbols: str) -> "Signature":
        return cls(frozenset({COMPOSE, *(_ALIASES.get(s, s) for s in symbols)}))

    @classmethod
    def parse(cls, text: str | Iterable[str]) -> "Signature":
        """Comma-separated symbols or aliases; compose is implied."""
        if isinstance(text, str):
            parts = [p.strip() for p in text.replace(";", ",").split(",")]
        else:
            parts = [str(p).strip() for p in text]
        return cls.of(*(p for p in parts if p))

    def __contains__(self, symbol):
        return symbol in self.symbols

    def __iter__(self):
        return (s for s in SYMBOLS if s in self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __le__(self, other):
        return self.symbols <= Signature._coerce(other).symbols

    def __or__(self, other):
        return Signature(self.symbols | Signature._coerce(other).symbols)

    def __and__(self, other):
        return Signature(self.symbols & Signature._coerce(other).symbols | {COMPOSE})

    @staticmethod
    def _coerce(other):
        return other if isinstance(other, Signature) else Signature.of(*other)

    def as_list(self) -> list[str]:
        return list(self)

    def __str__(self):
        return ",".join(self)


LATTICE_ORDERED = Signature.of(MEET, JOIN)
ORDERED_COMPLEMENTED = Signature.of(ORDER, COMPLEMENT)
BOOLEAN_MONOID = Signature.of(MEET, JOIN, COMPLEMENT, CONST_E, CONST_ZERO, CONST_TOP)
FULL = Signature(frozenset(SYMBOLS))


def _square(table, n, what):
    if table is None:
        return None
    rows = tuple(tuple(int(v) for v in row) for row in table)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise AlgebraError(f"{what} table must be {n}x{n}")
    for row in rows:
        for v in row:
            if not 0 <= v < n:
                raise AlgebraError(f"{what} table entry {v} out of range 0..{n - 1}")
    return rows


class FiniteAlgebra:
    """A finite algebra given by operation tables.

    ``constants`` maps ``"e"``, ``"zero"``, ``"top"`` to element indices and
    ``designated`` holds further named elements such as ``"div"``.  Instances
    are treated as immutable.
    """

    def __init__(
        self,
        compose: Sequence[Sequence[int]],
        names: Sequence[str] | None = None,
        meet=None,
        join=None,
        complement: Sequence[int] | None = None,
        order=None,
        constants: Mapping[str, int] | None = None,
        designated: Mapping[str, int] | None = None,
    ):
        n = len(compose)
        if n == 0:
            raise AlgebraError("algebras must have at least one element")
        self.n = n
        if names is None:
            names = [str(i) for i in range(n)]
        self.names = tuple(str(x) for x in names)
        if len(self.names) != n or len(set(self.names)) != n:
            raise AlgebraError("names must be n distinct labels")
        self.compose = _square(compose, n, COMPOSE)
        self.meet = _square(meet, n, MEET)
        self.join = _square(join, n, JOIN)
        if complement is not None:
            complement = tuple(int(v) for v in complement)
            if len(complement) != n or any(not 0 <= v < n for v in complement):
                raise AlgebraError("complement table must list n valid indices")
        self.complement = complement
        if order is not None:
            order = tuple(tuple(bool(v) for v in row) for row in order)
            if len(order) != n or any(len(r) != n for r in order):
                raise AlgebraError(f"order matrix must be {n}x{n}")
        self.order = order
        self.constants = dict(constants or {})
        for key, v in self.constants.items():
            if key not in CONSTANT_KEYS.values():
                raise AlgebraError(f"unknown constant {key!r}")
            if not 0 <= v < n:
                raise AlgebraError(f"constant {key} index {v} out of range")
        self.designated = dict(designated or {})
        for key, v in self.designated.items():
            if not 0 <= v < n:
                raise AlgebraError(f"designated {key} index {v} out of range")
        self._np = {}

    # -- access helpers -------------------------------------------------

    @property
    def e(self):
        return self.constants.get("e")

    @property
    def zero(self):
        return self.constants.get("zero")

    @property
    def top(self):
        return self.constants.get("top")

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AlgebraError(f"unknown element {name!r}") from None

    def has(self, symbol: str) -> bool:
        if symbol == COMPOSE:
            return True
        if symbol in (MEET, JOIN, COMPLEMENT, ORDER):
            return getattr(self, symbol) is not None
        return CONSTANT_KEYS[symbol] in self.constants

    def signature(self) -> Signature:
        """Largest signature this algebra carries tables/constants for."""
        return Signature(frozenset(s for s in SYMBOLS if self.has(s)))

    def require(self, sig: Signature):
        for s in sig:
            if not self.has(s):
                raise MissingTable(s)

    def table(self, name: str) -> np.ndarray:
        if name not in self._np:
            arr = np.asarray(getattr(self, name), dtype=np.int64 if name != ORDER else bool)
            arr.flags.writeable = False
            self._np[name] = arr
        return self._np[name]

    def leq(self, a: int, b: int) -> bool:
        """The order, falling back to the one induced by meet or join."""
        if self.order is not None:
            return self.order[a][b]
        if self.meet is not None:
            return self.meet[a][b] == a
        if self.join is not None:
            return self.join[a][b] == b
        raise Unavailable("no order, meet or join to compare elements")

    def order_matrix(self) -> np.ndarray:
        if self.order is not None:
            return self.table(ORDER)
        if self.meet is not None:
            m = self.table(MEET)
            return m == np.arange(self.n)[:, None]
        if self.join is not None:
            j = self.table(JOIN)
            return j == np.arange(self.n)[None, :]
        raise Unavailable("no order, meet or join to compare elements")

    def with_designated(self, **named: int) -> "FiniteAlgebra":
        d = dict(self.designated)
        d.update(named)
        return self.replace(designated=d)

    def replace(self, **changes) -> "FiniteAlgebra":
        kw = dict(
            compose=self.compose, names=self.names, meet=self.meet, join=self.join,
            complement=self.complement, order=self.order,
            constants=self.constants, designated=self.designated,
        )
        kw.update(changes)
        return FiniteAlgebra(**kw)

    def __eq__(self, other):
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return (self.names, self.compose, self.meet, self.join, self.complement,
                self.order, self.constants, self.designated) == (
            other.names, other.compose, other.meet, other.join, other.complement,
            other.order, other.constants, other.designated)

    def __hash__(self):
        return hash((self.names, self.compose))

    def __repr__(self):
        return f"FiniteAlgebra(n={self.n}, signature={self.signature()})"


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple

    def __str__(self):
        return f"{self.law} {self.witness}"


@dataclass(frozen=True)
class Check:
    """Boolean verdict carrying the witnesses of failure."""

    ok: bool
    witnesses: tuple = ()

    def __bool__(self):
        return self.ok


# -- validation ----------------------------------------------------------

def _first_assoc_failure(t: np.ndarray):
    n = t.shape[0]
    for a in range(n):
        left = t[t[a]]          # (a·b)·c over b, c
        right = t[a][t]         # a·(b·c)
        diff = left != right
        if diff.any():
            b, c = np.argwhere(diff)[0]
            return (a, int(b), int(c))
    return None


def _first(mask: np.ndarray):
    if not mask.any():
        return None
    return tuple(int(v) for v in np.argwhere(mask)[0])


def _lattice_violations(t: np.ndarray, label: str) -> list[Violation]:
    n = t.shape[0]
    out = []
    ar = np.arange(n)
    w = _first(t[ar, ar] != ar)
    if w is not None:
        out.append(Violation(f"{label}-idempotent", w))
    w = _first(t != t.T)
    if w is not None:
        out.append(Violation(f"{label}-commutative", w))
    w = _first_assoc_failure(t)
    if w is not None:
        out.append(Violation(f"{label}-associative", w))
    return out


def validate_algebra(alg: FiniteAlgebra, sig: Signature) -> list[Violation]:
    """Check the structural laws belonging to the symbols of ``sig``.

    Only associativity, lattice laws, partial-order laws and the bound
    constants are checked; one violation (with its first witness in
    lexicographic order) is reported per failed law.
    """
    alg.require(sig)
    out: list[Violation] = []
    w = _first_assoc_failure(alg.table(COMPOSE))
    if w is not None:
        out.append(Violation("associativity", w))

    if MEET in sig:
        out += _lattice_violations(alg.table(MEET), "meet")
    if JOIN in sig:
        out += _lattice_violations(alg.table(JOIN), "join")
    if MEET in sig and JOIN in sig:
        m, j = alg.table(MEET), alg.table(JOIN)
        n = alg.n
        ar = np.arange(n)
        # a ∧ (a ∨ b) = a and a ∨ (a ∧ b) = a
        w = _first(m[ar[:, None], j] != ar[:, None])
        if w is None:
            w = _first(j[ar[:, None], m] != ar[:, None])
        if w is not None:
            out.append(Violation("absorption", w))

    if ORDER in sig:
        o = alg.table(ORDER)
        ar = np.arange(alg.n)
        w = _first(~o[ar, ar])
        if w is not None:
            out.append(Violation("order-reflexive", w))
        w = _first(o & o.T & (ar[:, None] != ar[None, :]))
        if w is not None:
            out.append(Violation("order-antisymmetric", w))
        # a ≤ b ≤ c but not a ≤ c
        oi = o.astype(np.int64)
        trans = (oi @ oi) > 0
        w = _first(trans & ~o)
        if w is not None:
            a, c = w
            b = next(b for b in range(alg.n) if o[a, b] and o[b, c])
            out.append(Violation("order-transitive", (a, b, c)))
        if MEET in sig:
            m = alg.table(MEET)
            w = _first(o != (m == ar[:, None]))
            if w is not None:
                out.append(Violation("order-meet-consistency", w))
        if JOIN in sig:
            j = alg.table(JOIN)
            w = _first(o != (j == ar[None, :]))
            if w is not None:
                out.append(Violation("order-join-consistency", w))

    have_order = ORDER in sig or MEET in sig or JOIN in sig
    if have_order and (CONST_ZERO in sig or CONST_TOP in sig):
        o = alg.table(ORDER) if ORDER in sig else alg.order_matrix()
        if CONST_ZERO in sig:
            z = alg.zero
            bad = np.flatnonzero(~o[z])
            if bad.size:
                out.append(Violation("zero-minimum", (z, int(bad[0]))))
        if CONST_TOP in sig:
            t = alg.top
            bad = np.flatnonzero(~o[:, t])
            if bad.size:
                out.append(Violation("top-maximum", (int(bad[0]), t)))
    return out


def advisory_warnings(alg: FiniteAlgebra, sig: Signature) -> list[Violation]:
    """Conditions every representable algebra meets but validation does not demand."""
    out = []
    t = alg.table(COMPOSE)
    n = alg.n
    if CONST_E in sig and alg.e is not None:
        e = alg.e
        bad = np.flatnonzero((t[e] != np.arange(n)) | (t[:, e] != np.arange(n)))
        if bad.size:
            out.append(Violation("identity-law", (e, int(bad[0]))))
    if ORDER in sig or MEET in sig or JOIN in sig:
        o = alg.order_matrix()
        # a ≤ b  ⇒  ca ≤ cb and ac ≤ bc
        for a, b in np.argwhere(o):
            left = o[t[:, a], t[:, b]]
            right = o[t[a, :], t[b, :]]
            if not (left.all() and right.all()):
                c = int(np.flatnonzero(~(left & right))[0])
                out.append(Violation("compose-monotone", (int(a), int(b), c)))
                break
    if COMPLEMENT in sig:
        c = alg.table(COMPLEMENT)
        bad = np.flatnonzero(c[c] != np.arange(n))
        if bad.size:
            out.append(Violation("complement-involution", (int(bad[0]),)))
    return out


# -- derived notions -----------------------------------------------------

def derived_div(alg: FiniteAlgebra) -> int:
    """The diversity element −e, or the designated ``div`` when −e is not computable."""
    if alg.complement is not None and alg.e is not None:
        return alg.complement[alg.e]
    if "div" in alg.designated:
        return alg.designated["div"]
    raise Unavailable("div needs a complement table with e, or a designated div")


def ensure_div(alg: FiniteAlgebra) -> FiniteAlgebra:
    """Return ``alg`` with ``designated['div']`` filled in."""
    div = derived_div(alg)
    if alg.designated.get("div") == div:
        return alg
    return alg.with_designated(div=div)


def _need(alg, *symbols):
    for s in symbols:
        if not alg.has(s):
            raise Unavailable(f"needs {s}")


def derived_dom(alg: FiniteAlgebra, a: int) -> int:
    _need(alg, MEET, CONST_TOP, CONST_E)
    return alg.meet[alg.compose[a][alg.top]][alg.e]


def derived_ran(alg: FiniteAlgebra, a: int) -> int:
    _need(alg, MEET, CONST_TOP, CONST_E)
    return alg.meet[alg.compose[alg.top][a]][alg.e]


def normality_check(alg: FiniteAlgebra) -> Check:
    """dom(a)·a = a = a·ran(a) for every a; witnesses are ``(a, "dom"|"ran")``."""
    bad = []
    c = alg.compose
    for a in range(alg.n):
        if c[derived_dom(alg, a)][a] != a:
            bad.append((a, "dom"))
        if c[a][derived_ran(alg, a)] != a:
            bad.append((a, "ran"))
    return Check(not bad, tuple(bad))


def _div_zero(alg):
    div = derived_div(alg)
    if alg.zero is None:
        raise Unavailable("needs const_zero")
    return div, alg.zero


def i_elements_via_meet(alg: FiniteAlgebra) -> frozenset:
    """Elements a with (a·div) ∧ a = 0 = (div·a) ∧ a."""
    _need(alg, MEET)
    div, zero = _div_zero(alg)
    c, m = alg.compose, alg.meet
    return frozenset(
        a for a in range(alg.n)
        if m[c[a][div]][a] == zero and m[c[div][a]][a] == zero
    )


def i_elements_via_complement(alg: FiniteAlgebra) -> frozenset:
    """Elements a with a ≤ −(a·div) and a ≤ −(div·a)."""
    _need(alg, COMPLEMENT)
    div = derived_div(alg)
    c, neg = alg.compose, alg.complement
    return frozenset(
        a for a in range(alg.n)
        if alg.leq(a, neg[c[a][div]]) and alg.leq(a, neg[c[div][a]])
    )


def _classes_by(keys: Sequence[int]) -> tuple:
    groups: dict[int, list[int]] = {}
    for a, k in enumerate(keys):
        groups.setdefault(k, []).append(a)
    return tuple(sorted(tuple(g) for g in groups.values()))


def dom_equiv_classes(alg: FiniteAlgebra) -> tuple:
    """Partition of the elements by the value of a·⊤."""
    _need(alg, CONST_TOP)
    top = alg.top
    return _classes_by([alg.compose[a][top] for a in range(alg.n)])


def ran_equiv_classes(alg: FiniteAlgebra) -> tuple:
    _need(alg, CONST_TOP)
    top = alg.top
    return _classes_by([alg.compose[top][a] for a in range(alg.n)])


def idempotents(alg: FiniteAlgebra) -> frozenset:
    return frozenset(a for a in range(alg.n) if alg.compose[a][a] == a)


def i_elements(alg: FiniteAlgebra) -> frozenset:
    """i-elements by the meet formula when possible, else by the complement one."""
    if alg.meet is not None:
        return i_elements_via_meet(alg)
    return i_elements_via_complement(alg)


@dataclass
class AnalysisReport:
    i_elements: frozenset | None
    idempotents: frozenset
    normal: bool | None
    dom_classes: tuple | None
    ran_classes: tuple | None
    violations: list = field(default_factory=list)

    def to_json(self, alg: FiniteAlgebra) -> dict:
        nm = alg.names

        def names(s):
            return None if s is None else sorted((nm[a] for a in s), key=nm.index)

        def parts(p):
            return None if p is None else [[nm[a] for a in cls] for cls in p]

        return {
            "i_elements": names(self.i_elements),
            "idempotents": names(self.idempotents),
            "normal": self.normal,
            "dom_classes": parts(self.dom_classes),
            "ran_classes": parts(self.ran_classes),
            "violations": [
                {"law": v.law, "witness": [nm[w] if isinstance(w, int) else w for w in v.witness]}
                for v in self.violations
            ],
        }


def analyze(alg: FiniteAlgebra) -> AnalysisReport:
    """Compute every derived notion the algebra's tables allow."""
    def attempt(fn):
        try:
            return fn(alg)
        except Unavailable:
            return None

    iel = attempt(i_elements)
    normal = None
    violations: list[Violation] = []
    norm = attempt(normality_check)
    if norm is not None:
        normal = norm.ok
        violations += [Violation(f"normality-{side}", (a,)) for a, side in norm.witnesses]
    return AnalysisReport(
        i_elements=iel,
        idempotents=idempotents(alg),
        normal=normal,
        dom_classes=attempt(dom_equiv_classes),
        ran_classes=attempt(ran_equiv_classes),
        violations=violations,
    )
