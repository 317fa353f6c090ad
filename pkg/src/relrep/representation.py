"""Representations of finite algebras as algebras of binary relations.

Besides verification this module implements the transformations used to
normalise a representation: collapsing points on which ``e`` acts
universally (:func:`quotient`), cutting a representation down to the
symmetric interior of its top (:func:`symmetric_interior`), and the
pipeline combining them so that i-elements become injective partial
functions (:func:`injectivize_pipeline`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    COMPLEMENT, COMPOSE, CONST_E, CONST_TOP, CONST_ZERO, JOIN, LATTICE_ORDERED, MEET,
    ORDER, ORDERED_COMPLEMENTED, FiniteAlgebra, Signature, Violation, ensure_div,
    i_elements_via_complement, i_elements_via_meet, normality_check,
)
from .errors import (
    MissingTable, MissingTop, NoDistinction, NotCompositionPreserving, NotIdempotent,
    PreconditionFailed, RepresentationError, Unavailable, WrongSemantics,
)
from .relations import (
    RELATIVE, UNIVERSAL, ConcreteAlgebra, Relation, check_semantics, compose_bits,
    compose_rel, is_equivalence, is_injective_partial_function, symmetric_part,
)

_VEC_LIMIT = 7


@dataclass(frozen=True)
class Representation:
    """Map from the elements of ``algebra`` to relations over ``range(base_size)``."""

    algebra: FiniteAlgebra
    base_size: int
    images: tuple
    signature: Signature
    semantics: str = UNIVERSAL

    def __post_init__(self):
        check_semantics(self.semantics)
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.algebra.n:
            raise RepresentationError(
                f"map covers {len(images)} of {self.algebra.n} elements")
        for r in images:
            if r.base_size != self.base_size:
                raise RepresentationError("all images must share the base size")
        for s in self.signature:
            if not self.algebra.has(s):
                raise MissingTable(s)

    def __call__(self, a: int) -> Relation:
        return self.images[a]

    def bits(self) -> list[int]:
        return [r.bits for r in self.images]

    def replace(self, **changes) -> "Representation":
        kw = dict(algebra=self.algebra, base_size=self.base_size, images=self.images,
                  signature=self.signature, semantics=self.semantics)
        kw.update(changes)
        return Representation(**kw)

    def with_signature(self, sig: Signature) -> "Representation":
        return self.replace(signature=sig)


def inclusion_representation(concrete: ConcreteAlgebra, sig: Signature | None = None) -> Representation:
    """Each element of a concrete algebra represented by itself."""
    return Representation(
        algebra=concrete.algebra,
        base_size=concrete.base_size,
        images=concrete.relations,
        signature=sig or concrete.signature,
        semantics=concrete.semantics,
    )


# -- verification --------------------------------------------------------

@dataclass(frozen=True)
class Failure:
    """One failed check.  ``elements`` are algebra indices, ``pair`` a base pair."""

    symbol: str
    elements: tuple
    pair: tuple | None = None

    def __str__(self):
        at = f" at {self.pair}" if self.pair is not None else ""
        return f"{self.symbol}{self.elements}{at}"


@dataclass
class VerificationReport:
    faithful: bool
    collisions: list
    failures: dict
    counts: dict
    top_is_equivalence: bool | None = None
    require_top_equiv: bool = False
    i_preserved: bool | None = None
    i_failures: list = field(default_factory=list)
    domran_preserved: bool | None = None
    domran_failures: list = field(default_factory=list)

    def preserves(self, symbol: str) -> bool:
        return not self.failures.get(symbol)

    @property
    def ok(self) -> bool:
        if not self.faithful or any(self.failures.values()):
            return False
        if self.require_top_equiv and not self.top_is_equivalence:
            return False
        return self.i_preserved is not False and self.domran_preserved is not False

    def failed_checks(self) -> list[str]:
        out = [] if self.faithful else ["faithful"]
        out += [s for s, fs in self.failures.items() if fs]
        if self.require_top_equiv and not self.top_is_equivalence:
            out.append("top-equivalence")
        if self.i_preserved is False:
            out.append("i-preservation")
        if self.domran_preserved is False:
            out.append("domran-preservation")
        return out

    def to_json(self, alg: FiniteAlgebra) -> dict:
        nm = alg.names

        def fail(f):
            d = {"elements": [nm[a] for a in f.elements]}
            if f.pair is not None:
                d["pair"] = list(f.pair)
            return d

        return {
            "ok": self.ok,
            "faithful": self.faithful,
            "collisions": [[nm[a], nm[b]] for a, b in self.collisions],
            "checks": {
                s: {"ok": not fs, "count": self.counts.get(s, 0), "witnesses": [fail(f) for f in fs]}
                for s, fs in self.failures.items()
            },
            "top_is_equivalence": self.top_is_equivalence,
            "i_preserved": self.i_preserved,
            "i_failures": [nm[a] for a in self.i_failures],
            "domran_preserved": self.domran_preserved,
            "domran_failures": [[kind, nm[a], nm[b]] for kind, a, b in self.domran_failures],
        }

    def render(self, alg: FiniteAlgebra) -> str:
        nm = alg.names
        lines = [f"faithful: {'yes' if self.faithful else 'NO'}"]
        for a, b in self.collisions[:5]:
            lines.append(f"  collision: {nm[a]} and {nm[b]} share an image")
        for s, fs in self.failures.items():
            lines.append(f"{s}: {'ok' if not fs else 'FAIL (%d)' % self.counts.get(s, len(fs))}")
            for f in fs[:3]:
                at = f" at {f.pair}" if f.pair is not None else ""
                lines.append(f"  witness: {', '.join(nm[a] for a in f.elements)}{at}")
        if self.top_is_equivalence is not None:
            lines.append(f"top is an equivalence relation: {'yes' if self.top_is_equivalence else 'no'}")
        if self.i_preserved is not None:
            lines.append(f"i-elements are injective partial functions: {'yes' if self.i_preserved else 'NO'}")
        if self.domran_preserved is not None:
            lines.append(f"domain/range equivalence preserved: {'yes' if self.domran_preserved else 'NO'}")
        lines.append(f"verdict: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def _first_pair(bits: int, m: int):
    k = (bits & -bits).bit_length() - 1
    return divmod(k, m)


def _compose_products(rep: Representation) -> np.ndarray:
    """n x n matrix of bit sets h(a)∘h(b); bases up to 7 points only."""
    n, m = rep.algebra.n, rep.base_size
    b = np.asarray(rep.bits(), dtype=np.int64)
    return compose_bits(np.repeat(b, n), np.tile(b, n), m).reshape(n, n)


def _compose_mismatch_dense(rep: Representation) -> np.ndarray:
    """n x n mask of h(a)∘h(b) != h(ab), one matrix product per row a."""
    n = rep.algebra.n
    M = np.stack([r.matrix() for r in rep.images]).astype(np.float32)
    want = M > 0
    T = rep.algebra.table(COMPOSE)
    mask = np.zeros((n, n), dtype=bool)
    for a in range(n):
        prod = np.matmul(M[a], M) > 0
        mask[a] = (prod != want[T[a]]).any(axis=(1, 2))
    return mask


def _collect(mask, witness, limit):
    """Turn an n x n (or n) boolean failure mask into witnesses and a count."""
    idx = np.argwhere(mask)
    return [witness(*map(int, row)) for row in idx[:limit]], int(len(idx))


def _domain_mask(bits: int, m: int) -> int:
    row = (1 << m) - 1
    return sum(1 << x for x in range(m) if bits >> (x * m) & row)


def _range_mask(bits: int, m: int) -> int:
    out = 0
    for x in range(m):
        out |= bits >> (x * m) & ((1 << m) - 1)
    return out


def verify_representation(
    rep: Representation,
    require_top_equiv: bool = False,
    check_i: bool = False,
    check_domran: bool = False,
    i_set=None,
    max_witnesses: int = 20,
) -> VerificationReport:
    """Check every symbol of ``rep.signature`` plus faithfulness.

    Order is read as preserve-and-reflect.  ``i_set`` overrides which
    elements count as i-elements for the optional injectivity check.
    """
    alg, m, sig = rep.algebra, rep.base_size, rep.signature
    bits_list = rep.bits()
    use_np = m * m <= 62
    B = np.asarray(bits_list, dtype=np.int64) if use_np else np.asarray(bits_list, dtype=object)
    full = (1 << (m * m)) - 1
    failures: dict[str, list] = {}
    counts: dict[str, int] = {}

    seen: dict[int, int] = {}
    collisions = []
    for a, b in enumerate(bits_list):
        if b in seen:
            collisions.append((seen[b], a))
        else:
            seen[b] = a

    def record(symbol, mask, witness):
        ws, cnt = _collect(mask, witness, max_witnesses)
        failures[symbol] = ws
        counts[symbol] = cnt

    if COMPOSE in sig:
        T = alg.table(COMPOSE)
        if m <= _VEC_LIMIT:
            diff = _compose_products(rep) ^ B[T]
            record(COMPOSE, diff != 0,
                   lambda a, b: Failure(COMPOSE, (a, b), _first_pair(int(diff[a, b]), m)))
        else:
            imgs = rep.images
            record(COMPOSE, _compose_mismatch_dense(rep), lambda a, b: Failure(
                COMPOSE, (a, b), _first_pair(compose_rel(imgs[a], imgs[b]).bits ^ imgs[T[a, b]].bits, m)))
    if MEET in sig:
        diff = B[alg.table(MEET)] ^ (B[:, None] & B[None, :])
        record(MEET, diff != 0,
               lambda a, b: Failure(MEET, (a, b), _first_pair(int(diff[a, b]), m)))
    if JOIN in sig:
        diff = B[alg.table(JOIN)] ^ (B[:, None] | B[None, :])
        record(JOIN, diff != 0,
               lambda a, b: Failure(JOIN, (a, b), _first_pair(int(diff[a, b]), m)))
    if COMPLEMENT in sig:
        universe = full
        if rep.semantics == RELATIVE:
            universe = 0
            for b in bits_list:
                universe |= b
        uni = np.asarray(universe, dtype=B.dtype) if use_np else universe
        diff = B[alg.table(COMPLEMENT)] ^ (B ^ uni)
        record(COMPLEMENT, diff != 0,
               lambda a: Failure(COMPLEMENT, (a,), _first_pair(int(diff[a]), m)))
    if ORDER in sig:
        contained = (B[:, None] & ~B[None, :]) == 0
        mismatch = contained != alg.table(ORDER)
        record(ORDER, mismatch, lambda a, b: Failure(ORDER, (a, b)))
    ident = Relation.identity(m).bits
    if CONST_E in sig:
        e = alg.e
        failures[CONST_E] = [] if bits_list[e] == ident else [
            Failure(CONST_E, (e,), _first_pair(bits_list[e] ^ ident, m))]
        counts[CONST_E] = len(failures[CONST_E])
    if CONST_ZERO in sig:
        z = alg.zero
        failures[CONST_ZERO] = [] if bits_list[z] == 0 else [
            Failure(CONST_ZERO, (z,), _first_pair(bits_list[z], m))]
        counts[CONST_ZERO] = len(failures[CONST_ZERO])
    top_equiv = None
    if CONST_TOP in sig:
        t = alg.top
        over = B & ~B[t]
        record(CONST_TOP, over != 0,
               lambda a: Failure(CONST_TOP, (a, t), _first_pair(int(over[a]), m)))
        top_equiv = is_equivalence(rep.images[t])
    elif require_top_equiv and alg.top is not None:
        top_equiv = is_equivalence(rep.images[alg.top])

    report = VerificationReport(
        faithful=not collisions,
        collisions=collisions,
        failures=failures,
        counts=counts,
        top_is_equivalence=top_equiv,
        require_top_equiv=require_top_equiv,
    )
    if require_top_equiv and alg.top is None:
        raise MissingTop("top equivalence requested but the algebra has no top")

    if check_i:
        if i_set is None:
            try:
                i_set = i_elements_via_meet(alg) if alg.meet is not None else i_elements_via_complement(alg)
            except Unavailable:
                i_set = None
        if i_set is not None:
            bad = sorted(a for a in i_set if not is_injective_partial_function(rep.images[a]))
            report.i_preserved = not bad
            report.i_failures = bad

    if check_domran and alg.top is not None:
        T = alg.table(COMPOSE)
        top = alg.top
        bad = []
        for kind, keys, conc in (
            ("dom", T[:, top], [_domain_mask(b, m) for b in bits_list]),
            ("ran", T[top, :], [_range_mask(b, m) for b in bits_list]),
        ):
            abstract_eq = keys[:, None] == keys[None, :]
            cm = np.asarray(conc, dtype=object)
            concrete_eq = cm[:, None] == cm[None, :]
            for a, b in np.argwhere(abstract_eq != concrete_eq)[:max_witnesses]:
                bad.append((kind, int(a), int(b)))
        report.domran_preserved = not bad
        report.domran_failures = bad
    return report


def preserves_composition(rep: Representation) -> bool:
    return verify_representation(rep.with_signature(Signature.of())).preserves(COMPOSE)


# -- quotient -------------------------------------------------------------

def quotient_classes(rep: Representation) -> list[list[int]]:
    """Classes of x ~ y  iff  x = y or h(e) is universal on {x, y}.

    The relation is closed transitively and every closure step is then
    checked against the definition; a mismatch raises, since with
    composition preserved ~ is already transitive.
    """
    e = rep.algebra.e
    if e is None:
        raise RepresentationError("quotient needs the constant e")
    E = rep.images[e]
    m = rep.base_size

    def sim(x, y):
        return x == y or ((x, y) in E and (y, x) in E and (x, x) in E and (y, y) in E)

    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in range(m):
        for y in range(x + 1, m):
            if sim(x, y):
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[max(rx, ry)] = min(rx, ry)
    groups: dict[int, list[int]] = {}
    for x in range(m):
        groups.setdefault(find(x), []).append(x)
    classes = sorted(groups.values())
    for cls in classes:
        for i, x in enumerate(cls):
            for y in cls[i + 1:]:
                if not sim(x, y):
                    raise RepresentationError(
                        f"~ is not transitive: {x} and {y} are linked only through other points")
    return classes


def project(rep: Representation, classes: Sequence[Sequence[int]]) -> Representation:
    """Image of ``rep`` under the map sending each point to its class index."""
    cls_of = {}
    for i, cls in enumerate(classes):
        for x in cls:
            cls_of[x] = i
    k = len(classes)
    images = [
        Relation.from_pairs(k, {(cls_of[x], cls_of[y]) for x, y in r.pairs()})
        for r in rep.images
    ]
    return rep.replace(base_size=k, images=images)


def quotient(rep: Representation) -> Representation:
    """Collapse base points on which e acts as the universal relation."""
    if not preserves_composition(rep):
        raise NotCompositionPreserving("quotient requires a composition-preserving representation")
    return project(rep, quotient_classes(rep))


# -- symmetric interior ---------------------------------------------------

def symmetric_interior(rep: Representation) -> Representation:
    """Intersect every image with the symmetric part of h(⊤)."""
    alg = rep.algebra
    if alg.top is None:
        raise MissingTop("symmetric interior needs the constant top")
    if not (MEET in rep.signature or ORDER in rep.signature):
        raise RepresentationError("symmetric interior needs meet or order in the signature")
    inner = symmetric_part(rep.images[alg.top])
    return rep.replace(images=[r & inner for r in rep.images])


def restrict_base(rep: Representation, points: Sequence[int]) -> Representation:
    """Keep only ``points`` (renumbered in increasing order)."""
    pts = sorted(points)
    if not pts:
        raise RepresentationError("cannot restrict to an empty base")
    pos = {x: i for i, x in enumerate(pts)}
    images = [
        Relation.from_pairs(len(pts), ((pos[x], pos[y]) for x, y in r.pairs() if x in pos and y in pos))
        for r in rep.images
    ]
    return rep.replace(base_size=len(pts), images=images)


def used_points(rep: Representation) -> list[int]:
    fld = set()
    for r in rep.images:
        fld |= r.field()
    return sorted(fld)


# -- inflation and isomorphism --------------------------------------------

def inflate(rep: Representation, fibers: Sequence[int]) -> Representation:
    """Replace base point x by ``fibers[x]`` copies; copies inherit x's pairs."""
    if len(fibers) != rep.base_size or any(int(f) < 1 for f in fibers):
        raise RepresentationError("need one positive fiber size per base point")
    proj = [x for x, f in enumerate(fibers) for _ in range(int(f))]
    fiber = [[] for _ in fibers]
    for u, x in enumerate(proj):
        fiber[x].append(u)
    k = len(proj)
    images = [
        Relation.from_pairs(k, ((u, v) for x, y in r.pairs() for u in fiber[x] for v in fiber[y]))
        for r in rep.images
    ]
    return rep.replace(base_size=k, images=images)


def base_isomorphism(rep1: Representation, rep2: Representation) -> list[int] | None:
    """A bijection ``phi`` of base points with h2(a) = phi[h1(a)] for all a, or None."""
    if rep1.algebra.n != rep2.algebra.n or rep1.base_size != rep2.base_size:
        return None
    m = rep1.base_size

    def keys(rep):
        k = [[0] * m for _ in range(m)]
        for a, r in enumerate(rep.images):
            for x, y in r.pairs():
                k[x][y] |= 1 << a
        return k

    k1, k2 = keys(rep1), keys(rep2)
    phi = [-1] * m
    used = [False] * m

    def extend(x):
        if x == m:
            return True
        for t in range(m):
            if used[t] or k1[x][x] != k2[t][t]:
                continue
            if all(k1[x][y] == k2[t][phi[y]] and k1[y][x] == k2[phi[y]][t] for y in range(x)):
                phi[x], used[t] = t, True
                if extend(x + 1):
                    return True
                phi[x], used[t] = -1, False
        return False

    return list(phi) if extend(0) else None


# -- the injectivisation pipeline -----------------------------------------

@dataclass
class PipelineReport:
    route: str
    representation: Representation
    verification: VerificationReport
    trail: list

    @property
    def ok(self) -> bool:
        return self.verification.ok

    def to_json(self) -> dict:
        alg = self.representation.algebra
        return {
            "route": self.route,
            "ok": self.ok,
            "trail": self.trail,
            "final_base_size": self.representation.base_size,
            "verification": self.verification.to_json(alg),
        }

    def render(self) -> str:
        lines = [f"route: {self.route}"]
        for step in self.trail:
            lines.append(f"- {step['step']}: " + ", ".join(
                f"{k}={v}" for k, v in step.items() if k != "step"))
        lines.append(self.verification.render(self.representation.algebra))
        return "\n".join(lines)


def injectivize_pipeline(rep: Representation, finite_base: bool = True) -> PipelineReport:
    """Turn a lattice-ordered or ordered-complemented representation into a
    {·, i, ⊟, ⊡}-embedding: symmetric interior, drop unused points, quotient,
    then verify.

    Without ``finite_base`` the interior step is skipped and h(⊤) must
    already be an equivalence relation.
    """
    alg = rep.algebra
    for key in ("e", "zero", "top"):
        if key not in alg.constants:
            raise PreconditionFailed("constants", f"the algebra has no {key}")
    try:
        alg = ensure_div(alg)
    except Unavailable as exc:
        raise PreconditionFailed("div", str(exc)) from None
    if alg.meet is None:
        raise PreconditionFailed("normality", "dom and ran need the meet table")
    norm = normality_check(alg)
    if not norm:
        a, side = norm.witnesses[0]
        raise PreconditionFailed("normality", f"{side} law fails at {alg.names[a]}")

    sig = rep.signature
    if MEET in sig and JOIN in sig:
        route, need = "lattice-ordered", LATTICE_ORDERED
        i_set = i_elements_via_meet(alg)
    elif ORDER in sig and COMPLEMENT in sig:
        route, need = "ordered-complemented", ORDERED_COMPLEMENTED
        if alg.complement is None:
            raise PreconditionFailed("signature", "ordered-complemented route needs the complement table")
        i_set = i_elements_via_complement(alg)
    else:
        raise PreconditionFailed("signature", "needs {compose, meet, join} or {compose, order, complement}")

    rep = rep.replace(algebra=alg)
    check = verify_representation(rep.with_signature(need))
    if not check.ok:
        raise PreconditionFailed(f"preserves {route} operations", ", ".join(check.failed_checks()))
    trail = [{"step": "input", "base_size": rep.base_size, "route": route}]

    top = alg.top
    if finite_base:
        rep = symmetric_interior(rep)
        trail.append({"step": "symmetric-interior", "base_size": rep.base_size,
                      "top_pairs": len(rep.images[top])})
    elif not is_equivalence(rep.images[top]):
        raise PreconditionFailed("top-equivalence", "h(top) is not an equivalence relation")
    pts = used_points(rep)
    if not pts:
        raise PreconditionFailed("nonempty-base", "no base point survives the interior")
    if len(pts) < rep.base_size:
        rep = restrict_base(rep, pts)
    trail.append({"step": "restrict-to-field", "base_size": rep.base_size})
    classes = quotient_classes(rep)
    rep = quotient(rep)
    trail.append({"step": "quotient", "base_size": rep.base_size,
                  "merged_classes": sum(1 for c in classes if len(c) > 1)})
    final = verify_representation(rep, require_top_equiv=True, check_i=True,
                                  check_domran=True, i_set=i_set)
    trail.append({"step": "verify", "ok": final.ok, "i_elements": len(i_set)})
    return PipelineReport(route=route, representation=rep, verification=final, trail=trail)


# -- fixed points and strong complements ---------------------------------

def find_idempotent_fixed_point(rep: Representation, f: int) -> int:
    """A point x with (x, x) in h(f) but not in h(0), for idempotent f.

    Start from a pair of h(f) outside h(0) and keep splitting the pair
    (x, z) through its smallest witness of h(f) = h(f)∘h(f); the witnesses
    form a descending h(f)-path that must revisit a point, and that point
    carries a loop.
    """
    alg = rep.algebra
    if alg.zero is None:
        raise RepresentationError("the algebra has no zero")
    if alg.compose[f][f] != f:
        raise NotIdempotent(f"{alg.names[f]} is not idempotent")
    F, Z = rep.images[f], rep.images[alg.zero]
    if F == Z:
        raise NoDistinction(f"h({alg.names[f]}) = h(0)")
    pairs = [p for p in F.pairs() if p not in Z]
    if not pairs:
        raise NoDistinction(f"h({alg.names[f]}) is contained in h(0); order is not preserved")
    m = rep.base_size
    x, cur = pairs[0]
    visited = set()
    for _ in range(m + 1):
        z = next((z for z in range(m) if (x, z) in F and (z, cur) in F), None)
        if z is None:
            raise RepresentationError(f"({x}, {cur}) in h(f) has no witness in h(f)∘h(f)")
        if z in visited:
            if (z, z) not in F or (z, z) in Z:
                raise RepresentationError(f"witness chain closed at {z} without a usable loop")
            return z
        visited.add(z)
        cur = z
    raise RepresentationError("witness chain did not close")  # unreachable for finite bases


def check_strong_complement(concrete: ConcreteAlgebra) -> list[Violation]:
    """Every idempotent f with idempotent −f and f(−f) = −f = (−f)f must be the full square."""
    if concrete.semantics != UNIVERSAL:
        raise WrongSemantics("strong complement check needs universal complementation")
    m = concrete.base_size
    full = Relation.full(m)
    members = set(concrete.relations)
    out = []
    for i, f in enumerate(concrete.relations):
        nf = Relation(m, full.bits & ~f.bits)
        if nf not in members:
            raise RepresentationError("algebra is not closed under complement")
        if compose_rel(f, f) != f or compose_rel(nf, nf) != nf:
            continue
        if compose_rel(f, nf) == nf and compose_rel(nf, f) == nf and f != full:
            out.append(Violation("strong-complement", (i,)))
    return out
