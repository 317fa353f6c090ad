"""The eight acceptance criteria, each under its wall-clock limit.

Every test prints one ``[PASS]``/``[FAIL]`` line (also collected in the
pytest terminal summary).  Expected values come from the set-of-pairs
oracles in conftest or from the exhaustive oracles, never from the code
under test.
"""
import itertools
import json
import random
import shutil
import subprocess
import sys
import time
from contextlib import contextmanager

import pytest

from conftest import (
    ACCEPTANCE_LINES, FIXTURES, set_compose, set_injective_function, set_square,
)
from relrep.algebra import (
    BOOLEAN_MONOID, COMPLEMENT, COMPOSE, CONST_E, CONST_TOP, CONST_ZERO, FULL, JOIN,
    LATTICE_ORDERED, MEET, ORDER, ORDERED_COMPLEMENTED, FiniteAlgebra, Signature,
    i_elements_via_complement, i_elements_via_meet, idempotents, normality_check,
    validate_algebra,
)
from relrep.errors import CapExceeded
from relrep.partial_group import (
    PartialGroup, cayley_table, cyclic_group, embed_oracle, embed_search, generate_group,
    restrict_group, validate_partial_group,
)
from relrep.relations import (
    RELATIVE, UNIVERSAL, Relation, all_relations, closure_generate, full_algebra,
)
from relrep.representation import (
    check_strong_complement, find_idempotent_fixed_point,
    inclusion_representation, inflate, injectivize_pipeline, quotient, verify_representation,
)
from relrep.repsearch import SearchConfig, exhaustive_oracle, search_base


@contextmanager
def criterion(number, title, limit):
    info = {"summary": ""}
    start = time.perf_counter()
    status = "FAIL"
    try:
        yield info
        elapsed = time.perf_counter() - start
        assert elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s"
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        line = f"[{status}] {number}. {title}: {elapsed:.2f} s (limit {limit} s) {info['summary']}".rstrip()
        print(line)
        ACCEPTANCE_LINES.append(line)


def pairs(r):
    return set(r.pairs())


def doubled(rep):
    """Two copies of the base plus h(a) again from copy 1 into copy 2 (top not symmetric)."""
    m = rep.base_size
    images = []
    for r in rep.images:
        P = r.pairs()
        images.append(Relation.from_pairs(2 * m, [*P, *((x + m, y + m) for x, y in P),
                                                   *((x, y + m) for x, y in P)]))
    return rep.replace(base_size=2 * m, images=images, semantics=RELATIVE)


FIBERS = {
    1: [(1,), (2,), (3,)],
    2: [(1, 1), (2, 1), (1, 3), (2, 2), (3, 3)],
    3: [(1, 1, 1), (2, 1, 1), (1, 2, 3), (3, 3, 3)],
}


# -- 1 ---------------------------------------------------------------------------

def test_criterion_1_i_relation_agreement():
    with criterion(1, "i-relation agreement on the 16-element full algebra", 1.0) as info:
        ca = full_algebra(2, FULL)
        brute = {i for i, r in enumerate(ca.relations) if set_injective_function(pairs(r))}
        via_meet = i_elements_via_meet(ca.algebra)
        via_comp = i_elements_via_complement(ca.algebra)
        info["summary"] = f"meet={len(via_meet)} complement={len(via_comp)} brute-force={len(brute)}"
        assert len(brute) == 7
        assert via_meet == via_comp == brute


# -- 2 ---------------------------------------------------------------------------

def test_criterion_2_quotient_suite():
    with criterion(2, "quotient preserves what the input preserved", 30.0) as info:
        rng = random.Random(20240601)
        optional = [MEET, JOIN, COMPLEMENT, CONST_ZERO, CONST_TOP]
        done, failures, checked_symbols, doubled_count = 0, [], 0, 0
        while done < 220:
            m = rng.choice([1, 2, 3])
            sig = Signature.of(CONST_E, *[s for s in optional if rng.random() < 0.5])
            semantics = rng.choice([UNIVERSAL, RELATIVE])
            gens = [Relation(m, rng.randrange(1 << (m * m))) for _ in range(rng.randint(1, 2))]
            try:
                ca = closure_generate(gens, sig, semantics, cap=256)
            except CapExceeded:
                continue
            original = inclusion_representation(ca)
            rep = inflate(original, [rng.randint(1, 3) for _ in range(m)])
            if semantics == RELATIVE and COMPLEMENT not in sig and rng.random() < 0.25:
                rep = doubled(rep)
                doubled_count += 1
            before = verify_representation(rep)
            after = verify_representation(quotient(rep))
            done += 1
            if not (after.faithful and after.preserves(COMPOSE)):
                failures.append((done, "faithful/compose", after.failed_checks()))
            for s in sig:
                if before.preserves(s):
                    checked_symbols += 1
                    if not after.preserves(s):
                        failures.append((done, s))
        info["summary"] = (f"{done} representations ({doubled_count} doubled), "
                           f"{checked_symbols} symbol checks, {len(failures)} failures")
        assert done >= 200
        assert failures == []


# -- 3 ---------------------------------------------------------------------------

def _pipeline_fixtures():
    for m in (1, 2, 3):
        ca = full_algebra(m, FULL)
        rep = inclusion_representation(ca, FULL)
        for fib in FIBERS[m]:
            yield f"full{m}{fib}", ca, inflate(rep, fib)
        if m == 2:
            yield "full2-doubled", ca, doubled(rep)


def _independent_pipeline_checks(ca, out):
    """Re-check the pipeline output with the set-based oracles."""
    alg = ca.algebra
    k = out.base_size
    T = pairs(out(alg.top))
    problems = []
    if k == 0 or {(x, x) for x in range(k)} - T or T != {(y, x) for x, y in T} or set_compose(T, T) - T:
        problems.append("top is not an equivalence on a nonempty base")
    for a, r in enumerate(ca.relations):
        if set_injective_function(pairs(r)) and not set_injective_function(pairs(out(a))):
            problems.append(f"i-element {alg.names[a]} not injective")
    sq_top = set_square(ca.base_size)
    for side, abstract, concrete in (
        ("dom", lambda r: frozenset(set_compose(pairs(r), sq_top)), lambda r: frozenset(x for x, _ in r.pairs())),
        ("ran", lambda r: frozenset(set_compose(sq_top, pairs(r))), lambda r: frozenset(y for _, y in r.pairs())),
    ):
        part_a, part_c = {}, {}
        for a, r in enumerate(ca.relations):
            part_a.setdefault(abstract(r), set()).add(a)
            part_c.setdefault(concrete(out(a)), set()).add(a)
        if sorted(map(sorted, part_a.values())) != sorted(map(sorted, part_c.values())):
            problems.append(f"{side} classes differ")
    return problems


def test_criterion_3_interior_and_pipeline():
    with criterion(3, "interior + pipeline on full algebras and inflations", 60.0) as info:
        runs, failures, seen = 0, [], set()
        for name, ca, rep in _pipeline_fixtures():
            if ca.base_size not in seen:
                seen.add(ca.base_size)
                assert validate_algebra(ca.algebra, BOOLEAN_MONOID) == []
                assert normality_check(ca.algebra)
            routes = [LATTICE_ORDERED] if rep.semantics == RELATIVE else [LATTICE_ORDERED, ORDERED_COMPLEMENTED]
            for sig in routes:
                runs += 1
                pr = injectivize_pipeline(rep.with_signature(sig))
                if not pr.ok:
                    failures.append((name, str(sig), pr.verification.failed_checks()))
                    continue
                problems = _independent_pipeline_checks(ca, pr.representation)
                if problems:
                    failures.append((name, str(sig), problems))
        info["summary"] = f"{runs} pipeline runs, {len(failures)} failures"
        assert failures == []


# -- 4 ---------------------------------------------------------------------------

def test_criterion_4_strong_complement_sweep():
    with criterion(4, "strong-complement sweep, bases 2 and 3", 60.0) as info:
        sig = Signature.of(COMPLEMENT)
        algebras, violations, hypothesis_hits = 0, [], 0
        for m in (2, 3):
            full = Relation.full(m)
            for g in all_relations(m):
                ca = closure_generate([g], sig, UNIVERSAL, cap=1 << (m * m))
                algebras += 1
                violations += [(m, g.bits, v.witness) for v in check_strong_complement(ca)]
                # independent count of elements meeting the hypotheses: all must be the full square
                for f in ca.relations:
                    F = pairs(f)
                    NF = set_square(m) - F
                    if (set_compose(F, F) == F and set_compose(NF, NF) == NF
                            and set_compose(F, NF) == NF == set_compose(NF, F)):
                        hypothesis_hits += 1
                        if f != full:
                            violations.append((m, g.bits, "oracle", f.bits))
        info["summary"] = f"{algebras} algebras, {hypothesis_hits} hypothesis hits, {len(violations)} violations"
        assert violations == []


# -- 5 ---------------------------------------------------------------------------

def _assoc(t):
    n = len(t)
    return all(t[t[a][b]][c] == t[a][t[b][c]] for a, b, c in itertools.product(range(n), repeat=3))


def _tables(n):
    for flat in itertools.product(range(n), repeat=n * n):
        yield [list(flat[i * n:(i + 1) * n]) for i in range(n)]


def _semilattice(t):
    n = len(t)
    return _assoc(t) and all(t[a][a] == a for a in range(n)) and all(
        t[a][b] == t[b][a] for a in range(n) for b in range(n))


def _partial_orders(n):
    for flat in itertools.product([False, True], repeat=n * n):
        le = [list(flat[i * n:(i + 1) * n]) for i in range(n)]
        if (all(le[a][a] for a in range(n))
                and not any(le[a][b] and le[b][a] and a != b for a in range(n) for b in range(n))
                and all(le[a][c] or not (le[a][b] and le[b][c])
                        for a, b, c in itertools.product(range(n), repeat=3))):
            yield le


def _search_instances():
    semigroups = {n: [t for t in _tables(n) if _assoc(t)] for n in (1, 2, 3)}
    lattices = {n: [t for t in _tables(n) if _semilattice(t)] for n in (1, 2, 3)}
    orders = {n: list(_partial_orders(n)) for n in (1, 2, 3)}
    rng = random.Random(5)
    out = {"compose": [], "compose+meet": [], "compose+order": []}
    for n in (1, 2):
        out["compose"] += [FiniteAlgebra(c) for c in semigroups[n]]
        out["compose+meet"] += [FiniteAlgebra(c, meet=mt) for c in semigroups[n] for mt in lattices[n]]
        out["compose+order"] += [FiniteAlgebra(c, order=o) for c in semigroups[n] for o in orders[n]]
    out["compose"] += [FiniteAlgebra(c) for c in rng.sample(semigroups[3], 60)]
    out["compose+meet"] += [FiniteAlgebra(rng.choice(semigroups[3]), meet=rng.choice(lattices[3]))
                            for _ in range(60)]
    out["compose+order"] += [FiniteAlgebra(rng.choice(semigroups[3]), order=rng.choice(orders[3]))
                             for _ in range(60)]
    return out


SIGS = {"compose": Signature.of(), "compose+meet": Signature.of(MEET), "compose+order": Signature.of(ORDER)}


def test_criterion_5_search_vs_oracle():
    with criterion(5, "search agrees with the exhaustive oracle", 120.0) as info:
        instances = _search_instances()
        total, found, mismatches = 0, 0, []
        for label, algs in instances.items():
            sig = SIGS[label]
            for alg in algs:
                assert validate_algebra(alg, sig) == []
                for m in (1, 2):
                    total += 1
                    out = search_base(alg, sig, m, SearchConfig(max_base=2))
                    oracle = exhaustive_oracle(alg, sig, m)
                    found += out.found
                    if out.found != bool(oracle):
                        mismatches.append((label, alg.compose, m, out.status, len(oracle)))
                    if out.found and not verify_representation(out.representation).ok:
                        mismatches.append((label, alg.compose, m, "unsound"))
        n3 = {k: sum(a.n == 3 for a in v) for k, v in instances.items()}
        info["summary"] = f"{total} (algebra, base) pairs, {found} found, n=3 samples {n3}, {len(mismatches)} mismatches"
        assert all(v >= 50 for v in n3.values())
        assert mismatches == []


# -- 6 ---------------------------------------------------------------------------

def _order_preserving_fixtures():
    for m in (1, 2, 3):
        rep = inclusion_representation(full_algebra(m, FULL), FULL)
        for fib in FIBERS[m]:
            yield inflate(rep, fib)
    rng = random.Random(6)
    sig = Signature.of(ORDER, CONST_ZERO, MEET)
    for _ in range(40):
        m = rng.choice([2, 3])
        ca = closure_generate([Relation(m, rng.randrange(1 << (m * m))) for _ in range(2)], sig, cap=512)
        yield inflate(inclusion_representation(ca), [rng.randint(1, 2) for _ in range(m)])
    yield doubled(inclusion_representation(full_algebra(2, FULL), LATTICE_ORDERED))


def test_criterion_6_idempotent_fixed_point():
    with criterion(6, "fixed point of every nonzero idempotent", 10.0) as info:
        reps, calls, failures = 0, 0, []
        for rep in _order_preserving_fixtures():
            alg = rep.algebra
            chk = verify_representation(rep.with_signature(Signature.of(ORDER)))
            assert chk.preserves(COMPOSE) and chk.preserves(ORDER)
            reps += 1
            Z = pairs(rep(alg.zero))
            for f in sorted(idempotents(alg) - {alg.zero}):
                calls += 1
                x = find_idempotent_fixed_point(rep, f)
                if (x, x) not in pairs(rep(f)) or (x, x) in Z:
                    failures.append((reps, alg.names[f], x))
        info["summary"] = f"{reps} representations, {calls} idempotents, {len(failures)} failures"
        assert failures == []


# -- 7 ---------------------------------------------------------------------------

def _groups():
    yield from ((f"Z{n}", cyclic_group(n)) for n in range(1, 7))
    yield "Z2xZ2", cayley_table(generate_group([(1, 0, 3, 2), (2, 3, 0, 1)]))
    yield "S3", cayley_table(generate_group([(1, 0, 2), (1, 2, 0)]))


def _small_partial_groups():
    """Every table on at most 3 elements whose identity row and column are correct or undefined."""
    for n in (1, 2, 3):
        free = [(a, b) for a in range(1, n) for b in range(1, n)]
        id_cells = [(0, 0)] + [(0, j) for j in range(1, n)] + [(j, 0) for j in range(1, n)]
        for id_mask in itertools.product([False, True], repeat=len(id_cells)):
            for vals in itertools.product([None, *range(n)], repeat=len(free)):
                t = [[None] * n for _ in range(n)]
                for (a, b), on in zip(id_cells, id_mask):
                    t[a][b] = (a or b) if on else None
                for (a, b), v in zip(free, vals):
                    t[a][b] = v
                pg = PartialGroup(tuple(map(tuple, t)), 0)
                if validate_partial_group(pg).ok:
                    yield pg


def test_criterion_7_partial_group_embedding():
    with criterion(7, "partial-group embeddings", 60.0) as info:
        problems = []
        z4 = restrict_group(cyclic_group(4), [0, 1])
        if not (embed_search(z4, 3).found and embed_search(z4, 3).degree == 3):
            problems.append("Z4 restriction not found at degree 3")
        if embed_search(z4, 1).found or embed_oracle(z4, 1):
            problems.append("Z4 restriction embeds at degree 1")

        restrictions = 0
        oracle_cases = []
        for name, G in _groups():
            order = len(G)
            for k in range(order):  # every sqrt containing the identity
                for extra in itertools.combinations(range(1, order), k):
                    pg = restrict_group(G, (0, *extra))
                    restrictions += 1
                    if not validate_partial_group(pg).ok:
                        problems.append((name, extra, "invalid restriction"))
                        continue
                    out = embed_search(pg, order)
                    if not out.found:
                        problems.append((name, extra, out.describe()))
                    if pg.n <= 3:
                        oracle_cases.append(pg)
        oracle_cases += list(_small_partial_groups())
        for pg in oracle_cases:
            first = next((d for d in (1, 2, 3) if embed_oracle(pg, d)), None)
            out = embed_search(pg, 3)
            if (first is None) != (not out.found) or (first is not None and out.degree != first):
                problems.append(("oracle", pg.table, first, out.describe()))
        info["summary"] = (f"{restrictions} group restrictions, {len(oracle_cases)} oracle cases, "
                           f"{len(problems)} problems")
        assert problems == []


# -- 8 ---------------------------------------------------------------------------

def _cli():
    exe = shutil.which("relrep")
    return [exe] if exe else [sys.executable, "-m", "relrep.cli"]


@pytest.mark.parametrize("fixture", ["lattice-ordered.rep.json", "ordered-complemented.rep.json"])
def test_criterion_8_pipeline_via_cli(fixture, tmp_path):
    route = fixture.split(".")[0]
    with criterion(8, f"CLI pipeline end to end ({route})", 10.0) as info:
        proc = subprocess.run([*_cli(), "pipeline", str(FIXTURES / fixture), "--json",
                               "-o", str(tmp_path / "out.rep.json")],
                              capture_output=True, text=True)
        info["summary"] = f"exit {proc.returncode}"
        assert proc.returncode == 0, proc.stderr
        rep = json.loads(proc.stdout)
        v = rep["result"]["verification"]
        assert rep["ok"] and rep["result"]["route"] == route
        assert v["faithful"] and v["top_is_equivalence"] and v["i_preserved"] and v["domran_preserved"]
        assert all(c["ok"] for c in v["checks"].values())
        assert (tmp_path / "out.rep.json").exists()
