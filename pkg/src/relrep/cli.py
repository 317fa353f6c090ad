"""Command-line front end: ``relrep <command> FILE [options]``.

Exit status: 0 when every check passes or the searched object is found,
1 when a check fails or nothing is found within the bounds, 2 for bad
input or inconsistent options.  Reports go to stdout (``--json`` for the
machine form), diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .algebra import (
    COMPLEMENT, FiniteAlgebra, Signature, advisory_warnings, analyze, validate_algebra,
)
from .errors import (
    AlgebraError, MissingTable, NotCompositionPreserving, ParseError,
    PreconditionFailed, RelrepError,
)
from .formats import (
    dumps, embedding_to_json, load_algebra, load_partial_group,
    load_representation, partial_group_to_json, representation_to_json,
)
from .partial_group import embed_search, validate_partial_group
from .relations import SEMANTICS
from .representation import (
    Representation, injectivize_pipeline, quotient, symmetric_interior,
    verify_representation,
)
from .repsearch import SearchConfig, search_representation

LOG = logging.getLogger("relrep")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(RelrepError):
    """Flags that contradict each other or the input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _signature(text):
    try:
        return Signature.parse(text)
    except AlgebraError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="relrep", description="Representability workbench for finite relation algebras.")
    p.add_argument("--version", action="version", version=f"relrep {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, sig=True, sem=True):
        sp.add_argument("--json", action="store_true", help="print the machine-readable report")
        sp.add_argument("-o", "--output", type=Path, help="write the result file here")
        if sig:
            sp.add_argument("--signature", type=_signature,
                            help="comma-separated symbols, e.g. compose,meet,join")
        if sem:
            sp.add_argument("--complement", choices=SEMANTICS,
                            help="complement semantics (relative or universal)")

    sp = sub.add_parser("validate", help="check an algebra against the laws of a signature")
    sp.add_argument("file")
    common(sp, sem=False)

    sp = sub.add_parser("analyze", help="derived elements: div, i-elements, domain/range classes")
    sp.add_argument("file")
    common(sp, sig=False, sem=False)

    sp = sub.add_parser("check-rep", help="verify a representation file")
    sp.add_argument("file")
    common(sp)
    sp.add_argument("--require-top-equiv", action="store_true")
    sp.add_argument("--check-i", action="store_true", help="i-elements must map to injective partial functions")
    sp.add_argument("--check-domran", action="store_true", help="domain/range classes must match concretely")

    sp = sub.add_parser("search-rep", help="search for a finite representation")
    sp.add_argument("file")
    common(sp)
    sp.add_argument("--require-top-equiv", action="store_true")
    sp.add_argument("--max-base", type=_positive, default=4)
    sp.add_argument("--node-limit", type=_positive, default=1_000_000)
    sp.add_argument("--no-symmetry-breaking", action="store_true")

    for name, text in (("quotient", "collapse points where the identity acts universally"),
                       ("interior", "replace every image by its symmetric interior")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("file")
        common(sp, sig=False, sem=False)

    sp = sub.add_parser("pipeline", help="interior, quotient and verify an injectivity-preserving embedding")
    sp.add_argument("file")
    common(sp)
    sp.add_argument("--top-is-equivalence", action="store_true",
                    help="skip the interior step; h(top) must already be an equivalence")

    sp = sub.add_parser("pg-validate", help="check the partial-group axioms")
    sp.add_argument("file")
    common(sp, sig=False, sem=False)

    sp = sub.add_parser("pg-embed", help="search for an embedding into a symmetric group")
    sp.add_argument("file")
    common(sp, sig=False, sem=False)
    sp.add_argument("--max-degree", type=_positive, default=6)
    sp.add_argument("--node-limit", type=_positive, default=1_000_000)
    return p


# -- helpers ------------------------------------------------------------------

def _config(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("verbose",) or v is None:
            continue
        out[k] = str(v) if isinstance(v, (Path, Signature)) else v
    return out


def _emit(args, result: dict, text: str, ok: bool):
    report = {"tool": "relrep", "version": __version__, "command": args.command,
              "config": _config(args), "ok": ok, "result": result}
    sys.stdout.write(dumps(report) if args.json else text.rstrip("\n") + "\n")
    return report


def _write(path: Path | None, doc: dict):
    if path is not None:
        path.write_text(dumps(doc), encoding="utf-8")
        LOG.info("wrote %s", path)


def _rep_with_flags(args, rep: Representation) -> Representation:
    sig = getattr(args, "signature", None) or rep.signature
    sem = getattr(args, "complement", None) or rep.semantics
    if getattr(args, "complement", None) and COMPLEMENT not in sig:
        raise UsageError("--complement given but the signature has no complement")
    rep.algebra.require(sig)
    if getattr(args, "require_top_equiv", False) and rep.algebra.top is None:
        raise UsageError("--require-top-equiv needs an algebra with a top element")
    return rep.replace(signature=sig, semantics=sem)


def _output_path(args, rf) -> str | None:
    """Keep a by-path algebra reference when the output sits next to it."""
    if rf.algebra_path is None or args.output is None:
        return None
    src = Path(args.file).parent / rf.algebra_path
    try:
        return str(src.resolve().relative_to(args.output.resolve().parent))
    except ValueError:
        return str(src.resolve())


# -- commands -----------------------------------------------------------------

def cmd_validate(args):
    af = load_algebra(args.file)
    sig = args.signature or af.signature or af.algebra.signature()
    af.algebra.require(sig)
    violations = validate_algebra(af.algebra, sig)
    advice = advisory_warnings(af.algebra, sig)
    nm = af.algebra.names

    def wit(v):
        return [nm[x] if isinstance(x, int) else x for x in v.witness]

    result = {"signature": sig.as_list(),
              "violations": [{"law": v.law, "witness": wit(v)} for v in violations],
              "warnings": [{"law": v.law, "witness": wit(v)} for v in advice]}
    lines = [f"signature: {sig}", "valid" if not violations else "INVALID"]
    lines += [f"  violation: {v.law} at {wit(v)}" for v in violations]
    lines += [f"  warning: {v.law} at {wit(v)}" for v in advice]
    ok = not violations
    report = _emit(args, result, "\n".join(lines), ok)
    _write(args.output, report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_analyze(args):
    af = load_algebra(args.file)
    res = analyze(af.algebra).to_json(af.algebra)
    text = "\n".join(f"{k}: {v}" for k, v in sorted(res.items()))
    report = _emit(args, res, text, True)
    _write(args.output, report)
    return EXIT_OK


def cmd_check_rep(args):
    rf = load_representation(args.file)
    rep = _rep_with_flags(args, rf.representation)
    rep_report = verify_representation(rep, require_top_equiv=args.require_top_equiv,
                                       check_i=args.check_i, check_domran=args.check_domran)
    res = {"verification": rep_report.to_json(rep.algebra),
           "representation": representation_to_json(rep)}
    report = _emit(args, res, rep_report.render(rep.algebra), rep_report.ok)
    _write(args.output, report)
    return EXIT_OK if rep_report.ok else EXIT_FAIL


def cmd_search_rep(args):
    af = load_algebra(args.file)
    alg: FiniteAlgebra = af.algebra
    sig = args.signature or af.signature or alg.signature()
    if args.complement and COMPLEMENT not in sig:
        raise UsageError("--complement given but the signature has no complement")
    alg.require(sig)
    if args.require_top_equiv and alg.top is None:
        raise UsageError("--require-top-equiv needs an algebra with a top element")
    violations = validate_algebra(alg, sig)
    if violations:
        for v in violations:
            print(f"relrep: invalid algebra: {v}", file=sys.stderr)
        return EXIT_USAGE
    cfg = SearchConfig(max_base=args.max_base, semantics=args.complement or "universal",
                       require_top_equiv=args.require_top_equiv, node_limit=args.node_limit,
                       symmetry_breaking=not args.no_symmetry_breaking)
    out = search_representation(alg, sig, cfg)
    res = {"status": out.status, "bound": out.bound, "nodes": out.nodes,
           "nodes_per_base": {str(k): v for k, v in out.nodes_per_base.items()}}
    if out.found:
        res["representation"] = representation_to_json(out.representation)
        _write(args.output, representation_to_json(out.representation))
    _emit(args, res, f"{out.describe()} ({out.nodes} nodes)", out.found)
    return EXIT_OK if out.found else EXIT_FAIL


def _transform(args, fn, label):
    rf = load_representation(args.file)
    rep = rf.representation
    try:
        new = fn(rep)
    except NotCompositionPreserving as exc:
        _emit(args, {"error": str(exc)}, f"{label} failed: {exc}", False)
        return EXIT_FAIL
    doc = representation_to_json(new, _output_path(args, rf))
    _write(args.output, doc)
    text = f"{label}: base size {rep.base_size} -> {new.base_size}"
    _emit(args, {"base_size": new.base_size, "representation": representation_to_json(new)}, text, True)
    return EXIT_OK


def cmd_quotient(args):
    return _transform(args, quotient, "quotient")


def cmd_interior(args):
    return _transform(args, symmetric_interior, "interior")


def cmd_pipeline(args):
    rf = load_representation(args.file)
    rep = _rep_with_flags(args, rf.representation)
    try:
        pr = injectivize_pipeline(rep, finite_base=not args.top_is_equivalence)
    except PreconditionFailed as exc:
        _emit(args, {"precondition": exc.hypothesis, "detail": exc.detail}, str(exc), False)
        return EXIT_FAIL
    _write(args.output, representation_to_json(pr.representation, _output_path(args, rf)))
    res = pr.to_json()
    res["representation"] = representation_to_json(pr.representation)
    _emit(args, res, pr.render(), pr.ok)
    return EXIT_OK if pr.ok else EXIT_FAIL


def cmd_pg_validate(args):
    pg = load_partial_group(args.file)
    rep = validate_partial_group(pg)
    nm = pg.names

    def wit(v):
        return [nm[x] if isinstance(x, int) else x for x in v.witness]

    res = {"violations": [{"law": v.law, "witness": wit(v)} for v in rep.violations],
           "sqrt": [nm[a] for a in sorted(rep.sqrt)] if rep.sqrt is not None else None}
    lines = ["valid square partial group" if rep.ok else "INVALID"]
    lines += [f"  violation: {v.law} at {wit(v)}" for v in rep.violations]
    report = _emit(args, res, "\n".join(lines), rep.ok)
    _write(args.output, report)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_pg_embed(args):
    pg = load_partial_group(args.file)
    out = embed_search(pg, args.max_degree, node_limit=args.node_limit)
    res = {"status": out.status, "degree": out.degree, "nodes": out.nodes,
           "nodes_per_degree": {str(k): v for k, v in out.nodes_per_degree.items()},
           "partial_group": partial_group_to_json(pg)}
    lines = [f"{out.describe()} ({out.nodes} nodes)"]
    if out.found:
        emb = embedding_to_json(pg, out.embedding, out.degree)
        res["embedding"] = emb["embedding"]
        _write(args.output, emb)
        lines += [f"  {pg.names[a]} -> {list(p)}" for a, p in enumerate(out.embedding)]
    _emit(args, res, "\n".join(lines), out.found)
    return EXIT_OK if out.found else EXIT_FAIL


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "check-rep": cmd_check_rep,
    "search-rep": cmd_search_rep,
    "quotient": cmd_quotient,
    "interior": cmd_interior,
    "pipeline": cmd_pipeline,
    "pg-validate": cmd_pg_validate,
    "pg-embed": cmd_pg_embed,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"relrep: parse error: {exc}", file=sys.stderr)
    except (UsageError, MissingTable) as exc:
        print(f"relrep: usage error: {exc}", file=sys.stderr)
    except RelrepError as exc:
        print(f"relrep: error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
