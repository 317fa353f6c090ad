"""Regenerate the JSON fixtures in tests/fixtures.

    python3 tests/make_fixtures.py

test_fixtures.py checks that the committed files match this script byte
for byte, so edit here rather than by hand.
"""
from pathlib import Path

from relrep.algebra import FULL, LATTICE_ORDERED, ORDERED_COMPLEMENTED, FiniteAlgebra, Signature
from relrep.formats import (
    algebra_to_json, dumps, partial_group_to_json, representation_to_json,
)
from relrep.partial_group import cyclic_group, restrict_group
from relrep.relations import full_algebra
from relrep.representation import inclusion_representation, inflate

FIXTURES = Path(__file__).parent / "fixtures"


def build() -> dict[str, str]:
    out = {}
    full16 = full_algebra(2, FULL)
    rep16 = inclusion_representation(full16, FULL)
    out["full16.alg.json"] = dumps(algebra_to_json(full16.algebra, FULL))
    out["full16.rep.json"] = dumps(representation_to_json(rep16, "full16.alg.json"))

    # every point doubled except the last: top stays an equivalence, e does not
    fat = inflate(rep16, (2, 1))
    out["lattice-ordered.rep.json"] = dumps(
        representation_to_json(fat.with_signature(LATTICE_ORDERED), "full16.alg.json"))
    out["ordered-complemented.rep.json"] = dumps(
        representation_to_json(fat.with_signature(ORDERED_COMPLEMENTED), "full16.alg.json"))

    # (a·a)·b = a but a·(a·b) = b
    bad = FiniteAlgebra([[1, 0], [0, 0]], names=["a", "b"])
    out["bad-assoc.alg.json"] = dumps(algebra_to_json(bad, Signature.of()))

    one = FiniteAlgebra([[0]], names=["u"], meet=[[0]], join=[[0]], constants={"e": 0})
    out["minimal.alg.json"] = dumps(algebra_to_json(one))

    z4 = restrict_group(cyclic_group(4), [0, 1], names=["e", "g", "h"])
    out["z4-restriction.pg.json"] = dumps(partial_group_to_json(z4))
    return out


def main():
    FIXTURES.mkdir(exist_ok=True)
    for name, text in build().items():
        (FIXTURES / name).write_text(text, encoding="utf-8")
        print("wrote", FIXTURES / name)


if __name__ == "__main__":
    main()
