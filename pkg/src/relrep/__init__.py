"""Finite algebras of binary relations: validation, representation checking,
quotient/interior transformations, representation search and partial-group
embeddings."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    BOOLEAN_MONOID, FULL, LATTICE_ORDERED, ORDERED_COMPLEMENTED, FiniteAlgebra,
    Signature, analyze, i_elements_via_complement, i_elements_via_meet,
    validate_algebra,
)
from .partial_group import PartialGroup, embed_search, validate_partial_group  # noqa: E402
from .relations import Relation, closure_generate, full_algebra  # noqa: E402
from .representation import (  # noqa: E402
    Representation, find_idempotent_fixed_point, inflate, injectivize_pipeline,
    quotient, symmetric_interior, verify_representation,
)
from .repsearch import SearchConfig, exhaustive_oracle, search_representation  # noqa: E402

__all__ = [
    "BOOLEAN_MONOID", "FULL", "LATTICE_ORDERED", "ORDERED_COMPLEMENTED", "FiniteAlgebra",
    "Signature", "analyze", "i_elements_via_complement", "i_elements_via_meet",
    "validate_algebra", "PartialGroup", "embed_search", "validate_partial_group",
    "Relation", "closure_generate", "full_algebra", "Representation",
    "find_idempotent_fixed_point", "inflate", "injectivize_pipeline", "quotient",
    "symmetric_interior", "verify_representation", "SearchConfig", "exhaustive_oracle",
    "search_representation", "__version__",
]
