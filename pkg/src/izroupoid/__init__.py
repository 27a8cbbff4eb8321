"""Finite implication zroupoids: models, congruences, varieties and replayable proofs."""

from .algebra import (
    FiniteAlgebra,
    builtin_algebra,
    builtin_algebras,
    check_conditional,
    check_identity,
    load_algebra,
)
from .catalog import builtin_catalog
from .congruence import all_congruences, derived_relation, is_simple, principal_congruence
from .proofs import load_script, replay, replay_all
from .search import SearchConfig, classify_simples, enumerate_models
from .terms import parse_identity, parse_term
from .variety import free_algebra, in_variety, variety_poset

__version__ = "0.1.0"

__all__ = [
    "FiniteAlgebra",
    "SearchConfig",
    "all_congruences",
    "builtin_algebra",
    "builtin_algebras",
    "builtin_catalog",
    "check_conditional",
    "check_identity",
    "classify_simples",
    "derived_relation",
    "enumerate_models",
    "free_algebra",
    "in_variety",
    "is_simple",
    "load_algebra",
    "load_script",
    "parse_identity",
    "parse_term",
    "principal_congruence",
    "replay",
    "replay_all",
    "variety_poset",
]
