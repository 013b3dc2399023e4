"""Nilpotent evolution algebras over small fields: construction, classification, verification."""

from __future__ import annotations

from .algebra import EvolutionAlgebra, annihilator, is_nilpotent, power_chain
from .classify import ClassCatalog, ClassEntry, classify_dimension, full_catalog
from .cocycle import CocycleMatrix, compute_spaces, decompose, extend
from .field import Field
from .oracle import iso_check, oracle_classify

__version__ = "0.1.0"

__all__ = [
    "ClassCatalog",
    "ClassEntry",
    "CocycleMatrix",
    "EvolutionAlgebra",
    "Field",
    "annihilator",
    "classify_dimension",
    "compute_spaces",
    "decompose",
    "extend",
    "full_catalog",
    "is_nilpotent",
    "iso_check",
    "oracle_classify",
    "power_chain",
]
