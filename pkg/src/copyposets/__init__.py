"""Posets of copies of countable binary structures built from maximally embeddable components."""
from .common import OMEGA, ContractError, DomainError, ParseError, ResourceError
from .structures import BinaryStructure, Shape
from .catalogue import CatalogueSpec, ComponentClass, UnboundedFamily, derive_stats, truncate, validate
from .ideals import TailRule, TraceProfile, ideal_member
from .classifier import EDfinProduct, FinPower, FinTimesFin, classify, is_indivisible, report
from .posets import FinitePreOrder, sm, sq

__all__ = [
    "OMEGA",
    "ContractError",
    "DomainError",
    "ParseError",
    "ResourceError",
    "BinaryStructure",
    "Shape",
    "CatalogueSpec",
    "ComponentClass",
    "UnboundedFamily",
    "derive_stats",
    "truncate",
    "validate",
    "TailRule",
    "TraceProfile",
    "ideal_member",
    "EDfinProduct",
    "FinPower",
    "FinTimesFin",
    "classify",
    "is_indivisible",
    "report",
    "FinitePreOrder",
    "sm",
    "sq",
]
