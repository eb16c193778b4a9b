"""Effective-permission expansion and wildcard spread analysis for Azure RBAC actions."""

from .catalog import ActionPath, Catalog, CatalogError, catalog_stats, load_catalog, load_sample_catalog
from .expansion import MatchSet, effective_set, expand
from .grammar import PatternError, WildcardPattern, lex, parse, parse_pattern
from .metric import build_tree, diameter, distance

__version__ = "0.1.0"

__all__ = [
    "ActionPath",
    "Catalog",
    "CatalogError",
    "MatchSet",
    "PatternError",
    "WildcardPattern",
    "build_tree",
    "catalog_stats",
    "diameter",
    "distance",
    "effective_set",
    "expand",
    "lex",
    "load_catalog",
    "load_sample_catalog",
    "parse",
    "parse_pattern",
]
