"""Desk-scale dynamics of finitely generated polynomial semigroups."""

from polysemigroup.poly import Polynomial, polynomial, monomial

__all__ = ["Polynomial", "polynomial", "monomial"]
__version__ = "0.1.0"
