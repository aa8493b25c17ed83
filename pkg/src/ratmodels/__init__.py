"""Exact-arithmetic toolkit for differential graded algebra over the rationals.

Free graded Lie algebras with Lyndon-word normal forms, minimal / bigraded /
filtered models of presented differential graded algebras, the
Chevalley-Eilenberg and cobar constructions, cubical mapping complexes built
from finite lattices, and simplicial resolutions supporting higher homotopy
operations.  All arithmetic is done in ``fractions.Fraction``; no floats.
"""

__version__ = "0.1.0"
