"""Outer billiards, polynomial integrals and plane-curve singularity tools."""

__version__ = "0.1.0"
