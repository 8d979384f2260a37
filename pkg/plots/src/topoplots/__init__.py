"""Deterministic figure rendering from topoindex CSV/JSON artifacts."""

from .recipes import FigureRecipe, SchemaError
from .render import render

__version__ = "0.1.0"
