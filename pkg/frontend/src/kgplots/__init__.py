"""Static figure generation from kgdamp CSV artifacts."""

from kgplots.spec import FigureSpec, SpecError
from kgplots.render import render

__all__ = ["FigureSpec", "SpecError", "render"]
