"""Point counting and real-multiplication tests for double covers of the plane branched over six lines."""

__version__ = "0.1.0"
