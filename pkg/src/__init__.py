"""k-NN graph connectivity laboratory."""

__version__ = "0.1.0"
