"""Decidability of model-complete theories in computable presentations."""

__version__ = "0.1.0"
