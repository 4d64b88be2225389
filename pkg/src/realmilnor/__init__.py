"""Triviality of real Milnor fibrations from local degrees of gradient maps."""

__version__ = "0.1.0"
