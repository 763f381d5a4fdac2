"""Bimodal StackOverflow corpus construction and code-generation evaluation."""

__version__ = "0.1.0"
