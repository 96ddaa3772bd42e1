"""Relevance-score heuristic planning toolkit."""
__version__ = "0.1.0"
