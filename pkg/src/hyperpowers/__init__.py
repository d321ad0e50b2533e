"""Desk-scale tools for powers of tight Hamilton cycles in uniform hypergraphs."""

__version__ = "0.1.0"
