"""modelvault: a versioned library of enterprise architecture models.

The package stores models in a file-backed vault (entries with variants,
versions, and composite relations), computes catalog metrics, drives a
release lifecycle with cascading change checks, and serves discovery and
workflow operations over an HTTP API and a CLI.
"""

__version__ = "0.1.0"
