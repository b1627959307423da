"""Dependent type-checking kernels over hereditarily finite sets.

Two term languages with set-valued semantics, inference and derivation
checking, finite-model consequence checking, and a library of verified
specification bundles.
"""

__version__ = "0.1.0"
