"""Subspace correction for total variation and l1 minimization"""
__version__ = "1.0.0"
