"""Prolate spheroidal wave functions and spectral approximation on [-1, 1]."""
__version__ = "0.1.0"
