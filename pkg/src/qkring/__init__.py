"""Exact-arithmetic engine for quantum Kahler sub-rings of projective hypersurfaces."""

__version__ = "0.1.0"
