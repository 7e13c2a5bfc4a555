"""Robin Laplacian eigenvalues on thin boundary layers of planar domains."""

__version__ = "0.1.0"
