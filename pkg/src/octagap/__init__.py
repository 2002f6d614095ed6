"""Exact reflection-group arithmetic, hyperbolic orbit balls, and spectral bounds
for the right-angled ideal octahedron and its random covers."""

__version__ = "0.1.0"
