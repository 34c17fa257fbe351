"""Local path planning among dynamic obstacles via tangent detours and extrapolation."""

__version__ = "0.1.0"
