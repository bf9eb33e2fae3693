"""Inverse curvature flow of star-shaped two-convex hypersurfaces in hyperbolic space."""

__version__ = "0.1.0"
