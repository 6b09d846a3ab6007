"""Numerical laboratory for minimal surfaces given by Weierstrass data: curvature,
geodesic distances to the boundary, Gauss-map omission of hyperplanes, and the
curvature-distance product |K|^{1/2} d."""

__version__ = "0.1.0"
