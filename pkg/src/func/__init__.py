"""Functional modules for hexagonal-lattice disc coverings.

Submodules
----------
geom_core
    Convex and simple polygons, Minkowski sums, clipping and sampling.
hex_lattice
    The hexagonal lattice, its Voronoi cells and window enumeration.
orientation
    Width profiles and the orientation objective.
placement_fixed
    Optimal translation at a fixed orientation.
placement_combined
    Joint orientation and translation search, convex and non-convex.
polyroots
    Batched real roots of low-degree polynomials.
triangulation
    Ear-clipping triangulation of simple polygons.
bounds
    Closed-form bounds, coverage certificates and a brute-force oracle.
io_utils
    Polygon and covering file formats.
render_svg
    SVG drawings of coverings.
bench
    Random-polygon benchmark harness.
errors
    Exception hierarchy.
"""
