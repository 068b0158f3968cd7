"""
Anisotropic bond percolation laboratory.

Contour counting, exact and Monte Carlo truncated connectivity on finite
boxes, and the closed-form bounds comparing tau(0, x) with tau(0, x').
"""
