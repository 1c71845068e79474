"""
nugap: the nu-metric between discrete-time rational plants.

Normalized coprime factorizations, winding-number and Toeplitz index
numerics on the unit circle, closed-loop stability margins and the
property campaigns that exercise them.
"""

# Version
__version__ = "1.0.0"
