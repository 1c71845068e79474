"""
Algebra module for polynomials, polynomial matrices and transfer matrices.
This module provides the exact-structure layer the numerics build on.
"""
