"""
Circle module for unit-circle sampling, winding numbers and Toeplitz diagnostics.
"""
