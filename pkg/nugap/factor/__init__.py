"""
Factor module for spectral factors and normalized coprime factorizations.
"""
