"""
Generation module for seeded random plants and controllers.
"""
