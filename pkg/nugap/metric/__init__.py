"""
Metric module for the nu-metric and closed-loop stability margins.
This module contains the distance itself and the robustness checks built on it.
"""
