"""
Numerical core of the toolkit: plain numpy/scipy, no Django imports.
"""
