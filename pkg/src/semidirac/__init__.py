"""Semiclassical analysis of the Euclidean Dirac operator in gauge fields.

Modules
-------
algebra   gamma matrices, su(N) generators, gauge fields, field strengths
symbols   Weyl symbols and classical Hamiltonians
dynamics  spin/colour transport, precession and the Wong flow
weyl      mean spectral densities in the semiclassical limits
torus     exact and semiclassical trace formula on the two-torus
cli       command-line front end
"""
__version__ = "0.1.0"
