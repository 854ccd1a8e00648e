"""Exact Ext computations for torus-equivariant sheaves on toric open sets U_Sigma."""

__version__ = "0.1.0"
