"""Exact constructions and rigorous numerics for sphere-packing bounds in
dimensions 8 and 24: binary codes, lattices, modular q-series, the
eigenfunction construction of the optimal test functions, and the
linear-programming bound pipeline."""

__version__ = "0.1.0"
