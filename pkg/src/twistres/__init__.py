"""Exact-arithmetic engine for twisted tensor product algebras.

Builds twisted tensor products A (x)_tau B from a twisting map tau, the
standard free resolutions (bar, Koszul, periodic, iterated-Ore Koszul),
twist-lift chain maps, and twisted-product total complexes; verifies the
compatibility and exactness conditions by exact sparse linear algebra; and
computes Hochschild cohomology, Ext, Tor, and Lie-algebra homology
dimensions from the results.
"""

__version__ = "0.1.0"
