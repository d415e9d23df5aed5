"""Exact-arithmetic toolkit for the metric many-visits TSP.

The package has three layers:

* ``lp`` and ``gpoly``: an exact rational LP solver that returns vertex
  solutions, and border-pair algebra for generalized polymatroids.
* ``rounding``: iterative LP relaxation for minimum-cost g-polymatroid
  elements under hypergraph degree bounds with multiplicities.
* ``mvtsp``, ``approx``, ``oracles``, ``instances``: tour machinery, the
  1.5- and 2.5-approximation pipelines, brute-force reference solvers, and
  seeded instance generators.

Everything is computed over exact rationals; there is no floating point in
any decision path.
"""

__version__ = "0.1.0"
