"""Poisson Voronoi directional radii and the joint spatial-propagation model.

Subpackages:

- :mod:`voronet.geometry`: point processes and oriented Voronoi cell sampling
- :mod:`voronet.analytic`: closed-form laws, moments, and special functions
- :mod:`voronet.network`: cell-dependent shadowing, SIR, MISR, meta distribution
- :mod:`voronet.stats`: empirical distributions, KS distance, moment estimators
- :mod:`voronet.experiments` / :mod:`voronet.cli`: reproducible experiment runner
"""

from . import analytic, geometry, network, stats

__version__ = "0.1.0"

__all__ = ["analytic", "geometry", "network", "stats", "__version__"]
