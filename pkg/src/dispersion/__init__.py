"""Coverage-curve dispersion scoring for multi-document summaries.

Quantifies how many source documents a summary actually draws on: greedy
maximally-covering document subsets per topic, cov_k coverage curves, and
the area-above-the-curve (AAC) dispersion score aggregated over a dataset.
"""

__version__ = "0.1.0"

from dispersion.errors import DispersionError  # noqa: F401
