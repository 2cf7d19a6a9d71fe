"""Plot layer for the sparsecp outputs.

Strictly a file consumer: it reads the documented region-grid and curve
CSV formats and the limits/mc JSON payloads, and never recomputes any of
the underlying mathematics.
"""

from .phase_plot import plot_phase_diagram
from .ratio_plot import plot_ratio_convergence

__version__ = "0.1.0"

__all__ = ["plot_phase_diagram", "plot_ratio_convergence", "__version__"]
