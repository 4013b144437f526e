"""Numerical verification of special forms and Hermitian Killing forms on Kaehler manifolds.

Modules
-------
exterior
    Pointwise complex exterior algebra, metric and curvature actions.
jets, geometry
    Truncated Taylor jets and the chart engine (connection, curvature, Dolbeault operators).
profiles
    Momentum profiles, radial models and closed-form curvature predictions.
calabi
    Calabi-type charts over Kaehler-Einstein bases, splitting, Chern connection and lifts.
solutions
    Explicit special pairs and Hermitian Killing forms.
residuals, algebraic, oracle
    Identity residuals, batteries and independent oracles.
cli
    Command-line harness.
"""

from .exterior import MetricPoint, PqForm, TangentVector
from .geometry import KahlerChart, flat_chart, fubini_study_chart
from .profiles import MomentumProfile, maximal_domain
from .report import CheckReport

__version__ = "0.1.0"

__all__ = [
    "MetricPoint",
    "PqForm",
    "TangentVector",
    "KahlerChart",
    "flat_chart",
    "fubini_study_chart",
    "MomentumProfile",
    "maximal_domain",
    "CheckReport",
    "__version__",
]
