"""Topological early-warning signals for multivariate time series.

Sliding-window Vietoris-Rips persistence, persistence-landscape norms, and
rolling early-warning indicators with Mann-Kendall trend tests.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AlignmentError,
    DegenerateInputError,
    FiltrationOrderError,
    InputFormatError,
    InsufficientDataError,
    TDAError,
    UnsupportedDimensionError,
    ValidationError,
)
from .geometry import DistanceMatrix, PointCloud, distance_matrix, perturb_cloud, scale_cloud  # noqa: E402
from .persistence import (  # noqa: E402
    Filtration,
    FiltrationSimplex,
    PersistenceDiagram,
    bottleneck_distance,
    build_rips_filtration,
    compute_persistence,
    rips_diagram,
)
from .landscape import PersistenceLandscape, landscape_from_diagram, landscape_from_pairs, lp_norm, sup_distance  # noqa: E402
from .pipeline import MultiSeries, NormSeries, norm_series, norm_table, normalize_series, sliding_windows  # noqa: E402
from .ews import IndicatorSeries, TrendReport, mann_kendall, pre_event_trend, rolling_indicators  # noqa: E402
