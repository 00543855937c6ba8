"""Correlation and partial correlation hub screening for n << p data."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    HubScreenError,
    RankDeficientGram,
    VertexNotDiscovered,
    ZeroVarianceColumn,
)
from .graph import (  # noqa: E402
    ThresholdGraph,
    build_graph,
    build_graph_exact,
    build_graph_range,
    count_stars,
    hub_discoveries,
    threshold_profile,
)
from .screen import DiscoveryRecord, ScreeningReport, screen, screen_data  # noqa: E402
from .special import cap_probability_P0, sphere_constant_an  # noqa: E402
from .stats import (  # noqa: E402
    Mode,
    PhiConvention,
    ScreeningParams,
    critical_threshold,
    expected_hub_count,
    fwer,
    pvalue_from_rate,
)
from .zscore import DataMatrix, ScoreMatrix, score_matrix  # noqa: E402

__all__ = [
    "DataMatrix",
    "DiscoveryRecord",
    "HubScreenError",
    "Mode",
    "PhiConvention",
    "RankDeficientGram",
    "ScoreMatrix",
    "ScreeningParams",
    "ScreeningReport",
    "ThresholdGraph",
    "VertexNotDiscovered",
    "ZeroVarianceColumn",
    "build_graph",
    "build_graph_exact",
    "build_graph_range",
    "cap_probability_P0",
    "count_stars",
    "critical_threshold",
    "expected_hub_count",
    "fwer",
    "hub_discoveries",
    "pvalue_from_rate",
    "score_matrix",
    "screen",
    "screen_data",
    "sphere_constant_an",
    "threshold_profile",
]
