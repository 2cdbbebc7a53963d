"""simexplore: engine and explorer for Monte Carlo simulation-study results.

Ingest tidy per-repetition estimate datasets, compute performance measures
with Monte Carlo standard errors across data-generating mechanisms and
methods, diagnose missingness, and serve tables and plot data for
exploration and publication export.
"""

from .errors import SimExploreError
from .export import TableStyle, format_cell, to_delimited, to_latex
from .ingest import SourceSpec, fetch_url, parse_source, parse_table, sniff_format
from .measures import (
    MEASURE_ORDER,
    CriticalValueRule,
    PerformanceEstimate,
    PerformanceInput,
    compute_all,
)
from .model import (
    Dataset,
    RawTable,
    RepetitionRecord,
    StratumKey,
    VariableMapping,
    apply_mapping,
    enumerate_strata,
)

__version__ = "0.1.0"

__all__ = [
    "SimExploreError",
    "TableStyle", "format_cell", "to_delimited", "to_latex",
    "SourceSpec", "fetch_url", "parse_source", "parse_table", "sniff_format",
    "MEASURE_ORDER", "CriticalValueRule", "PerformanceEstimate",
    "PerformanceInput", "compute_all",
    "Dataset", "RawTable", "RepetitionRecord", "StratumKey", "VariableMapping",
    "apply_mapping", "enumerate_strata",
    "__version__",
]
