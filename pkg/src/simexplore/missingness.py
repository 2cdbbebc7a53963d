"""Missing-value diagnostics per method and DGM.

Missingness here is a property of the mapped numeric roles (estimate, SE,
per-repetition truth, supplied bounds, degrees of freedom): a cell that is
empty, marked NA/NaN/"." or unusable (negative SE, inverted bounds,
non-positive df) counts as missing. Missing method or DGM cells are an
ingestion error, not a statistic, because strata must partition the
records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NonNumericVariable, UnknownColumn
from .model import Dataset, RepetitionRecord, StratumKey, parse_numeric


@dataclass(frozen=True)
class MissingSummary:
    variable: str
    stratum: StratumKey
    n_missing: int
    prop_missing: float
    n_cumulative: int


@dataclass(frozen=True)
class ShadowPoint:
    """A scatter point where missing coordinates get a display value
    placed strictly below every observed value of that variable."""

    x: float
    y: float
    x_missing: bool
    y_missing: bool


def tracked_variables(dataset: Dataset) -> list[tuple[str, str]]:
    """(column name, record field) pairs whose missingness is tabulated."""
    m = dataset.mapping
    pairs = [(m.estimate_col, "estimate")]
    if m.se_col:
        pairs.append((m.se_col, "se"))
    if m.truth_col:
        pairs.append((m.truth_col, "truth"))
    if m.ci_cols:
        pairs.append((m.ci_cols[0], "lower"))
        pairs.append((m.ci_cols[1], "upper"))
    if m.df_col:
        pairs.append((m.df_col, "df"))
    return pairs


def _is_missing(record: RepetitionRecord, field: str) -> bool:
    return getattr(record, field) is None


def missing_table(dataset: Dataset) -> list[MissingSummary]:
    """Number, proportion, and cumulative count of missing values per
    variable, stratified by DGM and method."""
    out = []
    for variable, field in tracked_variables(dataset):
        cumulative = 0
        for key, recs in dataset.strata().items():
            n_missing = sum(1 for r in recs if _is_missing(r, field))
            cumulative += n_missing
            out.append(MissingSummary(
                variable=variable,
                stratum=key,
                n_missing=n_missing,
                prop_missing=n_missing / len(recs),
                n_cumulative=cumulative,
            ))
    return out


@dataclass(frozen=True)
class MissingBar:
    variable: str
    group: str
    n_missing: int
    prop_missing: float


def missing_bar_data(dataset: Dataset, by: str = "method") -> list[MissingBar]:
    """Missing counts/proportions per variable, grouped by method or DGM."""
    if by not in ("method", "dgm"):
        raise ValueError(f"by must be 'method' or 'dgm', got {by!r}")
    out = []
    for variable, field in tracked_variables(dataset):
        groups: dict[str, list[RepetitionRecord]] = {}
        for key, recs in dataset.strata().items():
            label = key.method if by == "method" else ",".join(key.dgm)
            groups.setdefault(label, []).extend(recs)
        for label, recs in groups.items():
            n_missing = sum(1 for r in recs if _is_missing(r, field))
            out.append(MissingBar(variable, label, n_missing, n_missing / len(recs)))
    return out


@dataclass(frozen=True)
class MissingTile:
    method: str
    dgm: tuple[str, ...]
    percent: float


def missing_heat_data(dataset: Dataset, variable: str | None = None) -> list[MissingTile]:
    """Percent missingness of one variable per (method x DGM) tile."""
    wanted = variable or dataset.mapping.estimate_col
    field = None
    for col, f in tracked_variables(dataset):
        if col == wanted:
            field = f
            break
    if field is None:
        raise UnknownColumn(f"{wanted!r} is not a tracked variable")
    tiles = []
    for key, recs in dataset.strata().items():
        n_missing = sum(1 for r in recs if _is_missing(r, field))
        tiles.append(MissingTile(key.method, key.dgm, 100.0 * n_missing / len(recs)))
    return tiles


def _numeric_column(dataset: Dataset, name: str) -> list[float | None]:
    if dataset.column_kind(name) != "numeric":
        raise NonNumericVariable(f"column {name!r} is not numeric")
    ix = dataset.raw.column_index(name)
    return [parse_numeric(row[ix]) for row in dataset.raw.rows]


def _display_floor(values: list[float | None]) -> float:
    observed = [v for v in values if v is not None]
    if not observed:
        return 0.0
    lo, hi = min(observed), max(observed)
    offset = 0.10 * (hi - lo)
    if offset == 0.0:
        offset = 1.0  # constant variable: any strictly-lower value works
    return lo - offset


def shadow_scatter_data(dataset: Dataset, xvar: str, yvar: str) -> list[ShadowPoint]:
    """Paired values with missing coordinates imputed 10% of the observed
    range below the minimum, so missingness patterns stay visible."""
    xs = _numeric_column(dataset, xvar)
    ys = _numeric_column(dataset, yvar)
    x_floor = _display_floor(xs)
    y_floor = _display_floor(ys)
    points = []
    for x, y in zip(xs, ys):
        points.append(ShadowPoint(
            x=x if x is not None else x_floor,
            y=y if y is not None else y_floor,
            x_missing=x is None,
            y_missing=y is None,
        ))
    return points


def missing_matrix(dataset: Dataset, n_blocks: int = 20) -> dict:
    """Dataset-wide missingness map: per tracked variable, the proportion
    missing within consecutive row blocks (for a compact whole-dataset view)."""
    n = len(dataset.records)
    variables = tracked_variables(dataset)
    if n == 0:
        return {"variables": [v for v, _ in variables], "block_size": 0, "blocks": []}
    n_blocks = max(1, min(n_blocks, n))
    size = math.ceil(n / n_blocks)
    blocks = []
    for start in range(0, n, size):
        recs = dataset.records[start:start + size]
        blocks.append([
            sum(1 for r in recs if _is_missing(r, field)) / len(recs)
            for _, field in variables
        ])
    return {"variables": [v for v, _ in variables], "block_size": size, "blocks": blocks}
