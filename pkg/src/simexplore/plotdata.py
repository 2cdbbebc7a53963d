"""Renderer-agnostic data for every supported plot family.

The engine prepares structured numbers; drawing is the consumer's job
(the bundled SVG emitter or the web UI). Contour/hexbin displays are fed
by the raw paired points ("density-pairs"), binned on the rendering side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    GroupTooSmall,
    MeasureUnavailable,
    MissingIngredient,
    NoCommonRepetitions,
    NoIntervals,
    NoTruth,
    PlotError,
)
from .measures import (
    PerformanceEstimate,
    build_intervals,
    rule_for,
    stratum_inputs,
)
from .model import Dataset, StratumKey, level_sort_key
from .quantiles import norm_ppf

PLOT_KINDS = ("scatter", "bland-altman", "ridgeline", "density-pairs",
              "forest", "lolly", "heat", "zip", "nested-loop")


@dataclass(frozen=True)
class PlotSpec:
    """What to draw and how big; themes only change style tokens."""

    kind: str
    measure: str | None = None
    dgm: tuple[str, ...] | None = None
    methods: tuple[str, ...] | None = None
    xlab: str | None = None
    ylab: str | None = None
    theme: str = "default"
    width: float = 640.0
    height: float = 480.0
    dpi: float = 96.0

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise PlotError(f"unknown plot kind {self.kind!r}")


def symmetric_interval(value: float, half_width: float) -> tuple[float, float]:
    """Bounds around ``value`` whose float subtractions agree exactly:
    (upper - value) == (value - lower). Reconciles rounding asymmetry by
    projecting each bound onto the other's achieved offset; widths that
    overflow the double range are halved until both bounds are finite."""
    hw = abs(half_width)
    lower = value - hw
    if not math.isfinite(lower):
        lower = value
    for _ in range(120):
        d = value - lower
        upper = value + d
        if not (math.isfinite(d) and math.isfinite(upper)):
            hw /= 2.0
            lower = value - hw
            if not math.isfinite(lower):
                lower = value
            continue
        if upper - value == d:
            return lower, upper
        lower = value - (upper - value)
        if not math.isfinite(lower):
            lower = value
    return value, value


# --- method-wise comparisons of estimates / standard errors ---

@dataclass(frozen=True)
class PairedPoint:
    dgm: tuple[str, ...]
    rep_id: str | None
    a: float
    b: float


@dataclass(frozen=True)
class PairedData:
    method_a: str
    method_b: str
    quantity: str
    points: tuple[PairedPoint, ...]
    n_dropped: int


def estimate_pairs(dataset: Dataset, method_a: str, method_b: str,
                   quantity: str = "estimate") -> PairedData:
    """Per-repetition (method A, method B) value pairs within each DGM.

    Pairing uses the repetition id when mapped, record order otherwise;
    repetitions present in only one method are dropped and counted.
    """
    if quantity not in ("estimate", "se"):
        raise PlotError(f"quantity must be 'estimate' or 'se', got {quantity!r}")
    if quantity == "se" and dataset.mapping.se_col is None:
        raise PlotError("no standard-error column mapped")

    per_stratum: dict[StratumKey, dict] = {}
    for inp in stratum_inputs(dataset):
        values = inp.estimates if quantity == "estimate" else inp.ses
        indexed = {}
        for i, rid in enumerate(inp.rep_ids):
            v = values[i]
            if math.isfinite(v):
                key = rid if rid is not None else i
                if key not in indexed:
                    indexed[key] = v
        per_stratum[inp.key] = indexed

    points = []
    n_dropped = 0
    dgms = sorted({k.dgm for k in per_stratum}, key=lambda d: tuple(map(level_sort_key, d)))
    for dgm in dgms:
        a_vals = per_stratum.get(StratumKey(dgm, method_a), {})
        b_vals = per_stratum.get(StratumKey(dgm, method_b), {})
        common = [r for r in a_vals if r in b_vals]
        n_dropped += len(a_vals) + len(b_vals) - 2 * len(common)
        for rep in common:
            rid = rep if isinstance(rep, str) else None
            points.append(PairedPoint(dgm, rid, a_vals[rep], b_vals[rep]))
    if not points:
        raise NoCommonRepetitions(
            f"methods {method_a!r} and {method_b!r} share no repetitions")
    return PairedData(method_a, method_b, quantity, tuple(points), n_dropped)


@dataclass(frozen=True)
class BlandAltmanData:
    pairs: PairedData
    means: tuple[float, ...]
    diffs: tuple[float, ...]
    mean_diff: float
    lower_limit: float | None
    upper_limit: float | None


def bland_altman(pairs: PairedData) -> BlandAltmanData:
    """Mean/difference transform with 95% limits of agreement."""
    a = np.array([p.a for p in pairs.points])
    b = np.array([p.b for p in pairs.points])
    means = (a + b) / 2.0
    diffs = a - b
    mean_diff = float(np.mean(diffs))
    lower = upper = None
    if len(diffs) >= 2:
        sd = float(np.std(diffs, ddof=1))
        lower = mean_diff - 1.96 * sd
        upper = mean_diff + 1.96 * sd
    return BlandAltmanData(pairs, tuple(means.tolist()), tuple(diffs.tolist()),
                           mean_diff, lower, upper)


# --- distribution displays ---

@dataclass(frozen=True)
class RidgeGroup:
    key: StratumKey
    sample: tuple[float, ...]  # sorted observed values
    grid: tuple[float, ...] | None
    density: tuple[float, ...] | None
    bandwidth: float | None


def _silverman_bandwidth(values: np.ndarray) -> float:
    n = len(values)
    sd = float(np.std(values, ddof=1))
    iqr = float(np.percentile(values, 75) - np.percentile(values, 25))
    spread = sd if iqr == 0.0 else min(sd, iqr / 1.34)
    return 0.9 * spread * n ** (-0.2)


def ridgeline_data(dataset: Dataset, quantity: str = "estimate",
                   grid_points: int = 128) -> list[RidgeGroup]:
    """Per-stratum sorted samples with a Gaussian KDE on a fixed grid.

    Groups too small (or degenerate) for a density fall back to the raw
    sample only.
    """
    if quantity not in ("estimate", "se"):
        raise PlotError(f"quantity must be 'estimate' or 'se', got {quantity!r}")
    if quantity == "se" and dataset.mapping.se_col is None:
        raise PlotError("no standard-error column mapped")
    groups = []
    for inp in stratum_inputs(dataset):
        values = inp.estimates if quantity == "estimate" else inp.ses
        vals = values[np.isfinite(values)]
        if len(vals) == 0:
            continue
        sample = tuple(sorted(vals.tolist()))
        if len(vals) < 2:
            groups.append(RidgeGroup(inp.key, sample, None, None, None))
            continue
        h = _silverman_bandwidth(vals)
        if h <= 0.0:
            groups.append(RidgeGroup(inp.key, sample, None, None, None))
            continue
        # +-4 bandwidths of margin keep the trapezoid integral within 1e-3 of 1
        grid = np.linspace(vals.min() - 4.0 * h, vals.max() + 4.0 * h, grid_points)
        z = (grid[:, None] - vals[None, :]) / h
        density = np.exp(-0.5 * z * z).sum(axis=1) / (len(vals) * h * math.sqrt(2.0 * math.pi))
        groups.append(RidgeGroup(inp.key, sample, tuple(grid.tolist()),
                                 tuple(density.tolist()), h))
    if not groups:
        raise GroupTooSmall("no usable observations in any stratum")
    return groups


# --- performance displays ---

@dataclass(frozen=True)
class ForestPoint:
    dgm: tuple[str, ...]
    method: str
    value: float
    mcse: float
    lower: float
    upper: float


def forest_lolly_data(estimates: list[PerformanceEstimate], measure: str,
                      ci_level: float = 0.95) -> list[ForestPoint]:
    """Measure values with confidence intervals built from their MCSEs.

    Serves both forest and lolly displays. Estimates without an MCSE
    (medians, single-repetition strata) cannot be intervalled.
    """
    if not 0.0 < ci_level < 1.0:
        raise PlotError(f"ci_level must be in (0, 1), got {ci_level!r}")
    z = norm_ppf(0.5 + ci_level / 2.0)
    points = []
    for e in estimates:
        if e.measure != measure:
            continue
        if e.mcse is None:
            continue
        lower, upper = symmetric_interval(e.value, z * e.mcse)
        points.append(ForestPoint(e.stratum.dgm, e.stratum.method,
                                  e.value, e.mcse, lower, upper))
    if not points:
        raise MeasureUnavailable(
            f"measure {measure!r} has no estimates with an MCSE")
    return points


@dataclass(frozen=True)
class HeatTile:
    dgm: tuple[str, ...]
    method: str
    value: float


def heat_data(estimates: list[PerformanceEstimate], measure: str) -> list[HeatTile]:
    """One tile per stratum, colored by the measure value."""
    tiles = [HeatTile(e.stratum.dgm, e.stratum.method, e.value)
             for e in estimates if e.measure == measure]
    if not tiles:
        raise MeasureUnavailable(f"measure {measure!r} not present in estimates")
    return tiles


@dataclass(frozen=True)
class ZipStripe:
    method: str
    dgm: tuple[str, ...]
    rank_percentile: float
    lower: float
    upper: float
    covers: bool


def zip_data(dataset: Dataset) -> list[ZipStripe]:
    """All per-repetition intervals, ranked within each stratum by
    significance against the truth (|estimate - truth| / SE, descending;
    half-width replaces the SE for supplied bounds). The covering fraction
    per stratum equals the coverage estimate exactly.
    """
    mapping = dataset.mapping
    rule = rule_for(mapping)
    stripes: list[ZipStripe] = []
    for inp in stratum_inputs(dataset):
        truth = inp.truth_array()
        if truth is None:
            raise NoTruth("zip plot requires a true value")
        try:
            lo, hi = build_intervals(inp, rule)
        except MissingIngredient as exc:
            raise NoIntervals(str(exc)) from exc
        mask = np.isfinite(lo) & np.isfinite(hi) & np.isfinite(truth)
        idx = np.flatnonzero(mask)
        if len(idx) == 0:
            continue
        dev = np.abs(inp.estimates[idx] - truth[idx])
        if inp.ses is not None and np.isfinite(inp.ses[idx]).all():
            scale = inp.ses[idx]
        else:
            scale = (hi[idx] - lo[idx]) / 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(scale > 0.0, dev / scale,
                         np.where(dev > 0.0, math.inf, 0.0))
        order = np.argsort(-z, kind="stable")  # ties stay in rep order
        n = len(idx)
        for rank, j in enumerate(order, start=1):
            i = idx[j]
            stripes.append(ZipStripe(
                method=inp.key.method,
                dgm=inp.key.dgm,
                rank_percentile=100.0 * rank / n,
                lower=float(lo[i]),
                upper=float(hi[i]),
                covers=bool((lo[i] <= truth[i]) and (truth[i] <= hi[i])),
            ))
    if not stripes:
        raise NoIntervals("no usable intervals in any stratum")
    return stripes


@dataclass(frozen=True)
class NestedLoopData:
    positions: tuple[tuple[str, ...], ...]  # DGM combinations in plot order
    factor_names: tuple[str, ...]
    series: tuple[dict, ...]   # {"method": str, "values": [float | None, ...]}
    ribbons: tuple[dict, ...]  # {"factor", "levels", "y": [float, ...]}
    value_range: tuple[float, float]


def nested_loop_data(estimates: list[PerformanceEstimate], measure: str,
                     factor_order: tuple[int, ...] | None = None,
                     factor_names: tuple[str, ...] = ()) -> NestedLoopData:
    """Step-function series over every DGM combination, plus one scaled
    ribbon per factor annotating its level at each position.

    Combinations are ordered lexicographically with the first factor in
    ``factor_order`` outermost; ribbons occupy a band spanning 25% of the
    value range below the minimum.
    """
    selected = [e for e in estimates if e.measure == measure]
    if not selected:
        raise MeasureUnavailable(f"measure {measure!r} not present in estimates")
    combos = []
    for e in selected:
        if e.stratum.dgm not in combos:
            combos.append(e.stratum.dgm)
    arity = len(combos[0])
    if arity == 0:
        raise PlotError("nested loop plots need at least one DGM factor")
    order = tuple(factor_order) if factor_order is not None else tuple(range(arity))
    if sorted(order) != list(range(arity)):
        raise PlotError(f"factor_order must permute 0..{arity - 1}, got {order!r}")
    if len(factor_names) != arity:
        factor_names = tuple(f"factor_{i + 1}" for i in range(arity))

    positions = sorted(combos, key=lambda c: tuple(level_sort_key(c[f]) for f in order))
    methods = []
    for e in selected:
        if e.stratum.method not in methods:
            methods.append(e.stratum.method)
    methods.sort(key=level_sort_key)
    by_cell = {(e.stratum.dgm, e.stratum.method): e.value for e in selected}
    series = tuple(
        {"method": m, "values": [by_cell.get((pos, m)) for pos in positions]}
        for m in methods
    )

    values = [v for s in series for v in s["values"] if v is not None]
    vmin, vmax = min(values), max(values)
    vrange = vmax - vmin
    if vrange == 0.0:
        vrange = 1.0
    band_top = vmin - 0.05 * vrange
    band_height = 0.25 * vrange
    slice_height = band_height / arity
    ribbons = []
    for slot, f in enumerate(order):
        levels = sorted({pos[f] for pos in positions}, key=level_sort_key)
        slice_top = band_top - slot * slice_height
        slice_bottom = slice_top - slice_height
        ys = []
        for pos in positions:
            li = levels.index(pos[f])
            frac = 0.5 if len(levels) == 1 else li / (len(levels) - 1)
            ys.append(slice_bottom + 0.1 * slice_height + frac * 0.8 * slice_height)
        ribbons.append({"factor": factor_names[f], "levels": levels, "y": ys})
    return NestedLoopData(tuple(positions), factor_names, series, tuple(ribbons),
                          (vmin, vmax))
