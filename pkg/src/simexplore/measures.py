"""Performance measures with Monte Carlo standard errors, per stratum.

Every operation works on one stratum's aligned per-repetition arrays and
applies pairwise deletion: repetitions missing an ingredient for a given
measure are dropped for that measure only, and the count actually used is
reported as ``n_used``. Binary measures (coverage, bias-eliminated
coverage, power) carry the exact binomial MCSE sqrt(p(1-p)/n).

Strata with a single usable repetition yield point values only; spread
estimates and MCSEs are withheld rather than reported as zero.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    MeasureError,
    MissingIngredient,
    NoIntervals,
    NoReference,
    NoSEs,
    NoTruth,
    Undefined,
    UnpairedRepetitions,
)
from .model import Dataset, StratumKey, VariableMapping
from .quantiles import norm_ppf, t_ppf

logger = logging.getLogger(__name__)

#: Canonical measure order used everywhere results are enumerated.
MEASURE_ORDER = (
    "bias", "emp_se", "mod_se", "mse", "coverage", "becover", "power",
    "relprec", "mean_est", "median_est", "mean_sq_err", "median_sq_err",
)

#: Measures that never carry an MCSE.
_NO_MCSE = frozenset({"median_est", "median_sq_err"})


def measure_label(measure: str, alpha: float = 0.05) -> str:
    """Human-readable row label for a measure at a given nominal level."""
    pct = f"{100.0 * (1.0 - alpha):g}"
    lvl = f"{100.0 * alpha:g}"
    labels = {
        "bias": "Bias in point estimate",
        "emp_se": "Empirical standard error",
        "mod_se": "Model-based standard error",
        "mse": "Mean squared error",
        "coverage": f"Coverage of nominal {pct}% confidence interval",
        "becover": f"Bias-eliminated coverage of nominal {pct}% confidence interval",
        "power": f"Power of {lvl}% level test",
        "relprec": "Relative % increase in precision against reference method",
        "mean_est": "Mean point estimate",
        "median_est": "Median point estimate",
        "mean_sq_err": "Mean squared estimation error",
        "median_sq_err": "Median squared estimation error",
    }
    try:
        return labels[measure]
    except KeyError:
        raise MeasureError(f"unknown measure {measure!r}") from None


@dataclass(frozen=True)
class CriticalValueRule:
    """How per-repetition confidence intervals are constructed."""

    kind: str  # "normal" | "t-per-repetition" | "supplied-bounds"


def rule_for(mapping: VariableMapping) -> CriticalValueRule:
    if mapping.ci_cols is not None:
        return CriticalValueRule("supplied-bounds")
    if mapping.df_col is not None:
        return CriticalValueRule("t-per-repetition")
    return CriticalValueRule("normal")


@dataclass(frozen=True)
class PerformanceInput:
    """Aligned per-repetition arrays for one stratum (NaN marks missing)."""

    key: StratumKey
    estimates: np.ndarray
    ses: np.ndarray | None
    truth: float | np.ndarray | None
    lowers: np.ndarray | None
    uppers: np.ndarray | None
    dfs: np.ndarray | None
    rep_ids: tuple[str | None, ...]
    alpha: float = 0.05

    def truth_array(self) -> np.ndarray | None:
        if self.truth is None:
            return None
        if isinstance(self.truth, np.ndarray):
            return self.truth
        return np.full_like(self.estimates, float(self.truth))


@dataclass(frozen=True)
class PerformanceEstimate:
    """One (measure, stratum) result."""

    measure: str
    stratum: StratumKey
    value: float
    mcse: float | None
    n_used: int


def stratum_inputs(dataset: Dataset) -> list[PerformanceInput]:
    """Per-stratum inputs in deterministic stratum order."""
    mapping = dataset.mapping
    out = []
    for key, recs in dataset.strata().items():
        def arr(getter, wanted: bool) -> np.ndarray | None:
            if not wanted:
                return None
            return np.array([math.nan if getter(r) is None else getter(r) for r in recs],
                            dtype=float)

        truth: float | np.ndarray | None
        if mapping.truth_col is not None:
            truth = arr(lambda r: r.truth, True)
        else:
            truth = mapping.truth_value
        out.append(PerformanceInput(
            key=key,
            estimates=arr(lambda r: r.estimate, True),
            ses=arr(lambda r: r.se, mapping.se_col is not None),
            truth=truth,
            lowers=arr(lambda r: r.lower, mapping.ci_cols is not None),
            uppers=arr(lambda r: r.upper, mapping.ci_cols is not None),
            dfs=arr(lambda r: r.df, mapping.df_col is not None),
            rep_ids=tuple(r.rep_id for r in recs),
            alpha=mapping.alpha,
        ))
    return out


def _sd(values: np.ndarray) -> float:
    # n-1 sample standard deviation
    return float(np.std(values, ddof=1))


def bias(inp: PerformanceInput) -> PerformanceEstimate:
    """Mean deviation of the estimates from the truth."""
    truth = inp.truth_array()
    if truth is None:
        raise NoTruth("bias requires a true value")
    mask = np.isfinite(inp.estimates) & np.isfinite(truth)
    n = int(mask.sum())
    if n < 1:
        raise Undefined("bias needs at least one usable repetition")
    diffs = inp.estimates[mask] - truth[mask]
    value = float(np.mean(diffs))
    mcse = _sd(diffs) / math.sqrt(n) if n >= 2 else None
    return PerformanceEstimate("bias", inp.key, value, mcse, n)


def empirical_se(inp: PerformanceInput) -> PerformanceEstimate:
    """Standard deviation of the estimates across repetitions."""
    mask = np.isfinite(inp.estimates)
    n = int(mask.sum())
    if n < 2:
        raise Undefined("empirical SE needs at least two usable repetitions")
    s = _sd(inp.estimates[mask])
    mcse = s / math.sqrt(2.0 * (n - 1))
    return PerformanceEstimate("emp_se", inp.key, s, mcse, n)


def model_se(inp: PerformanceInput) -> PerformanceEstimate:
    """Root mean of the squared reported standard errors."""
    if inp.ses is None:
        raise NoSEs("model SE requires a standard-error column")
    mask = np.isfinite(inp.ses)
    n = int(mask.sum())
    if n < 1:
        raise NoSEs("no usable standard errors in stratum")
    sq = inp.ses[mask] ** 2
    value = math.sqrt(float(np.mean(sq)))
    mcse = None
    if n >= 2:
        var_sq = float(np.var(sq, ddof=1))
        mcse = 0.0 if var_sq == 0.0 else math.sqrt(var_sq / (4.0 * n * value * value))
    return PerformanceEstimate("mod_se", inp.key, value, mcse, n)


def mse(inp: PerformanceInput, measure: str = "mse") -> PerformanceEstimate:
    """Mean squared deviation from the truth."""
    truth = inp.truth_array()
    if truth is None:
        raise NoTruth("MSE requires a true value")
    mask = np.isfinite(inp.estimates) & np.isfinite(truth)
    n = int(mask.sum())
    if n < 1:
        raise Undefined("MSE needs at least one usable repetition")
    sq = (inp.estimates[mask] - truth[mask]) ** 2
    value = float(np.mean(sq))
    mcse = _sd(sq) / math.sqrt(n) if n >= 2 else None
    return PerformanceEstimate(measure, inp.key, value, mcse, n)


def mean_estimate(inp: PerformanceInput) -> PerformanceEstimate:
    mask = np.isfinite(inp.estimates)
    n = int(mask.sum())
    if n < 1:
        raise Undefined("mean estimate needs at least one usable repetition")
    vals = inp.estimates[mask]
    mcse = _sd(vals) / math.sqrt(n) if n >= 2 else None
    return PerformanceEstimate("mean_est", inp.key, float(np.mean(vals)), mcse, n)


def median_estimate(inp: PerformanceInput) -> PerformanceEstimate:
    mask = np.isfinite(inp.estimates)
    n = int(mask.sum())
    if n < 1:
        raise Undefined("median estimate needs at least one usable repetition")
    return PerformanceEstimate("median_est", inp.key,
                               float(np.median(inp.estimates[mask])), None, n)


def median_squared_error(inp: PerformanceInput) -> PerformanceEstimate:
    truth = inp.truth_array()
    if truth is None:
        raise NoTruth("median squared error requires a true value")
    mask = np.isfinite(inp.estimates) & np.isfinite(truth)
    n = int(mask.sum())
    if n < 1:
        raise Undefined("median squared error needs at least one usable repetition")
    sq = (inp.estimates[mask] - truth[mask]) ** 2
    return PerformanceEstimate("median_sq_err", inp.key, float(np.median(sq)), None, n)


def mean_median_summaries(inp: PerformanceInput) -> list[PerformanceEstimate]:
    """Mean/median estimate and mean/median squared error for one stratum."""
    return [
        mean_estimate(inp),
        median_estimate(inp),
        mse(inp, measure="mean_sq_err"),
        median_squared_error(inp),
    ]


def build_intervals(inp: PerformanceInput,
                    rule: CriticalValueRule) -> tuple[np.ndarray, np.ndarray]:
    """Per-repetition confidence bounds; NaN where not constructible."""
    if rule.kind == "supplied-bounds":
        if inp.lowers is None or inp.uppers is None:
            raise MissingIngredient("supplied-bounds rule needs CI columns")
        return inp.lowers, inp.uppers
    if inp.ses is None:
        raise MissingIngredient(f"{rule.kind} rule needs a standard-error column")
    if rule.kind == "normal":
        z = norm_ppf(1.0 - inp.alpha / 2.0)
        half = z * inp.ses
        return inp.estimates - half, inp.estimates + half
    if rule.kind == "t-per-repetition":
        if inp.dfs is None:
            raise MissingIngredient("t rule needs a degrees-of-freedom column")
        p = 1.0 - inp.alpha / 2.0
        cache: dict[float, float] = {}
        crit = np.full_like(inp.estimates, math.nan)
        for i, df in enumerate(inp.dfs):
            if math.isfinite(df) and df > 0.0:
                if df not in cache:
                    cache[df] = t_ppf(p, df)
                crit[i] = cache[df]
        half = crit * inp.ses
        return inp.estimates - half, inp.estimates + half
    raise MeasureError(f"unknown critical value rule {rule.kind!r}")


def _binomial_estimate(measure: str, inp: PerformanceInput, hits: np.ndarray,
                       n: int) -> PerformanceEstimate:
    k = int(np.count_nonzero(hits))
    value = k / n
    mcse = math.sqrt(value * (1.0 - value) / n) if n >= 2 else None
    return PerformanceEstimate(measure, inp.key, value, mcse, n)


def coverage(inp: PerformanceInput, rule: CriticalValueRule) -> PerformanceEstimate:
    """Proportion of intervals containing the true value."""
    truth = inp.truth_array()
    if truth is None:
        raise NoTruth("coverage requires a true value")
    try:
        lo, hi = build_intervals(inp, rule)
    except MissingIngredient as exc:
        raise NoIntervals(str(exc)) from exc
    mask = np.isfinite(lo) & np.isfinite(hi) & np.isfinite(truth)
    n = int(mask.sum())
    if n < 1:
        raise NoIntervals("no usable intervals in stratum")
    hits = (lo[mask] <= truth[mask]) & (truth[mask] <= hi[mask])
    return _binomial_estimate("coverage", inp, hits, n)


def bias_eliminated_coverage(inp: PerformanceInput,
                             rule: CriticalValueRule) -> PerformanceEstimate:
    """Coverage computed against the stratum mean estimate instead of the truth."""
    est_mask = np.isfinite(inp.estimates)
    if not est_mask.any():
        raise Undefined("bias-eliminated coverage needs at least one estimate")
    center = float(np.mean(inp.estimates[est_mask]))
    try:
        lo, hi = build_intervals(inp, rule)
    except MissingIngredient as exc:
        raise NoIntervals(str(exc)) from exc
    mask = np.isfinite(lo) & np.isfinite(hi)
    n = int(mask.sum())
    if n < 1:
        raise NoIntervals("no usable intervals in stratum")
    hits = (lo[mask] <= center) & (center <= hi[mask])
    return _binomial_estimate("becover", inp, hits, n)


def power(inp: PerformanceInput, rule: CriticalValueRule) -> PerformanceEstimate:
    """Rejection rate of the two-sided test of a zero effect at level alpha.

    Uses |estimate| >= critical value * SE when SEs are available; falls
    back to "the supplied interval excludes zero" otherwise.
    """
    if inp.ses is not None and rule.kind != "supplied-bounds":
        if rule.kind == "normal":
            crit = np.full_like(inp.estimates, norm_ppf(1.0 - inp.alpha / 2.0))
            mask = np.isfinite(inp.estimates) & np.isfinite(inp.ses)
        elif rule.kind == "t-per-repetition":
            if inp.dfs is None:
                raise MissingIngredient("t rule needs a degrees-of-freedom column")
            p = 1.0 - inp.alpha / 2.0
            cache: dict[float, float] = {}
            crit = np.full_like(inp.estimates, math.nan)
            for i, df in enumerate(inp.dfs):
                if math.isfinite(df) and df > 0.0:
                    if df not in cache:
                        cache[df] = t_ppf(p, df)
                    crit[i] = cache[df]
            mask = np.isfinite(inp.estimates) & np.isfinite(inp.ses) & np.isfinite(crit)
        else:
            raise MeasureError(f"unknown critical value rule {rule.kind!r}")
        if not mask.any():
            raise MissingIngredient("no usable repetitions for power")
        hits = np.abs(inp.estimates[mask]) >= crit[mask] * inp.ses[mask]
        return _binomial_estimate("power", inp, hits, int(mask.sum()))

    if inp.lowers is not None and inp.uppers is not None:
        mask = np.isfinite(inp.lowers) & np.isfinite(inp.uppers)
        n = int(mask.sum())
        if n < 1:
            raise MissingIngredient("no usable intervals for power")
        hits = (inp.lowers[mask] > 0.0) | (inp.uppers[mask] < 0.0)
        return _binomial_estimate("power", inp, hits, n)
    raise MissingIngredient("power requires standard errors or supplied bounds")


def relative_precision(inp_b: PerformanceInput,
                       inp_a: PerformanceInput) -> PerformanceEstimate:
    """Percent precision gain of method B over reference method A.

    Repetitions are paired by rep id; when no rep id column is mapped, both
    strata must be positionally aligned and pairing falls back to record
    order.
    """
    if inp_b.key.dgm != inp_a.key.dgm:
        raise UnpairedRepetitions("methods compared across different DGMs")

    def indexed(inp: PerformanceInput) -> dict:
        pairs = {}
        for i, rid in enumerate(inp.rep_ids):
            v = inp.estimates[i]
            if math.isfinite(v):
                key = rid if rid is not None else i
                if key not in pairs:  # first occurrence wins on duplicate ids
                    pairs[key] = v
        return pairs

    a_by_rep = indexed(inp_a)
    b_by_rep = indexed(inp_b)
    common = [k for k in b_by_rep if k in a_by_rep]
    n = len(common)
    if n < 2:
        raise UnpairedRepetitions("fewer than two common repetitions")
    a = np.array([a_by_rep[k] for k in common])
    b = np.array([b_by_rep[k] for k in common])
    s_a = _sd(a)
    s_b = _sd(b)
    if s_b == 0.0:
        raise Undefined("comparator has zero empirical SE")
    ratio2 = (s_a / s_b) ** 2
    value = 100.0 * (ratio2 - 1.0)
    if s_a == 0.0:
        mcse = None
    else:
        # 1 - rho^2 as the residual variance fraction of b regressed on a;
        # the direct 1 - rho*rho cancels catastrophically as |rho| -> 1
        da = a - a.mean()
        db = b - b.mean()
        slope = float((da * db).sum() / (da * da).sum())
        sse = float(((db - slope * da) ** 2).sum())
        sst = float((db * db).sum())
        unexplained = min(1.0, max(0.0, sse / sst))
        mcse = 200.0 * ratio2 * math.sqrt(unexplained / (n - 1))
    return PerformanceEstimate("relprec", inp_b.key, value, mcse, n)


def compute_measure(measure: str, inp: PerformanceInput, rule: CriticalValueRule,
                    reference: PerformanceInput | None = None) -> PerformanceEstimate:
    """Dispatch a single measure for one stratum."""
    if measure == "bias":
        return bias(inp)
    if measure == "emp_se":
        return empirical_se(inp)
    if measure == "mod_se":
        return model_se(inp)
    if measure in ("mse", "mean_sq_err"):
        return mse(inp, measure=measure)
    if measure == "coverage":
        return coverage(inp, rule)
    if measure == "becover":
        return bias_eliminated_coverage(inp, rule)
    if measure == "power":
        return power(inp, rule)
    if measure == "relprec":
        if reference is None:
            raise NoReference("no reference method configured")
        return relative_precision(inp, reference)
    if measure == "mean_est":
        return mean_estimate(inp)
    if measure == "median_est":
        return median_estimate(inp)
    if measure == "median_sq_err":
        return median_squared_error(inp)
    raise MeasureError(f"unknown measure {measure!r}")


def compute_all(dataset: Dataset, measures: list[str] | None = None,
                dgm: tuple[str, ...] | None = None) -> list[PerformanceEstimate]:
    """All requested measures over all strata, in deterministic order.

    Measures whose ingredients are unavailable in a stratum are silently
    omitted (logged at debug level); strata are independent.
    """
    if measures is None:
        selected = list(MEASURE_ORDER)
    else:
        unknown = [m for m in measures if m not in MEASURE_ORDER]
        if unknown:
            raise MeasureError(f"unknown measure(s): {unknown}")
        selected = [m for m in MEASURE_ORDER if m in measures]
    rule = rule_for(dataset.mapping)
    inputs = stratum_inputs(dataset)
    if dgm is not None:
        inputs = [inp for inp in inputs if inp.key.dgm == tuple(dgm)]

    references: dict[tuple[str, ...], PerformanceInput] = {}
    if dataset.mapping.reference_method is not None:
        for inp in inputs:
            if inp.key.method == dataset.mapping.reference_method:
                references[inp.key.dgm] = inp

    results = []
    for inp in inputs:
        for measure in selected:
            try:
                results.append(compute_measure(measure, inp, rule,
                                               reference=references.get(inp.key.dgm)))
            except MeasureError as exc:
                logger.debug("skipping %s for stratum %s: %s",
                             measure, inp.key.label(), exc)
    return results
