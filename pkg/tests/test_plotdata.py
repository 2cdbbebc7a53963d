import numpy as np
import pytest
import scipy.stats

from simexplore.errors import (
    MeasureUnavailable,
    NoCommonRepetitions,
    PlotError,
)
from simexplore.measures import PerformanceEstimate, compute_all
from simexplore.model import RawTable, StratumKey, VariableMapping, apply_mapping
from simexplore.plotdata import (
    PlotSpec,
    bland_altman,
    estimate_pairs,
    forest_lolly_data,
    heat_data,
    nested_loop_data,
    ridgeline_data,
    symmetric_interval,
    zip_data,
)


def small(columns, rows, **kwargs):
    raw = RawTable(header=columns, rows=tuple(tuple(r) for r in rows))
    return apply_mapping(raw, VariableMapping(**kwargs))


def test_plot_spec_validates_kind():
    with pytest.raises(PlotError):
        PlotSpec(kind="pie")


# --- estimate pairs / Bland-Altman ---

def test_pairs_with_self_on_diagonal(case_dataset):
    pairs = estimate_pairs(case_dataset, "1", "1")
    assert all(p.a == p.b for p in pairs.points)


def test_pairs_case_study_counts(case_dataset):
    pairs = estimate_pairs(case_dataset, "1", "3")
    by_dgm = {}
    for p in pairs.points:
        by_dgm[p.dgm] = by_dgm.get(p.dgm, 0) + 1
    assert by_dgm == {("1",): 1600, ("2",): 1600}
    assert pairs.n_dropped == 0


def test_pairs_disjoint_reps():
    ds = small(("rep", "m", "est"),
               [("1", "A", "1"), ("2", "B", "2")],
               estimate_col="est", method_col="m", rep_col="rep")
    with pytest.raises(NoCommonRepetitions):
        estimate_pairs(ds, "A", "B")


def test_bland_altman_hand_example():
    ds = small(("rep", "m", "est"),
               [("1", "A", "1"), ("2", "A", "3"), ("1", "B", "2"), ("2", "B", "3")],
               estimate_col="est", method_col="m", rep_col="rep")
    ba = bland_altman(estimate_pairs(ds, "A", "B"))
    assert sorted(ba.diffs) == [-1.0, 0.0]
    assert ba.mean_diff == -0.5
    sd = float(np.std([-1.0, 0.0], ddof=1))
    assert sd == pytest.approx(0.7071, abs=5e-5)
    assert ba.upper_limit == pytest.approx(-0.5 + 1.96 * sd)


def test_bland_altman_identical_methods(case_dataset):
    ba = bland_altman(estimate_pairs(case_dataset, "2", "2"))
    assert all(d == 0.0 for d in ba.diffs)
    assert ba.mean_diff == 0.0 and ba.lower_limit == 0.0 == ba.upper_limit


def test_bland_altman_mean_diff_is_bias_difference(case_dataset):
    # difference of stratum means equals the mean of paired differences
    pairs = estimate_pairs(case_dataset, "1", "3")
    dgm2 = [p for p in pairs.points if p.dgm == ("2",)]
    mean_diff = float(np.mean([p.a - p.b for p in dgm2]))
    ests = {e.stratum.method: e.value
            for e in compute_all(case_dataset, ["bias"], dgm=("2",))}
    assert mean_diff == pytest.approx(ests["1"] - ests["3"], abs=1e-12)
    assert mean_diff == pytest.approx(0.0494 - 0.0062, abs=1e-10)


# --- ridgeline ---

def test_ridgeline_density_integrates_to_one():
    rng = np.random.default_rng(5)
    rows = [("A", repr(float(v))) for v in rng.normal(0.0, 1.0, 400)]
    ds = small(("m", "est"), rows, estimate_col="est", method_col="m")
    group = ridgeline_data(ds)[0]
    grid = np.array(group.grid)
    dens = np.array(group.density)
    assert abs(np.trapezoid(dens, grid) - 1.0) <= 1e-3
    assert all(np.diff(grid) > 0)
    # mode near zero for a N(0,1) sample
    assert abs(grid[int(dens.argmax())]) < 0.4


def test_ridgeline_matches_direct_kde_oracle():
    rng = np.random.default_rng(12)
    values = rng.normal(2.0, 0.5, 101)
    ds = small(("est",), [(repr(float(v)),) for v in values], estimate_col="est")
    group = ridgeline_data(ds)[0]
    n = len(values)
    iqr = np.percentile(values, 75) - np.percentile(values, 25)
    h = 0.9 * min(values.std(ddof=1), iqr / 1.34) * n ** (-0.2)
    assert group.bandwidth == pytest.approx(h, rel=1e-12)
    at = group.grid[17]
    oracle = sum(scipy.stats.norm.pdf((at - v) / h) for v in values) / (n * h)
    assert group.density[17] == pytest.approx(oracle, rel=1e-10)


def test_ridgeline_single_point_falls_back_to_sample():
    ds = small(("est",), [("4.0",)], estimate_col="est")
    group = ridgeline_data(ds)[0]
    assert group.grid is None and group.density is None
    assert group.sample == (4.0,)


def test_ridgeline_constant_sample_falls_back():
    ds = small(("est",), [("2.0",), ("2.0",), ("2.0",)], estimate_col="est")
    group = ridgeline_data(ds)[0]
    assert group.density is None


# --- forest / lolly ---

def test_forest_paper_interval():
    est = PerformanceEstimate("bias", StratumKey(("2",), "1"), 0.0494, 0.0035, 1600)
    point = forest_lolly_data([est], "bias")[0]
    assert point.lower == pytest.approx(0.0425, abs=5e-5)
    assert point.upper == pytest.approx(0.0563, abs=5e-5)


def test_forest_zero_mcse_zero_width():
    est = PerformanceEstimate("bias", StratumKey((), "A"), 0.5, 0.0, 10)
    point = forest_lolly_data([est], "bias")[0]
    assert point.lower == point.upper == 0.5


def test_forest_interval_symmetry_exact(case_dataset):
    ests = compute_all(case_dataset, ["bias", "coverage"])
    for p in forest_lolly_data(ests, "bias") + forest_lolly_data(ests, "coverage"):
        assert (p.upper - p.value) == (p.value - p.lower)


def test_forest_requires_mcse():
    est = PerformanceEstimate("median_est", StratumKey((), "A"), 0.5, None, 10)
    with pytest.raises(MeasureUnavailable):
        forest_lolly_data([est], "median_est")


def test_symmetric_interval_reconciles():
    lower, upper = symmetric_interval(1.0 + 2**-52, 3 * 2**-53)
    assert (upper - (1.0 + 2**-52)) == ((1.0 + 2**-52) - lower)


# --- heat ---

def test_heat_tiles_match_table_values(case_dataset):
    ests = compute_all(case_dataset, ["coverage"])
    tiles = heat_data(ests, "coverage")
    assert len(tiles) == 6
    values = {(t.dgm, t.method): t.value for t in tiles}
    for e in ests:
        assert values[(e.stratum.dgm, e.stratum.method)] == e.value


def test_heat_unknown_measure():
    with pytest.raises(MeasureUnavailable):
        heat_data([], "bias")


# --- zip ---

def test_zip_percentiles_and_identity(case_dataset):
    stripes = zip_data(case_dataset)
    per_stratum: dict = {}
    for s in stripes:
        per_stratum.setdefault((s.dgm, s.method), []).append(s)
    coverage = {(e.stratum.dgm, e.stratum.method): e.value
                for e in compute_all(case_dataset, ["coverage"])}
    for key, group in per_stratum.items():
        assert len(group) == 1600
        pct = sorted(s.rank_percentile for s in group)
        assert pct == [100.0 * i / 1600 for i in range(1, 1601)]
        fraction = sum(1 for s in group if s.covers) / len(group)
        assert fraction == coverage[key]  # exact, same count arithmetic
    dgm2_m1 = per_stratum[(("2",), "1")]
    assert sum(s.covers for s in dgm2_m1) / 1600 == 0.96


def test_zip_ranking_descending_significance():
    ds = small(("rep", "est", "se"),
               [("1", "0.0", "1.0"), ("2", "5.0", "1.0"), ("3", "1.0", "1.0")],
               estimate_col="est", se_col="se", truth_value=0.0, rep_col="rep")
    stripes = zip_data(ds)
    # most significant first: rep 2 (|z|=5), then rep 3, then rep 1
    assert [s.covers for s in stripes] == [False, True, True]
    assert [s.rank_percentile for s in stripes] == pytest.approx(
        [100 / 3, 200 / 3, 100.0])


def test_zip_two_reps_percentiles():
    ds = small(("est", "se"), [("0.0", "1.0"), ("9.0", "1.0")],
               estimate_col="est", se_col="se", truth_value=0.0)
    stripes = zip_data(ds)
    assert sorted(s.rank_percentile for s in stripes) == [50.0, 100.0]
    assert sum(s.covers for s in stripes) == 1


# --- nested loop ---

def nested_estimates():
    ests = []
    for a in ("1", "2"):
        for b in ("x", "y"):
            for method in ("A", "B"):
                value = float(a) + (0.1 if b == "y" else 0.0) + (0.5 if method == "B" else 0.0)
                ests.append(PerformanceEstimate(
                    "bias", StratumKey((a, b), method), value, 0.01, 50))
    return ests


def test_nested_loop_lexicographic_positions():
    data = nested_loop_data(nested_estimates(), "bias")
    assert data.positions == (("1", "x"), ("1", "y"), ("2", "x"), ("2", "y"))
    outer = [p[0] for p in data.positions]
    assert outer == ["1", "1", "2", "2"]  # AABB pattern for the outer factor
    assert [s["method"] for s in data.series] == ["A", "B"]
    assert data.series[0]["values"] == [1.0, 1.1, 2.0, 2.1]


def test_nested_loop_ribbons_below_minimum():
    data = nested_loop_data(nested_estimates(), "bias", factor_names=("a", "b"))
    vmin = data.value_range[0]
    assert len(data.ribbons) == 2
    for ribbon in data.ribbons:
        assert len(ribbon["y"]) == len(data.positions)
        assert max(ribbon["y"]) < vmin
    assert data.ribbons[0]["factor"] == "a"


def test_nested_loop_factor_order_override():
    data = nested_loop_data(nested_estimates(), "bias", factor_order=(1, 0))
    assert data.positions == (("1", "x"), ("2", "x"), ("1", "y"), ("2", "y"))


def test_nested_loop_single_factor(case_dataset):
    ests = compute_all(case_dataset, ["bias"])
    data = nested_loop_data(ests, "bias", factor_names=("dgm",))
    assert data.positions == (("1",), ("2",))
    assert len(data.series) == 3
    assert all(len(s["values"]) == 2 for s in data.series)
    assert len(data.ribbons) == 1
