import pytest

from simexplore.errors import (
    ArityMismatch,
    InvalidMapping,
    UnassignableRow,
    UnknownColumn,
)
from simexplore.model import (
    IMPLICIT_METHOD,
    RawTable,
    StratumKey,
    VariableMapping,
    apply_mapping,
    enumerate_strata,
    level_sort_key,
    parse_numeric,
)


def tidy_table():
    # 12 rows shaped like the canonical tidy example: 2 DGMs x 2 methods x 3 reps
    rows = []
    for method in ("1", "2"):
        for dgm in ("1", "2"):
            for rep in ("1", "2", "3"):
                rows.append((rep, dgm, method, f"0.{rep}{dgm}{method}"))
    return RawTable(header=("Repetition", "DGM", "Method", "Estimate"), rows=tuple(rows))


def test_apply_mapping_tidy_example():
    mapping = VariableMapping(estimate_col="Estimate", method_col="Method",
                              dgm_cols=("DGM",), rep_col="Repetition")
    ds = apply_mapping(tidy_table(), mapping)
    strata = enumerate_strata(ds)
    assert len(strata) == 4
    assert [n for _, n in strata] == [3, 3, 3, 3]
    assert sum(n for _, n in strata) == len(ds.records)


def test_unknown_column():
    mapping = VariableMapping(estimate_col="nope")
    with pytest.raises(UnknownColumn):
        apply_mapping(tidy_table(), mapping)


def test_na_cell_is_missing_not_error():
    raw = RawTable(header=("est",), rows=(("NA",), ("1.5",), ("nan",), (".",), ("x",)))
    ds = apply_mapping(raw, VariableMapping(estimate_col="est"))
    assert [r.estimate for r in ds.records] == [None, 1.5, None, None, None]


def test_parse_numeric_round_trips_17_digits():
    cell = "0.12345678901234567"
    assert repr(parse_numeric(cell)) == repr(float(cell))
    assert parse_numeric(" -3.5e-2 ") == -0.035


def test_truth_column_parsed_per_repetition():
    raw = RawTable(header=("est", "t"), rows=(("1.0", "0.5"), ("2.0", "NA")))
    ds = apply_mapping(raw, VariableMapping(estimate_col="est", truth_col="t"))
    assert [r.truth for r in ds.records] == [0.5, None]


def test_implicit_single_method_and_stratum():
    raw = RawTable(header=("est",), rows=(("1",), ("2",)))
    ds = apply_mapping(raw, VariableMapping(estimate_col="est"))
    strata = enumerate_strata(ds)
    assert len(strata) == 1
    assert strata[0][0] == StratumKey((), IMPLICIT_METHOD)


def test_numeric_aware_level_ordering():
    raw = RawTable(header=("n", "est"),
                   rows=(("1000", "1"), ("50", "2"), ("100", "3"), ("x", "4")))
    ds = apply_mapping(raw, VariableMapping(estimate_col="est", dgm_cols=("n",)))
    order = [key.dgm[0] for key, _ in enumerate_strata(ds)]
    assert order == ["50", "100", "1000", "x"]


def test_level_sort_key_handles_non_finite_text():
    assert level_sort_key("nan")[0] == 1
    assert level_sort_key("inf")[0] == 1
    assert level_sort_key("2")[0] == 0


def test_deterministic_enumeration(case_dataset):
    first = enumerate_strata(case_dataset)
    second = enumerate_strata(case_dataset)
    assert first == second
    assert [k.label() for k, _ in first] == [
        "1|1", "1|2", "1|3", "2|1", "2|2", "2|3"]
    assert all(n == 1600 for _, n in first)


def test_partition_property(case_dataset):
    total = sum(n for _, n in enumerate_strata(case_dataset))
    assert total == len(case_dataset.records) == 9600


def test_ragged_rows_rejected():
    raw = RawTable(header=("a", "b"), rows=(("1", "2"), ("3",)))
    with pytest.raises(ArityMismatch):
        apply_mapping(raw, VariableMapping(estimate_col="a"))


def test_empty_method_cell_unassignable():
    raw = RawTable(header=("m", "est"), rows=(("", "1"),))
    with pytest.raises(UnassignableRow):
        apply_mapping(raw, VariableMapping(estimate_col="est", method_col="m"))


def test_na_method_cell_is_a_level():
    raw = RawTable(header=("m", "est"), rows=(("NA", "1"),))
    ds = apply_mapping(raw, VariableMapping(estimate_col="est", method_col="m"))
    assert ds.records[0].method == "NA"


def test_unusable_cells_become_missing():
    raw = RawTable(header=("est", "se", "lo", "hi", "df"),
                   rows=(("1", "-0.5", "2", "1", "0"),))
    mapping = VariableMapping(estimate_col="est", se_col="se",
                              ci_cols=("lo", "hi"), df_col=None)
    ds = apply_mapping(raw, mapping)
    rec = ds.records[0]
    assert rec.se is None  # negative
    assert rec.lower is None and rec.upper is None  # inverted


def test_mapping_validation():
    with pytest.raises(InvalidMapping):
        VariableMapping(estimate_col="e", alpha=1.5)
    with pytest.raises(InvalidMapping):
        VariableMapping(estimate_col="e", truth_value=0.0, truth_col="t")
    with pytest.raises(InvalidMapping):
        VariableMapping(estimate_col="e", ci_cols=("a", "b"), df_col="d")
    with pytest.raises(InvalidMapping):
        VariableMapping(estimate_col="e", reference_method="A")


def test_reference_method_must_be_a_level():
    raw = RawTable(header=("m", "est"), rows=(("A", "1"),))
    mapping = VariableMapping(estimate_col="est", method_col="m",
                              reference_method="B")
    with pytest.raises(InvalidMapping):
        apply_mapping(raw, mapping)


def test_column_kind_inference():
    raw = RawTable(header=("num", "mixed", "txt"),
                   rows=(("1", "1", "a"), ("NA", "x", "b")))
    ds = apply_mapping(raw, VariableMapping(estimate_col="num"))
    assert ds.column_kind("num") == "numeric"
    assert ds.column_kind("mixed") == "string"
    assert ds.column_kind("txt") == "string"
