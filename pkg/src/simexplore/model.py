"""Canonical tidy dataset, variable mapping, and stratification semantics.

A dataset holds one row per simulation repetition. The variable mapping
declares which columns carry the point estimate, its standard error, the
true value, the method label, the data-generating-mechanism (DGM) factors,
optional confidence bounds or degrees of freedom, and the repetition id.
Strata are the (DGM combination x method) cells over which performance is
pooled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ArityMismatch, InvalidMapping, UnassignableRow, UnknownColumn

#: Cell contents treated as a missing value in numeric roles (case-insensitive).
MISSING_MARKERS = frozenset({"", "na", "nan", "."})

#: Synthetic method label used when no method column is declared, so that
#: every downstream operation sees at least one method level.
IMPLICIT_METHOD = "all"


def parse_numeric(cell: str) -> float | None:
    """Parse a cell in a numeric role; unparseable or marked cells are missing."""
    text = cell.strip()
    if text.lower() in MISSING_MARKERS:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    if math.isnan(value):
        return None
    return value


def level_sort_key(level: str):
    """Ordering key for factor levels: numeric levels sort numerically
    (so sample sizes order 50 < 100 < 1000), everything else lexicographically
    after the numeric ones."""
    try:
        value = float(level)
    except ValueError:
        return (1, 0.0, level)
    if math.isnan(value) or math.isinf(value):
        return (1, 0.0, level)
    return (0, value, level)


@dataclass(frozen=True)
class RawTable:
    """Header plus row-major cells exactly as parsed, all text verbatim."""

    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def column_index(self, name: str) -> int:
        try:
            return self.header.index(name)
        except ValueError:
            raise UnknownColumn(f"column {name!r} not in header {list(self.header)}") from None


@dataclass(frozen=True)
class RepetitionRecord:
    """One repetition of the simulation study after mapping."""

    rep_id: str | None
    dgm_values: tuple[str, ...]
    method: str
    estimate: float | None
    se: float | None = None
    truth: float | None = None
    lower: float | None = None
    upper: float | None = None
    df: float | None = None


@dataclass(frozen=True)
class VariableMapping:
    """Which columns play which semantic role.

    ``truth_value`` and ``truth_col`` are mutually exclusive, as are
    ``ci_cols`` and ``df_col`` (supplied bounds versus t critical values;
    normal theory is the default when neither is set).
    """

    estimate_col: str
    se_col: str | None = None
    truth_value: float | None = None
    truth_col: str | None = None
    method_col: str | None = None
    reference_method: str | None = None
    dgm_cols: tuple[str, ...] = ()
    ci_cols: tuple[str, str] | None = None
    df_col: str | None = None
    rep_col: str | None = None
    alpha: float = 0.05

    def __post_init__(self):
        if not self.estimate_col:
            raise InvalidMapping("an estimate column is required")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidMapping(f"alpha must be in (0, 1), got {self.alpha!r}")
        if self.truth_value is not None and self.truth_col is not None:
            raise InvalidMapping("truth_value and truth_col are mutually exclusive")
        if self.ci_cols is not None and self.df_col is not None:
            raise InvalidMapping("ci_cols and df_col are mutually exclusive")
        if self.ci_cols is not None and len(self.ci_cols) != 2:
            raise InvalidMapping("ci_cols must name exactly two columns (lower, upper)")
        if self.reference_method is not None and self.method_col is None:
            raise InvalidMapping("reference_method requires a method column")
        object.__setattr__(self, "dgm_cols", tuple(self.dgm_cols))
        if self.ci_cols is not None:
            object.__setattr__(self, "ci_cols", tuple(self.ci_cols))

    def mapped_columns(self) -> list[str]:
        cols = [self.estimate_col]
        for c in (self.se_col, self.truth_col, self.method_col, self.df_col, self.rep_col):
            if c is not None:
                cols.append(c)
        cols.extend(self.dgm_cols)
        if self.ci_cols is not None:
            cols.extend(self.ci_cols)
        return cols

    def has_truth(self) -> bool:
        return self.truth_value is not None or self.truth_col is not None


@dataclass(frozen=True)
class StratumKey:
    """One (DGM combination x method) cell."""

    dgm: tuple[str, ...]
    method: str

    def sort_key(self):
        return (tuple(level_sort_key(v) for v in self.dgm), level_sort_key(self.method))

    def label(self) -> str:
        dgm = ",".join(self.dgm)
        return f"{dgm}|{self.method}" if dgm else self.method


@dataclass(frozen=True)
class Dataset:
    """Immutable mapped dataset; safe to share across concurrent readers."""

    columns: tuple[tuple[str, str], ...]  # (name, kind), kind in {"numeric", "string"}
    records: tuple[RepetitionRecord, ...]
    raw: RawTable
    mapping: VariableMapping
    _strata: dict | None = field(default=None, compare=False, repr=False)

    def column_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.columns)

    def column_kind(self, name: str) -> str:
        for col, kind in self.columns:
            if col == name:
                return kind
        raise UnknownColumn(f"column {name!r} not in dataset")

    def strata(self) -> dict[StratumKey, tuple[RepetitionRecord, ...]]:
        """Records grouped by stratum, keys in deterministic order."""
        cached = self._strata
        if cached is None:
            groups: dict[StratumKey, list[RepetitionRecord]] = {}
            for rec in self.records:
                key = StratumKey(rec.dgm_values, rec.method)
                groups.setdefault(key, []).append(rec)
            cached = {k: tuple(groups[k])
                      for k in sorted(groups, key=StratumKey.sort_key)}
            # atomic swap: concurrent readers see either None or a complete map
            object.__setattr__(self, "_strata", cached)
        return cached

    def dgm_combinations(self) -> list[tuple[str, ...]]:
        seen: list[tuple[str, ...]] = []
        for key in self.strata():
            if key.dgm not in seen:
                seen.append(key.dgm)
        return seen

    def methods(self) -> list[str]:
        seen: list[str] = []
        for key in self.strata():
            if key.method not in seen:
                seen.append(key.method)
        return seen


def _infer_column_kinds(raw: RawTable) -> tuple[tuple[str, str], ...]:
    kinds = []
    for j, name in enumerate(raw.header):
        numeric = True
        for row in raw.rows:
            cell = row[j].strip()
            if cell.lower() in MISSING_MARKERS:
                continue
            try:
                float(cell)
            except ValueError:
                numeric = False
                break
        kinds.append((name, "numeric" if numeric else "string"))
    return tuple(kinds)


def apply_mapping(raw: RawTable, mapping: VariableMapping) -> Dataset:
    """Build repetition records from a raw table under a variable mapping.

    Non-numeric cells in numeric roles become missing values, never errors.
    Rows with an empty method or DGM cell cannot be assigned to a stratum
    and are rejected. Supplied bounds with lower > upper and negative SEs
    are treated as missing (unusable, not fatal).
    """
    if len(set(raw.header)) != len(raw.header):
        raise InvalidMapping("duplicate column names in header")
    missing_cols = [c for c in mapping.mapped_columns() if c not in raw.header]
    if missing_cols:
        raise UnknownColumn(f"mapping names absent column(s): {missing_cols}")

    width = len(raw.header)
    for i, row in enumerate(raw.rows):
        if len(row) != width:
            raise ArityMismatch(f"row {i + 2} has {len(row)} cells, expected {width}")

    est_ix = raw.column_index(mapping.estimate_col)
    se_ix = raw.column_index(mapping.se_col) if mapping.se_col else None
    truth_ix = raw.column_index(mapping.truth_col) if mapping.truth_col else None
    method_ix = raw.column_index(mapping.method_col) if mapping.method_col else None
    rep_ix = raw.column_index(mapping.rep_col) if mapping.rep_col else None
    df_ix = raw.column_index(mapping.df_col) if mapping.df_col else None
    dgm_ixs = [raw.column_index(c) for c in mapping.dgm_cols]
    ci_ixs = [raw.column_index(c) for c in mapping.ci_cols] if mapping.ci_cols else None

    records = []
    for i, row in enumerate(raw.rows):
        dgm_values = tuple(row[j] for j in dgm_ixs)
        if any(v.strip() == "" for v in dgm_values):
            raise UnassignableRow(f"row {i + 2} has an empty DGM cell")
        if method_ix is not None:
            method = row[method_ix]
            if method.strip() == "":
                raise UnassignableRow(f"row {i + 2} has an empty method cell")
        else:
            method = IMPLICIT_METHOD

        se = parse_numeric(row[se_ix]) if se_ix is not None else None
        if se is not None and se < 0.0:
            se = None
        if truth_ix is not None:
            truth = parse_numeric(row[truth_ix])
        else:
            truth = mapping.truth_value
        lower = upper = None
        if ci_ixs is not None:
            lower = parse_numeric(row[ci_ixs[0]])
            upper = parse_numeric(row[ci_ixs[1]])
            if lower is not None and upper is not None and lower > upper:
                lower = upper = None
        df = parse_numeric(row[df_ix]) if df_ix is not None else None
        if df is not None and df <= 0.0:
            df = None

        records.append(RepetitionRecord(
            rep_id=row[rep_ix] if rep_ix is not None else None,
            dgm_values=dgm_values,
            method=method,
            estimate=parse_numeric(row[est_ix]),
            se=se,
            truth=truth,
            lower=lower,
            upper=upper,
            df=df,
        ))

    dataset = Dataset(
        columns=_infer_column_kinds(raw),
        records=tuple(records),
        raw=raw,
        mapping=mapping,
    )
    if mapping.reference_method is not None:
        if mapping.reference_method not in dataset.methods():
            raise InvalidMapping(
                f"reference method {mapping.reference_method!r} is not a level of "
                f"{mapping.method_col!r}")
    return dataset


def enumerate_strata(dataset: Dataset) -> list[tuple[StratumKey, int]]:
    """Strata in deterministic order with their record counts."""
    return [(key, len(recs)) for key, recs in dataset.strata().items()]
