"""Table rendering (LaTeX) and serialization of estimates and datasets.

Numbers are rounded only at the formatting boundary: delimited tidy
exports carry full float precision via shortest round-trip decimal
literals, so export -> ingest -> export is a fixed point. The LaTeX table
is the single lossy surface, controlled by TableStyle.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace

from .errors import EmptySelection, NonFinite
from .measures import MEASURE_ORDER, PerformanceEstimate, measure_label
from .model import Dataset, level_sort_key

_LATEX_SPECIALS = {
    "&": r"\&", "%": r"\%", "$": r"\$", "#": r"\#", "_": r"\_",
    "{": r"\{", "}": r"\}", "~": r"\textasciitilde{}", "^": r"\textasciicircum{}",
    "\\": r"\textbackslash{}",
}


def latex_escape(text: str) -> str:
    return "".join(_LATEX_SPECIALS.get(ch, ch) for ch in text)


@dataclass(frozen=True)
class TableStyle:
    """Display options for formatted tables."""

    sig_digits: int = 4
    include_mcse: bool = True
    caption: str = ""
    orientation: str = "wide"  # "wide" (measures x methods) | "tidy"

    def __post_init__(self):
        if self.sig_digits < 1:
            raise ValueError("sig_digits must be >= 1")
        if self.orientation not in ("wide", "tidy"):
            raise ValueError(f"orientation must be 'wide' or 'tidy', got {self.orientation!r}")


def _signif(value: float, digits: int) -> float:
    if value == 0.0:
        return 0.0
    exponent = math.floor(math.log10(abs(value)))
    return round(value, digits - 1 - exponent)


def format_number(value: float, sig_digits: int) -> str:
    """Round to significant digits with trailing-zero padding.

    Values below one in magnitude keep exactly ``sig_digits`` decimal
    places (the display convention of the exported tables, e.g. 0.9600);
    larger values spend significance on their integer digits. The decimal
    string is produced by a single correctly-rounded conversion of the
    original value, so no double rounding occurs at bin boundaries.
    """
    if not math.isfinite(value):
        raise NonFinite(f"cannot format non-finite value {value!r}")
    rounded = _signif(value, sig_digits)
    if rounded == 0.0:
        return f"{0.0:.{sig_digits}f}"
    exponent = math.floor(math.log10(abs(rounded)))
    if exponent >= sig_digits:
        return f"{rounded:.0f}"
    decimals = sig_digits if exponent < 0 else sig_digits - 1 - exponent
    text = f"{value:.{decimals}f}"
    if text.lstrip("-0.") == "":  # a rounded-away value keeps no sign
        text = text.lstrip("-")
    return text


def format_cell(value: float, mcse: float | None, style: TableStyle) -> str:
    """One table cell: the value, with its MCSE in parentheses when shown."""
    text = format_number(value, style.sig_digits)
    if mcse is not None and style.include_mcse:
        text += f" ({format_number(mcse, style.sig_digits)})"
    return text


def _ordered_measures(estimates: list[PerformanceEstimate]) -> list[str]:
    present = {e.measure for e in estimates}
    return [m for m in MEASURE_ORDER if m in present]


def _ordered_methods(estimates: list[PerformanceEstimate]) -> list[str]:
    methods = {e.stratum.method for e in estimates}
    return sorted(methods, key=level_sort_key)


def _filter_dgm(estimates: list[PerformanceEstimate],
                dgm: tuple[str, ...] | None) -> list[PerformanceEstimate]:
    if dgm is None:
        return list(estimates)
    return [e for e in estimates if e.stratum.dgm == tuple(dgm)]


def to_latex(estimates: list[PerformanceEstimate], style: TableStyle,
             dgm: tuple[str, ...] | None = None, alpha: float = 0.05) -> str:
    """Booktabs table with measures as rows and methods as columns."""
    selection = _filter_dgm(estimates, dgm)
    if not selection:
        raise EmptySelection("no estimates to tabulate")
    measures = _ordered_measures(selection)
    methods = _ordered_methods(selection)
    cells = {(e.measure, e.stratum.method): e for e in selection}

    lines = []
    if style.caption:
        lines += ["\\begin{table}", "\\centering",
                  f"\\caption{{{latex_escape(style.caption)}}}"]
    lines.append("\\begin{tabular}[t]{" + "l" * (1 + len(methods)) + "}")
    lines.append("\\toprule")
    header = " & ".join(["Performance Measure"] + [latex_escape(m) for m in methods])
    lines.append(header + "\\\\")
    lines.append("\\midrule")
    for measure in measures:
        row = [latex_escape(measure_label(measure, alpha))]
        for method in methods:
            est = cells.get((measure, method))
            row.append("" if est is None else format_cell(est.value, est.mcse, style))
        lines.append(" & ".join(row) + "\\\\")
    lines.append("\\bottomrule")
    lines.append("\\end{tabular}")
    if style.caption:
        lines.append("\\end{table}")
    return "\n".join(lines) + "\n"


def float_literal(value: float | None) -> str:
    """Shortest decimal literal that round-trips the float exactly."""
    if value is None:
        return ""
    return repr(value)


def _tidy_rows(estimates: list[PerformanceEstimate],
               dgm_cols: tuple[str, ...]) -> tuple[list[str], list[list[str]]]:
    arity = len(estimates[0].stratum.dgm)
    if len(dgm_cols) != arity:
        dgm_cols = tuple(f"dgm_{i + 1}" for i in range(arity))
    header = ["measure", *dgm_cols, "method", "value", "mcse", "n_used"]
    rows = []
    for e in estimates:
        rows.append([e.measure, *e.stratum.dgm, e.stratum.method,
                     float_literal(e.value), float_literal(e.mcse), str(e.n_used)])
    return header, rows


def _wide_rows(estimates: list[PerformanceEstimate], style: TableStyle,
               alpha: float) -> tuple[list[str], list[list[str]]]:
    dgms = {e.stratum.dgm for e in estimates}
    if len(dgms) > 1:
        raise EmptySelection(
            "wide orientation needs a single DGM; filter before exporting")
    measures = _ordered_measures(estimates)
    methods = _ordered_methods(estimates)
    cells = {(e.measure, e.stratum.method): e for e in estimates}
    header = ["Performance Measure"] + methods
    rows = []
    for measure in measures:
        row = [measure_label(measure, alpha)]
        for method in methods:
            est = cells.get((measure, method))
            row.append("" if est is None else format_cell(est.value, est.mcse, style))
        rows.append(row)
    return header, rows


def _emit_delimited(header: list[str], rows: list[list[str]], fmt: str) -> bytes:
    if fmt == "json-records" or fmt == "json":
        records = [dict(zip(header, row)) for row in rows]
        return json_bytes(records)
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="," if fmt == "csv" else "\t",
                        lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def to_delimited(estimates: list[PerformanceEstimate], fmt: str = "csv",
                 orientation: str = "tidy", style: TableStyle | None = None,
                 dgm: tuple[str, ...] | None = None,
                 dgm_cols: tuple[str, ...] = (), alpha: float = 0.05) -> bytes:
    """Serialize estimates, tidy (full precision) or wide (as displayed)."""
    if fmt not in ("csv", "tsv", "json", "json-records"):
        raise ValueError(f"unsupported format {fmt!r}")
    selection = _filter_dgm(estimates, dgm)
    if not selection:
        raise EmptySelection("no estimates to export")
    style = style or TableStyle()
    if orientation == "tidy":
        header, rows = _tidy_rows(selection, dgm_cols)
    else:
        header, rows = _wide_rows(selection, style, alpha)
    return _emit_delimited(header, rows, fmt)


def dataset_to_delimited(dataset: Dataset, fmt: str = "csv") -> bytes:
    """Re-emit the raw table verbatim (round-trips through ingestion)."""
    raw = dataset.raw
    return _emit_delimited(list(raw.header), [list(r) for r in raw.rows], fmt)


def json_bytes(payload) -> bytes:
    """Canonical JSON encoding shared by the CLI and the HTTP service, so
    both surfaces emit byte-identical bodies for identical inputs."""
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False,
                      allow_nan=False).encode("utf-8")


def estimates_payload(estimates: list[PerformanceEstimate]) -> dict:
    """JSON-ready structure for a list of performance estimates."""
    return {"estimates": [
        {
            "measure": e.measure,
            "dgm": list(e.stratum.dgm),
            "method": e.stratum.method,
            "value": e.value,
            "mcse": e.mcse,
            "n_used": e.n_used,
        }
        for e in estimates
    ]}


def estimates_json(estimates: list[PerformanceEstimate]) -> bytes:
    return json_bytes(estimates_payload(estimates))


def style_with(style: TableStyle, **overrides) -> TableStyle:
    return replace(style, **overrides)
