"""Batch command-line interface mirroring the HTTP service.

Exit codes: 0 success, 2 usage error, 3 input parsing error, 4 analysis
error (e.g. a requested measure lacks its ingredients), 5 server startup
failure. Outputs are byte-identical with the service for the same inputs
because both run through the same library code paths.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import export, ingest, measures, missingness, plotdata
from . import svg as svgmod
from .errors import IngestError, MeasureError, PlotError, SimExploreError
from .export import TableStyle
from .model import Dataset, VariableMapping, apply_mapping

EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_ANALYSIS = 4
EXIT_SERVE = 5


def _add_mapping_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--estimate", required=True, metavar="COL",
                        help="column with the point estimate (required)")
    parser.add_argument("--se", metavar="COL", help="column with standard errors")
    truth = parser.add_mutually_exclusive_group()
    truth.add_argument("--true", dest="true_value", type=float, metavar="VAL",
                       help="fixed true value of the estimand")
    truth.add_argument("--true-col", metavar="COL",
                       help="column with per-repetition true values")
    parser.add_argument("--method", metavar="COL", help="column with method labels")
    parser.add_argument("--reference", metavar="LEVEL",
                        help="reference method for relative precision")
    parser.add_argument("--by", metavar="COL,...", default="",
                        help="comma-separated DGM factor columns")
    parser.add_argument("--ci-lower", metavar="COL", help="supplied lower CI bound")
    parser.add_argument("--ci-upper", metavar="COL", help="supplied upper CI bound")
    parser.add_argument("--df", metavar="COL",
                        help="degrees-of-freedom column for t critical values")
    parser.add_argument("--rep", metavar="COL", help="repetition id column")
    parser.add_argument("--alpha", type=float, default=0.05,
                        help="nominal test/CI level (default 0.05)")


def _mapping_from_args(args) -> VariableMapping:
    ci = None
    if args.ci_lower or args.ci_upper:
        if not (args.ci_lower and args.ci_upper):
            raise SimExploreError("--ci-lower and --ci-upper must be given together")
        ci = (args.ci_lower, args.ci_upper)
    return VariableMapping(
        estimate_col=args.estimate,
        se_col=args.se,
        truth_value=args.true_value,
        truth_col=args.true_col,
        method_col=args.method,
        reference_method=args.reference,
        dgm_cols=tuple(c for c in args.by.split(",") if c),
        ci_cols=ci,
        df_col=args.df,
        rep_col=args.rep,
        alpha=args.alpha,
    )


def _load_dataset(path: str, mapping: VariableMapping) -> Dataset:
    data = Path(path).read_bytes()
    source = ingest.SourceSpec("file-bytes", Path(path).name)
    raw = ingest.parse_source(source, data)
    return apply_mapping(raw, mapping)


def _emit(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _dgm_filter(args, dataset: Dataset) -> tuple[str, ...] | None:
    if not args.dgm:
        return None
    combo = tuple(args.dgm.split(","))
    if combo not in dataset.dgm_combinations():
        known = [",".join(c) for c in dataset.dgm_combinations()]
        raise MeasureError(f"unknown DGM combination {args.dgm!r}; known: {known}")
    return combo


def _cmd_analyze(args) -> int:
    mapping = _mapping_from_args(args)
    dataset = _load_dataset(args.file, mapping)
    selected = [m for m in args.measures.split(",") if m] if args.measures else None
    if selected:
        requested = measures.compute_all(dataset, selected, dgm=_dgm_filter(args, dataset))
        missing_measures = set(selected) - {e.measure for e in requested}
        if missing_measures:
            raise MeasureError(
                f"cannot compute {sorted(missing_measures)} from the available columns")
        ests = requested
    else:
        ests = measures.compute_all(dataset, None, dgm=_dgm_filter(args, dataset))
    if not ests:
        raise MeasureError("no measure is computable from the available columns")

    style = TableStyle(sig_digits=args.sig_digits, include_mcse=not args.no_mcse)
    alpha = mapping.alpha
    if args.format == "latex":
        combos = ([_dgm_filter(args, dataset)] if args.dgm
                  else dataset.dgm_combinations())
        tables = [export.to_latex(ests, style, dgm=combo, alpha=alpha)
                  for combo in combos]
        _emit("\n".join(tables).encode("utf-8"), args.out)
    elif args.format == "json":
        _emit(export.estimates_json(ests), args.out)
    else:
        _emit(export.to_delimited(ests, args.format, "tidy", style,
                                  dgm_cols=mapping.dgm_cols, alpha=alpha), args.out)
    return 0


def _cmd_missing(args) -> int:
    mapping = _mapping_from_args(args)
    dataset = _load_dataset(args.file, mapping)
    summaries = missingness.missing_table(dataset)
    if args.format == "json":
        payload = [{"variable": s.variable, "dgm": list(s.stratum.dgm),
                    "method": s.stratum.method, "n_missing": s.n_missing,
                    "prop_missing": s.prop_missing, "n_cumulative": s.n_cumulative}
                   for s in summaries]
        _emit(export.json_bytes(payload), args.out)
        return 0
    header = ["variable", *mapping.dgm_cols, "method", "n_missing",
              "prop_missing", "n_cumulative"]
    rows = [[s.variable, *s.stratum.dgm, s.stratum.method, str(s.n_missing),
             export.float_literal(s.prop_missing), str(s.n_cumulative)]
            for s in summaries]
    _emit(export._emit_delimited(header, rows, args.format), args.out)
    return 0


def _cmd_plot(args) -> int:
    mapping = _mapping_from_args(args)
    dataset = _load_dataset(args.file, mapping)
    kind = args.kind
    dgm = _dgm_filter(args, dataset)

    if kind in ("scatter", "density-pairs", "bland-altman"):
        if not (args.method_a and args.method_b):
            raise PlotError(f"{kind} needs --method-a and --method-b")
        data = plotdata.estimate_pairs(dataset, args.method_a, args.method_b,
                                       args.quantity)
        if kind == "bland-altman":
            data = plotdata.bland_altman(data)
    elif kind == "ridgeline":
        data = plotdata.ridgeline_data(dataset, args.quantity)
    elif kind in ("forest", "lolly", "heat", "nested-loop"):
        if not args.measure:
            raise PlotError(f"{kind} needs --measure")
        ests = measures.compute_all(dataset, [args.measure], dgm=dgm)
        if kind in ("forest", "lolly"):
            data = plotdata.forest_lolly_data(ests, args.measure)
        elif kind == "heat":
            data = plotdata.heat_data(ests, args.measure)
        else:
            data = plotdata.nested_loop_data(ests, args.measure,
                                             factor_names=mapping.dgm_cols)
    elif kind == "zip":
        data = plotdata.zip_data(dataset)
        if dgm is not None:
            data = [s for s in data if s.dgm == dgm]
    else:
        raise PlotError(f"unknown plot kind {kind!r}")

    if args.data:
        from .service import _plot_payload
        Path(args.data).write_bytes(export.json_bytes(_plot_payload(kind, data)))
    if args.svg or not args.data:
        spec = plotdata.PlotSpec(kind=kind, measure=args.measure, xlab=args.xlab,
                                 ylab=args.ylab, theme=args.theme, width=args.width,
                                 height=args.height, dpi=args.dpi)
        rendered = svgmod.render_svg(spec, data)
        _emit(rendered, args.svg)
    return 0


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, serve

    config = ServiceConfig.from_env()
    if args.max_upload is not None:
        config.max_upload_bytes = args.max_upload
    if args.ttl is not None:
        config.session_ttl = args.ttl
    if args.spill is not None:
        config.spill_dir = args.spill
    if args.static is not None:
        config.static_dir = args.static
    try:
        serve(host=args.bind, port=args.port, config=config)
    except (OSError, SystemExit) as exc:
        print(f"error: could not start server: {exc}", file=sys.stderr)
        return EXIT_SERVE
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simexplore",
        description="Summarize and explore Monte Carlo simulation-study results.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="estimate performance measures from a file")
    p.add_argument("file")
    _add_mapping_flags(p)
    p.add_argument("--measures", metavar="LIST",
                   help=f"comma-separated subset of {','.join(measures.MEASURE_ORDER)}")
    p.add_argument("--dgm", metavar="LEVELS",
                   help="restrict to one DGM combination (comma-separated levels)")
    p.add_argument("--format", choices=("csv", "tsv", "json", "latex"), default="csv")
    p.add_argument("--sig-digits", type=int, default=4)
    p.add_argument("--no-mcse", action="store_true",
                   help="omit Monte Carlo standard errors from formatted tables")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("missing", help="tabulate missing values per stratum")
    p.add_argument("file")
    _add_mapping_flags(p)
    p.add_argument("--format", choices=("csv", "tsv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=_cmd_missing)

    p = sub.add_parser("plot", help="emit plot data or a static SVG")
    p.add_argument("file")
    _add_mapping_flags(p)
    p.add_argument("--kind", required=True, choices=plotdata.PLOT_KINDS)
    p.add_argument("--measure")
    p.add_argument("--dgm", metavar="LEVELS")
    p.add_argument("--method-a")
    p.add_argument("--method-b")
    p.add_argument("--quantity", choices=("estimate", "se"), default="estimate")
    p.add_argument("--svg", metavar="PATH", help="write the rendered SVG here")
    p.add_argument("--data", metavar="PATH", help="write the plot data JSON here")
    p.add_argument("--xlab")
    p.add_argument("--ylab")
    p.add_argument("--theme", default="default", choices=sorted(svgmod.THEMES))
    p.add_argument("--width", type=float, default=640.0)
    p.add_argument("--height", type=float, default=480.0)
    p.add_argument("--dpi", type=float, default=96.0)
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--bind", default="127.0.0.1")
    p.add_argument("--max-upload", type=int, metavar="BYTES")
    p.add_argument("--ttl", type=float, metavar="SECS")
    p.add_argument("--spill", metavar="DIR")
    p.add_argument("--static", metavar="DIR", help="serve these assets under /")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SimExploreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
