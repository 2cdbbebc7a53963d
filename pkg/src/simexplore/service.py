"""HTTP JSON API over the analysis engine.

Every endpoint is a thin adapter over library operations; no statistics
are computed here. Sessions are kept in memory (optionally spilled to a
directory so a local instance survives restarts) and expire after an
idle TTL, with LRU eviction beyond the session cap.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import export, ingest, measures, missingness, plotdata
from . import svg as svgmod
from .errors import (
    BadStatus,
    EmptySelection,
    IngestError,
    InvalidMapping,
    MeasureError,
    NetworkError,
    NonNumericVariable,
    PlotError,
    SimExploreError,
    TooLarge,
    UnassignableRow,
    UnknownColumn,
)
from .export import TableStyle
from .model import Dataset, RawTable, VariableMapping, apply_mapping, enumerate_strata

DEFAULT_TTL_SECONDS = 24 * 3600.0


class ServiceError(SimExploreError):
    def __init__(self, status: int, code: str, message: str, detail=None):
        self.status = status
        self.code = code
        self.detail = detail
        super().__init__(message)


@dataclass
class ServiceConfig:
    max_upload_bytes: int = ingest.DEFAULT_MAX_BYTES
    session_ttl: float = DEFAULT_TTL_SECONDS
    max_sessions: int = 256
    spill_dir: str | None = None
    converter_cmd: tuple[str, ...] | None = None
    static_dir: str | None = None

    @classmethod
    def from_env(cls, environ=os.environ) -> "ServiceConfig":
        cfg = cls()
        if v := environ.get("SIMEXPLORE_MAX_UPLOAD"):
            cfg.max_upload_bytes = int(v)
        if v := environ.get("SIMEXPLORE_SESSION_TTL"):
            cfg.session_ttl = float(v)
        if v := environ.get("SIMEXPLORE_SPILL_DIR"):
            cfg.spill_dir = v
        if v := environ.get("SIMEXPLORE_CONVERTER"):
            cfg.converter_cmd = tuple(v.split())
        if v := environ.get("SIMEXPLORE_STATIC_DIR"):
            cfg.static_dir = v
        return cfg


@dataclass
class SessionOptions:
    sig_digits: int = 4
    include_mcse: bool = True
    caption: str = ""
    measures: list[str] | None = None  # None = all available

    def style(self) -> TableStyle:
        return TableStyle(sig_digits=self.sig_digits, include_mcse=self.include_mcse,
                          caption=self.caption)


@dataclass
class Session:
    id: str
    created_at: float
    last_touched: float
    raw: RawTable
    source_name: str | None = None
    dataset: Dataset | None = None
    options: SessionOptions = field(default_factory=SessionOptions)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


def mapping_to_dict(mapping: VariableMapping) -> dict:
    truth = None
    if mapping.truth_value is not None:
        truth = {"value": mapping.truth_value}
    elif mapping.truth_col is not None:
        truth = {"column": mapping.truth_col}
    return {
        "estimate": mapping.estimate_col,
        "se": mapping.se_col,
        "truth": truth,
        "method": mapping.method_col,
        "reference": mapping.reference_method,
        "dgm": list(mapping.dgm_cols),
        "ci": list(mapping.ci_cols) if mapping.ci_cols else None,
        "df": mapping.df_col,
        "rep": mapping.rep_col,
        "alpha": mapping.alpha,
    }


def mapping_from_dict(body: dict) -> VariableMapping:
    truth = body.get("truth") or {}
    ci = body.get("ci")
    return VariableMapping(
        estimate_col=body.get("estimate") or "",
        se_col=body.get("se"),
        truth_value=truth.get("value"),
        truth_col=truth.get("column"),
        method_col=body.get("method"),
        reference_method=body.get("reference"),
        dgm_cols=tuple(body.get("dgm") or ()),
        ci_cols=tuple(ci) if ci else None,
        df_col=body.get("df"),
        rep_col=body.get("rep"),
        alpha=body.get("alpha", 0.05),
    )


class SessionStore:
    """Thread-safe session map with TTL expiry and LRU eviction."""

    def __init__(self, config: ServiceConfig, clock=time.time):
        self.config = config
        self.clock = clock
        self._lock = threading.RLock()
        self._sessions: dict[str, Session] = {}
        if config.spill_dir:
            os.makedirs(config.spill_dir, exist_ok=True)

    def _spill_path(self, session_id: str) -> str | None:
        if not self.config.spill_dir:
            return None
        safe = "".join(ch for ch in session_id if ch.isalnum() or ch in "-_")
        return os.path.join(self.config.spill_dir, f"{safe}.json")

    def spill(self, session: Session) -> None:
        path = self._spill_path(session.id)
        if path is None:
            return
        payload = {
            "id": session.id,
            "created_at": session.created_at,
            "last_touched": session.last_touched,
            "source_name": session.source_name,
            "raw": {"header": list(session.raw.header),
                    "rows": [list(r) for r in session.raw.rows]},
            "mapping": mapping_to_dict(session.dataset.mapping) if session.dataset else None,
            "options": {
                "sig_digits": session.options.sig_digits,
                "include_mcse": session.options.include_mcse,
                "caption": session.options.caption,
                "measures": session.options.measures,
            },
        }
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)

    def _load_spilled(self, session_id: str) -> Session | None:
        path = self._spill_path(session_id)
        if path is None or not os.path.exists(path):
            return None
        try:
            with open(path, encoding="utf-8") as fh:
                payload = json.load(fh)
            raw = RawTable(header=tuple(payload["raw"]["header"]),
                           rows=tuple(tuple(r) for r in payload["raw"]["rows"]))
            session = Session(
                id=payload["id"], created_at=payload["created_at"],
                last_touched=self.clock(), raw=raw,
                source_name=payload.get("source_name"),
            )
            opts = payload.get("options") or {}
            session.options = SessionOptions(
                sig_digits=opts.get("sig_digits", 4),
                include_mcse=opts.get("include_mcse", True),
                caption=opts.get("caption", ""),
                measures=opts.get("measures"),
            )
            if payload.get("mapping"):
                session.dataset = apply_mapping(raw, mapping_from_dict(payload["mapping"]))
            return session
        except (OSError, ValueError, KeyError, SimExploreError):
            return None

    def _purge(self) -> None:
        now = self.clock()
        expired = [sid for sid, s in self._sessions.items()
                   if now - s.last_touched > self.config.session_ttl]
        for sid in expired:
            del self._sessions[sid]
            path = self._spill_path(sid)
            if path and os.path.exists(path):
                os.unlink(path)
        while len(self._sessions) > self.config.max_sessions:
            oldest = min(self._sessions.values(), key=lambda s: s.last_touched)
            del self._sessions[oldest.id]

    def create(self, raw: RawTable, source_name: str | None) -> Session:
        with self._lock:
            now = self.clock()
            session = Session(id=secrets.token_urlsafe(16), created_at=now,
                              last_touched=now, raw=raw, source_name=source_name)
            self._sessions[session.id] = session
            self._purge()
            self.spill(session)
            return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._purge()
            session = self._sessions.get(session_id)
            if session is None:
                session = self._load_spilled(session_id)
                if session is not None:
                    self._sessions[session.id] = session
            if session is None:
                raise ServiceError(404, "session_not_found",
                                   f"no session {session_id!r}")
            session.last_touched = self.clock()
            return session


# --- request bodies ---

class TruthBody(BaseModel):
    value: float | None = None
    column: str | None = None


class MappingBody(BaseModel):
    estimate: str
    se: str | None = None
    truth: TruthBody | None = None
    method: str | None = None
    reference: str | None = None
    dgm: list[str] = Field(default_factory=list)
    ci: list[str] | None = None
    df: str | None = None
    rep: str | None = None
    alpha: float = 0.05


class OptionsBody(BaseModel):
    sig_digits: int | None = None
    include_mcse: bool | None = None
    caption: str | None = None
    measures: list[str] | None = None


class RenderBody(BaseModel):
    measure: str | None = None
    dgm: str | None = None
    method_a: str | None = None
    method_b: str | None = None
    quantity: str = "estimate"
    variable: str | None = None
    x: str | None = None
    y: str | None = None
    by: str = "method"
    ci_level: float = 0.95
    xlab: str | None = None
    ylab: str | None = None
    theme: str = "default"
    width: float = 640.0
    height: float = 480.0
    dpi: float = 96.0
    format: str = "svg"


# --- payload builders (wire shapes only; no statistics) ---

def _strata_payload(dataset: Dataset) -> list[dict]:
    return [{"dgm": list(key.dgm), "method": key.method, "n": n}
            for key, n in enumerate_strata(dataset)]


def _columns_payload(dataset_or_raw) -> list[dict]:
    if isinstance(dataset_or_raw, Dataset):
        return [{"name": n, "kind": k} for n, k in dataset_or_raw.columns]
    return [{"name": n, "kind": "string"} for n in dataset_or_raw.header]


def _parse_dgm_param(dataset: Dataset, dgm: str | None) -> tuple[str, ...] | None:
    if dgm is None:
        return None
    combo = tuple(dgm.split(",")) if dgm != "" else ()
    if combo not in dataset.dgm_combinations():
        raise ServiceError(422, "unknown_dgm", f"unknown DGM combination {dgm!r}",
                           detail={"known": [",".join(c) for c in dataset.dgm_combinations()]})
    return combo


def _require_dataset(session: Session) -> Dataset:
    if session.dataset is None:
        raise ServiceError(409, "mapping_required",
                           "define the variable mapping before analysis")
    return session.dataset


def _plot_payload(kind: str, data) -> dict:
    if kind in ("scatter", "density-pairs"):
        return {
            "kind": kind, "method_a": data.method_a, "method_b": data.method_b,
            "quantity": data.quantity, "n_dropped": data.n_dropped,
            "points": [{"dgm": list(p.dgm), "rep_id": p.rep_id, "a": p.a, "b": p.b}
                       for p in data.points],
        }
    if kind == "bland-altman":
        return {
            "kind": kind, "method_a": data.pairs.method_a,
            "method_b": data.pairs.method_b, "quantity": data.pairs.quantity,
            "mean_diff": data.mean_diff, "lower_limit": data.lower_limit,
            "upper_limit": data.upper_limit,
            "points": [{"dgm": list(p.dgm), "mean": m, "diff": d}
                       for p, m, d in zip(data.pairs.points, data.means, data.diffs)],
        }
    if kind == "ridgeline":
        return {"kind": kind, "groups": [
            {"dgm": list(g.key.dgm), "method": g.key.method,
             "sample": list(g.sample),
             "grid": list(g.grid) if g.grid else None,
             "density": list(g.density) if g.density else None,
             "bandwidth": g.bandwidth}
            for g in data
        ]}
    if kind in ("forest", "lolly"):
        return {"kind": kind, "points": [
            {"dgm": list(p.dgm), "method": p.method, "value": p.value,
             "mcse": p.mcse, "lower": p.lower, "upper": p.upper}
            for p in data
        ]}
    if kind == "heat":
        return {"kind": kind, "tiles": [
            {"dgm": list(t.dgm), "method": t.method, "value": t.value}
            for t in data
        ]}
    if kind == "zip":
        return {"kind": kind, "stripes": [
            {"dgm": list(s.dgm), "method": s.method,
             "rank_percentile": s.rank_percentile, "lower": s.lower,
             "upper": s.upper, "covers": s.covers}
            for s in data
        ]}
    if kind == "nested-loop":
        return {
            "kind": kind,
            "positions": [list(p) for p in data.positions],
            "factor_names": list(data.factor_names),
            "series": list(data.series),
            "ribbons": list(data.ribbons),
            "value_range": list(data.value_range),
        }
    raise ServiceError(404, "unknown_plot_kind", f"unknown plot kind {kind!r}")


def _compute_plot_data(session: Session, kind: str, params: dict):
    """Shared by the data and render endpoints so both see identical numbers."""
    dataset = _require_dataset(session)
    dgm = _parse_dgm_param(dataset, params.get("dgm"))
    if kind in ("scatter", "density-pairs", "bland-altman"):
        method_a = params.get("method_a")
        method_b = params.get("method_b")
        if not method_a or not method_b:
            raise ServiceError(422, "missing_parameter",
                               f"{kind} needs method_a and method_b")
        pairs = plotdata.estimate_pairs(dataset, method_a, method_b,
                                        params.get("quantity", "estimate"))
        if dgm is not None:
            pairs = plotdata.PairedData(
                pairs.method_a, pairs.method_b, pairs.quantity,
                tuple(p for p in pairs.points if p.dgm == dgm), pairs.n_dropped)
        return plotdata.bland_altman(pairs) if kind == "bland-altman" else pairs
    if kind == "ridgeline":
        groups = plotdata.ridgeline_data(dataset, params.get("quantity", "estimate"))
        if dgm is not None:
            groups = [g for g in groups if g.key.dgm == dgm]
        return groups
    if kind in ("forest", "lolly", "heat", "nested-loop"):
        measure = params.get("measure")
        if not measure:
            raise ServiceError(422, "missing_parameter", f"{kind} needs a measure")
        estimates = measures.compute_all(dataset, [measure], dgm=dgm)
        if kind in ("forest", "lolly"):
            return plotdata.forest_lolly_data(estimates, measure,
                                              float(params.get("ci_level", 0.95)))
        if kind == "heat":
            return plotdata.heat_data(estimates, measure)
        return plotdata.nested_loop_data(estimates, measure,
                                         factor_names=dataset.mapping.dgm_cols)
    if kind == "zip":
        stripes = plotdata.zip_data(dataset)
        if dgm is not None:
            stripes = [s for s in stripes if s.dgm == dgm]
        return stripes
    raise ServiceError(404, "unknown_plot_kind", f"unknown plot kind {kind!r}")


def create_app(config: ServiceConfig | None = None,
               store: SessionStore | None = None) -> FastAPI:
    config = config or ServiceConfig()
    store = store or SessionStore(config)
    app = FastAPI(title="simexplore", docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.store = store

    @app.exception_handler(ServiceError)
    async def _service_error(_req, exc: ServiceError):
        return JSONResponse(status_code=exc.status, content={
            "code": exc.code, "message": str(exc), "detail": exc.detail})

    def _error(status: int, code: str, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=status, content={
            "code": code, "message": str(exc), "detail": None})

    @app.exception_handler(SimExploreError)
    async def _library_error(_req, exc: SimExploreError):
        if isinstance(exc, TooLarge):
            return _error(413, "too_large", exc)
        if isinstance(exc, (NetworkError, BadStatus)):
            return _error(502, "fetch_failed", exc)
        if isinstance(exc, (IngestError, UnassignableRow)):
            return _error(400, "parse_error", exc)
        if isinstance(exc, (UnknownColumn, InvalidMapping, NonNumericVariable,
                            MeasureError, PlotError, EmptySelection)):
            return _error(422, "invalid_request", exc)
        return _error(500, "internal_error", exc)

    @app.exception_handler(ValueError)
    async def _value_error(_req, exc: ValueError):
        return _error(422, "invalid_request", exc)

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/datasets")
    async def create_dataset(request: Request):
        content_type = request.headers.get("content-type", "")
        max_bytes = config.max_upload_bytes
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            upload = form.get("file")
            if upload is None:
                raise ServiceError(422, "missing_parameter",
                                   "multipart upload needs a 'file' field")
            data = await upload.read()
            source = ingest.SourceSpec("file-bytes", upload.filename, max_bytes)
        else:
            try:
                body = await request.json()
            except Exception:
                raise ServiceError(422, "invalid_request",
                                   "expected multipart file or JSON body")
            if "url" in body:
                data, name = ingest.fetch_url(body["url"], max_bytes=max_bytes)
                source = ingest.SourceSpec("url", name, max_bytes)
            elif "pasted" in body:
                data = str(body["pasted"]).encode("utf-8")
                source = ingest.SourceSpec("pasted-text", None, max_bytes)
            else:
                raise ServiceError(422, "missing_parameter",
                                   "JSON body needs 'url' or 'pasted'")
        raw = ingest.parse_source(source, data)
        session = store.create(raw, source.declared_name)
        return {"session_id": session.id,
                "columns": _columns_payload(raw),
                "n_rows": len(raw.rows)}

    @app.get("/api/datasets/{session_id}")
    def session_info(session_id: str):
        session = store.get(session_id)
        described = session.dataset if session.dataset is not None else session.raw
        return {
            "session_id": session.id,
            "source_name": session.source_name,
            "columns": _columns_payload(described),
            "n_rows": len(session.raw.rows),
            "mapping": (mapping_to_dict(session.dataset.mapping)
                        if session.dataset else None),
            "strata": _strata_payload(session.dataset) if session.dataset else None,
            "options": {
                "sig_digits": session.options.sig_digits,
                "include_mcse": session.options.include_mcse,
                "caption": session.options.caption,
                "measures": session.options.measures,
            },
        }

    @app.put("/api/datasets/{session_id}/mapping")
    def put_mapping(session_id: str, body: MappingBody):
        session = store.get(session_id)
        mapping = mapping_from_dict(body.model_dump())
        with session.lock:
            session.dataset = apply_mapping(session.raw, mapping)
            store.spill(session)
        return {"mapping": mapping_to_dict(mapping),
                "strata": _strata_payload(session.dataset),
                "columns": _columns_payload(session.dataset)}

    @app.put("/api/datasets/{session_id}/options")
    def put_options(session_id: str, body: OptionsBody):
        session = store.get(session_id)
        with session.lock:
            opts = session.options
            if body.sig_digits is not None:
                if body.sig_digits < 1:
                    raise ServiceError(422, "invalid_request", "sig_digits must be >= 1")
                opts.sig_digits = body.sig_digits
            if body.include_mcse is not None:
                opts.include_mcse = body.include_mcse
            if body.caption is not None:
                opts.caption = body.caption
            if body.measures is not None:
                unknown = [m for m in body.measures if m not in measures.MEASURE_ORDER]
                if unknown:
                    raise ServiceError(422, "invalid_request",
                                       f"unknown measure(s): {unknown}")
                opts.measures = body.measures or None
            store.spill(session)
        return {"sig_digits": opts.sig_digits, "include_mcse": opts.include_mcse,
                "caption": opts.caption, "measures": opts.measures}

    @app.get("/api/datasets/{session_id}/preview")
    def preview(session_id: str, offset: int = 0, limit: int = 50):
        session = store.get(session_id)
        offset = max(0, offset)
        limit = max(0, min(limit, 1000))
        rows = session.raw.rows[offset:offset + limit]
        return {"columns": list(session.raw.header),
                "rows": [list(r) for r in rows],
                "offset": offset,
                "total": len(session.raw.rows)}

    @app.get("/api/datasets/{session_id}/performance")
    def performance(session_id: str, request: Request):
        session = store.get(session_id)
        dataset = _require_dataset(session)
        qp = request.query_params
        dgm = _parse_dgm_param(dataset, qp.get("dgm"))
        selected = session.options.measures
        if qp.get("measures"):
            selected = [m for m in qp["measures"].split(",") if m]
        ests = measures.compute_all(dataset, selected, dgm=dgm)
        return Response(content=export.estimates_json(ests),
                        media_type="application/json")

    @app.get("/api/datasets/{session_id}/missing")
    def missing(session_id: str):
        session = store.get(session_id)
        dataset = _require_dataset(session)
        return {"summaries": [
            {"variable": s.variable, "dgm": list(s.stratum.dgm),
             "method": s.stratum.method, "n_missing": s.n_missing,
             "prop_missing": s.prop_missing, "n_cumulative": s.n_cumulative}
            for s in missingness.missing_table(dataset)
        ]}

    @app.get("/api/datasets/{session_id}/missing/bar")
    def missing_bar(session_id: str, by: str = "method"):
        session = store.get(session_id)
        dataset = _require_dataset(session)
        return {"by": by, "bars": [
            {"variable": b.variable, "group": b.group,
             "n_missing": b.n_missing, "prop_missing": b.prop_missing}
            for b in missingness.missing_bar_data(dataset, by)
        ]}

    @app.get("/api/datasets/{session_id}/missing/heat")
    def missing_heat(session_id: str, variable: str | None = None):
        session = store.get(session_id)
        dataset = _require_dataset(session)
        return {"tiles": [
            {"method": t.method, "dgm": list(t.dgm), "percent": t.percent}
            for t in missingness.missing_heat_data(dataset, variable)
        ]}

    @app.get("/api/datasets/{session_id}/missing/shadow")
    def missing_shadow(session_id: str, x: str, y: str):
        session = store.get(session_id)
        dataset = _require_dataset(session)
        return {"x": x, "y": y, "points": [
            {"x": p.x, "y": p.y, "x_missing": p.x_missing, "y_missing": p.y_missing}
            for p in missingness.shadow_scatter_data(dataset, x, y)
        ]}

    @app.get("/api/datasets/{session_id}/missing/matrix")
    def missing_matrix_endpoint(session_id: str, blocks: int = 20):
        session = store.get(session_id)
        dataset = _require_dataset(session)
        return missingness.missing_matrix(dataset, blocks)

    @app.get("/api/datasets/{session_id}/plots/{kind}")
    def plot_data_endpoint(session_id: str, kind: str, request: Request):
        if kind not in plotdata.PLOT_KINDS:
            raise ServiceError(404, "unknown_plot_kind", f"unknown plot kind {kind!r}")
        session = store.get(session_id)
        data = _compute_plot_data(session, kind, dict(request.query_params))
        return _plot_payload(kind, data)

    @app.post("/api/datasets/{session_id}/plots/{kind}/render")
    def plot_render(session_id: str, kind: str, body: RenderBody):
        if kind not in plotdata.PLOT_KINDS:
            raise ServiceError(404, "unknown_plot_kind", f"unknown plot kind {kind!r}")
        session = store.get(session_id)
        params = {k: v for k, v in body.model_dump().items() if v is not None}
        data = _compute_plot_data(session, kind, params)
        spec = plotdata.PlotSpec(
            kind=kind, measure=body.measure,
            xlab=body.xlab, ylab=body.ylab, theme=body.theme,
            width=body.width, height=body.height, dpi=body.dpi)
        rendered = svgmod.render_svg(spec, data)
        if body.format == "svg":
            return Response(content=rendered, media_type="image/svg+xml")
        if config.converter_cmd is None:
            raise ServiceError(501, "converter_unavailable",
                               "only svg export is available; configure a converter "
                               "command for other formats")
        converted = svgmod.convert_svg(rendered, list(config.converter_cmd) + [body.format])
        types = {"png": "image/png", "pdf": "application/pdf",
                 "eps": "application/postscript"}
        return Response(content=converted,
                        media_type=types.get(body.format, "application/octet-stream"))

    @app.get("/api/datasets/{session_id}/export")
    def export_endpoint(session_id: str, request: Request, what: str = "table",
                        format: str = "csv", dgm: str | None = None,
                        orientation: str | None = None):
        session = store.get(session_id)
        if what == "dataset":
            if format not in ("csv", "tsv", "json"):
                raise ServiceError(422, "invalid_request",
                                   f"dataset export supports csv/tsv/json, not {format!r}")
            dataset = _require_dataset(session)
            data = export.dataset_to_delimited(dataset, format)
            return _attachment(data, f"dataset.{format}", format)
        dataset = _require_dataset(session)
        combo = _parse_dgm_param(dataset, dgm)
        style = session.options.style()
        qp = request.query_params
        if qp.get("sig_digits"):
            style = export.style_with(style, sig_digits=int(qp["sig_digits"]))
        if qp.get("mcse"):
            style = export.style_with(style, include_mcse=qp["mcse"] not in ("0", "false"))
        selected = session.options.measures
        if qp.get("measures"):
            selected = [m for m in qp["measures"].split(",") if m]
        ests = measures.compute_all(dataset, selected, dgm=combo)
        alpha = dataset.mapping.alpha
        if what == "table":
            if format == "latex":
                text = export.to_latex(ests, style, dgm=combo, alpha=alpha)
                return Response(content=text, media_type="application/x-latex",
                                headers={"Content-Disposition":
                                         'attachment; filename="table.tex"'})
            data = export.to_delimited(ests, format, orientation or "wide", style,
                                       dgm=combo, dgm_cols=dataset.mapping.dgm_cols,
                                       alpha=alpha)
            return _attachment(data, f"table.{format}", format)
        if what == "estimates":
            if format == "latex":
                raise ServiceError(422, "invalid_request",
                                   "estimates export supports csv/tsv/json")
            data = export.to_delimited(ests, format, orientation or "tidy", style,
                                       dgm=combo, dgm_cols=dataset.mapping.dgm_cols,
                                       alpha=alpha)
            return _attachment(data, f"estimates.{format}", format)
        raise ServiceError(422, "invalid_request",
                           f"what must be table, estimates, or dataset, not {what!r}")

    def _attachment(data: bytes, filename: str, fmt: str) -> Response:
        types = {"csv": "text/csv", "tsv": "text/tab-separated-values",
                 "json": "application/json"}
        return Response(content=data, media_type=types.get(fmt, "text/plain"),
                        headers={"Content-Disposition":
                                 f'attachment; filename="{filename}"'})

    if config.static_dir and os.path.isdir(config.static_dir):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=config.static_dir, html=True),
                  name="static")

    return app


def serve(host: str = "127.0.0.1", port: int = 8765,
          config: ServiceConfig | None = None) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    app = create_app(config or ServiceConfig.from_env())
    uvicorn.run(app, host=host, port=port, log_level="info")
