import functools
import http.server
import threading
from pathlib import Path

import pytest

from simexplore.ingest import SourceSpec, parse_source
from simexplore.model import VariableMapping, apply_mapping

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_CSV = DATA_DIR / "estimates.csv"

# Published 4-significant-digit table for DGM 2 of the case study,
# methods 1 (exponential), 2 (Weibull), 3 (Cox).
EXPECTED_DGM2 = {
    "bias": ("0.0494 (0.0035)", "0.0048 (0.0038)", "0.0062 (0.0038)"),
    "emp_se": ("0.1381 (0.0024)", "0.1516 (0.0027)", "0.1511 (0.0027)"),
    "mod_se": ("0.1539 (0.0001)", "0.1541 (0.0001)", "0.1542 (0.0001)"),
    "coverage": ("0.9600 (0.0049)", "0.9556 (0.0051)", "0.9575 (0.0050)"),
}

CASE_MAPPING = VariableMapping(
    estimate_col="b", se_col="se", truth_value=-0.5,
    method_col="model", dgm_cols=("dgm",), rep_col="dataset",
)


@pytest.fixture(scope="session")
def fixture_bytes() -> bytes:
    return FIXTURE_CSV.read_bytes()


@pytest.fixture(scope="session")
def case_raw(fixture_bytes):
    return parse_source(SourceSpec("file-bytes", "estimates.csv"), fixture_bytes)


@pytest.fixture(scope="session")
def case_dataset(case_raw):
    return apply_mapping(case_raw, CASE_MAPPING)


class _Handler(http.server.BaseHTTPRequestHandler):
    """Serves the fixture plus synthetic routes for redirect/size tests."""

    fixture: bytes = b""

    def log_message(self, *args):
        pass

    def do_GET(self):
        if self.path.startswith("/redirect/"):
            hops = int(self.path.rsplit("/", 1)[1])
            target = "/data/estimates.csv" if hops <= 1 else f"/redirect/{hops - 1}"
            self.send_response(302)
            self.send_header("Location", target)
            self.end_headers()
        elif self.path == "/data/estimates.csv":
            self.send_response(200)
            self.send_header("Content-Type", "text/csv")
            self.end_headers()
            self.wfile.write(self.fixture)
        elif self.path == "/big.csv":
            body = b"a,b\n" + b"1,2\n" * 200_000
            self.send_response(200)
            self.end_headers()
            self.wfile.write(body)
        else:
            self.send_response(404)
            self.end_headers()
            self.wfile.write(b"not here")


@pytest.fixture(scope="session")
def http_server(fixture_bytes):
    handler = type("Handler", (_Handler,), {"fixture": fixture_bytes})
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


@functools.lru_cache(maxsize=None)
def table_cells(latex: str) -> dict[str, tuple[str, ...]]:
    """Body cells of a rendered LaTeX table, keyed by row label."""
    rows = {}
    for line in latex.splitlines():
        if "&" in line and not line.startswith(("\\", "Performance")):
            parts = [p.strip() for p in line.rstrip("\\").split("&")]
            rows[parts[0]] = tuple(parts[1:])
    return rows
