import socket
import threading
import time

import pytest
import requests

from simexplore.cli import main
from tests.conftest import EXPECTED_DGM2, FIXTURE_CSV

CASE_FLAGS = [str(FIXTURE_CSV), "--estimate", "b", "--se", "se", "--true", "-0.5",
              "--method", "model", "--by", "dgm", "--rep", "dataset"]


def run_cli(capsysbinary, *argv):
    code = main(list(argv))
    captured = capsysbinary.readouterr()
    return code, captured.out, captured.err


def test_analyze_latex_dgm2(capsysbinary):
    code, out, _ = run_cli(capsysbinary, "analyze", *CASE_FLAGS,
                           "--measures", "bias,emp_se,mod_se,coverage",
                           "--format", "latex", "--dgm", "2")
    assert code == 0
    text = out.decode()
    for row in EXPECTED_DGM2.values():
        for cell in row:
            assert cell in text
    assert text.count("\\begin{tabular}") == 1


def test_analyze_latex_one_table_per_dgm(capsysbinary):
    code, out, _ = run_cli(capsysbinary, "analyze", *CASE_FLAGS,
                           "--measures", "bias", "--format", "latex")
    assert code == 0
    assert out.decode().count("\\begin{tabular}") == 2


def test_analyze_csv_tidy(capsysbinary, tmp_path):
    out_file = tmp_path / "estimates.csv"
    code, _, _ = run_cli(capsysbinary, "analyze", *CASE_FLAGS,
                         "--measures", "bias,coverage", "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == "measure,dgm,method,value,mcse,n_used"
    assert len(lines) == 1 + 12


def test_analyze_no_mcse(capsysbinary):
    code, out, _ = run_cli(capsysbinary, "analyze", *CASE_FLAGS,
                           "--measures", "bias", "--format", "latex",
                           "--dgm", "2", "--no-mcse")
    assert code == 0
    assert "(" not in out.decode().split("\\midrule")[1]


def test_analyze_measure_without_ingredients_exits_4(capsysbinary, tmp_path):
    f = tmp_path / "est_only.csv"
    f.write_text("est\n1\n2\n")
    code, _, err = run_cli(capsysbinary, "analyze", str(f), "--estimate", "est",
                           "--measures", "bias")
    assert code == 4
    assert b"bias" in err


def test_bad_file_exits_3(capsysbinary, tmp_path):
    f = tmp_path / "bad.csv"
    f.write_bytes(b"a,b\n1\n")
    code, _, err = run_cli(capsysbinary, "analyze", str(f), "--estimate", "a")
    assert code == 3
    assert b"error" in err


def test_usage_error_exits_2(capsysbinary):
    with pytest.raises(SystemExit) as info:
        main(["analyze", str(FIXTURE_CSV)])  # missing --estimate
    assert info.value.code == 2


def test_unknown_plot_kind_exits_2(capsysbinary):
    with pytest.raises(SystemExit) as info:
        main(["plot", str(FIXTURE_CSV), "--estimate", "b", "--kind", "pie"])
    assert info.value.code == 2


def test_missing_subcommand_zero_counts(capsysbinary):
    code, out, _ = run_cli(capsysbinary, "missing", *CASE_FLAGS)
    assert code == 0
    lines = out.decode().splitlines()
    assert lines[0] == "variable,dgm,method,n_missing,prop_missing,n_cumulative"
    assert all(line.split(",")[3] == "0" for line in lines[1:])


def test_missing_injected_counts(capsysbinary, tmp_path):
    rows = FIXTURE_CSV.read_text().splitlines()
    rows[1] = rows[1].rsplit(",", 2)[0] + ",NA,NA"
    f = tmp_path / "inj.csv"
    f.write_text("\n".join(rows) + "\n")
    code, out, _ = run_cli(capsysbinary, "missing", str(f), "--estimate", "b",
                           "--se", "se", "--method", "model", "--by", "dgm")
    assert code == 0
    assert sum(int(l.split(",")[3]) for l in out.decode().splitlines()[1:]) == 2


def test_plot_svg_deterministic(capsysbinary, tmp_path):
    out1 = tmp_path / "one.svg"
    out2 = tmp_path / "two.svg"
    for out in (out1, out2):
        code, _, _ = run_cli(capsysbinary, "plot", *CASE_FLAGS, "--kind", "forest",
                             "--measure", "bias", "--svg", str(out))
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes().startswith(b"<?xml")


def test_plot_zip_data_json(capsysbinary, tmp_path):
    out = tmp_path / "zip.json"
    code, _, _ = run_cli(capsysbinary, "plot", *CASE_FLAGS, "--kind", "zip",
                         "--dgm", "2", "--data", str(out))
    assert code == 0
    import json

    payload = json.loads(out.read_text())
    assert payload["kind"] == "zip"
    assert len(payload["stripes"]) == 4800


def test_serve_failure_exits_5(capsysbinary, monkeypatch):
    import simexplore.service

    def boom(**kwargs):
        raise OSError("address already in use")

    monkeypatch.setattr(simexplore.service, "serve", boom)
    code = main(["serve", "--port", "1"])
    assert code == 5


def test_serve_listens_and_answers_health():
    import uvicorn

    from simexplore.service import ServiceConfig, create_app

    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    server = uvicorn.Server(uvicorn.Config(
        create_app(ServiceConfig()), host="127.0.0.1", port=port, log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        deadline = time.time() + 10
        while time.time() < deadline:
            try:
                resp = requests.get(f"http://127.0.0.1:{port}/api/health", timeout=1)
                assert resp.json() == {"status": "ok"}
                break
            except requests.RequestException:
                time.sleep(0.05)
        else:
            pytest.fail("server did not come up")
    finally:
        server.should_exit = True
        thread.join(timeout=5)
