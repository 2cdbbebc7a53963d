import gzip
import io
import zipfile

import pytest

from simexplore.errors import (
    AmbiguousArchive,
    BadStatus,
    EmptyInput,
    EncodingError,
    NetworkError,
    RaggedRows,
    TooLarge,
    UnsupportedFormat,
)
from simexplore.ingest import SourceSpec, fetch_url, parse_source, parse_table, sniff_format
from simexplore.model import VariableMapping, apply_mapping
from simexplore.export import dataset_to_delimited

CSV = b"a,b\n1,2\n3,4\n"


def gz(data: bytes) -> bytes:
    return gzip.compress(data)


def zipped(data: bytes, *names: str) -> bytes:
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        for name in names or ("data.csv",):
            zf.writestr(name, data)
    return buf.getvalue()


# --- sniffing ---

def test_extension_case_insensitive():
    assert sniff_format(SourceSpec("file-bytes", "results.CSV"), b"a,b,") == ("csv", "none")
    assert sniff_format(SourceSpec("file-bytes", "x.TsV"), b"a\tb\n") == ("tsv", "none")
    assert sniff_format(SourceSpec("file-bytes", "x.JSON"), b"[{}]") == ("json-records", "none")


def test_gzip_suffix_and_magic():
    payload = gz(CSV)
    assert sniff_format(SourceSpec("file-bytes", "results.csv.gz"), payload[:4]) == ("csv", "gzip")
    # magic overrides a plain extension
    assert sniff_format(SourceSpec("file-bytes", "results.csv"), payload[:4]) == ("csv", "gzip")


def test_pasted_is_always_tsv():
    assert sniff_format(SourceSpec("pasted-text", None), b"whatever") == ("tsv", "none")


def test_unsupported_extension():
    with pytest.raises(UnsupportedFormat):
        sniff_format(SourceSpec("file-bytes", "estimates.dta"), b"\x00\x01\x02\x03")


# --- parsing ---

def test_parse_csv():
    table = parse_table(CSV, "csv")
    assert table.header == ("a", "b")
    assert table.rows == (("1", "2"), ("3", "4"))


def test_parse_gzip_transparent():
    assert parse_table(gz(CSV), "csv", "gzip") == parse_table(CSV, "csv")


def test_parse_zip_transparent():
    assert parse_table(zipped(CSV), "csv", "zip") == parse_table(CSV, "csv")


def test_zip_format_from_inner_name():
    source = SourceSpec("file-bytes", "bundle.zip")
    payload = zipped(CSV, "estimates.csv")
    assert parse_source(source, payload).header == ("a", "b")


def test_multi_entry_zip_rejected():
    with pytest.raises(AmbiguousArchive):
        parse_table(zipped(CSV, "a.csv", "b.csv"), "csv", "zip")


def test_tsv_and_pasted():
    tsv = b"a\tb\n1\t2\n"
    table = parse_source(SourceSpec("pasted-text", None), tsv)
    assert table.rows == (("1", "2"),)


def test_json_records():
    data = b'[{"a": 1, "b": "x"}, {"b": "y", "c": 2.5}]'
    table = parse_table(data, "json-records")
    assert table.header == ("a", "b", "c")
    assert table.rows == (("1", "x", ""), ("", "y", "2.5"))


def test_json_nested_rejected():
    with pytest.raises(UnsupportedFormat):
        parse_table(b'[{"a": [1]}]', "json-records")


def test_ragged_rows_reports_index():
    with pytest.raises(RaggedRows) as info:
        parse_table(b"a,b\n1,2\n3\n", "csv")
    assert info.value.row_index == 3


def test_empty_inputs():
    with pytest.raises(EmptyInput):
        parse_table(b"", "csv")
    with pytest.raises(EmptyInput):
        parse_table(b"\n", "csv")


def test_bom_tolerated_other_encodings_rejected():
    assert parse_table(b"\xef\xbb\xbfa,b\n1,2\n", "csv").header == ("a", "b")
    with pytest.raises(EncodingError):
        parse_table("é".encode("latin-1") + b",b\n1,2\n", "csv")


def test_size_guard_pre_and_post_decompression():
    with pytest.raises(TooLarge):
        parse_table(CSV, "csv", max_bytes=4)
    bomb = gz(b"x" * 100_000)
    assert len(bomb) < 1000
    with pytest.raises(TooLarge):
        parse_table(bomb, "csv", "gzip", max_bytes=10_000)
    with pytest.raises(TooLarge):
        parse_table(zipped(b"x,y\n" * 50_000), "csv", "zip", max_bytes=10_000)


def test_fixture_row_count(fixture_bytes):
    table = parse_source(SourceSpec("file-bytes", "estimates.csv"), fixture_bytes)
    assert len(table.rows) == 9600


def test_round_trip_export_ingest(case_raw):
    ds = apply_mapping(case_raw, VariableMapping(
        estimate_col="b", se_col="se", method_col="model", dgm_cols=("dgm",)))
    emitted = dataset_to_delimited(ds, "csv")
    reparsed = parse_table(emitted, "csv")
    assert reparsed == case_raw
    ds2 = apply_mapping(reparsed, ds.mapping)
    assert ds2.records == ds.records


# --- URL fetching (local server) ---

def test_fetch_url_name_and_body(http_server, fixture_bytes):
    body, name = fetch_url(f"{http_server}/data/estimates.csv")
    assert name == "estimates.csv"
    assert body == fixture_bytes


def test_fetch_follows_redirects_up_to_limit(http_server):
    body, name = fetch_url(f"{http_server}/redirect/3")
    assert name == "estimates.csv"
    with pytest.raises(NetworkError):
        fetch_url(f"{http_server}/redirect/10")


def test_fetch_bad_status(http_server):
    with pytest.raises(BadStatus) as info:
        fetch_url(f"{http_server}/missing.csv")
    assert info.value.status == 404


def test_fetch_too_large(http_server):
    with pytest.raises(TooLarge):
        fetch_url(f"{http_server}/big.csv", max_bytes=1000)


def test_fetch_rejects_other_schemes():
    with pytest.raises(NetworkError):
        fetch_url("ftp://example.invalid/data.csv")
