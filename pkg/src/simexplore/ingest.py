"""Parsing of uploaded, pasted, or URL-fetched result files into raw tables.

Supported text formats are csv, tsv, and json-records (an array of flat
objects); payloads may be gzip- or zip-compressed. Binary statistics
formats (.dta, .sav, .sas7bdat, .rds) are not read; convert them first,
e.g. ``python -c "import pandas; pandas.read_stata('in.dta').to_csv('out.csv',
index=False)"``.
"""

from __future__ import annotations

import csv
import io
import json
import posixpath
import urllib.parse
import zipfile
import zlib
from dataclasses import dataclass

import requests

from .errors import (
    AmbiguousArchive,
    BadStatus,
    DecompressError,
    EmptyInput,
    EncodingError,
    NetworkError,
    RaggedRows,
    TooLarge,
    UnsupportedFormat,
)
from .model import RawTable

DEFAULT_MAX_BYTES = 100 * 10**6

FORMATS = ("csv", "tsv", "json-records")
COMPRESSIONS = ("none", "gzip", "zip")

_EXTENSION_FORMATS = {".csv": "csv", ".tsv": "tsv", ".tab": "tsv", ".txt": "tsv",
                      ".json": "json-records"}
_COMPRESSION_SUFFIXES = {".gz": "gzip", ".zip": "zip"}

_GZIP_MAGIC = b"\x1f\x8b"
_ZIP_MAGIC = b"PK\x03\x04"


@dataclass(frozen=True)
class SourceSpec:
    """Where a payload came from and how large it may be."""

    origin: str  # "file-bytes" | "pasted-text" | "url"
    declared_name: str | None = None
    max_bytes: int = DEFAULT_MAX_BYTES


def _split_name(name: str) -> tuple[str | None, str]:
    """(format, compression) hints from a file name, case-insensitively."""
    lowered = name.lower()
    compression = "none"
    for suffix, comp in _COMPRESSION_SUFFIXES.items():
        if lowered.endswith(suffix):
            compression = comp
            lowered = lowered[: -len(suffix)]
            break
    for suffix, fmt in _EXTENSION_FORMATS.items():
        if lowered.endswith(suffix):
            return fmt, compression
    return None, compression


def sniff_format(source: SourceSpec, head_bytes: bytes = b"") -> tuple[str | None, str]:
    """Decide (format, compression) for a payload.

    The extension decides the format case-insensitively; gzip/zip magic
    bytes override the extension for compression. Pasted text is always
    plain tab-separated. A ``None`` format is only returned for zip
    archives whose inner entry name must be consulted by the parser.
    """
    if source.origin == "pasted-text":
        return "tsv", "none"

    fmt, compression = _split_name(source.declared_name or "")
    if head_bytes[:2] == _GZIP_MAGIC:
        compression = "gzip"
    elif head_bytes[:4] == _ZIP_MAGIC:
        compression = "zip"

    if fmt is None and compression != "zip":
        raise UnsupportedFormat(
            f"cannot determine format of {source.declared_name!r}; "
            f"supported extensions: {sorted(_EXTENSION_FORMATS)}")
    return fmt, compression


def _gunzip_capped(data: bytes, max_bytes: int) -> bytes:
    # wbits=47 accepts both gzip and zlib wrappers; max_length caps the
    # output so a decompression bomb never materializes in memory.
    try:
        dobj = zlib.decompressobj(wbits=47)
        out = dobj.decompress(data, max_bytes + 1)
    except zlib.error as exc:
        raise DecompressError(f"gzip decompression failed: {exc}") from exc
    if len(out) > max_bytes:
        raise TooLarge(f"decompressed payload exceeds {max_bytes} bytes")
    if not dobj.eof and dobj.unconsumed_tail:
        raise TooLarge(f"decompressed payload exceeds {max_bytes} bytes")
    return out


def _unzip_capped(data: bytes, max_bytes: int) -> tuple[bytes, str]:
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
        entries = [info for info in archive.infolist() if not info.is_dir()]
    except zipfile.BadZipFile as exc:
        raise DecompressError(f"zip archive is invalid: {exc}") from exc
    if not entries:
        raise EmptyInput("zip archive contains no file entries")
    if len(entries) > 1:
        raise AmbiguousArchive(
            f"zip archive has {len(entries)} entries; exactly one is required")
    entry = entries[0]
    chunks = []
    total = 0
    with archive.open(entry) as fh:
        while True:
            chunk = fh.read(1 << 16)
            if not chunk:
                break
            total += len(chunk)
            if total > max_bytes:
                raise TooLarge(f"decompressed payload exceeds {max_bytes} bytes")
            chunks.append(chunk)
    return b"".join(chunks), entry.filename


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"payload is not valid UTF-8: {exc}") from exc


def _parse_delimited(text: str, delimiter: str) -> RawTable:
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    rows = [tuple(r) for r in reader if r != []]
    if not rows:
        raise EmptyInput("no rows found")
    header = rows[0]
    if all(cell.strip() == "" for cell in header):
        raise EmptyInput("header row is empty")
    width = len(header)
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise RaggedRows(i)
    return RawTable(header=header, rows=tuple(rows[1:]))


def _json_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    raise UnsupportedFormat("json records must be flat (no nested objects or arrays)")


def _parse_json_records(text: str) -> RawTable:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UnsupportedFormat(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, list):
        raise UnsupportedFormat("json input must be an array of objects")
    if not payload:
        raise EmptyInput("json array is empty")
    header: list[str] = []
    for obj in payload:
        if not isinstance(obj, dict):
            raise UnsupportedFormat("json input must be an array of objects")
        for key in obj:
            if key not in header:
                header.append(key)
    rows = tuple(tuple(_json_cell(obj.get(k)) for k in header) for obj in payload)
    return RawTable(header=tuple(header), rows=rows)


def parse_table(data: bytes, fmt: str | None, compression: str = "none",
                max_bytes: int = DEFAULT_MAX_BYTES) -> RawTable:
    """Parse payload bytes into a raw table (header + verbatim cells).

    Enforces the size cap both on the compressed payload and on the
    decompressed expansion. For zip archives with an undeterminable outer
    format, the single entry's name decides the format.
    """
    if len(data) > max_bytes:
        raise TooLarge(f"payload exceeds {max_bytes} bytes")
    if not data:
        raise EmptyInput("empty payload")

    if compression == "gzip":
        data = _gunzip_capped(data, max_bytes)
    elif compression == "zip":
        data, inner_name = _unzip_capped(data, max_bytes)
        if fmt is None:
            fmt, inner_comp = _split_name(inner_name)
            if inner_comp != "none" or fmt is None:
                raise UnsupportedFormat(
                    f"cannot determine format of archive entry {inner_name!r}")
    if fmt is None:
        raise UnsupportedFormat("unknown table format")
    if not data:
        raise EmptyInput("empty payload after decompression")

    if fmt == "csv":
        return _parse_delimited(_decode(data), ",")
    if fmt == "tsv":
        return _parse_delimited(_decode(data), "\t")
    if fmt == "json-records":
        return _parse_json_records(_decode(data))
    raise UnsupportedFormat(f"unsupported format {fmt!r}")


def parse_source(source: SourceSpec, data: bytes) -> RawTable:
    """Sniff and parse in one step."""
    fmt, compression = sniff_format(source, data[:4])
    return parse_table(data, fmt, compression, source.max_bytes)


def fetch_url(url: str, max_bytes: int = DEFAULT_MAX_BYTES, timeout: float = 30.0,
              max_redirects: int = 5) -> tuple[bytes, str | None]:
    """Download a dataset, returning (bytes, name from the final path segment).

    Standard proxy environment variables are honored. At most
    ``max_redirects`` redirects are followed; non-2xx responses raise
    BadStatus and bodies over ``max_bytes`` raise TooLarge.
    """
    scheme = urllib.parse.urlsplit(url).scheme.lower()
    if scheme not in ("http", "https"):
        raise NetworkError(f"unsupported URL scheme {scheme!r}")
    session = requests.Session()
    session.max_redirects = max_redirects
    try:
        resp = session.get(url, stream=True, timeout=timeout, allow_redirects=True)
    except requests.TooManyRedirects as exc:
        raise NetworkError(f"too many redirects (limit {max_redirects})") from exc
    except requests.RequestException as exc:
        raise NetworkError(str(exc)) from exc
    with resp:
        if not 200 <= resp.status_code < 300:
            raise BadStatus(resp.status_code)
        chunks = []
        total = 0
        for chunk in resp.iter_content(chunk_size=1 << 16):
            total += len(chunk)
            if total > max_bytes:
                raise TooLarge(f"response body exceeds {max_bytes} bytes")
            chunks.append(chunk)
        path = urllib.parse.urlsplit(resp.url).path
        name = posixpath.basename(urllib.parse.unquote(path)) or None
        return b"".join(chunks), name
