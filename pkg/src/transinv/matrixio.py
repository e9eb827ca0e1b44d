"""Dense matrix files (Matrix Market array, CSV) and JSON verification reports."""

import enum
import json
import os
import re

import numpy as np

from .linalg import as_matrix

__all__ = [
    "MatrixFileFormat",
    "MatrixFormatError",
    "infer_format",
    "read_matrix",
    "write_matrix",
    "parse_csv",
    "parse_matrix_market",
    "format_csv",
    "format_matrix_market",
    "report_to_dict",
    "write_report",
]


class MatrixFileFormat(str, enum.Enum):
    matrix_market_array = "matrix_market_array"
    csv = "csv"


class MatrixFormatError(ValueError):
    """Malformed matrix file; the message carries line (and column) numbers."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(rf"[+-]?{_NUM}")
_COMPLEX_RE = re.compile(rf"([+-]?{_NUM})([+-]{_NUM})i")
_IMAG_RE = re.compile(rf"([+-]?{_NUM})i")

_EXTENSIONS = {
    ".mtx": MatrixFileFormat.matrix_market_array,
    ".mm": MatrixFileFormat.matrix_market_array,
    ".csv": MatrixFileFormat.csv,
}


def infer_format(path):
    ext = os.path.splitext(str(path))[1].lower()
    try:
        return _EXTENSIONS[ext]
    except KeyError:
        raise ValueError(f"cannot infer matrix format from {path!r}; pass a format") from None


def _fmt(x):
    return "%.17g" % x


def _complex_cell(z):
    im = _fmt(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{_fmt(z.real)}{sign}{im}i"


def _parse_csv_token(token, line, column):
    t = token.strip()
    if _REAL_RE.fullmatch(t):
        return float(t)
    m = _COMPLEX_RE.fullmatch(t)
    if m:
        return complex(float(m.group(1)), float(m.group(2)))
    m = _IMAG_RE.fullmatch(t)
    if m:
        return complex(0.0, float(m.group(1)))
    raise MatrixFormatError(f"non-numeric token {token!r}", line, column)


def parse_csv(text):
    """Parse CSV text: one row per line, comma separated, complex as ``a+bi``."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MatrixFormatError("empty file", 1)
    rows = []
    width = None
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            raise MatrixFormatError("blank row", lineno)
        tokens = raw.split(",")
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise MatrixFormatError(
                f"ragged row: expected {width} entries, found {len(tokens)}", lineno)
        rows.append([_parse_csv_token(tok, lineno, col) for col, tok in enumerate(tokens, 1)])
    is_complex = any(isinstance(v, complex) for row in rows for v in row)
    return np.array(rows, dtype=np.complex128 if is_complex else np.float64)


def format_csv(M):
    M = as_matrix(M)
    cell = _complex_cell if np.iscomplexobj(M) else _fmt
    return "".join(",".join(cell(v) for v in row) + "\n" for row in M)


def parse_matrix_market(text):
    """Parse a dense ``array`` Matrix Market file (real, integer or complex, general)."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise MatrixFormatError("empty file or missing header", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0] != "%%MatrixMarket":
        raise MatrixFormatError("expected '%%MatrixMarket matrix array <field> general'", 1)
    obj, fmt, fld, sym = (h.lower() for h in header[1:])
    if obj != "matrix" or fmt != "array":
        raise MatrixFormatError(f"unsupported object/format {obj!r} {fmt!r}; only dense arrays", 1)
    if fld not in ("real", "integer", "double", "complex"):
        raise MatrixFormatError(f"unsupported field {fld!r}", 1)
    if sym != "general":
        raise MatrixFormatError(f"unsupported symmetry {sym!r}; only general", 1)
    is_complex = fld == "complex"
    per_entry = 2 if is_complex else 1

    body = [(i, ln) for i, ln in enumerate(lines[1:], start=2)
            if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MatrixFormatError("missing size line", len(lines))
    size_line, size = body[0]
    parts = size.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise MatrixFormatError(f"size line must be 'rows cols', got {size.strip()!r}", size_line)
    m, n = int(parts[0]), int(parts[1])
    if m < 1 or n < 1:
        raise MatrixFormatError("dimensions must be positive", size_line)
    entries = body[1:]
    if len(entries) != m * n:
        last = entries[-1][0] if entries else size_line
        raise MatrixFormatError(f"expected {m * n} entries, found {len(entries)}", last)

    values = np.empty(m * n, dtype=np.complex128 if is_complex else np.float64)
    for k, (lineno, ln) in enumerate(entries):
        toks = ln.split()
        if len(toks) != per_entry:
            raise MatrixFormatError(f"expected {per_entry} value(s), found {len(toks)}", lineno)
        nums = []
        for col, tok in enumerate(toks, 1):
            if not _REAL_RE.fullmatch(tok):
                raise MatrixFormatError(f"non-numeric token {tok!r}", lineno, col)
            nums.append(float(tok))
        values[k] = complex(*nums) if is_complex else nums[0]
    # column-major storage
    return values.reshape((n, m)).T.copy()


def format_matrix_market(M):
    M = as_matrix(M)
    m, n = M.shape
    field = "complex" if np.iscomplexobj(M) else "real"
    out = [f"%%MatrixMarket matrix array {field} general\n", f"{m} {n}\n"]
    for v in M.T.ravel():
        if field == "complex":
            out.append(f"{_fmt(v.real)} {_fmt(v.imag)}\n")
        else:
            out.append(_fmt(v) + "\n")
    return "".join(out)


def read_matrix(path, format=None):
    """Read a matrix file; ``format`` defaults to one inferred from the extension."""
    fmt = infer_format(path) if format is None else MatrixFileFormat(format)
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt is MatrixFileFormat.csv:
        M = parse_csv(text)
    else:
        M = parse_matrix_market(text)
    if not np.all(np.isfinite(M)):
        raise MatrixFormatError("non-finite entry")
    return M


def write_matrix(M, path, format=None):
    fmt = infer_format(path) if format is None else MatrixFileFormat(format)
    text = format_csv(M) if fmt is MatrixFileFormat.csv else format_matrix_market(M)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def report_to_dict(report):
    """Serialisable form of a report; skipped checks are left out."""
    return {
        "variant": report.variant.value,
        "seed": report.seed,
        "input_digest": report.input_digest,
        "checks": [
            {
                "name": c.name,
                "residual": c.residual,
                "tolerance": c.tolerance,
                "passed": c.passed,
            }
            for c in report.checks
            if c.skipped is None
        ],
    }


def dumps_reports(reports):
    return json.dumps([report_to_dict(r) for r in reports], indent=2, allow_nan=False) + "\n"


def write_report(reports, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_reports(reports))
