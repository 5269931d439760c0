"""Plain-text matrix/vector files and CSV helpers.

Matrix files: a header line ``m n`` followed by ``m`` rows of ``n``
whitespace-separated numbers. Vector files: a header line with the length,
then one entry per line. Numbers are written with 17 significant digits so
float64 values round-trip exactly.
"""
import io

import numpy as np


class FormatError(ValueError):
    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def fmt17(x):
    return format(float(x), ".17g")


def fmt12(x):
    return format(float(x), ".12g")


def _lines(path):
    with open(path) as f:
        return [(i + 1, line.strip()) for i, line in enumerate(f) if line.strip()]


def _numbers(path, lineno, text):
    try:
        vals = [float(tok) for tok in text.split()]
    except ValueError:
        raise FormatError(path, lineno, f"not a number in {text!r}") from None
    if not all(np.isfinite(vals)):
        raise FormatError(path, lineno, "non-finite entry")
    return vals


def _header(path, lines, count):
    if not lines:
        raise FormatError(path, 1, "empty file")
    lineno, text = lines[0]
    toks = text.split()
    if len(toks) != count or not all(t.isdigit() and int(t) > 0 for t in toks):
        raise FormatError(path, lineno, f"expected {count} positive integer(s) in header, got {text!r}")
    return [int(t) for t in toks]


def read_matrix(path):
    lines = _lines(path)
    m, n = _header(path, lines, 2)
    body = lines[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] + 1 if body else 2)
        raise FormatError(path, where, f"expected {m} rows, found {len(body)}")
    rows = []
    for lineno, text in body:
        vals = _numbers(path, lineno, text)
        if len(vals) != n:
            raise FormatError(path, lineno, f"expected {n} columns, found {len(vals)}")
        rows.append(vals)
    return np.array(rows, dtype=np.float64)


def read_vector(path):
    lines = _lines(path)
    (length,) = _header(path, lines, 1)
    body = lines[1:]
    if len(body) != length:
        where = body[length][0] if len(body) > length else (body[-1][0] + 1 if body else 2)
        raise FormatError(path, where, f"expected {length} entries, found {len(body)}")
    vals = []
    for lineno, text in body:
        v = _numbers(path, lineno, text)
        if len(v) != 1:
            raise FormatError(path, lineno, "expected one entry per line")
        vals.append(v[0])
    return np.array(vals, dtype=np.float64)


def format_matrix(A):
    A = np.asarray(A, dtype=np.float64)
    out = io.StringIO()
    out.write(f"{A.shape[0]} {A.shape[1]}\n")
    for row in A:
        out.write(" ".join(fmt17(v) for v in row) + "\n")
    return out.getvalue()


def format_vector(v):
    v = np.asarray(v, dtype=np.float64)
    return f"{v.shape[0]}\n" + "".join(fmt17(x) + "\n" for x in v)


def write_matrix(path, A):
    with open(path, "w") as f:
        f.write(format_matrix(A))


def write_vector(path, v):
    with open(path, "w") as f:
        f.write(format_vector(v))


def csv_text(header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"
