"""Plain-text formats for matrices, vector sets and triplets.

Complex numbers are written as "re+imi" literals with 17 significant digits, which
round-trips IEEE doubles exactly. Lines starting with '#' carry metadata.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def parse_complex(s: str) -> complex:
    s = s.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    return complex(s[:-1] + "j" if s.endswith("i") else s)


def _read_lines(path) -> list[str]:
    try:
        return Path(path).read_text().splitlines()
    except OSError as e:
        raise OSError(f"cannot read {path}: {e.strerror}") from e


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror}") from e


def read_metadata(path) -> dict[str, str]:
    meta = {}
    for line in _read_lines(path):
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
    return meta


def _meta_lines(meta) -> str:
    return "".join(f"# {k}={v}\n" for k, v in (meta or {}).items())


def matrix_to_csv(m) -> str:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return "".join(",".join(format_complex(z) for z in row) + "\n" for row in m)


def matrix_from_rows(rows) -> np.ndarray:
    m = np.array([[parse_complex(x) for x in row] for row in rows], dtype=complex)
    if m.ndim != 2:
        raise ValueError("ragged matrix rows")
    return m


def write_matrix(path, m) -> None:
    _write_text(path, matrix_to_csv(m))


def read_matrix(path) -> np.ndarray:
    rows = [line.split(",") for line in _read_lines(path) if line.strip() and not line.startswith("#")]
    if not rows:
        raise ValueError(f"{path}: no matrix rows")
    return matrix_from_rows(rows)


def vectors_to_csv(vectors, hits, meta=None) -> str:
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    d = vectors.shape[1]
    buf = io.StringIO()
    buf.write(_meta_lines(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{p}{k}" for k in range(d) for p in ("re", "im")] + ["hits"])
    for v, h in zip(vectors, hits):
        w.writerow([f"{x:.17g}" for z in v for x in (z.real, z.imag)] + [int(h)])
    return buf.getvalue()


def write_vectors(path, vectors, hits, meta=None) -> None:
    _write_text(path, vectors_to_csv(vectors, hits, meta))


def read_vectors(path) -> tuple[np.ndarray, list[int], dict[str, str]]:
    lines = _read_lines(path)
    meta = read_metadata(path)
    body = [line for line in lines if line.strip() and not line.startswith("#")]
    if not body:
        raise ValueError(f"{path}: missing header")
    reader = csv.reader(body)
    header = next(reader)
    d = (len(header) - 1) // 2
    vecs, hits = [], []
    for row in reader:
        x = np.array(row[: 2 * d], dtype=float)
        vecs.append(x[0::2] + 1j * x[1::2])
        hits.append(int(row[2 * d]))
    return np.array(vecs, dtype=complex).reshape(len(vecs), d), hits, meta


def write_triplets(path, triplets, meta=None) -> None:
    """Each triplet is three bases; a basis block lists one basis vector per line, blocks separated by blank lines."""
    blocks = []
    for t in triplets:
        for b in t:
            blocks.append(matrix_to_csv(np.asarray(b).T))
    _write_text(path, _meta_lines(meta) + "\n".join(blocks))


def read_triplets(path) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    blocks, cur = [], []
    for line in _read_lines(path):
        if line.startswith("#"):
            continue
        if line.strip():
            cur.append(line.split(","))
        elif cur:
            blocks.append(matrix_from_rows(cur).T)
            cur = []
    if cur:
        blocks.append(matrix_from_rows(cur).T)
    if len(blocks) % 3:
        raise ValueError(f"{path}: {len(blocks)} basis blocks is not a whole number of triplets")
    return [tuple(blocks[i : i + 3]) for i in range(0, len(blocks), 3)]
