"""JSON output records.

``records`` format: one JSON object per line. ``summary`` format: a single
indented JSON document. Every object carries ``schema_version`` and ``kind``.
Complex numbers are written as ``[re, im]``.
"""

from __future__ import annotations

import json
import sys
from contextlib import contextmanager

SCHEMA_VERSION = 1


def cplx(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def uncplx(pair) -> complex:
    return complex(pair[0], pair[1])


def make_record(kind: str, **fields) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": kind, **fields}


def dumps_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, allow_nan=False)


def dumps_summary(record: dict) -> str:
    return json.dumps(record, sort_keys=True, indent=2, allow_nan=False)


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def write_output(path, fmt: str, summary: dict, rows=()) -> None:
    """Write ``rows`` then ``summary`` as lines, or ``summary`` alone as a document."""
    with _open_out(path) as fh:
        if fmt == "records":
            for row in rows:
                fh.write(dumps_record(row) + "\n")
            fh.write(dumps_record(summary) + "\n")
        elif fmt == "summary":
            fh.write(dumps_summary(summary) + "\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")


def read_records(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def read_summary(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
