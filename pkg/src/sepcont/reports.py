"""Deterministic report emission: lossless dyadic serialization, CSV and
JSON-lines writers, and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from fractions import Fraction
from pathlib import Path

NET_INDEXING_NOTE = (
    "net(k) is the greedy maximal 2^-(k+2)-separated subset of the closed "
    "2^-k ball around the identity; the quantizer step n -> n+1 draws its "
    "increments from net(n)"
)

_DYADIC_RE = re.compile(r"^(-?\d+)(?:/2\^(\d+))?$")


def dyadic_str(q: Fraction) -> str:
    """Serialize a dyadic rational losslessly as ``p/2^q``."""
    den = q.denominator
    if den & (den - 1):
        raise ValueError(f"{q} is not a dyadic rational")
    return f"{q.numerator}/2^{den.bit_length() - 1}"


def parse_dyadic(text: str) -> Fraction:
    m = _DYADIC_RE.match(text.strip())
    if m is None:
        raise ValueError(f"bad dyadic literal: {text!r}")
    num = int(m.group(1))
    exp = int(m.group(2)) if m.group(2) is not None else 0
    return Fraction(num, 2**exp)


def write_csv(path: Path, fieldnames: list[str], rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in fieldnames})
    path.write_text(buf.getvalue(), encoding="utf-8")


def write_jsonl(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in records]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def build_manifest(
    *,
    config_text: str,
    version: str,
    report_paths: list[Path],
    timings: dict[str, float],
    summary: dict,
) -> dict:
    return {
        "config_sha256": sha256_text(config_text),
        "library_version": version,
        "net_indexing_note": NET_INDEXING_NOTE,
        "reports": {p.name: sha256_file(p) for p in sorted(report_paths)},
        "timings_seconds": {k: round(v, 6) for k, v in sorted(timings.items())},
        "summary": summary,
    }
