"""Compression-ratio harness over a directory of files.

Each file is compressed in all three modes at each requested taint
fraction.  Sensitive spans are random chunks drawn from a per-file seeded
shuffle, so the spans for a smaller fraction are always a subset of those
for a larger one.
"""
from __future__ import annotations

import csv
import io
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

from .annotation import Span, normalize_spans
from .codec import CompressMode, compress_spans, compression_ratio
from .errors import InvalidArgument
from .lz77 import MatchConfig

SPAN_MIN, SPAN_MAX = 8, 64


@dataclass(frozen=True)
class BenchRow:
    file: str
    bytes: int
    taint_fraction: float
    mode: str
    compressed_bytes: int
    ratio: float


CSV_COLUMNS = [f.name for f in fields(BenchRow)]


def _chunk_order(n: int, rng: random.Random) -> list[Span]:
    chunks, pos = [], 0
    while pos < n:
        end = min(n, pos + rng.randint(SPAN_MIN, SPAN_MAX))
        chunks.append(Span(pos, end))
        pos = end
    rng.shuffle(chunks)
    return chunks


def taint_spans(n: int, fraction: float, seed, name: str = "") -> list[Span]:
    """Sensitive spans covering at least ``fraction`` of ``n`` bytes (nested in ``fraction``)."""
    if not 0.0 <= fraction <= 1.0:
        raise InvalidArgument("taint fraction must lie in [0, 1]")
    target = fraction * n
    picked, covered = [], 0
    for span in _chunk_order(n, random.Random(f"{seed}:{name}")):
        if covered >= target:
            break
        picked.append(span)
        covered += span.end - span.start
    return normalize_spans(picked)


def bench_file(name: str, data: bytes, fractions: Sequence[float], seed=0,
               block_kind: str = "dynamic", config: MatchConfig | None = None) -> list[BenchRow]:
    if not data:
        raise InvalidArgument(f"{name}: empty file has no compression ratio")
    rows = []
    for f in fractions:
        spans = taint_spans(len(data), f, seed, name)
        for mode in CompressMode:
            size = len(compress_spans(data, spans, mode, config, block_kind))
            rows.append(BenchRow(name, len(data), f, mode.value, size,
                                 compression_ratio(size, len(data))))
    return rows


def corpus_files(directory) -> list[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise InvalidArgument(f"{directory} is not a directory")
    return sorted(p for p in root.iterdir() if p.is_file() and p.stat().st_size > 0)


def bench_corpus(paths: Iterable, fractions: Sequence[float], seed=0, block_kind: str = "dynamic",
                 config: MatchConfig | None = None, workers: int = 1) -> list[BenchRow]:
    paths = [Path(p) for p in paths]

    def one(path):
        return bench_file(path.name, path.read_bytes(), fractions, seed, block_kind, config)

    if workers > 1:
        # kernels release the GIL, so threads do overlap
        with ThreadPoolExecutor(workers) as pool:
            per_file = list(pool.map(one, paths))
    else:
        per_file = [one(p) for p in paths]
    return [row for rows in per_file for row in rows]


def rows_to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        r = list(astuple(row))
        r[-1] = f"{row.ratio:.6f}"
        w.writerow(r)
    return buf.getvalue()
