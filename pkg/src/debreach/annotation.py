"""In-band sensitive-data markers and the taint distance map.

A sensitive region is written as ``NONCE{...}NONCE``.  :func:`strip_markers`
removes the markers again and reports where the enclosed bytes ended up in
the clean buffer, and :func:`build_next_taint` turns those spans into the
per-byte "distance to the next sensitive byte" array that the matcher
consumes.
"""
from __future__ import annotations

import random
import string
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InvalidArgument, MalformedAnnotation

NONCE_ALPHABET = (string.ascii_uppercase + string.ascii_lowercase + string.digits).encode()
MAX_NONCE_LEN = 64
OPEN = b"{"
CLOSE = b"}"


class Span(NamedTuple):
    start: int
    end: int


@dataclass(frozen=True)
class TaintMap:
    input_len: int
    spans: tuple[Span, ...]
    next_taint: np.ndarray

    @property
    def sensitive(self) -> np.ndarray:
        return self.next_taint == 0

    @classmethod
    def clear(cls, input_len: int) -> "TaintMap":
        return build_next_taint(input_len, [])


def check_nonce(nonce) -> bytes:
    if isinstance(nonce, str):
        nonce = nonce.encode()
    nonce = bytes(nonce)
    if not 1 <= len(nonce) <= MAX_NONCE_LEN:
        raise InvalidArgument(f"nonce must be 1..{MAX_NONCE_LEN} bytes, got {len(nonce)}")
    if OPEN in nonce or CLOSE in nonce:
        raise InvalidArgument("nonce may not contain '{' or '}'")
    return nonce


def generate_nonce(length: int, randomness=None) -> bytes:
    """Draw ``length`` characters from ``[A-Za-z0-9]``.

    ``randomness`` is a seed, a :class:`random.Random`, or anything with a
    ``choice`` method.
    """
    if not 1 <= length <= MAX_NONCE_LEN:
        raise InvalidArgument(f"nonce length must be 1..{MAX_NONCE_LEN}, got {length}")
    rng = randomness
    if rng is None or isinstance(rng, int):
        rng = random.Random(rng)
    alphabet = NONCE_ALPHABET.decode()
    out = "".join(rng.choice(alphabet) for _ in range(length))
    return check_nonce(out)


def _as_spans(spans: Iterable) -> list[Span]:
    return [Span(int(s), int(e)) for s, e in spans]


def _check_bounds(spans: list[Span], n: int) -> None:
    for s, e in spans:
        if not 0 <= s < e <= n:
            raise InvalidArgument(f"span [{s},{e}) out of bounds for length {n}")


def normalize_spans(spans: Iterable) -> list[Span]:
    """Sort and merge overlapping or adjacent spans."""
    merged: list[Span] = []
    for s, e in sorted(_as_spans(spans)):
        if merged and s <= merged[-1].end:
            if e > merged[-1].end:
                merged[-1] = Span(merged[-1].start, e)
        else:
            merged.append(Span(s, e))
    return merged


def annotate(data: bytes, spans: Iterable, nonce) -> bytes:
    nonce = check_nonce(nonce)
    data = bytes(data)
    ordered = sorted(_as_spans(spans))
    _check_bounds(ordered, len(data))
    for a, b in zip(ordered, ordered[1:]):
        if b.start < a.end:
            raise InvalidArgument(f"overlapping spans {tuple(a)} and {tuple(b)}")
    start_marker, end_marker = nonce + OPEN, CLOSE + nonce
    parts = []
    pos = 0
    for s, e in ordered:
        parts += [data[pos:s], start_marker, data[s:e], end_marker]
        pos = e
    parts.append(data[pos:])
    return b"".join(parts)


def strip_markers(annotated: bytes, nonce) -> tuple[bytes, TaintMap]:
    nonce = check_nonce(nonce)
    annotated = bytes(annotated)
    start_marker, end_marker = nonce + OPEN, CLOSE + nonce
    clean = bytearray()
    spans = []
    pos = 0
    n = len(annotated)
    while pos < n:
        s = annotated.find(start_marker, pos)
        gap = annotated[pos:] if s < 0 else annotated[pos:s]
        if nonce in gap:
            at = pos + gap.find(nonce)
            if at > 0 and annotated[at - 1:at] == CLOSE:
                raise MalformedAnnotation(f"end marker without start marker at offset {at - 1}")
            raise MalformedAnnotation(f"stray nonce outside markers at offset {at}")
        clean += gap
        if s < 0:
            break
        body = s + len(start_marker)
        e = annotated.find(end_marker, body)
        if e < 0:
            raise MalformedAnnotation(f"start marker at offset {s} is never closed")
        content = annotated[body:e]
        if nonce in content:
            at = body + content.find(nonce)
            if annotated[at:at + len(start_marker)] == start_marker:
                raise MalformedAnnotation(f"nested start marker at offset {at}")
            raise MalformedAnnotation(f"stray nonce inside sensitive region at offset {at}")
        if content:
            spans.append((len(clean), len(clean) + len(content)))
            clean += content
        pos = e + len(end_marker)
    clean = bytes(clean)
    return clean, build_next_taint(len(clean), spans)


def build_next_taint(input_len: int, spans: Iterable) -> TaintMap:
    n = int(input_len)
    if n < 0:
        raise InvalidArgument("input length must be non-negative")
    spans = _as_spans(spans)
    _check_bounds(spans, n)
    spans = normalize_spans(spans)
    index = np.arange(n, dtype=np.int64)
    nearest = np.full(n, n, dtype=np.int64)
    for s, e in spans:
        nearest[s:e] = index[s:e]
    # suffix minimum gives the first sensitive index at or after i
    nearest = np.minimum.accumulate(nearest[::-1])[::-1] if n else nearest
    next_taint = (nearest - index).astype(np.int32)
    next_taint.flags.writeable = False
    return TaintMap(n, tuple(spans), next_taint)
