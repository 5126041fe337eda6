"""Greedy LZ77 matching that never lets a match touch sensitive bytes.

The matcher walks the input once.  A position whose distance to the next
sensitive byte is too short to hold a match is emitted as a literal; every
other position is looked up in a hash-chain dictionary and the candidate
match length is clipped to the taint distance of *both* the current
position and the candidate.  Only positions whose hashed gram is free of
sensitive bytes enter the dictionary, and no comparison runs past a clip
point, so the reference structure of the output does not depend on the
content of sensitive bytes.

With an all-clear :class:`~debreach.annotation.TaintMap` this is ordinary
greedy LZ77.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from ._jit import kernel
from .annotation import TaintMap, build_next_taint
from .errors import InvalidArgument

HASH_BITS = 15
UNLIMITED_CHAIN = 1 << 62


class Literal(NamedTuple):
    byte: int


class Reference(NamedTuple):
    distance: int
    length: int


@dataclass(frozen=True)
class MatchConfig:
    min_match: int = 3
    min_emit_len: int = 3
    max_match_len: int = 258
    window_size: int = 32768
    max_chain: int | None = 1024
    strict_gt: bool = False

    def __post_init__(self):
        if not 1 <= self.min_match <= self.min_emit_len <= self.max_match_len:
            raise InvalidArgument("need 1 <= min_match <= min_emit_len <= max_match_len")
        if self.window_size < 1:
            raise InvalidArgument("window_size must be >= 1")
        if self.max_chain is not None and self.max_chain < 1:
            raise InvalidArgument("max_chain must be >= 1 or None")

    @property
    def emit_threshold(self) -> int:
        """Shortest match length that is emitted as a reference."""
        return self.min_match + 1 if self.strict_gt else self.min_emit_len


@dataclass(frozen=True, eq=False)
class TokenStream:
    """Parallel arrays: ``length[k] == 0`` marks a literal whose byte is ``value[k]``;
    otherwise token ``k`` is a reference with distance ``value[k]``."""

    value: np.ndarray
    length: np.ndarray
    source_len: int

    def __len__(self):
        return len(self.length)

    def __iter__(self) -> Iterator[Literal | Reference]:
        for v, n in zip(self.value.tolist(), self.length.tolist()):
            yield Reference(v, n) if n else Literal(v)

    def __eq__(self, other):
        if not isinstance(other, TokenStream):
            return NotImplemented
        return (self.source_len == other.source_len
                and np.array_equal(self.value, other.value)
                and np.array_equal(self.length, other.length))

    @property
    def is_reference(self) -> np.ndarray:
        return self.length > 0

    @property
    def n_references(self) -> int:
        return int(np.count_nonzero(self.length))

    def kinds(self) -> np.ndarray:
        return (self.length > 0).astype(np.uint8)

    def references(self) -> list[Reference]:
        mask = self.length > 0
        return [Reference(d, n) for d, n in zip(self.value[mask].tolist(), self.length[mask].tolist())]

    def output_positions(self) -> np.ndarray:
        """Offset in the expanded output where each token starts."""
        sizes = np.where(self.length > 0, self.length, 1).astype(np.int64)
        return np.concatenate(([0], np.cumsum(sizes)[:-1])) if len(sizes) else sizes

    @classmethod
    def from_tokens(cls, tokens, source_len=None) -> "TokenStream":
        value, length = [], []
        for t in tokens:
            if isinstance(t, Reference):
                value.append(t.distance)
                length.append(t.length)
            else:
                value.append(t.byte if isinstance(t, Literal) else int(t))
                length.append(0)
        value = np.asarray(value, dtype=np.int32)
        length = np.asarray(length, dtype=np.int32)
        if source_len is None:
            source_len = int(np.where(length > 0, length, 1).sum())
        return cls(value, length, source_len)

    @classmethod
    def literals(cls, data: bytes) -> "TokenStream":
        buf = np.frombuffer(bytes(data), dtype=np.uint8)
        return cls(buf.astype(np.int32), np.zeros(len(buf), dtype=np.int32), len(buf))


@kernel
def _hash(data, pos, width, mask):
    h = 0
    for k in range(width):
        h = ((h << 5) ^ int(data[pos + k])) & 0xFFFFFFFF
    return h & mask


@kernel
def _match_kernel(data, next_taint, min_match, threshold, max_len, window, max_chain,
                  out_value, out_length):
    n = data.shape[0]
    mask = (1 << 15) - 1
    head = np.full(mask + 1, -1, dtype=np.int64)
    prev = np.full(max(n, 1), -1, dtype=np.int64)
    count = 0
    i = 0
    while i < n:
        room = next_taint[i]
        if room < threshold:
            # too close to sensitive data (or to the end) to hold a match
            out_value[count] = data[i]
            out_length[count] = 0
            count += 1
            i += 1
            continue
        cap = min(room, max_len, n - i)
        h = _hash(data, i, min_match, mask)
        best_len = 0
        best_dist = 0
        cand = head[h]
        probes = 0
        while cand >= 0 and probes < max_chain:
            dist = i - cand
            if dist > window:
                break
            probes += 1
            limit = min(cap, next_taint[cand])
            k = 0
            while k < limit and data[cand + k] == data[i + k]:
                k += 1
            if k > best_len:
                best_len = k
                best_dist = dist
                if best_len == cap:
                    break
            cand = prev[cand]
        if best_len >= threshold:
            out_value[count] = best_dist
            out_length[count] = best_len
            count += 1
            # every covered position whose gram is clear of sensitive bytes
            for j in range(i, min(i + best_len, n - min_match + 1)):
                if next_taint[j] < min_match:
                    break
                hj = _hash(data, j, min_match, mask)
                prev[j] = head[hj]
                head[hj] = j
            i += best_len
        else:
            out_value[count] = data[i]
            out_length[count] = 0
            count += 1
            prev[i] = head[h]
            head[h] = i
            i += 1
    return count


def lz77_match(data: bytes, taint: TaintMap | None = None,
               config: MatchConfig | None = None) -> TokenStream:
    """Tokenize ``data``; ``taint=None`` means nothing is sensitive."""
    config = config or MatchConfig()
    buf = np.frombuffer(bytes(data), dtype=np.uint8)
    n = len(buf)
    if taint is None:
        taint = build_next_taint(n, [])
    if taint.input_len != n or len(taint.next_taint) != n:
        raise InvalidArgument(f"taint map covers {taint.input_len} bytes, input has {n}")
    out_value = np.empty(n, dtype=np.int32)
    out_length = np.empty(n, dtype=np.int32)
    chain = UNLIMITED_CHAIN if config.max_chain is None else config.max_chain
    count = _match_kernel(buf, np.ascontiguousarray(taint.next_taint, dtype=np.int32),
                          config.min_match, config.emit_threshold, config.max_match_len,
                          config.window_size, chain, out_value, out_length)
    return TokenStream(out_value[:count].copy(), out_length[:count].copy(), n)


@kernel
def _expand_kernel(value, length, out):
    pos = 0
    for k in range(length.shape[0]):
        n = length[k]
        if n == 0:
            out[pos] = value[k]
            pos += 1
        else:
            src = pos - value[k]
            for j in range(n):
                out[pos + j] = out[src + j]
            pos += n
    return pos


def expand(tokens: TokenStream) -> bytes:
    """Replay a token stream; references copy from already-produced output."""
    sizes = np.where(tokens.length > 0, tokens.length, 1)
    total = int(sizes.sum())
    starts = tokens.output_positions()
    bad = (tokens.length > 0) & ((tokens.value < 1) | (tokens.value > starts))
    if bad.any():
        k = int(np.argmax(bad))
        raise InvalidArgument(f"reference {k} reaches before the start of the output")
    out = np.empty(total, dtype=np.uint8)
    _expand_kernel(tokens.value, tokens.length, out)
    return out.tobytes()
