"""Length-limited prefix codes (package-merge) and canonical codeword assignment."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ._jit import kernel
from .errors import InvalidArgument

MAX_BITS = 15


@kernel
def _package_merge(weights, max_bits):
    # weights: ascending, all > 0, len >= 2.  Returns code length per weight.
    n = weights.shape[0]
    cap = 2 * n
    # is_leaf[level, k]: whether item k of that level's merged list is a leaf
    is_leaf = np.zeros((max_bits, cap), dtype=np.bool_)
    sizes = np.zeros(max_bits, dtype=np.int64)
    cur_w = np.empty(cap, dtype=np.int64)
    nxt_w = np.empty(cap, dtype=np.int64)
    for k in range(n):
        cur_w[k] = weights[k]
        is_leaf[max_bits - 1, k] = True
    sizes[max_bits - 1] = n
    for level in range(max_bits - 2, -1, -1):
        prev_size = sizes[level + 1]
        n_pkg = prev_size // 2
        a = 0
        b = 0
        m = 0
        while a < n or b < n_pkg:
            take_leaf = False
            if b >= n_pkg:
                take_leaf = True
            elif a < n and weights[a] <= cur_w[2 * b] + cur_w[2 * b + 1]:
                take_leaf = True
            if take_leaf:
                nxt_w[m] = weights[a]
                is_leaf[level, m] = True
                a += 1
            else:
                nxt_w[m] = cur_w[2 * b] + cur_w[2 * b + 1]
                b += 1
            m += 1
        sizes[level] = m
        for k in range(m):
            cur_w[k] = nxt_w[k]
    lengths = np.zeros(n, dtype=np.int64)
    take = 2 * n - 2
    for level in range(max_bits):
        leaves = 0
        for k in range(take):
            if is_leaf[level, k]:
                leaves += 1
        # selected leaves are always the lightest ones
        for k in range(leaves):
            lengths[k] += 1
        take = 2 * (take - leaves)
    return lengths


def code_lengths(freqs, max_bits: int = MAX_BITS) -> np.ndarray:
    """Optimal ``max_bits``-limited code lengths for a frequency array (0 = unused)."""
    freqs = np.asarray(freqs, dtype=np.int64)
    used = np.flatnonzero(freqs > 0)
    if len(used) == 0:
        raise InvalidArgument("at least one symbol needs a nonzero frequency")
    if (freqs < 0).any():
        raise InvalidArgument("frequencies must be non-negative")
    if len(used) > (1 << max_bits):
        raise InvalidArgument(f"{len(used)} symbols cannot fit in {max_bits}-bit codes")
    lengths = np.zeros(len(freqs), dtype=np.int64)
    if len(used) == 1:
        lengths[used[0]] = 1
        return lengths
    # stable sort keeps symbol order among equal weights, so results are deterministic
    order = used[np.argsort(freqs[used], kind="stable")]
    lengths[order] = _package_merge(np.ascontiguousarray(freqs[order]), max_bits)
    return lengths


def canonical_codes(lengths) -> np.ndarray:
    """Assign codewords: shorter first, ties broken by symbol value."""
    lengths = np.asarray(lengths, dtype=np.int64)
    max_len = int(lengths.max()) if len(lengths) else 0
    bl_count = np.bincount(lengths, minlength=max_len + 1)
    bl_count[0] = 0
    next_code = np.zeros(max_len + 2, dtype=np.int64)
    code = 0
    for bits in range(1, max_len + 1):
        code = (code + bl_count[bits - 1]) << 1
        next_code[bits] = code
    codes = np.zeros(len(lengths), dtype=np.int64)
    for sym in range(len(lengths)):
        n = lengths[sym]
        if n:
            codes[sym] = next_code[n]
            next_code[n] += 1
    return codes


def kraft_sum(lengths) -> float:
    lengths = np.asarray(lengths)
    used = lengths[lengths > 0]
    return float(np.sum(2.0 ** -used.astype(np.float64)))


@dataclass(frozen=True, eq=False)
class HuffmanCode:
    code_lengths: np.ndarray
    codes: np.ndarray

    @classmethod
    def from_lengths(cls, lengths) -> "HuffmanCode":
        lengths = np.asarray(lengths, dtype=np.int64)
        return cls(lengths, canonical_codes(lengths))

    def cost(self, freqs) -> int:
        """Total bits to encode symbols with the given frequencies."""
        return int(np.dot(np.asarray(freqs, dtype=np.int64), self.code_lengths))

    def codeword(self, symbol: int) -> str:
        n = int(self.code_lengths[symbol])
        return format(int(self.codes[symbol]), f"0{n}b") if n else ""


def build_huffman_code_lengths(frequencies, max_bits: int = MAX_BITS):
    """Build an optimal length-limited prefix code.

    ``frequencies`` is either a sequence indexed by symbol or a mapping from
    symbol to count.  A mapping gets back a mapping of code lengths (only
    symbols with nonzero count); a sequence gets back a :class:`HuffmanCode`.
    """
    if isinstance(frequencies, Mapping):
        symbols = list(frequencies)
        lengths = code_lengths([frequencies[s] for s in symbols], max_bits)
        return {s: int(n) for s, n in zip(symbols, lengths) if n}
    return HuffmanCode.from_lengths(code_lengths(frequencies, max_bits))
