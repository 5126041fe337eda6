"""RFC 1951 block writer.

Token streams are split into blocks of at most ``BLOCK_INPUT`` source bytes
and written as stored, fixed-Huffman or dynamic-Huffman blocks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import kernel
from .errors import InvalidArgument
from .huffman import code_lengths
from .lz77 import TokenStream, expand

BLOCK_INPUT = 1 << 16
STORED_MAX = 0xFFFF
BLOCK_KINDS = ("stored", "fixed", "dynamic")
END_OF_BLOCK = 256
MAX_DISTANCE = 32768
MAX_LENGTH = 258

LENGTH_BASE = np.array([3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 17, 19, 23, 27, 31, 35, 43, 51,
                        59, 67, 83, 99, 115, 131, 163, 195, 227, 258], dtype=np.int64)
LENGTH_EXTRA = np.array([0] * 8 + [1] * 4 + [2] * 4 + [3] * 4 + [4] * 4 + [5] * 4 + [0],
                        dtype=np.int64)
DIST_BASE = np.array([1, 2, 3, 4, 5, 7, 9, 13, 17, 25, 33, 49, 65, 97, 129, 193, 257, 385,
                      513, 769, 1025, 1537, 2049, 3073, 4097, 6145, 8193, 12289, 16385,
                      24577], dtype=np.int64)
DIST_EXTRA = np.array([0, 0, 0, 0] + [k // 2 for k in range(2, 28)], dtype=np.int64)
CL_ORDER = np.array([16, 17, 18, 0, 8, 7, 9, 6, 10, 5, 11, 4, 12, 3, 13, 2, 14, 1, 15],
                    dtype=np.int64)

# symbol index (0-based, i.e. minus 257 / plain distance code) for every length and distance
LENGTH_SYMBOL = np.zeros(MAX_LENGTH + 1, dtype=np.int64)
for _s in range(len(LENGTH_BASE)):
    _hi = LENGTH_BASE[_s] + (1 << LENGTH_EXTRA[_s])
    LENGTH_SYMBOL[LENGTH_BASE[_s]:min(_hi, MAX_LENGTH + 1)] = _s
LENGTH_SYMBOL[MAX_LENGTH] = 28
DIST_SYMBOL = np.zeros(MAX_DISTANCE + 1, dtype=np.int64)
for _s in range(len(DIST_BASE)):
    DIST_SYMBOL[DIST_BASE[_s]:DIST_BASE[_s] + (1 << DIST_EXTRA[_s])] = _s
del _s, _hi

FIXED_LIT_LENGTHS = np.array([8] * 144 + [9] * 112 + [7] * 24 + [8] * 8, dtype=np.int64)
FIXED_DIST_LENGTHS = np.full(30, 5, dtype=np.int64)


@dataclass(frozen=True)
class DeflateStream:
    data: bytes
    block_kind: str
    n_blocks: int
    source_len: int

    def __len__(self):
        return len(self.data)

    def __bytes__(self):
        return self.data


def reversed_codes(lengths) -> np.ndarray:
    """Canonical codes with their bits reversed, ready for LSB-first packing."""
    from .huffman import canonical_codes
    lengths = np.asarray(lengths, dtype=np.int64)
    codes = canonical_codes(lengths)
    out = np.zeros_like(codes)
    for sym in np.flatnonzero(lengths):
        c, n, r = int(codes[sym]), int(lengths[sym]), 0
        for _ in range(n):
            r = (r << 1) | (c & 1)
            c >>= 1
        out[sym] = r
    return out


FIXED_LIT_CODES = reversed_codes(FIXED_LIT_LENGTHS)
FIXED_DIST_CODES = reversed_codes(FIXED_DIST_LENGTHS)


@kernel
def _put_bits(out, st, value, nbits):
    # st = [byte position, bit buffer, bits in buffer]
    st[1] |= value << st[2]
    st[2] += nbits
    while st[2] >= 8:
        out[st[0]] = st[1] & 0xFF
        st[0] += 1
        st[1] >>= 8
        st[2] -= 8


@kernel
def _align(out, st):
    if st[2] > 0:
        out[st[0]] = st[1] & 0xFF
        st[0] += 1
        st[1] = 0
        st[2] = 0


@kernel
def _write_tokens(out, st, value, length, start, stop, lit_codes, lit_lens,
                  dist_codes, dist_lens, length_symbol, length_base, length_extra,
                  dist_symbol, dist_base, dist_extra):
    for k in range(start, stop):
        n = length[k]
        if n == 0:
            sym = value[k]
            _put_bits(out, st, lit_codes[sym], lit_lens[sym])
        else:
            ls = length_symbol[n]
            _put_bits(out, st, lit_codes[257 + ls], lit_lens[257 + ls])
            if length_extra[ls]:
                _put_bits(out, st, n - length_base[ls], length_extra[ls])
            d = value[k]
            ds = dist_symbol[d]
            _put_bits(out, st, dist_codes[ds], dist_lens[ds])
            if dist_extra[ds]:
                _put_bits(out, st, d - dist_base[ds], dist_extra[ds])
    _put_bits(out, st, lit_codes[256], lit_lens[256])


@kernel
def _count_symbols(value, length, start, stop, length_symbol, dist_symbol, lit_freq, dist_freq):
    for k in range(start, stop):
        n = length[k]
        if n == 0:
            lit_freq[value[k]] += 1
        else:
            lit_freq[257 + length_symbol[n]] += 1
            dist_freq[dist_symbol[value[k]]] += 1
    lit_freq[256] += 1


def _run_length_code(lengths):
    """Encode a code-length sequence with the 16/17/18 repeat symbols.

    Returns a list of (symbol, extra_value, extra_bits).
    """
    out = []
    lengths = [int(x) for x in lengths]
    i, n = 0, len(lengths)
    while i < n:
        v = lengths[i]
        run = 1
        while i + run < n and lengths[i + run] == v:
            run += 1
        i += run
        if v == 0:
            while run >= 11:
                r = min(run, 138)
                out.append((18, r - 11, 7))
                run -= r
            if run >= 3:
                out.append((17, run - 3, 3))
                run = 0
            out.extend((0, 0, 0) for _ in range(run))
        else:
            out.append((v, 0, 0))
            run -= 1
            while run >= 3:
                r = min(run, 6)
                out.append((16, r - 3, 2))
                run -= r
            out.extend((v, 0, 0) for _ in range(run))
    return out


def _single_or_lengths(freq, max_bits):
    if not freq.any():
        lengths = np.zeros(len(freq), dtype=np.int64)
        lengths[0] = 1
        return lengths
    return code_lengths(freq, max_bits)


def _dynamic_header(out, st, lit_lens, dist_lens):
    hlit = max(257, int(np.flatnonzero(lit_lens)[-1]) + 1)
    hdist = max(1, int(np.flatnonzero(dist_lens)[-1]) + 1)
    rle = _run_length_code(np.concatenate((lit_lens[:hlit], dist_lens[:hdist])))
    cl_freq = np.zeros(19, dtype=np.int64)
    for sym, _, _ in rle:
        cl_freq[sym] += 1
    if np.count_nonzero(cl_freq) == 1:
        # a lone code-length symbol would be an incomplete code; pair it with a dummy
        cl_lens = np.zeros(19, dtype=np.int64)
        used = int(np.flatnonzero(cl_freq)[0])
        cl_lens[used] = 1
        cl_lens[1 if used == 0 else 0] = 1
    else:
        cl_lens = code_lengths(cl_freq, 7)
    cl_codes = reversed_codes(cl_lens)
    ordered = cl_lens[CL_ORDER]
    hclen = max(4, int(np.flatnonzero(ordered)[-1]) + 1)
    _put_bits(out, st, hlit - 257, 5)
    _put_bits(out, st, hdist - 1, 5)
    _put_bits(out, st, hclen - 4, 4)
    for k in range(hclen):
        _put_bits(out, st, int(ordered[k]), 3)
    for sym, extra, nbits in rle:
        _put_bits(out, st, int(cl_codes[sym]), int(cl_lens[sym]))
        if nbits:
            _put_bits(out, st, extra, nbits)


def block_ranges(tokens: TokenStream, block_input: int = BLOCK_INPUT) -> list[tuple[int, int]]:
    """Token index ranges, one per block of ``block_input`` source bytes."""
    if len(tokens) == 0:
        return [(0, 0)]
    block_of = tokens.output_positions() // block_input
    cuts = np.flatnonzero(np.diff(block_of)) + 1
    edges = [0, *cuts.tolist(), len(tokens)]
    return list(zip(edges[:-1], edges[1:]))


def check_tokens(tokens: TokenStream) -> None:
    refs = tokens.length > 0
    if not refs.any():
        return
    lengths = tokens.length[refs]
    dists = tokens.value[refs]
    starts = tokens.output_positions()[refs]
    if (lengths < 3).any() or (lengths > MAX_LENGTH).any():
        raise InvalidArgument("reference length outside 3..258")
    if (dists < 1).any() or (dists > MAX_DISTANCE).any():
        raise InvalidArgument("reference distance outside 1..32768")
    if (dists > starts).any():
        raise InvalidArgument("reference reaches before the start of the stream")
    lits = tokens.value[~refs]
    if len(lits) and ((lits < 0).any() or (lits > 255).any()):
        raise InvalidArgument("literal outside 0..255")


def emit_deflate_stream(tokens: TokenStream, block_kind: str = "dynamic",
                        block_input: int = BLOCK_INPUT) -> DeflateStream:
    if block_kind not in BLOCK_KINDS:
        raise InvalidArgument(f"block kind must be one of {BLOCK_KINDS}, got {block_kind!r}")
    check_tokens(tokens)
    if block_kind == "stored":
        return _emit_stored(expand(tokens))

    ranges = block_ranges(tokens, block_input)
    value = np.ascontiguousarray(tokens.value, dtype=np.int64)
    length = np.ascontiguousarray(tokens.length, dtype=np.int64)
    out = np.zeros(6 * len(tokens) + 400 * len(ranges) + 16, dtype=np.uint8)
    st = np.zeros(3, dtype=np.int64)
    for b, (start, stop) in enumerate(ranges):
        final = 1 if b == len(ranges) - 1 else 0
        _put_bits(out, st, final, 1)
        if block_kind == "fixed":
            _put_bits(out, st, 1, 2)
            lit_codes, lit_lens = FIXED_LIT_CODES, FIXED_LIT_LENGTHS
            dist_codes, dist_lens = FIXED_DIST_CODES, FIXED_DIST_LENGTHS
        else:
            _put_bits(out, st, 2, 2)
            lit_freq = np.zeros(286, dtype=np.int64)
            dist_freq = np.zeros(30, dtype=np.int64)
            _count_symbols(value, length, start, stop, LENGTH_SYMBOL, DIST_SYMBOL,
                           lit_freq, dist_freq)
            lit_lens = code_lengths(lit_freq, 15)
            dist_lens = _single_or_lengths(dist_freq, 15)
            _dynamic_header(out, st, lit_lens, dist_lens)
            lit_codes, dist_codes = reversed_codes(lit_lens), reversed_codes(dist_lens)
        _write_tokens(out, st, value, length, start, stop, lit_codes, lit_lens,
                      dist_codes, dist_lens, LENGTH_SYMBOL, LENGTH_BASE, LENGTH_EXTRA,
                      DIST_SYMBOL, DIST_BASE, DIST_EXTRA)
    _align(out, st)
    return DeflateStream(out[:st[0]].tobytes(), block_kind, len(ranges), tokens.source_len)


def _emit_stored(raw: bytes) -> DeflateStream:
    chunks = [raw[k:k + STORED_MAX] for k in range(0, len(raw), STORED_MAX)] or [b""]
    parts = []
    for k, chunk in enumerate(chunks):
        final = 1 if k == len(chunks) - 1 else 0
        n = len(chunk)
        # BFINAL + BTYPE=00 fit in the first byte; the rest of it is padding
        parts += [bytes([final]), n.to_bytes(2, "little"), (n ^ 0xFFFF).to_bytes(2, "little"), chunk]
    return DeflateStream(b"".join(parts), "stored", len(chunks), len(raw))
