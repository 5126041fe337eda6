"""RFC 1951 decoder used to verify everything the writer produces.

Acceptance of incomplete codes follows zlib: a literal/length or distance
code may be incomplete only when it holds a single one-bit codeword, the
distance code may also be empty, and the code-length code must be complete.
"""
from __future__ import annotations

import numpy as np

from ._jit import kernel
from .deflate import CL_ORDER, DIST_BASE, DIST_EXTRA, FIXED_DIST_LENGTHS, FIXED_LIT_LENGTHS, \
    LENGTH_BASE, LENGTH_EXTRA
from .errors import CorruptStream
from .lz77 import TokenStream

ERR_TRUNCATED = 1
ERR_BLOCK_TYPE = 2
ERR_STORED_LEN = 3
ERR_CODE_LENGTHS = 4
ERR_BAD_SYMBOL = 5
ERR_DISTANCE = 6
ERR_REPEAT = 7
ERR_COUNTS = 8
ERR_NO_EOB = 9

MESSAGES = {
    ERR_TRUNCATED: "stream ends before the final block is complete",
    ERR_BLOCK_TYPE: "invalid block type 3",
    ERR_STORED_LEN: "stored block length does not match its complement",
    ERR_CODE_LENGTHS: "invalid code lengths (over-subscribed or incomplete code)",
    ERR_BAD_SYMBOL: "invalid Huffman code or symbol",
    ERR_DISTANCE: "distance reaches before the start of the output",
    ERR_REPEAT: "invalid code-length repeat",
    ERR_COUNTS: "too many length or distance codes",
    ERR_NO_EOB: "block has no end-of-block code",
}


@kernel
def _need(data, st, nbits):
    # st = [byte position, bit buffer, bits in buffer, error code]
    while st[2] < nbits:
        if st[0] >= data.shape[0]:
            st[3] = 1
            return False
        st[1] |= np.int64(data[st[0]]) << st[2]
        st[0] += 1
        st[2] += 8
    return True


@kernel
def _bits(data, st, nbits):
    if nbits == 0:
        return 0
    if not _need(data, st, nbits):
        return 0
    v = st[1] & ((np.int64(1) << nbits) - 1)
    st[1] >>= nbits
    st[2] -= nbits
    return v


@kernel
def _build(lengths, n, count, symbol):
    """Fill canonical decode tables; returns codes left unassigned, or -1 if over-subscribed."""
    for k in range(16):
        count[k] = 0
    for s in range(n):
        count[lengths[s]] += 1
    if count[0] == n:
        return 0
    left = 1
    for k in range(1, 16):
        left <<= 1
        left -= count[k]
        if left < 0:
            return -1
    offs = np.zeros(16, dtype=np.int64)
    for k in range(1, 15):
        offs[k + 1] = offs[k] + count[k]
    for s in range(n):
        if lengths[s] != 0:
            symbol[offs[lengths[s]]] = s
            offs[lengths[s]] += 1
    return left


@kernel
def _usable(count, n, left, allow_empty):
    if left < 0:
        return False
    if count[0] == n:
        return allow_empty
    if left > 0:
        # only a single one-bit code may be incomplete
        return count[1] == 1 and count[0] == n - 1
    return True


@kernel
def _decode(data, st, count, symbol):
    code = 0
    first = 0
    index = 0
    for length in range(1, 16):
        code |= _bits(data, st, 1)
        if st[3] != 0:
            return -1
        c = count[length]
        if code - c < first:
            return symbol[index + (code - first)]
        index += c
        first += c
        first <<= 1
        code <<= 1
    st[3] = 5
    return -1


@kernel
def _grow(buf, need):
    size = buf.shape[0]
    if need <= size:
        return buf
    while size < need:
        size *= 2
    bigger = np.empty(size, dtype=buf.dtype)
    bigger[:buf.shape[0]] = buf
    return bigger


@kernel
def _inflate_kernel(data, record, fixed_lit, fixed_dist, length_base, length_extra,
                    dist_base, dist_extra, cl_order):
    st = np.zeros(4, dtype=np.int64)
    out = np.empty(max(4 * data.shape[0], 1024), dtype=np.uint8)
    n_out = 0
    tok_value = np.empty(1024 if record else 1, dtype=np.int32)
    tok_length = np.empty(1024 if record else 1, dtype=np.int32)
    n_tok = 0
    lit_count = np.zeros(16, dtype=np.int64)
    lit_symbol = np.zeros(288, dtype=np.int64)
    dist_count = np.zeros(16, dtype=np.int64)
    dist_symbol = np.zeros(32, dtype=np.int64)
    cl_count = np.zeros(16, dtype=np.int64)
    cl_symbol = np.zeros(19, dtype=np.int64)
    lengths = np.zeros(320, dtype=np.int64)
    final = 0
    while final == 0:
        final = _bits(data, st, 1)
        btype = _bits(data, st, 2)
        if st[3] != 0:
            break
        if btype == 0:
            # drop partial byte; give back any whole bytes already buffered
            drop = st[2] % 8
            st[1] >>= drop
            st[2] -= drop
            st[0] -= st[2] // 8
            st[1] = 0
            st[2] = 0
            if st[0] + 4 > data.shape[0]:
                st[3] = ERR_TRUNCATED
                break
            p = st[0]
            n = np.int64(data[p]) | (np.int64(data[p + 1]) << 8)
            nc = np.int64(data[p + 2]) | (np.int64(data[p + 3]) << 8)
            if n != (nc ^ 0xFFFF):
                st[3] = ERR_STORED_LEN
                break
            p += 4
            if p + n > data.shape[0]:
                st[0] = data.shape[0]
                st[3] = ERR_TRUNCATED
                break
            out = _grow(out, n_out + n)
            for k in range(n):
                out[n_out + k] = data[p + k]
            if record:
                tok_value = _grow(tok_value, n_tok + n)
                tok_length = _grow(tok_length, n_tok + n)
                for k in range(n):
                    tok_value[n_tok + k] = data[p + k]
                    tok_length[n_tok + k] = 0
                n_tok += n
            n_out += n
            st[0] = p + n
            continue
        if btype == 3:
            st[3] = ERR_BLOCK_TYPE
            break
        if btype == 1:
            _build(fixed_lit, 288, lit_count, lit_symbol)
            _build(fixed_dist, 32, dist_count, dist_symbol)
        else:
            nlen = _bits(data, st, 5) + 257
            ndist = _bits(data, st, 5) + 1
            ncode = _bits(data, st, 4) + 4
            if st[3] != 0:
                break
            if nlen > 286 or ndist > 30:
                st[3] = ERR_COUNTS
                break
            cl_lengths = np.zeros(19, dtype=np.int64)
            for k in range(ncode):
                cl_lengths[cl_order[k]] = _bits(data, st, 3)
            if st[3] != 0:
                break
            left = _build(cl_lengths, 19, cl_count, cl_symbol)
            if left != 0:
                st[3] = ERR_CODE_LENGTHS
                break
            k = 0
            while k < nlen + ndist:
                sym = _decode(data, st, cl_count, cl_symbol)
                if st[3] != 0:
                    break
                if sym < 16:
                    lengths[k] = sym
                    k += 1
                    continue
                if sym == 16:
                    if k == 0:
                        st[3] = ERR_REPEAT
                        break
                    val = lengths[k - 1]
                    rep = 3 + _bits(data, st, 2)
                elif sym == 17:
                    val = 0
                    rep = 3 + _bits(data, st, 3)
                else:
                    val = 0
                    rep = 11 + _bits(data, st, 7)
                if st[3] != 0:
                    break
                if k + rep > nlen + ndist:
                    st[3] = ERR_REPEAT
                    break
                for r in range(rep):
                    lengths[k + r] = val
                k += rep
            if st[3] != 0:
                break
            if lengths[256] == 0:
                st[3] = ERR_NO_EOB
                break
            left = _build(lengths[:nlen], nlen, lit_count, lit_symbol)
            if not _usable(lit_count, nlen, left, False):
                st[3] = ERR_CODE_LENGTHS
                break
            left = _build(lengths[nlen:nlen + ndist], ndist, dist_count, dist_symbol)
            if not _usable(dist_count, ndist, left, True):
                st[3] = ERR_CODE_LENGTHS
                break
        while True:
            sym = _decode(data, st, lit_count, lit_symbol)
            if st[3] != 0:
                break
            if sym < 256:
                out = _grow(out, n_out + 1)
                out[n_out] = sym
                n_out += 1
                if record:
                    tok_value = _grow(tok_value, n_tok + 1)
                    tok_length = _grow(tok_length, n_tok + 1)
                    tok_value[n_tok] = sym
                    tok_length[n_tok] = 0
                    n_tok += 1
                continue
            if sym == 256:
                break
            sym -= 257
            if sym >= 29:
                st[3] = ERR_BAD_SYMBOL
                break
            length = length_base[sym] + _bits(data, st, length_extra[sym])
            dsym = _decode(data, st, dist_count, dist_symbol)
            if st[3] != 0:
                break
            if dsym >= 30:
                st[3] = ERR_BAD_SYMBOL
                break
            dist = dist_base[dsym] + _bits(data, st, dist_extra[dsym])
            if st[3] != 0:
                break
            if dist > n_out:
                st[3] = ERR_DISTANCE
                break
            out = _grow(out, n_out + length)
            src = n_out - dist
            for r in range(length):
                out[n_out + r] = out[src + r]
            n_out += length
            if record:
                tok_value = _grow(tok_value, n_tok + 1)
                tok_length = _grow(tok_length, n_tok + 1)
                tok_value[n_tok] = dist
                tok_length[n_tok] = length
                n_tok += 1
        if st[3] != 0:
            break
    return out, n_out, tok_value, tok_length, n_tok, st[3], st[0]


def _run(stream, record):
    raw = bytes(stream)
    data = np.frombuffer(raw, dtype=np.uint8)
    out, n_out, tv, tl, n_tok, err, offset = _inflate_kernel(
        data, record, FIXED_LIT_LENGTHS_288, FIXED_DIST_LENGTHS_32, LENGTH_BASE,
        LENGTH_EXTRA, DIST_BASE, DIST_EXTRA, CL_ORDER)
    if err:
        raise CorruptStream(MESSAGES.get(int(err), "corrupt stream"), int(offset))
    return out[:n_out].tobytes(), tv[:n_tok].copy(), tl[:n_tok].copy()


FIXED_LIT_LENGTHS_288 = np.ascontiguousarray(FIXED_LIT_LENGTHS)
FIXED_DIST_LENGTHS_32 = np.concatenate((FIXED_DIST_LENGTHS, [5, 5])).astype(np.int64)


def inflate_stream(stream) -> bytes:
    """Decode a raw DEFLATE stream (``bytes`` or :class:`DeflateStream`)."""
    return _run(stream, False)[0]


def inflate_tokens(stream) -> TokenStream:
    """Decode and return the literal/reference sequence the stream encodes."""
    out, value, length = _run(stream, True)
    return TokenStream(value, length, len(out))
