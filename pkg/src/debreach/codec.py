"""End-to-end compression: strip markers, tokenize per mode, write DEFLATE."""
from __future__ import annotations

import enum
import zlib
from dataclasses import dataclass

from .annotation import TaintMap, build_next_taint, strip_markers
from .deflate import DeflateStream, emit_deflate_stream
from .errors import CorruptStream, InvalidArgument
from .inflate import inflate_stream
from .lz77 import MatchConfig, TokenStream, lz77_match


class CompressMode(str, enum.Enum):
    STANDARD = "standard"
    HUFFMAN_ONLY = "huffman-only"
    DEBREACH = "debreach"

    @classmethod
    def parse(cls, value) -> "CompressMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            raise InvalidArgument(f"unknown mode {value!r}; expected one of "
                                  f"{', '.join(m.value for m in cls)}") from None


@dataclass(frozen=True)
class Prepared:
    clean: bytes
    taint: TaintMap
    tokens: TokenStream


def tokenize(data: bytes, taint: TaintMap | None, mode, config: MatchConfig | None = None) -> TokenStream:
    """Token stream for already-clean ``data``; only debreach mode honours ``taint``."""
    mode = CompressMode.parse(mode)
    if mode is CompressMode.HUFFMAN_ONLY:
        return TokenStream.literals(data)
    if mode is CompressMode.STANDARD:
        taint = None
    return lz77_match(data, taint, config)


def prepare(annotated: bytes, nonce, mode, config: MatchConfig | None = None) -> Prepared:
    """Strip markers (when a nonce is given) and tokenize."""
    annotated = bytes(annotated)
    if nonce is None:
        clean, taint = annotated, build_next_taint(len(annotated), [])
    else:
        clean, taint = strip_markers(annotated, nonce)
    return Prepared(clean, taint, tokenize(clean, taint, mode, config))


def compress(annotated: bytes, nonce=None, mode=CompressMode.DEBREACH,
             config: MatchConfig | None = None, block_kind: str = "dynamic") -> DeflateStream:
    return emit_deflate_stream(prepare(annotated, nonce, mode, config).tokens, block_kind)


def compress_spans(data: bytes, spans, mode=CompressMode.DEBREACH,
                   config: MatchConfig | None = None, block_kind: str = "dynamic") -> DeflateStream:
    """Like :func:`compress` but with sensitive spans given directly instead of markers."""
    data = bytes(data)
    taint = build_next_taint(len(data), spans)
    return emit_deflate_stream(tokenize(data, taint, mode, config), block_kind)


def compression_ratio(compressed_len: int, original_len: int) -> float:
    if original_len <= 0:
        raise InvalidArgument("original length must be positive")
    return compressed_len / original_len


def zlib_wrap(raw: bytes | DeflateStream, original: bytes) -> bytes:
    """Add the two-byte zlib header and Adler-32 trailer around a raw stream."""
    return b"\x78\x9c" + bytes(raw) + zlib.adler32(original).to_bytes(4, "big")


def zlib_unwrap_inflate(data: bytes) -> bytes:
    data = bytes(data)
    if len(data) < 6:
        raise CorruptStream("zlib container too short", 0)
    cmf, flg = data[0], data[1]
    if cmf & 0x0F != 8 or (cmf << 8 | flg) % 31:
        raise CorruptStream("bad zlib header", 0)
    if flg & 0x20:
        raise CorruptStream("preset dictionaries are not supported", 1)
    out = inflate_stream(data[2:-4])
    if zlib.adler32(out).to_bytes(4, "big") != data[-4:]:
        raise CorruptStream("Adler-32 mismatch", len(data) - 4)
    return out
