"""Taint-aware DEFLATE: LZ77 never matches into or out of marked sensitive bytes."""
from ._jit import JIT_ENABLED
from .annotation import Span, TaintMap, annotate, build_next_taint, generate_nonce, strip_markers
from .codec import CompressMode, compress, compress_spans, compression_ratio
from .deflate import DeflateStream, emit_deflate_stream
from .errors import CorruptStream, FactsParseError, InvalidArgument, MalformedAnnotation
from .huffman import HuffmanCode, build_huffman_code_lengths
from .inflate import inflate_stream, inflate_tokens
from .lz77 import Literal, MatchConfig, Reference, TokenStream, expand, lz77_match

__version__ = "0.1.0"

__all__ = [
    "JIT_ENABLED", "Span", "TaintMap", "annotate", "build_next_taint", "generate_nonce",
    "strip_markers", "CompressMode", "compress", "compress_spans", "compression_ratio",
    "DeflateStream", "emit_deflate_stream", "CorruptStream", "FactsParseError",
    "InvalidArgument", "MalformedAnnotation", "HuffmanCode", "build_huffman_code_lengths",
    "inflate_stream", "inflate_tokens", "Literal", "MatchConfig", "Reference", "TokenStream",
    "expand", "lz77_match",
]
