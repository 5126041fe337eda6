import random
import zlib

import pytest
from hypothesis import given, strategies as st

from debreach.annotation import annotate, generate_nonce
from debreach.codec import (CompressMode, compress, compress_spans, compression_ratio, prepare,
                            zlib_unwrap_inflate, zlib_wrap)
from debreach.errors import CorruptStream, InvalidArgument, MalformedAnnotation
from debreach.inflate import inflate_stream
from debreach.lz77 import lz77_match

FIG4 = b"she sells seashells"


def test_standard_beats_huffman_only_with_fixed_blocks():
    std = compress(FIG4, None, "standard", block_kind="fixed")
    huff = compress(FIG4, None, "huffman-only", block_kind="fixed")
    assert len(std) < len(huff)


def test_standard_beats_huffman_only_dynamic_on_larger_text(corpus_files):
    data = corpus_files[0].read_bytes()[:4096]
    assert len(compress(data, None, "standard")) < len(compress(data, None, "huffman-only"))


def test_marked_roundtrip():
    s = compress(b"she N7{sells}N7 seashells", b"N7", "debreach")
    assert inflate_stream(s) == FIG4


def test_huffman_only_has_no_references():
    p = prepare(b"abcabcabcabc", None, "huffman-only")
    assert p.tokens.n_references == 0


def test_debreach_empty_taint_equals_standard():
    data = bytes(random.Random(2).choice(b"ab c") for _ in range(3000))
    assert prepare(data, None, "debreach").tokens == prepare(data, None, "standard").tokens


def test_all_modes_strip_markers():
    text = b"id=N{1234}N; id=N{1234}N"
    for mode in CompressMode:
        assert inflate_stream(compress(text, b"N", mode)) == b"id=1234; id=1234"
    # the repeated secret is only matched when taint is ignored
    assert prepare(text, b"N", "standard").tokens.n_references > 0
    assert all(r.length < 8 for r in prepare(text, b"N", "debreach").tokens.references())


def test_malformed_propagates():
    with pytest.raises(MalformedAnnotation):
        compress(b"aN{b", b"N")


def test_mode_parse():
    assert CompressMode.parse("HUFFMAN_ONLY") is CompressMode.HUFFMAN_ONLY
    with pytest.raises(InvalidArgument):
        CompressMode.parse("lz4")


@pytest.mark.parametrize("c,o,r", [(50, 100, 0.5), (100, 100, 1.0), (262, 1000, 0.262)])
def test_ratio(c, o, r):
    assert compression_ratio(c, o) == pytest.approx(r)


def test_ratio_rejects_empty():
    with pytest.raises(InvalidArgument):
        compression_ratio(5, 0)


def test_zlib_container():
    raw = compress(FIG4, None, "standard")
    wrapped = zlib_wrap(raw, FIG4)
    assert zlib.decompress(wrapped) == FIG4
    assert zlib_unwrap_inflate(wrapped) == FIG4
    assert zlib_unwrap_inflate(zlib.compress(FIG4)) == FIG4
    with pytest.raises(CorruptStream):
        zlib_unwrap_inflate(wrapped[:-1] + bytes([wrapped[-1] ^ 1]))


@given(st.binary(max_size=2000), st.data())
def test_roundtrip_all_modes_and_kinds(data, draw):
    nonce = generate_nonce(draw.draw(st.integers(3, 10)), draw.draw(st.integers(0, 1000)))
    if nonce in data:
        return
    cuts = sorted(set(draw.draw(st.lists(st.integers(0, len(data)), max_size=6))))
    spans = [(a, b) for a, b in zip(cuts[::2], cuts[1::2]) if a < b]
    annotated = annotate(data, spans, nonce)
    mode = draw.draw(st.sampled_from(list(CompressMode)))
    kind = draw.draw(st.sampled_from(["stored", "fixed", "dynamic"]))
    s = compress(annotated, nonce, mode, block_kind=kind)
    assert inflate_stream(s) == data
    assert zlib.decompress(bytes(s), -15) == data


def test_huffman_only_not_better_than_standard_on_corpus(corpus_files):
    for path in corpus_files:
        data = path.read_bytes()
        for kind in ("fixed", "dynamic"):
            assert len(compress(data, None, "huffman-only", block_kind=kind)) >= \
                len(compress(data, None, "standard", block_kind=kind))


def test_compress_spans_matches_markers():
    data = b"user=alice; token=alice"
    spans = [(5, 10)]
    assert bytes(compress_spans(data, spans)) == bytes(compress(annotate(data, spans, b"Q"), b"Q"))
