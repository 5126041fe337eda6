"""Compression-oracle adversary.

The attacker controls part of a page that is compressed together with a
secret and observes only the compressed length.  Guessing the next secret
byte correctly lengthens an LZ77 match, which usually shortens the output.
"""
from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .annotation import Span, build_next_taint
from .codec import CompressMode, compress_spans, tokenize
from .errors import InvalidArgument
from .lz77 import MatchConfig, TokenStream

SECRET_SLOT = b"{{SECRET}}"
INJECT_SLOT = b"{{INJECT}}"
DEFAULT_PREFIX = b"/compose.php?sendto="
# 64 bytes that can appear in an e-mail address
EMAIL_ALPHABET = bytes(sorted(set(
    b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789@.")))
ATTACK_BLOCK = "fixed"


@dataclass(frozen=True)
class PageTemplate:
    """Page text with one injection slot and one secret slot, in either order."""

    before: bytes
    middle: bytes
    after: bytes
    secret_first: bool = False

    @classmethod
    def parse(cls, text) -> "PageTemplate":
        if isinstance(text, str):
            text = text.encode()
        for slot in (SECRET_SLOT, INJECT_SLOT):
            if text.count(slot) != 1:
                raise InvalidArgument(f"template must contain {slot.decode()} exactly once")
        s, x = text.index(SECRET_SLOT), text.index(INJECT_SLOT)
        first, second = (SECRET_SLOT, INJECT_SLOT) if s < x else (INJECT_SLOT, SECRET_SLOT)
        before, rest = text.split(first)
        middle, after = rest.split(second)
        return cls(before, middle, after, secret_first=s < x)

    @classmethod
    def load(cls, path) -> "PageTemplate":
        return cls.parse(Path(path).read_bytes())

    @classmethod
    def default(cls) -> "PageTemplate":
        return cls.parse((resources.files(__package__) / "data" / "fig3_template.html").read_bytes())

    def render(self, injected: bytes, secret: bytes) -> tuple[bytes, Span]:
        """Page bytes and the span the secret occupies."""
        first, second = (secret, injected) if self.secret_first else (injected, secret)
        page = self.before + first + self.middle + second + self.after
        if self.secret_first:
            start = len(self.before)
        else:
            start = len(self.before) + len(injected) + len(self.middle)
        return page, Span(start, start + len(secret))


def compression_oracle(template: PageTemplate, injected: bytes, secret: bytes, mode,
                       config: MatchConfig | None = None, block_kind: str = ATTACK_BLOCK) -> int:
    """Compressed size in bytes of the page built from ``injected`` and ``secret``."""
    page, span = template.render(bytes(injected), bytes(secret))
    mode = CompressMode.parse(mode)
    spans = [span] if mode is CompressMode.DEBREACH else []
    return len(compress_spans(page, spans, mode, config, block_kind))


@dataclass
class CompressionOracle:
    """A server holding ``secret``: call it with attacker input, get back a size."""

    template: PageTemplate
    secret: bytes
    mode: CompressMode = CompressMode.STANDARD
    config: MatchConfig | None = None
    block_kind: str = ATTACK_BLOCK
    calls: int = 0

    def __post_init__(self):
        self.mode = CompressMode.parse(self.mode)
        self.secret = bytes(self.secret)

    def __call__(self, injected: bytes) -> int:
        self.calls += 1
        return compression_oracle(self.template, injected, self.secret, self.mode, self.config,
                                  self.block_kind)

    def tokens(self, injected: bytes) -> TokenStream:
        """LZ77 parse the server would emit (for analysis, not available to the attacker)."""
        page, span = self.template.render(bytes(injected), self.secret)
        taint = build_next_taint(len(page), [span] if self.mode is CompressMode.DEBREACH else [])
        return tokenize(page, taint, self.mode, self.config)


@dataclass
class AttackTranscript:
    alphabet: bytes
    known_prefix: bytes = b""
    table: list = field(default_factory=list)   # one {guess byte: size} per position
    recovered: bytes = b""
    oracle_calls: int = 0
    status: str = "complete"                     # or "ambiguous"

    def log_lines(self) -> list[str]:
        return [f"{pos},{guess:02x},{size}" for pos, row in enumerate(self.table)
                for guess, size in row.items()]

    def format(self) -> str:
        return "".join(line + "\n" for line in self.log_lines())


def recover_secret(oracle, known_prefix: bytes, alphabet: bytes, max_len: int) -> AttackTranscript:
    """Byte-at-a-time recovery: keep the guess that compresses best, stop on a tie."""
    alphabet = bytes(dict.fromkeys(bytes(alphabet)))
    if not alphabet:
        raise InvalidArgument("alphabet must not be empty")
    if max_len < 0:
        raise InvalidArgument("max_len must be non-negative")
    t = AttackTranscript(alphabet, bytes(known_prefix))
    for _ in range(max_len):
        stem = t.known_prefix + t.recovered
        row = {}
        for g in alphabet:
            row[g] = oracle(stem + bytes([g]))
            t.oracle_calls += 1
        t.table.append(row)
        best = min(row.values())
        winners = [g for g, size in row.items() if size == best]
        if len(winners) > 1:
            t.status = "ambiguous"
            break
        t.recovered += bytes(winners)
    return t


@dataclass(frozen=True)
class LeakReport:
    rows: tuple    # (n, diff)
    agg: str = "min"

    def diffs(self) -> list:
        return [d for _, d in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "diff_bytes"])
        for n, d in self.rows:
            w.writerow([n, f"{d:g}" if isinstance(d, float) else d])
        return buf.getvalue()


def measure_leak(template: PageTemplate, secret: bytes, alphabet: bytes, mode, max_n: int,
                 known_prefix: bytes = b"", agg: str = "min", config: MatchConfig | None = None,
                 block_kind: str = ATTACK_BLOCK) -> LeakReport:
    """For each known-prefix length n, how much smaller the correct next byte compresses.

    ``agg`` combines the per-guess differences: ``min`` is the defender's
    worst case, ``mean`` the average over wrong guesses.
    """
    secret = bytes(secret)
    if max_n > len(secret):
        raise InvalidArgument("max_n cannot exceed the secret length")
    if agg not in ("min", "mean"):
        raise InvalidArgument("agg must be 'min' or 'mean'")
    alphabet = bytes(dict.fromkeys(bytes(alphabet)))
    oracle = CompressionOracle(template, secret, mode, config, block_kind)
    rows = []
    for n in range(max_n):
        stem = bytes(known_prefix) + secret[:n]
        correct = oracle(stem + secret[n:n + 1])
        diffs = [oracle(stem + bytes([g])) - correct for g in alphabet if g != secret[n]]
        if not diffs:
            raise InvalidArgument("alphabet has no incorrect guesses")
        rows.append((n, min(diffs) if agg == "min" else statistics.fmean(diffs)))
    return LeakReport(tuple(rows), agg)
