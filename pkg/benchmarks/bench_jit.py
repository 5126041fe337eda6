"""Time the numba kernels against the plain-Python fallback.

The fallback is chosen at import time, so each variant runs in its own
child process with DEBREACH_DISABLE_JIT set accordingly.

    python3 benchmarks/bench_jit.py [--size 32768] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time
from pathlib import Path

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "data" / "corpus" / "prose.txt"


def best_of(fn, repeat):
    fn()  # warm-up (includes compilation when JIT is on)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def child(size, repeat):
    from debreach import JIT_ENABLED, build_next_taint, emit_deflate_stream, inflate_stream, lz77_match
    from debreach.bench import taint_spans

    data = CORPUS.read_bytes()[:size]
    taint = build_next_taint(len(data), taint_spans(len(data), 0.05, 0))
    tokens = lz77_match(data, taint)
    stream = emit_deflate_stream(tokens, "dynamic")
    result = {
        "jit": JIT_ENABLED,
        "lz77_match": best_of(lambda: lz77_match(data, taint), repeat),
        "emit_dynamic": best_of(lambda: emit_deflate_stream(tokens, "dynamic"), repeat),
        "inflate": best_of(lambda: inflate_stream(stream), repeat),
    }
    print(json.dumps(result))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=32768)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        child(args.size, args.repeat)
        return

    runs = {}
    for label, flag in (("numba", "0"), ("python", "1")):
        env = dict(os.environ, DEBREACH_DISABLE_JIT=flag)
        out = subprocess.run([sys.executable, __file__, "--child", "--size", str(args.size),
                              "--repeat", str(args.repeat)],
                             env=env, capture_output=True, text=True, check=True)
        runs[label] = json.loads(out.stdout.strip().splitlines()[-1])

    print(f"input: {args.size} bytes of {CORPUS.name}, best of {args.repeat}")
    print(f"{'kernel':14s} {'numba s':>10s} {'python s':>10s} {'speedup':>8s} {'MB/s jit':>9s}")
    for key in ("lz77_match", "emit_dynamic", "inflate"):
        fast, slow = runs["numba"][key], runs["python"][key]
        print(f"{key:14s} {fast:10.5f} {slow:10.5f} {slow / fast:8.1f} "
              f"{args.size / fast / 1e6:9.1f}")


if __name__ == "__main__":
    main()
