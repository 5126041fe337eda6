"""Build the text corpus used by the ratio benchmark and tests.

Canterbury-style mix (prose, technical text, markup, C, Python, a man-page
like listing, a CSV table, a license) drawn from the Python standard library
so the corpus is redistributable.  Output is committed under
tests/data/corpus; rerun only to regenerate it.

    python3 benchmarks/make_corpus.py tests/data/corpus
"""
import csv
import io
import pydoc
import random
import sys
import sysconfig
from pathlib import Path

import pydoc_data.topics


def prose(limit):
    # reference-manual prose, in a stable topic order
    text = "\n\n".join(pydoc_data.topics.topics[k] for k in sorted(pydoc_data.topics.topics))
    return text.encode()[:limit]


def c_source(limit):
    inc = Path(sysconfig.get_paths()["include"])
    parts = [p.read_bytes() for p in sorted(inc.glob("*.h"))]
    return b"\n".join(parts)[:limit]


def py_source(limit):
    lib = Path(sysconfig.get_paths()["stdlib"])
    names = ["textwrap.py", "difflib.py", "heapq.py", "bisect.py"]
    return b"\n".join((lib / n).read_bytes() for n in names)[:limit]


def html_page(limit):
    import difflib
    return pydoc.HTMLDoc().page("difflib", pydoc.HTMLDoc().docmodule(difflib)).encode()[:limit]


def man_page(limit):
    import argparse
    return pydoc.plaintext.document(argparse).encode()[:limit]


def table(limit):
    rng = random.Random(1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "name", "email", "city", "balance", "joined"])
    first = ["alice", "bob", "carol", "dave", "erin", "frank", "grace", "heidi", "ivan", "judy"]
    last = ["smith", "jones", "brown", "taylor", "wilson", "davies", "evans", "thomas"]
    cities = ["Berlin", "Lisbon", "Austin", "Osaka", "Lagos", "Quito", "Perth", "Oslo"]
    k = 0
    while buf.tell() < limit:
        f, l = rng.choice(first), rng.choice(last)
        w.writerow([k, f"{f.title()} {l.title()}", f"{f}.{l}{rng.randint(1, 99)}@example.com",
                    rng.choice(cities), f"{rng.uniform(-500, 5000):.2f}",
                    f"20{rng.randint(10, 24)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"])
        k += 1
    return buf.getvalue().encode()[:limit]


def license_text(limit):
    lib = Path(sysconfig.get_paths()["stdlib"])
    for cand in (lib / "LICENSE.txt", Path("/usr/share/common-licenses/GPL-3")):
        if cand.exists():
            return cand.read_bytes()[:limit]
    return prose(limit)


FILES = {
    "prose.txt": (prose, 150_000),
    "headers.c": (c_source, 90_000),
    "modules.py": (py_source, 110_000),
    "difflib.html": (html_page, 80_000),
    "argparse.1": (man_page, 60_000),
    "accounts.csv": (table, 70_000),
    "license.txt": (license_text, 40_000),
}


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (make, limit) in FILES.items():
        data = make(limit)
        (out / name).write_bytes(data)
        print(f"{name:14s} {len(data):8d}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/corpus")
