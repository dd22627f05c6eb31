"""Benchmark the compiled trigram-matching kernel against the NumPy fallback.

Builds a synthetic gazetteer index (same CSR layout the registry compiles),
then times candidate matching for a batch of address queries through both
backends. Run:

    python benchmarks/bench_trigram.py [--objects 100000] [--queries 500]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from histogeocode import text as textmod
from histogeocode._kernels import _trgm_py

try:
    from histogeocode._kernels import _trgm_cy
except ImportError:
    _trgm_cy = None

KINDS = ["rue", "boulevard", "avenue", "place", "impasse", "quai", "passage", "cite"]
LEFT = ["saint", "sainte", "grand", "petit", "vieille", "neuve", "haute", "basse"]
RIGHT = [
    "martin", "denis", "antoine", "jacques", "temple", "paix", "moulin", "pont",
    "marche", "fontaine", "roche", "champ", "bois", "pre", "tour", "croix",
]


def build_index(rng: np.random.Generator, n_objects: int):
    names = [f"{k} {l} {r}" for k in KINDS for l in LEFT for r in RIGHT]
    vocab: dict[str, int] = {}
    postings: list[list[int]] = []
    sizes = np.empty(n_objects, dtype=np.int32)
    for slot in range(n_objects):
        name = f"{int(rng.integers(1, 128))} {names[rng.integers(len(names))]}"
        grams = textmod.trigram_set(name)
        sizes[slot] = len(grams)
        for gram in grams:
            tid = vocab.get(gram)
            if tid is None:
                tid = len(postings)
                vocab[gram] = tid
                postings.append([])
            postings[tid].append(slot)
    counts = np.array([len(p) for p in postings], dtype=np.int64)
    indptr = np.zeros(len(postings) + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    ids = np.concatenate([np.asarray(p, dtype=np.int32) for p in postings])
    return vocab, indptr, ids, sizes, names


def make_queries(rng, vocab, names, n_queries):
    out = []
    for _ in range(n_queries):
        name = f"{int(rng.integers(1, 128))} {names[rng.integers(len(names))]}"
        grams = textmod.trigram_set(name)
        tids = np.array(sorted(vocab[g] for g in grams if g in vocab), dtype=np.int32)
        out.append((tids, len(grams)))
    return out


def run(backend, queries, indptr, ids, sizes, max_distance):
    published = len(sizes)
    started = time.perf_counter()
    hits = 0
    for tids, nq in queries:
        slots, _ = backend.match_candidates(indptr, ids, sizes, published, tids, nq, max_distance)
        hits += len(slots)
    return time.perf_counter() - started, hits


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--objects", type=int, default=100_000)
    parser.add_argument("--queries", type=int, default=500)
    parser.add_argument("--maxdist", type=float, default=0.3)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    print(f"building index: {args.objects} objects ...")
    vocab, indptr, ids, sizes, names = build_index(rng, args.objects)
    queries = make_queries(rng, vocab, names, args.queries)
    print(f"vocab {len(vocab)} trigrams, {len(ids)} postings, {args.queries} queries\n")

    rows = []
    py_time, py_hits = run(_trgm_py, queries, indptr, ids, sizes, args.maxdist)
    rows.append(("numpy fallback", py_time, py_hits))
    if _trgm_cy is not None:
        cy_time, cy_hits = run(_trgm_cy, queries, indptr, ids, sizes, args.maxdist)
        assert cy_hits == py_hits, "backends disagree"
        rows.append(("cython kernel", cy_time, cy_hits))

    print(f"{'backend':<16} {'total s':>8} {'ms/query':>9} {'candidates':>11}")
    for name, elapsed, hits in rows:
        print(f"{name:<16} {elapsed:>8.3f} {elapsed / len(queries) * 1e3:>9.3f} {hits:>11}")
    if _trgm_cy is not None and py_time > 0:
        print(f"\nspeedup: {py_time / cy_time:.1f}x")
    else:
        print("\ncompiled kernel not available; only the fallback was timed")


if __name__ == "__main__":
    main()
