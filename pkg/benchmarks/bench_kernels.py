"""Compare the numba kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Both variants are called directly, so the HREX_KERNELS flag does not matter here.
"""

import argparse
import random
import timeit

import numpy as np

from hrex import _kernels as k


def _strings(rng, length, n):
    return [k.codepoints("".join(rng.choice("acgt") for _ in range(length))) for _ in range(n)]


def bench_levenshtein(rng, repeat):
    print("levenshtein, 200 pairs per call (ms per call)")
    print(f"{'len':>6} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for length in (8, 64, 256, 1024):
        a, b = _strings(rng, length, 200), _strings(rng, length, 200)
        for x, y in zip(a, b):
            assert k.levenshtein_numpy(x, y) == k.levenshtein_numba(x, y)
        t_np = min(timeit.repeat(lambda: [k.levenshtein_numpy(x, y) for x, y in zip(a, b)], number=1, repeat=repeat))
        t_nb = min(timeit.repeat(lambda: [k.levenshtein_numba(x, y) for x, y in zip(a, b)], number=1, repeat=repeat))
        print(f"{length:>6} {1e3 * t_np:>10.2f} {1e3 * t_nb:>10.2f} {t_np / t_nb:>7.1f}x")


def bench_greedy(rng, repeat):
    print("\ngreedy alignment (ms per call)")
    print(f"{'size':>6} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    np_rng = np.random.default_rng(rng.randrange(2**32))
    for size in (5, 50, 200, 800):
        sim = np_rng.random((size, size))
        ref = k.greedy_align_numpy(sim)
        got = k.greedy_align_numba(sim)
        assert all(np.array_equal(x, y) for x, y in zip(ref, got))
        t_np = min(timeit.repeat(lambda: k.greedy_align_numpy(sim), number=1, repeat=repeat))
        t_nb = min(timeit.repeat(lambda: k.greedy_align_numba(sim), number=1, repeat=repeat))
        print(f"{size:>6} {1e3 * t_np:>10.2f} {1e3 * t_nb:>10.2f} {t_np / t_nb:>7.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not k.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = random.Random(args.seed)
    # Compile outside the timed region.
    k.levenshtein_numba(k.codepoints("ab"), k.codepoints("b"))
    k.greedy_align_numba(np.eye(2))
    bench_levenshtein(rng, args.repeat)
    bench_greedy(rng, args.repeat)


if __name__ == "__main__":
    main()
