import random

import numpy as np
import pytest

from hrex import _kernels
from hrex._kernels import codepoints, greedy_align_numpy, levenshtein_numpy

from .oracles import edit_distance_recursive

IMPLS = [levenshtein_numpy]
ALIGNERS = [greedy_align_numpy]
if _kernels.NUMBA_AVAILABLE:
    IMPLS.append(_kernels.levenshtein_numba)
    ALIGNERS.append(_kernels.greedy_align_numba)


@pytest.mark.parametrize("impl", IMPLS)
@pytest.mark.parametrize(
    "a, b",
    [("", ""), ("", "abc"), ("abc", ""), ("kitten", "sitting"), ("flaw", "lawn"), ("😄", "😦"), ("ab", "ba")],
)
def test_levenshtein_kernels_match_oracle(impl, a, b):
    assert int(impl(codepoints(a), codepoints(b))) == edit_distance_recursive(a, b)


@pytest.mark.parametrize("impl", IMPLS)
def test_levenshtein_kernels_random(impl):
    rng = random.Random(3)
    for _ in range(300):
        a = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 9)))
        b = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 9)))
        assert int(impl(codepoints(a), codepoints(b))) == edit_distance_recursive(a, b)


def test_kernels_agree_on_long_strings():
    rng = random.Random(5)
    a = "".join(rng.choice("abcdef") for _ in range(700))
    b = "".join(rng.choice("abcdef") for _ in range(650))
    results = {int(impl(codepoints(a), codepoints(b))) for impl in IMPLS}
    assert len(results) == 1


def test_codepoints_astral():
    assert codepoints("a😄").tolist() == [97, 0x1F604]


def brute_greedy(sim):
    sim = [list(row) for row in sim]
    used_r, used_c, pairs = set(), set(), []
    cells = sorted(((-sim[i][j], i, j) for i in range(len(sim)) for j in range(len(sim[0]))))
    for _, i, j in cells:
        if i not in used_r and j not in used_c:
            used_r.add(i)
            used_c.add(j)
            pairs.append((i, j))
    return pairs


@pytest.mark.parametrize("aligner", ALIGNERS)
def test_greedy_matches_bruteforce(aligner):
    rng = np.random.default_rng(0)
    for _ in range(200):
        shape = tuple(rng.integers(1, 6, size=2))
        sim = rng.choice([0.0, 0.25, 0.5, 1.0], size=shape)  # many ties
        rows, cols = aligner(sim)
        assert list(zip(rows.tolist(), cols.tolist())) == brute_greedy(sim)


@pytest.mark.parametrize("aligner", ALIGNERS)
def test_greedy_tie_break_lowest_indices(aligner):
    rows, cols = aligner(np.ones((2, 2)))
    assert list(zip(rows.tolist(), cols.tolist())) == [(0, 0), (1, 1)]


def test_greedy_empty():
    rows, cols = _kernels.greedy_align(np.zeros((0, 3)))
    assert rows.size == 0 and cols.size == 0


def test_backend_flag_subprocess():
    import subprocess
    import sys

    code = "from hrex import _kernels; print(_kernels.BACKEND)"
    env_numpy = {"HREX_KERNELS": "numpy", "PATH": ""}
    out = subprocess.run([sys.executable, "-c", code], env=env_numpy, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
