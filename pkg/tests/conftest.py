import random
from functools import lru_cache
from pathlib import Path

import pytest

from hankelmatch.corpus import Alphabet, TargetFunction

DATA_DIR = Path(__file__).parent / "data"

# The seven-string support used throughout: eps, aab, b, bb, c, ca, cb
# over the alphabet {a: 0, b: 1, c: 2}, all with target value 1.
GOLDEN_WORDS = [(), (0, 0, 1), (1,), (1, 1), (2,), (2, 0), (2, 1)]


@pytest.fixture(scope="session")
def golden_corpus_path():
    return DATA_DIR / "golden_char.txt"


@pytest.fixture
def golden_alphabet():
    return Alphabet("abc")


@pytest.fixture
def golden_target(golden_alphabet):
    return TargetFunction(golden_alphabet, {w: 1.0 for w in GOLDEN_WORDS})


def brute_force_max_matching(adjacency, n_cols):
    """Oracle: exhaustive maximum matching over column subsets (<= 8x8).

    Tries, for each row in turn, leaving it unmatched or pairing it with
    every free neighbor; memoized on the used-column bitmask so the search
    is exhaustive but tractable.
    """
    adjacency = tuple(tuple(sorted(a)) for a in adjacency)

    @lru_cache(maxsize=None)
    def best(i, used):
        if i == len(adjacency):
            return 0
        score = best(i + 1, used)
        for j in adjacency[i]:
            if not used & (1 << j):
                score = max(score, 1 + best(i + 1, used | (1 << j)))
        return score

    return best(0, 0)


def random_small_support(rng: random.Random, max_alphabet=3, max_words=4, max_len=3):
    """A random sparse target with a handful of short strings."""
    k = rng.randint(1, max_alphabet)
    alphabet = Alphabet("abcd"[:k])
    words = set()
    for _ in range(rng.randint(1, max_words)):
        length = rng.randint(0, max_len)
        words.add(tuple(rng.randrange(k) for _ in range(length)))
    return TargetFunction(alphabet, {w: rng.uniform(0.1, 2.0) for w in words})


def naive_prefix_suffix_graph(f):
    """Reference construction: explicit cut tuples, no tries."""
    from hankelmatch.corpus import observed_prefixes_suffixes

    P, S = observed_prefixes_suffixes(f)
    pi = {p: i for i, p in enumerate(P)}
    si = {s: j for j, s in enumerate(S)}
    edges = set()
    for w in f.entries:
        for c in range(len(w) + 1):
            edges.add((pi[w[:c]], si[w[c:]]))
    adjacency = [[] for _ in P]
    for i, j in edges:
        adjacency[i].append(j)
    for a in adjacency:
        a.sort()
    return P, S, adjacency
