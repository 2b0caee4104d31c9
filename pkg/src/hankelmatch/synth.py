"""Synthetic data generators used by the benchmark, probe, and tests."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .corpus import Alphabet, Dataset, TargetFunction, empirical_probability, make_dataset
from .hankel import Basis, HankelBlock, SparseMatrix
from .wfa import WeightedAutomaton

# Sequence lengths are sampled from a Gaussian with this variance around
# the requested mean, rounded and clamped to >= 1.
LENGTH_VARIANCE = 0.5


def _digits_alphabet(size: int) -> Alphabet:
    return Alphabet(str(i) for i in range(size))


def random_sequence_dataset(alphabet_size: int, num_sequences: int, mean_length: float,
                            rng: np.random.Generator) -> Dataset:
    """Random corpus: Gaussian lengths (variance 0.5, min 1), uniform symbols."""
    lengths = np.maximum(1, np.rint(rng.normal(mean_length, math.sqrt(LENGTH_VARIANCE), num_sequences)).astype(int))
    flat = rng.integers(0, alphabet_size, size=int(lengths.sum()))
    words = []
    pos = 0
    for t in lengths:
        words.append(tuple(flat[pos : pos + t]))
        pos += t
    return make_dataset(_digits_alphabet(alphabet_size), words)


def random_wa(states: int, alphabet_size: int, rng: np.random.Generator) -> WeightedAutomaton:
    """Random dense automaton with mildly contractive transition weights."""
    scale = 1.0 / math.sqrt(states * max(1, alphabet_size))
    alpha0 = rng.standard_normal(states)
    alpha_inf = rng.standard_normal(states)
    transitions = rng.standard_normal((alphabet_size, states, states)) * scale
    return WeightedAutomaton(_digits_alphabet(alphabet_size), alpha0, alpha_inf, transitions)


def exact_target_from_wa(wa: WeightedAutomaton, max_length: int) -> TargetFunction:
    """Evaluate a ground-truth automaton on every word up to max_length.

    Forward states are propagated along the word tree, so each word costs
    one matrix-vector product.
    """
    k = len(wa.alphabet)
    entries = {}
    frontier = [((), wa.alpha0)]
    for _ in range(max_length + 1):
        next_frontier = []
        for word, state in frontier:
            entries[word] = float(state @ wa.alpha_inf)
            if len(word) < max_length:
                for sym in range(k):
                    next_frontier.append((word + (sym,), state @ wa.transitions[sym]))
        frontier = next_frontier
        if not frontier:
            break
    return TargetFunction(wa.alphabet, entries)


def exact_block_from_wa(wa: WeightedAutomaton, basis: Basis) -> HankelBlock:
    """Hankel block whose every entry is computed from a ground-truth automaton.

    A target truncated at some support length zeroes the entries of longer
    concatenations, which destroys the low-rank structure; here each row is
    a forward state and each column a backward weight vector, so
    H(p, s) = f(ps) holds exactly for arbitrarily long pairs.
    """
    n = wa.n
    fw = np.empty((len(basis.prefixes), n))
    for i, p in enumerate(basis.prefixes):
        fw[i] = wa.forward_state(p)
    bw = np.empty((n, len(basis.suffixes)))
    for j, s in enumerate(basis.suffixes):
        v = wa.alpha_inf
        for sym in reversed(s):
            v = wa.transitions[sym] @ v
        bw[:, j] = v

    def sparse(dense):
        r, c = np.nonzero(dense)
        return SparseMatrix(dense.shape[0], dense.shape[1], r, c, dense[r, c])

    H_sigma = {sym: sparse(fw @ wa.transitions[sym] @ bw) for sym in range(len(wa.alphabet))}
    return HankelBlock(wa.alphabet, basis, sparse(fw @ bw), fw @ wa.alpha_inf, wa.alpha0 @ bw, H_sigma)


@dataclass(frozen=True)
class SequenceTargetSpec:
    """Probe generator: empirical function of a random sequence corpus."""

    alphabet_size: int = 4
    num_sequences: int = 50
    mean_length: float = 6.0

    def sample(self, rng: np.random.Generator) -> TargetFunction:
        d = random_sequence_dataset(self.alphabet_size, self.num_sequences, self.mean_length, rng)
        return empirical_probability(d)


@dataclass(frozen=True)
class WaTargetSpec:
    """Probe generator: exact values of a random automaton up to max_length."""

    states: int = 3
    alphabet_size: int = 2
    max_length: int = 5

    def sample(self, rng: np.random.Generator) -> TargetFunction:
        return exact_target_from_wa(random_wa(self.states, self.alphabet_size, rng), self.max_length)


def all_words(alphabet_size: int, max_length: int):
    """Every word over the alphabet up to a length, shortest first."""
    for t in range(max_length + 1):
        for tup in itertools.product(range(alphabet_size), repeat=t):
            yield tup
