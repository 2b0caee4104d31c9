"""Weighted automaton runtime: evaluation, next-symbol scoring, model files."""

from __future__ import annotations

import warnings

import numpy as np

from .corpus import Alphabet, Word

# Raw next-symbol scores below this are floored before normalization so
# log-probabilities stay finite even when the automaton emits small
# negative values.
PROB_FLOOR = 1e-10

# Spectral-radius margin under which the suffix-weight series is solved in
# closed form; at or above it a truncated power sum of this many terms is
# used instead.
RADIUS_MARGIN = 1e-6
DEFAULT_HORIZON = 100


class ModelFormatError(ValueError):
    """Raised when a model file cannot be parsed or is inconsistent."""


class WeightedAutomaton:
    """A weighted automaton <alpha_0, alpha_inf, {A_sigma}> over n states.

    Computes f(x) = alpha_0^T A_{x_1} ... A_{x_t} alpha_inf. Instances are
    immutable after construction and safe for concurrent evaluation.
    """

    def __init__(self, alphabet: Alphabet, alpha0, alpha_inf, transitions):
        alpha0 = np.asarray(alpha0, dtype=np.float64).reshape(-1)
        alpha_inf = np.asarray(alpha_inf, dtype=np.float64).reshape(-1)
        transitions = np.asarray(transitions, dtype=np.float64)
        n = len(alpha0)
        if transitions.ndim != 3 or transitions.shape != (len(alphabet), n, n):
            raise ValueError(
                f"transitions must have shape ({len(alphabet)}, {n}, {n}), got {transitions.shape}"
            )
        if len(alpha_inf) != n:
            raise ValueError(f"alpha_inf has length {len(alpha_inf)}, expected {n}")
        self.alphabet = alphabet
        self.n = n
        self.alpha0 = alpha0
        self.alpha_inf = alpha_inf
        self.transitions = transitions
        self._suffix_weight_cache: dict[int, np.ndarray] = {}

    def _check_word(self, word: Word):
        k = len(self.alphabet)
        for sym in word:
            if not 0 <= sym < k:
                raise ValueError(f"unknown symbol id {sym} (alphabet size {k})")

    def forward_state(self, word: Word) -> np.ndarray:
        """State vector after consuming a word, starting from alpha_0."""
        self._check_word(word)
        state = self.alpha0
        for sym in word:
            state = state @ self.transitions[sym]
        return state

    def evaluate(self, word: Word) -> float:
        """The weight alpha_0^T A_{x_1} ... A_{x_t} alpha_inf of a word."""
        return float(self.forward_state(word) @ self.alpha_inf)

    def _suffix_weights(self, horizon: int) -> np.ndarray:
        # Sum over all continuations: (I - M)^-1 alpha_inf when the series
        # converges comfortably, else a truncated power sum.
        cached = self._suffix_weight_cache.get(horizon)
        if cached is not None:
            return cached
        M = self.transitions.sum(axis=0) if len(self.alphabet) else np.zeros((self.n, self.n))
        radius = float(np.max(np.abs(np.linalg.eigvals(M)))) if self.n else 0.0
        if radius < 1.0 - RADIUS_MARGIN:
            try:
                tilde = np.linalg.solve(np.eye(self.n) - M, self.alpha_inf)
            except np.linalg.LinAlgError as exc:
                raise ValueError("singular continuation system (I - M)") from exc
        else:
            tilde = self.alpha_inf.copy()
            term = self.alpha_inf
            for _ in range(horizon):
                term = M @ term
                tilde += term
        self._suffix_weight_cache[horizon] = tilde
        return tilde

    def next_symbol_scores(self, context: Word, horizon: int = DEFAULT_HORIZON) -> np.ndarray:
        """Probabilities over the k+1 outcomes (each symbol, then stop).

        Raw scores are the forward state dotted against per-symbol
        continuation weights; entries below the probability floor are
        clamped and the vector is normalized to sum to 1. If no raw score
        is positive the result degenerates to uniform and a RuntimeWarning
        is emitted.
        """
        if horizon < 0:
            raise ValueError("horizon must be >= 0")
        state = self.forward_state(context)
        k = len(self.alphabet)
        raw = np.empty(k + 1)
        if k:
            tilde = self._suffix_weights(horizon)
            raw[:k] = (self.transitions @ tilde) @ state
        raw[k] = state @ self.alpha_inf
        if np.all(raw <= 0.0):
            warnings.warn("all raw next-symbol scores are non-positive; returning uniform", RuntimeWarning)
            return np.full(k + 1, 1.0 / (k + 1))
        floored = np.maximum(raw, PROB_FLOOR)
        return floored / floored.sum()

    def save(self, path) -> None:
        """Write the model in the versioned text format (lossless floats)."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("WFA v1\n")
            fh.write(f"alphabet {len(self.alphabet)}\n")
            for i, tok in enumerate(self.alphabet.tokens):
                fh.write(f"symbol {i} {tok}\n")
            fh.write(f"states {self.n}\n")
            fh.write("a0 " + _fmt(self.alpha0) + "\n")
            fh.write("ainf " + _fmt(self.alpha_inf) + "\n")
            for sigma in range(len(self.alphabet)):
                fh.write(f"A {sigma}\n")
                for row in self.transitions[sigma]:
                    fh.write(_fmt(row) + "\n")

    @classmethod
    def load(cls, path) -> "WeightedAutomaton":
        """Read a model written by :meth:`save`; round-trips bit-exactly."""
        with open(path, encoding="utf-8") as fh:
            return _parse_model(fh)

    def __repr__(self) -> str:
        return f"WeightedAutomaton(states={self.n}, alphabet={len(self.alphabet)})"


def _fmt(vec) -> str:
    return " ".join(f"{v:.17g}" for v in vec)


def _expect(fh, what: str) -> list[str]:
    line = fh.readline()
    if not line:
        raise ModelFormatError(f"unexpected end of file, expected {what}")
    return line.rstrip("\n").split(" ")


def _parse_model(fh) -> WeightedAutomaton:
    head = _expect(fh, "header")
    if head[0] != "WFA":
        raise ModelFormatError(f"not a model file (header {head[0]!r})")
    if head[1:] != ["v1"]:
        raise ModelFormatError(f"unsupported model version {' '.join(head[1:])!r}")
    kind, count = _expect(fh, "alphabet")
    if kind != "alphabet":
        raise ModelFormatError("missing alphabet section")
    k = int(count)
    tokens = [""] * k
    for _ in range(k):
        parts = _expect(fh, "symbol")
        if parts[0] != "symbol":
            raise ModelFormatError(f"expected symbol line, got {parts[0]!r}")
        # Token text follows the second space verbatim; tokens may be spaces.
        idx = int(parts[1])
        tokens[idx] = " ".join(parts[2:])
    states = _expect(fh, "states")
    if states[0] != "states":
        raise ModelFormatError("missing states line")
    n = int(states[1])

    def floats(parts, label):
        vals = [float(p) for p in parts if p != ""]
        if len(vals) != n:
            raise ModelFormatError(f"{label} has {len(vals)} entries, expected {n}")
        return np.array(vals)

    a0_line = _expect(fh, "a0")
    if a0_line[0] != "a0":
        raise ModelFormatError("missing a0 line")
    alpha0 = floats(a0_line[1:], "a0")
    ainf_line = _expect(fh, "ainf")
    if ainf_line[0] != "ainf":
        raise ModelFormatError("missing ainf line")
    alpha_inf = floats(ainf_line[1:], "ainf")
    transitions = np.zeros((k, n, n))
    for _ in range(k):
        a_line = _expect(fh, "A")
        if a_line[0] != "A":
            raise ModelFormatError(f"expected transition header, got {a_line[0]!r}")
        sigma = int(a_line[1])
        if not 0 <= sigma < k:
            raise ModelFormatError(f"transition symbol id {sigma} out of range")
        for r in range(n):
            transitions[sigma, r] = floats(_expect(fh, "matrix row"), f"A {sigma} row {r}")
    try:
        return WeightedAutomaton(Alphabet(tokens), alpha0, alpha_inf, transitions)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc
