"""Evaluation metrics and the structural-vs-numeric rank probe."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import Dataset
from .hankel import build_block, full_basis, numeric_rank
from .matching import build_graph, hankel_fast_matching, matching_basis
from .wfa import WeightedAutomaton

DEFAULT_TOP_K = 5


def _prediction_points(wa: WeightedAutomaton, dataset: Dataset, window: int):
    if window < 0:
        raise ValueError("window must be >= 0")
    if not dataset.sequences:
        raise ValueError("empty dataset")
    if dataset.alphabet != wa.alphabet:
        raise ValueError("alphabet mismatch between model and dataset")
    stop = len(wa.alphabet)
    for word, count in dataset.sequences:
        for i in range(len(word) + 1):
            context = word[max(0, i - window) : i]
            outcome = word[i] if i < len(word) else stop
            yield context, outcome, count


def bits_per_character(wa: WeightedAutomaton, dataset: Dataset, window: int) -> float:
    """Mean -log2 probability per predicted symbol, ends of sequences included.

    Each position of each evaluation sequence is one event; the context is
    the sliding window of up to `window` preceding symbols.
    """
    total = 0.0
    events = 0
    for context, outcome, count in _prediction_points(wa, dataset, window):
        probs = wa.next_symbol_scores(context)
        total += count * -math.log2(probs[outcome])
        events += count
    return total / events


def rank_score(wa: WeightedAutomaton, dataset: Dataset, window: int, top_k: int = DEFAULT_TOP_K) -> float:
    """Mean discounted rank of the true next symbol, in [0, 1].

    A prediction scores 1/log2(r+1) when the true outcome has rank
    r <= top_k in the model's score ordering (ties go to the lower symbol
    id, stop last) and 0 otherwise.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    total = 0.0
    events = 0
    for context, outcome, count in _prediction_points(wa, dataset, window):
        probs = wa.next_symbol_scores(context)
        order = np.argsort(-probs, kind="stable")
        rank = int(np.nonzero(order == outcome)[0][0]) + 1
        if rank <= top_k:
            total += count / math.log2(rank + 1)
        events += count
    return total / events


@dataclass(frozen=True)
class ProbeTrial:
    structural_rank: int
    numeric_rank_full: int
    numeric_rank_matching: int


@dataclass(frozen=True)
class WmpProbeReport:
    """Per-trial structural and numeric ranks, plus aggregate gap statistics.

    The gap of a trial is structural rank minus full-block numeric rank;
    the sub gap is full-block minus matching-block numeric rank. Both are 0
    exactly when the matching basis preserves the full rank.
    """

    trials: tuple[ProbeTrial, ...]

    @property
    def gaps(self) -> np.ndarray:
        return np.array([t.structural_rank - t.numeric_rank_full for t in self.trials])

    @property
    def sub_gaps(self) -> np.ndarray:
        return np.array([t.numeric_rank_full - t.numeric_rank_matching for t in self.trials])

    def format_lines(self) -> list[str]:
        lines = [
            f"TRIAL {i} struct {t.structural_rank} num_full {t.numeric_rank_full} num_sub {t.numeric_rank_matching}"
            for i, t in enumerate(self.trials)
        ]
        lines.append(
            "SUMMARY trials {} mean_gap {:.4f} max_gap {} mean_sub_gap {:.4f} max_sub_gap {}".format(
                len(self.trials), self.gaps.mean(), int(self.gaps.max()),
                self.sub_gaps.mean(), int(self.sub_gaps.max()),
            )
        )
        return lines

    def __str__(self) -> str:
        return "\n".join(self.format_lines())


def wmp_probe(generator, trials: int, seed: int) -> WmpProbeReport:
    """Measure the structural/numeric rank gap over sampled sparse targets.

    ``generator`` must expose ``sample(rng) -> TargetFunction`` (see the
    target specs in :mod:`hankelmatch.synth`). Each trial draws a target,
    computes the structural rank via maximum matching, the numeric rank of
    the full block, and the numeric rank of the matching sub-block.
    Deterministic given the seed: trial i uses seed + i.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    records = []
    for i in range(trials):
        rng = np.random.default_rng(seed + i)
        f = generator.sample(rng)
        if not f.entries:
            raise ValueError(f"degenerate generator: trial {i} produced an empty support")
        g = build_graph(f)
        m = hankel_fast_matching(g)
        full = numeric_rank(build_block(f, full_basis(f)).H)
        sub = numeric_rank(build_block(f, matching_basis(g, m)).H)
        records.append(ProbeTrial(m.cardinality, full, sub))
    return WmpProbeReport(tuple(records))
