"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings. Benchmark-scale absolute results (real-corpus BpC
tables, leaderboard scores) need external datasets and are represented
here by the properties and the table-format reproduction on bundled
synthetic corpora.
"""

import contextlib
import csv
import io
import math
import random
import time

import numpy as np
import pytest

from hankelmatch.basis import random_cuts_basis
from hankelmatch.cli import COMPARE_CSV_COLUMNS, main, run_matching_bench
from hankelmatch.corpus import Alphabet, Dataset, TargetFunction, empirical_probability
from hankelmatch.evaluation import bits_per_character
from hankelmatch.hankel import build_block, full_basis, numeric_rank, read_hankel, write_hankel
from hankelmatch.matching import (
    augmenting_path_matching,
    build_graph,
    hankel_fast_matching,
    matching_basis,
    structural_rank,
)
from hankelmatch.spectral import randomized_svd, recover_wa, truncated_svd
from hankelmatch.synth import (
    all_words,
    exact_block_from_wa,
    exact_target_from_wa,
    random_sequence_dataset,
    random_wa,
)
from hankelmatch.wfa import WeightedAutomaton

from conftest import GOLDEN_WORDS, brute_force_max_matching, naive_prefix_suffix_graph, random_small_support


@contextlib.contextmanager
def criterion(number, budget_sec, description):
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    assert elapsed < budget_sec, f"criterion {number} took {elapsed:.2f}s, budget {budget_sec}s"
    print(f"[acceptance] criterion {number:2d} PASS ({elapsed:6.2f}s) {description}")


def golden_target():
    return TargetFunction(Alphabet("abc"), {w: 1.0 for w in GOLDEN_WORDS})


def test_criterion_01_golden_support():
    with criterion(1, 1.0, "golden seven-string support: 9+9 vertices, 18 edges, all ranks 5"):
        f = golden_target()
        g = build_graph(f)
        assert g.num_prefixes == 9
        assert g.num_suffixes == 9
        assert g.num_edges == 18
        m_base = augmenting_path_matching(g)
        m_fast = hankel_fast_matching(g)
        assert m_base.cardinality == 5
        assert m_fast.cardinality == 5
        assert structural_rank(g) == 5
        full = build_block(f, full_basis(f))
        assert numeric_rank(full.H, tol=1e-9) == 5
        sub = build_block(f, matching_basis(g, m_fast))
        assert numeric_rank(sub.H, tol=1e-9) == 5


def test_criterion_02_matching_oracle_equivalence():
    with criterion(2, 10.0, "200 random supports <= 8x8: both engines equal brute force"):
        rng = random.Random(202)
        checked = 0
        while checked < 200:
            f = random_small_support(rng, max_alphabet=3, max_words=4, max_len=3)
            _, S, adjacency = naive_prefix_suffix_graph(f)
            if len(adjacency) > 8 or len(S) > 8:
                continue
            checked += 1
            g = build_graph(f)
            want = brute_force_max_matching(adjacency, len(S))
            assert augmenting_path_matching(g).cardinality == want
            assert hankel_fast_matching(g).cardinality == want


def test_criterion_03_engine_agreement_at_scale():
    with criterion(3, 120.0, "50 random corpora: engine cardinalities equal, speedups reported"):
        grids = [
            ((2, 4, 8), (5.0, 15.0, 30.0), (1000,), 2),
            ((2, 4, 8), (10.0,), (20000,), 2),
            ((4, 8), (25.0,), (20000,), 2),
            ((2, 4, 8), (8.0,), (50000,), 2),
            ((2, 4, 8), (20.0,), (5000,), 2),
            ((2, 4, 8), (30.0,), (2000,), 2),
            ((2, 4), (12.0,), (10000,), 2),
        ]
        rows = []
        corpora = 0
        for i, (alphabets, lengths, sizes, reps) in enumerate(grids):
            rows.extend(run_matching_bench(alphabets, lengths, sizes, reps=reps, seed=300 + i))
            corpora += len(alphabets) * len(lengths) * len(sizes) * reps
        assert corpora >= 50
        assert all(r.cardinality_equal for r in rows)
        ratios = [r.speedup for r in rows]
        assert all(r > 0 for r in ratios)
        print(f"[acceptance]   bench speedup ratios: min {min(ratios):.2f} "
              f"median {sorted(ratios)[len(ratios) // 2]:.2f} max {max(ratios):.2f} "
              f"over {corpora} corpora")


def test_criterion_04_spectral_recovery_fidelity():
    with criterion(4, 60.0, "20 ground-truth WAs: recovery within 1e-6 on all |x| <= 4"):
        rng = np.random.default_rng(404)
        combos = [(n, k) for n in (2, 3, 4, 5) for k in (2, 3)]
        usable = 0
        excluded = []
        for trial in range(20):
            states, k = combos[trial % len(combos)]
            truth = random_wa(states, k, rng)
            f = exact_target_from_wa(truth, 6)
            g = build_graph(f)
            basis = matching_basis(g, hankel_fast_matching(g))
            block = exact_block_from_wa(truth, basis)
            if numeric_rank(block.H, tol=1e-9) != states:
                excluded.append((trial, states, k))
                continue
            usable += 1
            learned = recover_wa(block, truncated_svd(block.H, states))
            for w in all_words(k, 4):
                assert abs(learned.evaluate(w) - f(w)) <= 1e-6, (trial, w)
        if excluded:
            print(f"[acceptance]   criterion 4 excluded trials (rank precondition): {excluded}")
        assert usable >= 0.8 * 20, f"only {usable}/20 trials met the rank precondition"


def test_criterion_05_rank_ordering_invariants():
    with criterion(5, 60.0, "numeric(sub) <= numeric(full) <= structural on every instance"):
        violations = 0
        instances = 0

        def check(f):
            nonlocal violations, instances
            instances += 1
            g = build_graph(f)
            m = hankel_fast_matching(g)
            struct = m.cardinality
            n_full = numeric_rank(build_block(f, full_basis(f)).H, tol=1e-9)
            n_sub = numeric_rank(build_block(f, matching_basis(g, m)).H, tol=1e-9)
            if not (n_sub <= n_full <= struct):
                violations += 1

        check(golden_target())
        rng = random.Random(505)
        for _ in range(40):
            check(random_small_support(rng, max_alphabet=4, max_words=20, max_len=6))
        nprng = np.random.default_rng(506)
        for _ in range(10):
            d = random_sequence_dataset(3, 40, 5.0, nprng)
            check(empirical_probability(d))
        assert instances == 51
        assert violations == 0


def test_criterion_06_strategy_quality_trend():
    with criterion(6, 60.0, "matching basis rank >= equal-size random cuts in >= 90% of 20 targets"):
        rng = random.Random(606)
        wins = 0
        for t in range(20):
            f = random_small_support(rng, max_alphabet=4, max_words=25, max_len=6)
            g = build_graph(f)
            m = hankel_fast_matching(g)
            mb = matching_basis(g, m)
            rc = random_cuts_basis(f, m.cardinality, seed=6000 + t, graph=g)
            rank_match = numeric_rank(build_block(f, mb).H, tol=1e-9)
            rank_cuts = numeric_rank(build_block(f, rc).H, tol=1e-9)
            wins += rank_match >= rank_cuts
        assert wins >= 18, f"matching won only {wins}/20 trials"


def test_criterion_07_bpc_contract():
    with criterion(7, 10.0, "BpC: uniform exact, perfect ~0, adversarial finite"):
        al = Alphabet("abc")
        uniform = WeightedAutomaton(al, [1.0], [1.0], np.full((3, 1, 1), 0.25))
        data = Dataset(al, (((0, 1, 2), 1), ((2,), 2), ((), 1)))
        assert bits_per_character(uniform, data, window=4) == math.log2(4)

        word = (0, 1, 0, 2)
        n = len(word) + 1
        alpha0 = np.zeros(n)
        alpha0[0] = 1.0
        alpha_inf = np.zeros(n)
        alpha_inf[-1] = 1.0
        A = np.zeros((3, n, n))
        for i, sym in enumerate(word):
            A[sym, i, i + 1] = 1.0
        perfect = WeightedAutomaton(al, alpha0, alpha_inf, A)
        # the probability floor leaves ~k * 1e-10 mass on the losing
        # outcomes, so "scores 0" is met up to that quantization
        assert bits_per_character(perfect, Dataset(al, ((word, 1),)), window=n) <= 1e-8

        adversarial = WeightedAutomaton(al, [1.0], [1.0], np.array([0.5, -0.7, 0.1]).reshape(3, 1, 1))
        bpc = bits_per_character(adversarial, data, window=4)
        assert math.isfinite(bpc)


def test_criterion_08_svd_properties():
    with criterion(8, 30.0, "rank-n truncation within 1e-8; sketched SVD within 1e-6 of dense"):
        rng = np.random.default_rng(808)
        for rows, cols, rank in [(20, 15, 3), (30, 30, 5), (14, 40, 4)]:
            A = rng.standard_normal((rows, rank))
            B = rng.standard_normal((rank, cols))
            dense = A @ B
            r, c = np.nonzero(dense)
            from hankelmatch.hankel import SparseMatrix

            H = SparseMatrix(rows, cols, r, c, dense[r, c])
            fac = truncated_svd(H, rank)
            err = np.linalg.norm(dense - fac.F @ fac.B.T) / np.linalg.norm(dense)
            assert err <= 1e-8
            sketched = randomized_svd(H, proj_dim=rank + 10, n=rank, seed=17)
            np.testing.assert_allclose(sketched.singular_values, fac.singular_values, rtol=1e-6)


def test_criterion_09_serialization(tmp_path):
    with criterion(9, 30.0, "100 model round-trips bit-exact; Hankel dump exact"):
        rng = np.random.default_rng(909)
        for i in range(100):
            wa = random_wa(int(rng.integers(1, 6)), int(rng.integers(1, 4)), rng)
            path = tmp_path / f"wa{i}.txt"
            wa.save(path)
            back = WeightedAutomaton.load(path)
            assert back.alphabet == wa.alphabet
            assert np.array_equal(back.alpha0, wa.alpha0)
            assert np.array_equal(back.alpha_inf, wa.alpha_inf)
            assert np.array_equal(back.transitions, wa.transitions)

        rng2 = random.Random(910)
        for _ in range(20):
            f = random_small_support(rng2, max_words=6, max_len=4)
            scaled = TargetFunction(f.alphabet, {w: v * rng2.uniform(-3, 3) for w, v in f.entries.items()})
            if not scaled.entries:
                continue
            block = build_block(scaled, full_basis(scaled))
            buf = io.StringIO()
            write_hankel(block, buf)
            buf.seek(0)
            _, _, H = read_hankel(buf)
            assert H == block.H


def test_criterion_10_table_format_on_synthetic_corpus(tmp_path):
    with criterion(10, 60.0, "compare harness reproduces the table format on synthetic data"):
        # absolute results on the big public corpora need external data;
        # the comparison table itself is reproduced on a bundled synthetic
        # corpus instead
        rng = np.random.default_rng(1010)
        d = random_sequence_dataset(4, 300, 6.0, rng)
        corpus = tmp_path / "synthetic.txt"
        with open(corpus, "w", encoding="utf-8") as fh:
            for w, count in d.sequences:
                for _ in range(count):
                    fh.write("".join(str(s) for s in w) + "\n")
        csv_path = tmp_path / "table.csv"
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            code = main([
                "compare", "--input", str(corpus), "--format", "char", "--moments", "3",
                "--strategies", "matching,fast-matching,random-cuts:1x,random-cuts:2x,length:2",
                "--states", "20", "--window", "2", "--csv", str(csv_path),
            ])
        assert code == 0
        with open(csv_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["strategy"] for r in rows] == [
            "matching", "fast-matching", "random-cuts:1x", "random-cuts:2x", "length:2",
        ]
        assert list(rows[0].keys()) == COMPARE_CSV_COLUMNS
        for row in rows:
            assert float(row["bpc"]) > 0
            assert int(row["num_rank"]) <= int(row["struct_rank"])
        match_rank = int(next(r for r in rows if r["strategy"] == "matching")["num_rank"])
        cuts_rank = int(next(r for r in rows if r["strategy"] == "random-cuts:1x")["num_rank"])
        print(f"[acceptance]   table direction: matching rank {match_rank} vs random-cuts 1x rank {cuts_rank}")
