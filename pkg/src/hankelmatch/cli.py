"""Command-line pipelines: train, evaluate, strategy comparison, benchmarks.

Subcommands
-----------
train           end-to-end spectral training with a chosen basis strategy
eval            score a saved model on a dataset (bits per character or
                discounted next-symbol rank)
compare         one table row per basis strategy: size, ranks, stage
                seconds, bits per character (text + CSV)
bench-matching  timing grid for the baseline vs shifted-pair matching
                engines on random corpora, optionally across backends
probe-wmp       structural vs numeric rank gap on sampled sparse targets
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from .basis import high_norm_basis, length_basis, random_cuts_basis
from .corpus import Dataset, empirical_probability, load_dataset, substring_expectation
from .evaluation import bits_per_character, rank_score, wmp_probe
from .hankel import Basis, build_block, full_basis, numeric_rank
from .matching import (
    augmenting_path_matching,
    build_graph,
    hankel_fast_matching,
    matching_basis,
    native_available,
    structural_rank,
)
from .spectral import randomized_svd, recover_wa, truncated_svd
from .synth import SequenceTargetSpec, random_sequence_dataset
from .wfa import WeightedAutomaton

STRATEGIES = ("matching", "fast-matching", "full", "random-cuts", "length", "high-norm")


class ConfigError(ValueError):
    """Invalid flag combination, reported before any work starts."""


class StageError(Exception):
    """Wraps a pipeline failure with the stage it happened in."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@contextlib.contextmanager
def _stage(name):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


@dataclass
class RunConfig:
    """Validated knobs for one pipeline run."""

    subcommand: str
    input: str | None = None
    format: str = "char"
    moments: int | None = None
    strategy: str = "fast-matching"
    size: int | None = None
    max_len: int | None = None
    states: int | None = None
    svd: str = "dense"
    proj_dim: int | None = None
    seed: int = 0
    window: int = 4
    metric: str = "bpc"
    top_k: int = 5
    out: str | None = None
    csv: str | None = None
    model: str | None = None
    eval_input: str | None = None
    uniform_cuts: bool = False
    strategies: tuple[str, ...] = ()
    backend: str = "auto"
    compare_backends: bool = False
    alphabet_sizes: tuple[int, ...] = ()
    mean_lengths: tuple[float, ...] = ()
    num_sequences: tuple[int, ...] = ()
    reps: int = 5
    trials: int = 20
    probe_alphabet: int = 4
    probe_sequences: int = 50
    probe_mean_length: float = 6.0

    def validate(self):
        if self.svd == "randomized" and self.proj_dim is None:
            raise ConfigError("--proj-dim is required with --svd randomized")
        if self.svd == "dense" and self.proj_dim is not None:
            raise ConfigError("--proj-dim only applies with --svd randomized")
        if self.subcommand == "train":
            needs_size = self.strategy in ("random-cuts", "high-norm")
            if needs_size and self.size is None:
                raise ConfigError(f"--size is required with --strategy {self.strategy}")
            if self.strategy == "length" and self.max_len is None:
                raise ConfigError("--max-len is required with --strategy length")
        return self


def _load_target(cfg: RunConfig):
    with _stage("load"):
        dataset = load_dataset(cfg.input, cfg.format)
    with _stage("target"):
        if cfg.moments is None:
            f = empirical_probability(dataset)
        else:
            f = substring_expectation(dataset, cfg.moments)
    return dataset, f


def _select_basis(f, graph, strategy, param, cfg: RunConfig):
    """Returns (basis, matching cardinality or None)."""
    if strategy in ("matching", "fast-matching"):
        engine = augmenting_path_matching if strategy == "matching" else hankel_fast_matching
        m = engine(graph, backend=cfg.backend)
        return matching_basis(graph, m), m.cardinality
    if strategy == "full":
        return full_basis(f), None
    if strategy == "random-cuts":
        return random_cuts_basis(f, param, cfg.seed, uniform=cfg.uniform_cuts, graph=graph), None
    if strategy == "length":
        return length_basis(f, param, graph=graph), None
    if strategy == "high-norm":
        return high_norm_basis(f, param, graph=graph), None
    raise ConfigError(f"unknown strategy {strategy!r}")


@dataclass
class PipelineResult:
    basis: Basis
    struct_rank: int
    num_rank: int
    states: int
    wa: WeightedAutomaton
    sel_sec: float
    svd_sec: float
    recover_sec: float


def _run_pipeline(f, graph, strategy, param, cfg: RunConfig) -> PipelineResult:
    t0 = time.perf_counter()
    with _stage("selection"):
        basis, cardinality = _select_basis(f, graph, strategy, param, cfg)
    sel_sec = time.perf_counter() - t0

    t0 = time.perf_counter()
    with _stage("svd"):
        block = build_block(f, basis)
        num = numeric_rank(block.H)
        if num == 0:
            raise ValueError("selected block has numeric rank 0; nothing to factorize")
        n = num if cfg.states is None else min(cfg.states, num)
        if cfg.svd == "dense":
            fac = truncated_svd(block.H, n)
        else:
            proj = min(cfg.proj_dim, min(block.H.shape))
            fac = randomized_svd(block.H, max(proj, n), n, cfg.seed)
    svd_sec = time.perf_counter() - t0

    t0 = time.perf_counter()
    with _stage("recover"):
        wa = recover_wa(block, fac)
    recover_sec = time.perf_counter() - t0

    struct = cardinality if cardinality is not None else structural_rank(block.H, backend=cfg.backend)
    return PipelineResult(basis, struct, num, n, wa, sel_sec, svd_sec, recover_sec)


def cmd_train(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    dataset, f = _load_target(cfg)
    with _stage("selection"):
        graph = build_graph(f) if cfg.strategy != "full" else None
    param = cfg.max_len if cfg.strategy == "length" else cfg.size
    res = _run_pipeline(f, graph, cfg.strategy, param, cfg)
    print(f"dataset {len(dataset)} sequences alphabet {len(dataset.alphabet)}", file=out)
    print(f"support {f.support_size}", file=out)
    print(f"size {len(res.basis.prefixes)} {len(res.basis.suffixes)}", file=out)
    print(f"struct_rank {res.struct_rank}", file=out)
    print(f"num_rank {res.num_rank}", file=out)
    print(f"states {res.states}", file=out)
    print(f"sel_sec {res.sel_sec:.6f}", file=out)
    print(f"svd_sec {res.svd_sec:.6f}", file=out)
    print(f"recover_sec {res.recover_sec:.6f}", file=out)
    if cfg.out:
        with _stage("write"):
            res.wa.save(cfg.out)
        print(f"model {cfg.out}", file=out)
    return 0


def _align_dataset(dataset: Dataset, alphabet) -> Dataset:
    """Re-express a dataset over a model's alphabet (same tokens, new ids)."""
    if dataset.alphabet == alphabet:
        return dataset
    mapping = {}
    for tok, i in dataset.alphabet.index.items():
        j = alphabet.index.get(tok)
        if j is None:
            raise ValueError(f"alphabet mismatch: token {tok!r} not in model alphabet")
        mapping[i] = j
    sequences = tuple((tuple(mapping[s] for s in w), c) for w, c in dataset.sequences)
    return Dataset(alphabet, sequences)


def cmd_eval(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    with _stage("model"):
        wa = WeightedAutomaton.load(cfg.model)
    with _stage("load"):
        dataset = load_dataset(cfg.input, cfg.format)
    with _stage("align"):
        dataset = _align_dataset(dataset, wa.alphabet)
    events = sum(c * (len(w) + 1) for w, c in dataset.sequences)
    with _stage("metric"):
        if cfg.metric == "bpc":
            value = bits_per_character(wa, dataset, cfg.window)
            print(f"bpc {value:.6f} events {events}", file=out)
        else:
            value = rank_score(wa, dataset, cfg.window, cfg.top_k)
            print(f"rank_score {value:.6f} events {events} top_k {cfg.top_k}", file=out)
    return 0


def _parse_strategy_spec(spec: str):
    """Parse 'name', 'name:INT' or 'random-cuts:Nx' (multiple of matching size)."""
    name, _, arg = spec.partition(":")
    if name not in STRATEGIES:
        raise ConfigError(f"unknown strategy {name!r} in {spec!r}")
    if not arg:
        if name in ("random-cuts", "length", "high-norm"):
            raise ConfigError(f"strategy {name} needs a parameter, e.g. {name}:8")
        return name, None
    if name == "random-cuts" and arg.endswith("x"):
        return name, ("multiple", float(arg[:-1]))
    return name, ("absolute", int(arg))


COMPARE_CSV_COLUMNS = ["strategy", "size_p", "size_s", "struct_rank", "num_rank", "sel_sec", "svd_sec", "recover_sec", "bpc"]


def cmd_compare(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    dataset, f = _load_target(cfg)
    with _stage("load"):
        eval_dataset = load_dataset(cfg.eval_input, cfg.format) if cfg.eval_input else dataset
    with _stage("selection"):
        graph = build_graph(f)
    specs = [_parse_strategy_spec(s) for s in cfg.strategies]
    needs_multiple = any(p and p[0] == "multiple" for _, p in specs)
    match_size = hankel_fast_matching(graph, backend=cfg.backend).cardinality if needs_multiple else None

    rows = []
    for raw_spec, (name, param) in zip(cfg.strategies, specs):
        if param is None:
            value = None
        elif param[0] == "multiple":
            value = max(1, int(round(param[1] * match_size)))
        else:
            value = param[1]
        try:
            res = _run_pipeline(f, graph, name, value, cfg)
            with _stage("metric"):
                aligned = _align_dataset(eval_dataset, res.wa.alphabet)
                bpc = bits_per_character(res.wa, aligned, cfg.window)
            rows.append({
                "strategy": raw_spec,
                "size_p": len(res.basis.prefixes),
                "size_s": len(res.basis.suffixes),
                "struct_rank": res.struct_rank,
                "num_rank": res.num_rank,
                "sel_sec": f"{res.sel_sec:.6f}",
                "svd_sec": f"{res.svd_sec:.6f}",
                "recover_sec": f"{res.recover_sec:.6f}",
                "bpc": f"{bpc:.6f}",
            })
        except (StageError, ValueError) as exc:
            print(f"row {raw_spec} failed: {exc}", file=sys.stderr)
            rows.append({"strategy": raw_spec, "error": str(exc)})

    widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in COMPARE_CSV_COLUMNS}
    print("  ".join(c.ljust(widths[c]) for c in COMPARE_CSV_COLUMNS), file=out)
    for r in rows:
        if "error" in r:
            print(f"{r['strategy']}  ERROR {r['error']}", file=out)
        else:
            print("  ".join(str(r[c]).ljust(widths[c]) for c in COMPARE_CSV_COLUMNS), file=out)
    if cfg.csv:
        with _stage("write"), open(cfg.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=COMPARE_CSV_COLUMNS, extrasaction="ignore")
            writer.writeheader()
            for r in rows:
                if "error" not in r:
                    writer.writerow(r)
    return 0


@dataclass
class BenchRow:
    alphabet_size: int
    mean_length: float
    num_sequences: int
    backend: str
    baseline_mean: float
    baseline_std: float
    fast_mean: float
    fast_std: float
    cardinality: int
    cardinality_equal: bool

    @property
    def speedup(self) -> float:
        return self.baseline_mean / self.fast_mean if self.fast_mean > 0 else float("inf")


def run_matching_bench(alphabet_sizes, mean_lengths, num_sequences, reps, seed,
                       backends=("auto",)) -> list[BenchRow]:
    """Time both matching engines over a grid of random corpora.

    Every repetition draws a fresh corpus, builds the graph once, then runs
    and times each engine; cardinalities are compared per repetition.
    """
    rows = []
    trial = 0
    for a in alphabet_sizes:
        for ml in mean_lengths:
            for ns in num_sequences:
                times = {(b, e): [] for b in backends for e in ("baseline", "fast")}
                cards_equal = True
                cardinality = 0
                for rep in range(reps):
                    rng = np.random.default_rng(seed + trial)
                    trial += 1
                    d = random_sequence_dataset(a, ns, ml, rng)
                    g = build_graph(empirical_probability(d))
                    per_backend = {}
                    for b in backends:
                        t0 = time.perf_counter()
                        mb = augmenting_path_matching(g, backend=b)
                        times[(b, "baseline")].append(time.perf_counter() - t0)
                        t0 = time.perf_counter()
                        mf = hankel_fast_matching(g, backend=b)
                        times[(b, "fast")].append(time.perf_counter() - t0)
                        per_backend[b] = (mb.cardinality, mf.cardinality)
                    cards = {c for pair in per_backend.values() for c in pair}
                    cardinality = cards.pop() if len(cards) == 1 else max(cards)
                    if cards:
                        cards_equal = False
                for b in backends:
                    base, fast = times[(b, "baseline")], times[(b, "fast")]
                    rows.append(BenchRow(
                        alphabet_size=a, mean_length=ml, num_sequences=ns, backend=b,
                        baseline_mean=statistics.fmean(base),
                        baseline_std=statistics.pstdev(base) if len(base) > 1 else 0.0,
                        fast_mean=statistics.fmean(fast),
                        fast_std=statistics.pstdev(fast) if len(fast) > 1 else 0.0,
                        cardinality=cardinality,
                        cardinality_equal=cards_equal,
                    ))
    return rows


BENCH_CSV_COLUMNS = ["alphabet", "mean_length", "sequences", "backend", "baseline_mean",
                     "baseline_std", "fast_mean", "fast_std", "speedup", "cardinality", "cardinality_equal"]


def cmd_bench_matching(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    backends = ["auto"]
    if cfg.backend != "auto":
        backends = [cfg.backend]
    if cfg.compare_backends:
        backends = ["native", "pure"] if native_available() else ["pure"]
    with _stage("bench"):
        rows = run_matching_bench(cfg.alphabet_sizes, cfg.mean_lengths, cfg.num_sequences,
                                  cfg.reps, cfg.seed, backends=backends)
    for r in rows:
        print(
            f"alphabet {r.alphabet_size} mean_len {r.mean_length:g} sequences {r.num_sequences} "
            f"backend {r.backend}: baseline {r.baseline_mean:.6f}±{r.baseline_std:.6f}s "
            f"fast {r.fast_mean:.6f}±{r.fast_std:.6f}s speedup {r.speedup:.3f} "
            f"matching {r.cardinality} cardinality_equal {r.cardinality_equal}",
            file=out,
        )
    if cfg.csv:
        with _stage("write"), open(cfg.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(BENCH_CSV_COLUMNS)
            for r in rows:
                writer.writerow([r.alphabet_size, r.mean_length, r.num_sequences, r.backend,
                                 f"{r.baseline_mean:.6f}", f"{r.baseline_std:.6f}",
                                 f"{r.fast_mean:.6f}", f"{r.fast_std:.6f}",
                                 f"{r.speedup:.3f}", r.cardinality, r.cardinality_equal])
    return 0


def cmd_probe_wmp(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    spec = SequenceTargetSpec(cfg.probe_alphabet, cfg.probe_sequences, cfg.probe_mean_length)
    with _stage("probe"):
        report = wmp_probe(spec, cfg.trials, cfg.seed)
    for line in report.format_lines():
        print(line, file=out)
    return 0


def _int_list(text):
    return tuple(int(x) for x in text.split(","))


def _float_list(text):
    return tuple(float(x) for x in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hankelmatch",
                                     description="Spectral learning of weighted automata with matching-based basis selection.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_io(p, input_required=True):
        p.add_argument("--input", required=input_required, help="dataset file")
        p.add_argument("--format", choices=("char", "token", "spice"), default="char")
        p.add_argument("--seed", type=int, default=0)

    train = sub.add_parser("train", help="train a model end to end")
    add_io(train)
    train.add_argument("--moments", type=int, default=None, metavar="T",
                       help="use substring expectations up to length T (default: empirical probabilities)")
    train.add_argument("--strategy", choices=STRATEGIES, default="fast-matching")
    train.add_argument("--size", type=int, default=None, metavar="K")
    train.add_argument("--max-len", type=int, default=None, metavar="L")
    train.add_argument("--states", type=int, default=None, metavar="N")
    train.add_argument("--svd", choices=("dense", "randomized"), default="dense")
    train.add_argument("--proj-dim", type=int, default=None, metavar="L")
    train.add_argument("--uniform-cuts", action="store_true",
                       help="sample random cuts uniformly instead of by frequency")
    train.add_argument("--backend", choices=("auto", "native", "pure"), default="auto")
    train.add_argument("--out", default=None, metavar="PATH")

    ev = sub.add_parser("eval", help="evaluate a saved model")
    add_io(ev)
    ev.add_argument("--model", required=True, metavar="PATH")
    ev.add_argument("--metric", choices=("bpc", "rank"), default="bpc")
    ev.add_argument("--window", type=int, default=4)
    ev.add_argument("--top-k", type=int, default=5)

    cmp_ = sub.add_parser("compare", help="compare basis-selection strategies")
    add_io(cmp_)
    cmp_.add_argument("--strategies", required=True,
                      help="comma list, e.g. matching,full,random-cuts:2x,length:3,high-norm:50")
    cmp_.add_argument("--moments", type=int, default=None, metavar="T")
    cmp_.add_argument("--states", type=int, default=None, metavar="N")
    cmp_.add_argument("--svd", choices=("dense", "randomized"), default="dense")
    cmp_.add_argument("--proj-dim", type=int, default=None, metavar="L")
    cmp_.add_argument("--uniform-cuts", action="store_true")
    cmp_.add_argument("--backend", choices=("auto", "native", "pure"), default="auto")
    cmp_.add_argument("--eval-input", default=None, metavar="PATH",
                      help="dataset for the BpC column (default: training data)")
    cmp_.add_argument("--window", type=int, default=4)
    cmp_.add_argument("--csv", default=None, metavar="PATH")

    bench = sub.add_parser("bench-matching", help="time the matching engines on random corpora")
    bench.add_argument("--alphabet-sizes", type=_int_list, default=(2, 4, 8))
    bench.add_argument("--mean-lengths", type=_float_list, default=(5.0, 10.0, 20.0))
    bench.add_argument("--num-sequences", type=_int_list, default=(1000, 10000))
    bench.add_argument("--reps", type=int, default=5)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--backend", choices=("auto", "native", "pure"), default="auto")
    bench.add_argument("--compare-backends", action="store_true",
                       help="time the compiled and pure-Python kernels side by side")
    bench.add_argument("--csv", default=None, metavar="PATH")

    probe = sub.add_parser("probe-wmp", help="probe the structural/numeric rank gap")
    probe.add_argument("--trials", type=int, default=20)
    probe.add_argument("--seed", type=int, default=0)
    probe.add_argument("--alphabet-size", type=int, default=4)
    probe.add_argument("--num-sequences", type=int, default=50)
    probe.add_argument("--mean-length", type=float, default=6.0)
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(subcommand=args.subcommand)
    for src, dst in (
        ("input", "input"), ("format", "format"), ("moments", "moments"), ("strategy", "strategy"),
        ("size", "size"), ("max_len", "max_len"), ("states", "states"), ("svd", "svd"),
        ("proj_dim", "proj_dim"), ("seed", "seed"), ("window", "window"), ("metric", "metric"),
        ("top_k", "top_k"), ("out", "out"), ("csv", "csv"), ("model", "model"),
        ("eval_input", "eval_input"), ("uniform_cuts", "uniform_cuts"), ("backend", "backend"),
        ("compare_backends", "compare_backends"), ("alphabet_sizes", "alphabet_sizes"),
        ("mean_lengths", "mean_lengths"), ("num_sequences", "num_sequences"), ("reps", "reps"),
        ("trials", "trials"), ("alphabet_size", "probe_alphabet"), ("mean_length", "probe_mean_length"),
    ):
        if hasattr(args, src):
            setattr(cfg, dst, getattr(args, src))
    if args.subcommand == "probe-wmp":
        cfg.probe_sequences = args.num_sequences
    if args.subcommand == "compare":
        cfg.strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
        if not cfg.strategies:
            raise ConfigError("--strategies must name at least one strategy")
    return cfg.validate()


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "compare": cmd_compare,
    "bench-matching": cmd_bench_matching,
    "probe-wmp": cmd_probe_wmp,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = COMMANDS[args.subcommand]
    try:
        cfg = _config_from_args(args)
        return command(cfg)
    except ConfigError as exc:
        print(f"ERROR {args.subcommand}/config: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"ERROR {args.subcommand}/{exc.stage}: {exc.cause}", file=sys.stderr)
        return 1
    except Exception as exc:  # surface anything else on one parsable line
        print(f"ERROR {args.subcommand}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
