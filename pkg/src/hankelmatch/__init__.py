"""Spectral learning of weighted automata from sparse sequence data.

The basis of the Hankel factorization is selected through a maximum
bipartite matching over the Hankel sparsity pattern, alongside the usual
baselines (full block, random cuts, length cap, high-norm sampling,
randomized-projection SVD).
"""

from .basis import high_norm_basis, length_basis, random_cuts_basis
from .corpus import (
    Alphabet,
    CorpusFormatError,
    Dataset,
    TargetFunction,
    Word,
    empirical_probability,
    load_dataset,
    make_dataset,
    observed_prefixes_suffixes,
    substring_expectation,
)
from .evaluation import WmpProbeReport, bits_per_character, rank_score, wmp_probe
from .hankel import (
    Basis,
    HankelBlock,
    SparseMatrix,
    build_block,
    full_basis,
    numeric_rank,
    read_hankel,
    write_hankel,
)
from .matching import (
    Matching,
    PrefixSuffixGraph,
    augmenting_path_matching,
    build_graph,
    dump_graph,
    hankel_fast_matching,
    matching_basis,
    native_available,
    pattern_matching,
    structural_rank,
)
from .spectral import Factorization, RankDeficiencyError, randomized_svd, recover_wa, truncated_svd
from .wfa import ModelFormatError, WeightedAutomaton

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "Basis",
    "CorpusFormatError",
    "Dataset",
    "Factorization",
    "HankelBlock",
    "Matching",
    "ModelFormatError",
    "PrefixSuffixGraph",
    "RankDeficiencyError",
    "SparseMatrix",
    "TargetFunction",
    "WeightedAutomaton",
    "WmpProbeReport",
    "Word",
    "augmenting_path_matching",
    "bits_per_character",
    "build_block",
    "build_graph",
    "dump_graph",
    "empirical_probability",
    "full_basis",
    "hankel_fast_matching",
    "high_norm_basis",
    "length_basis",
    "load_dataset",
    "make_dataset",
    "matching_basis",
    "native_available",
    "numeric_rank",
    "observed_prefixes_suffixes",
    "pattern_matching",
    "random_cuts_basis",
    "randomized_svd",
    "rank_score",
    "read_hankel",
    "recover_wa",
    "structural_rank",
    "substring_expectation",
    "truncated_svd",
    "wmp_probe",
    "write_hankel",
]
