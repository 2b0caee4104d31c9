"""Sequence corpora, alphabets, and sparse empirical target functions."""

from __future__ import annotations

from dataclasses import dataclass, field

# A sequence is a tuple of dense symbol ids; () is the empty sequence.
Word = tuple[int, ...]

EPSILON: Word = ()


class CorpusFormatError(ValueError):
    """Raised when an input corpus file cannot be parsed."""


class Alphabet:
    """Dense, stable mapping between symbol tokens and integer ids.

    Ids are assigned 0..k-1 in the order tokens are supplied, so two
    corpora read in the same order produce identical alphabets.
    """

    __slots__ = ("tokens", "index")

    def __init__(self, tokens):
        tokens = tuple(tokens)
        index: dict[str, int] = {}
        for i, tok in enumerate(tokens):
            if tok in index:
                raise ValueError(f"duplicate token {tok!r}")
            index[tok] = i
        self.tokens = tokens
        self.index = index

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.tokens == other.tokens

    def __hash__(self):
        return hash(self.tokens)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.tokens)!r})"

    def render(self, word: Word, sep: str = " ") -> str:
        """Spell a word using this alphabet's tokens."""
        return sep.join(self.tokens[s] for s in word)


@dataclass(frozen=True)
class Dataset:
    """A multiset of sequences: distinct words paired with positive counts."""

    alphabet: Alphabet
    sequences: tuple[tuple[Word, int], ...]

    def __post_init__(self):
        if not self.sequences:
            raise ValueError("dataset has no sequences")
        k = len(self.alphabet)
        for word, count in self.sequences:
            if count < 1:
                raise ValueError(f"count {count} < 1 for {word!r}")
            if any(s < 0 or s >= k for s in word):
                raise ValueError(f"symbol id out of range in {word!r}")

    @property
    def total_count(self) -> int:
        return sum(c for _, c in self.sequences)

    def __len__(self) -> int:
        return len(self.sequences)


@dataclass(frozen=True)
class TargetFunction:
    """Sparse map from sequences to reals; absent sequences evaluate to 0.

    Exact zeros are dropped at construction so that the stored entries
    coincide with the support.
    """

    alphabet: Alphabet
    entries: dict[Word, float] = field(default_factory=dict)

    def __post_init__(self):
        zeros = [w for w, v in self.entries.items() if v == 0.0]
        for w in zeros:
            del self.entries[w]

    def __call__(self, word: Word) -> float:
        return self.entries.get(word, 0.0)

    @property
    def support_size(self) -> int:
        return len(self.entries)


def canonical_key(word: Word):
    """Sort key for the canonical sequence order: length descending, then
    lexicographic by symbol ids."""
    return (-len(word), word)


def make_dataset(alphabet: Alphabet, words) -> Dataset:
    """Merge an iterable of words into a Dataset, deduplicating into counts.

    Distinct words keep their first-occurrence order.
    """
    counts: dict[Word, int] = {}
    for w in words:
        w = tuple(w)
        counts[w] = counts.get(w, 0) + 1
    if not counts:
        raise CorpusFormatError("empty dataset")
    return Dataset(alphabet, tuple(counts.items()))


def _parse_char(text: str):
    interner: dict[str, int] = {}
    words = []
    for line in text.splitlines():
        words.append(tuple(interner.setdefault(ch, len(interner)) for ch in line))
    return list(interner), words


def _parse_token(text: str):
    interner: dict[str, int] = {}
    words = []
    for line in text.splitlines():
        words.append(tuple(interner.setdefault(tok, len(interner)) for tok in line.split()))
    return list(interner), words


def _parse_spice(text: str):
    lines = text.splitlines()
    if not lines:
        raise CorpusFormatError("spice file is empty")
    head = lines[0].split()
    if len(head) != 2:
        raise CorpusFormatError(f"malformed spice header {lines[0]!r}")
    try:
        n_seq, n_sym = int(head[0]), int(head[1])
    except ValueError as exc:
        raise CorpusFormatError(f"malformed spice header {lines[0]!r}") from exc
    if n_seq < 1 or n_sym < 1:
        raise CorpusFormatError(f"bad spice dimensions {n_seq} {n_sym}")
    if len(lines) < 1 + n_seq:
        raise CorpusFormatError(f"spice file declares {n_seq} sequences, found {len(lines) - 1}")
    words = []
    for lineno, line in enumerate(lines[1 : 1 + n_seq], start=2):
        parts = line.split()
        if not parts:
            raise CorpusFormatError(f"line {lineno}: missing length field")
        length = int(parts[0])
        if len(parts) != length + 1:
            raise CorpusFormatError(f"line {lineno}: declared {length} symbols, found {len(parts) - 1}")
        ids = tuple(int(p) for p in parts[1:])
        for s in ids:
            if s < 0 or s >= n_sym:
                raise CorpusFormatError(f"line {lineno}: symbol id {s} out of range [0, {n_sym})")
        words.append(ids)
    tokens = [str(i) for i in range(n_sym)]
    return tokens, words


_PARSERS = {"char": _parse_char, "token": _parse_token, "spice": _parse_spice}


def load_dataset(path, format: str = "char") -> Dataset:
    """Load a sequence dataset from a text file.

    Parameters
    ----------
    path : str or Path
        File to read (UTF-8).
    format : {'char', 'token', 'spice'}
        'char': one sequence per line, each Unicode scalar is a symbol,
        empty line is the empty sequence. 'token': symbols separated by
        ASCII whitespace. 'spice': header "N K", then N lines
        "L id_1 ... id_L" with ids in [0, K).
    """
    try:
        parser = _PARSERS[format]
    except KeyError:
        raise ValueError(f"unknown format {format!r}") from None
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    tokens, words = parser(text)
    return make_dataset(Alphabet(tokens), words)


def empirical_probability(dataset: Dataset) -> TargetFunction:
    """Target assigning each distinct sequence its empirical frequency."""
    total = dataset.total_count
    entries = {w: c / total for w, c in dataset.sequences}
    return TargetFunction(dataset.alphabet, entries)


def substring_expectation(dataset: Dataset, max_length: int) -> TargetFunction:
    """Target assigning each substring its expected occurrence count.

    For every contiguous substring x with 1 <= |x| <= max_length, the
    value is the mean number of occurrences of x in a sequence drawn from
    the empirical distribution. The empty sequence gets |w|+1 occurrences
    per sequence w (one per cut position), keeping the (epsilon, epsilon)
    Hankel entry consistent with edge counting.
    """
    if max_length < 1:
        raise ValueError(f"max_length must be >= 1, got {max_length}")
    total = dataset.total_count
    occ: dict[Word, int] = {}
    eps_occ = 0
    for w, c in dataset.sequences:
        eps_occ += c * (len(w) + 1)
        for i in range(len(w)):
            top = min(i + max_length, len(w))
            for j in range(i + 1, top + 1):
                x = w[i:j]
                occ[x] = occ.get(x, 0) + c
    entries = {x: v / total for x, v in occ.items()}
    entries[EPSILON] = eps_occ / total
    return TargetFunction(dataset.alphabet, entries)


def observed_prefixes_suffixes(f: TargetFunction) -> tuple[list[Word], list[Word]]:
    """All distinct prefixes and suffixes of the support, canonically ordered.

    Both lists include the empty sequence and the full support strings and
    are sorted length-descending then lexicographic, the order the matching
    engines expect.
    """
    prefixes: set[Word] = set()
    suffixes: set[Word] = set()
    for w in f.entries:
        for i in range(len(w) + 1):
            prefixes.add(w[:i])
            suffixes.add(w[i:])
    return sorted(prefixes, key=canonical_key), sorted(suffixes, key=canonical_key)
