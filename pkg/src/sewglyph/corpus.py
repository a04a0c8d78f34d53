"""Corpus loading, tokenisation, word-count statistics and seeded splits."""

from __future__ import annotations

import csv
import logging
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError, CorpusIOError, EmptyCorpus, NormalizationError, SplitError
from .profile import PROFILE_FIELDS, ProfileRecord, normalize_profile

log = logging.getLogger(__name__)

TOKENIZER_VERSION = "ws-edgestrip-lower/1"

LABEL_VALUES = {"yes": 1, "no": 0, "1": 1, "0": 0, "true": 1, "false": 0, "y": 1, "n": 0}


def tokenize(text):
    """Whitespace split, strip non-alphanumerics from both ends, lowercase.

    Internal punctuation survives, so "it's" stays one token.
    """
    tokens = []
    for raw in (text or "").split():
        start, end = 0, len(raw)
        while start < end and not raw[start].isalnum():
            start += 1
        while end > start and not raw[end - 1].isalnum():
            end -= 1
        if start < end:
            tokens.append(raw[start:end].lower())
    return tokens


@dataclass
class CorpusSample:
    id: str
    text: str
    labels: dict = field(default_factory=dict)
    profile: ProfileRecord | None = None

    @property
    def tokens(self):
        return tokenize(self.text)


@dataclass
class ColumnMap:
    text: str
    id: str | None = None
    labels: dict = field(default_factory=dict)  # label name -> column
    profile: dict = field(default_factory=dict)  # profile field -> column

    def __post_init__(self):
        bad = set(self.profile) - set(PROFILE_FIELDS)
        if bad:
            raise ConfigError(f"unknown profile field(s): {', '.join(sorted(bad))}")

    def columns(self):
        cols = [self.text] + list(self.labels.values()) + list(self.profile.values())
        return cols + ([self.id] if self.id else [])


@dataclass
class LoadReport:
    path: str = ""
    rows: int = 0
    empty_text: list = field(default_factory=list)  # sample ids
    malformed: list = field(default_factory=list)  # (line number, reason)


def normalize_label(value):
    key = str(value).strip().lower()
    if key not in LABEL_VALUES:
        raise ValueError(f"label value {value!r} is not yes/no")
    return LABEL_VALUES[key]


def _open_rows(path, fmt):
    if fmt not in ("csv", "tsv"):
        raise ConfigError(f"input format must be csv or tsv, got {fmt!r}")
    try:
        fh = open(path, newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise CorpusIOError(f"cannot read {path}: {exc}") from exc
    return fh, csv.DictReader(fh, delimiter="," if fmt == "csv" else "\t", restkey="\0extra")


def load_corpus(path, fmt="csv", column_map=None, *, report=None):
    """Read one CorpusSample per data row.

    Rows with the wrong field count, duplicate ids, unreadable labels or
    profile values are skipped and recorded in ``report.malformed`` with
    their line number. Rows with empty text are kept and listed in
    ``report.empty_text``.
    """
    if column_map is None:
        raise ConfigError("a column map naming at least the text column is required")
    report = report if report is not None else LoadReport()
    report.path = str(path)
    fh, reader = _open_rows(path, fmt)
    samples, seen = [], set()
    with fh:
        header = reader.fieldnames or []
        if column_map.text not in header:
            raise ConfigError(f"text column {column_map.text!r} not in header {header}")
        missing = [c for c in column_map.columns() if c not in header]
        if missing:
            log.warning("%s: column(s) %s absent; those fields are left empty", path, ", ".join(missing))
        id_col = column_map.id if column_map.id in header else None
        label_cols = {k: c for k, c in column_map.labels.items() if c in header}
        profile_cols = {k: c for k, c in column_map.profile.items() if c in header}
        for row in reader:
            line = reader.line_num
            report.rows += 1
            if "\0extra" in row or any(v is None for v in row.values()):
                report.malformed.append((line, "wrong number of fields"))
                continue
            sample_id = row[id_col].strip() if id_col else str(report.rows)
            if sample_id in seen:
                report.malformed.append((line, f"duplicate id {sample_id!r}"))
                continue
            try:
                labels = {
                    name: normalize_label(row[col]) for name, col in label_cols.items() if row[col].strip()
                }
                profile = None
                if profile_cols:
                    profile = normalize_profile(ProfileRecord(**{f: row[col] for f, col in profile_cols.items()}))
            except (ValueError, NormalizationError) as exc:
                report.malformed.append((line, str(exc)))
                continue
            seen.add(sample_id)
            text = row[column_map.text]
            if not tokenize(text):
                report.empty_text.append(sample_id)
            samples.append(CorpusSample(sample_id, text, labels, profile))
    for line, reason in report.malformed:
        log.warning("%s:%d: skipped row: %s", path, line, reason)
    return samples


def read_table(path, fmt="csv"):
    """Header and raw rows of a delimited file, for pass-through writers."""
    fh, reader = _open_rows(path, fmt)
    with fh:
        rows = [row for row in reader]
    return reader.fieldnames or [], rows


# -- statistics --------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusStats:
    n_samples: int
    mean_words: float
    median_words: float
    max_words: int
    coverage: dict  # K -> fraction of samples with count <= K
    histogram: dict  # word count -> number of samples

    def to_dict(self):
        return {
            "n_samples": self.n_samples,
            "mean_words": self.mean_words,
            "median_words": self.median_words,
            "max_words": self.max_words,
            "coverage": {str(k): v for k, v in self.coverage.items()},
            "histogram": {str(k): v for k, v in self.histogram.items()},
        }


def word_counts(corpus):
    """Token counts for samples, raw strings or precomputed integers."""
    out = []
    for item in corpus:
        if isinstance(item, CorpusSample):
            out.append(len(item.tokens))
        elif isinstance(item, str):
            out.append(len(tokenize(item)))
        else:
            out.append(int(item))
    return out


def coverage_fraction(counts, k):
    return sum(1 for c in counts if c <= k) / len(counts)


def word_count_stats(corpus, coverage_points=(25, 64)):
    counts = word_counts(corpus)
    if not counts:
        raise EmptyCorpus("cannot compute statistics of an empty corpus")
    return CorpusStats(
        n_samples=len(counts),
        mean_words=math.fsum(counts) / len(counts),
        median_words=float(statistics.median(counts)),
        max_words=max(counts),
        coverage={k: coverage_fraction(counts, k) for k in coverage_points},
        histogram=dict(sorted(Counter(counts).items())),
    )


def truncation_report(corpus, cut_length):
    """Fraction of samples with more than ``cut_length`` tokens."""
    counts = word_counts(corpus)
    if not counts:
        raise EmptyCorpus("cannot compute truncation of an empty corpus")
    return sum(1 for c in counts if c > cut_length) / len(counts)


# -- seeded split -------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def splitmix64(state):
    """One SplitMix64 step: returns (output, next state)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31), state


class XorShift64Star:
    """xorshift64* (shifts 12/25/27, multiplier 0x2545F4914F6CDD1D).

    The 64-bit state is seeded through one SplitMix64 step so that seed 0 is
    usable; a zero state is bumped to 1.
    """

    MULTIPLIER = 0x2545F4914F6CDD1D

    def __init__(self, seed):
        state, _ = splitmix64(int(seed) & _MASK64)
        self.state = state or 1

    def next_u64(self):
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * self.MULTIPLIER) & _MASK64

    def below(self, bound):
        """Uniform integer in [0, bound) by rejection sampling."""
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % bound


def shuffled_indices(n, seed):
    """Fisher-Yates permutation of range(n), walking i from n-1 down to 1."""
    order = list(range(n))
    rng = XorShift64Star(seed)
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        order[i], order[j] = order[j], order[i]
    return order


def train_size(n, ratio):
    """round(ratio * n), halves rounded up.

    The product is taken on the ratio's shortest decimal form so that
    0.7 * 355 gives 249, not the float result 248.49999...
    """
    exact = Fraction(repr(float(ratio))) * n
    return math.floor(exact + Fraction(1, 2))


def split_train_test(corpus, ratio=0.8, seed=0):
    """Shuffle with XorShift64Star(seed), take round(ratio * N) for training.

    Both halves keep the corpus's original relative order.
    """
    items = list(corpus)
    if not 0 < ratio < 1:
        raise SplitError(f"ratio must be strictly between 0 and 1, got {ratio}")
    if len(items) < 2:
        raise SplitError(f"need at least 2 samples to split, got {len(items)}")
    order = shuffled_indices(len(items), seed)
    train_idx = set(order[: train_size(len(items), ratio)])
    train = [x for i, x in enumerate(items) if i in train_idx]
    test = [x for i, x in enumerate(items) if i not in train_idx]
    return train, test
