"""Word n-gram language models with add-alpha smoothing.

Models are trained per grade level on an external corpus. Each sentence is
padded with ``n - 1`` start symbols and one end symbol. The start symbol is
only ever a context, never a prediction, so it is not part of the
vocabulary that the probabilities are normalized over.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .textcore import Document

BOS, EOS, UNK = "<s>", "</s>", "<unk>"
LEVELS = ("L1", "L2", "L3")
ORDERS = (1, 2, 3)
UNITS = ("word",)
LM_SCHEMA = "basa.lm/1"


class LanguageModelError(ValueError):
    pass


def _check_params(level, n, alpha, unit):
    if level not in LEVELS:
        raise LanguageModelError(f"unknown level {level!r}; expected one of {LEVELS}")
    if n not in ORDERS:
        raise LanguageModelError(f"n must be one of {ORDERS}, got {n!r}")
    if not alpha > 0:
        raise LanguageModelError(f"alpha must be positive, got {alpha!r}")
    if unit not in UNITS:
        raise LanguageModelError(f"unsupported unit {unit!r}; only word models are available")


def sentence_units(doc: Document) -> list[list[str]]:
    """Normalized word forms per sentence, skipping word-free sentences."""
    out = []
    for sent in doc.sentences:
        words = [t.normalized for t in sent.words]
        if words:
            out.append(words)
    return out


def padded_ngrams(words: Sequence[str], n: int):
    seq = [BOS] * (n - 1) + list(words) + [EOS]
    for i in range(n - 1, len(seq)):
        yield tuple(seq[i - n + 1:i + 1])


@dataclass(frozen=True)
class NGramModel:
    level: str
    n: int
    vocabulary: frozenset
    counts: Mapping[tuple, int]
    alpha: float = 0.1
    unit: str = "word"
    context_counts: Mapping[tuple, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_params(self.level, self.n, self.alpha, self.unit)
        vocab = frozenset(self.vocabulary) | {UNK, EOS}
        object.__setattr__(self, "vocabulary", vocab - {BOS})
        ctx = Counter()
        for gram, c in self.counts.items():
            if len(gram) != self.n:
                raise LanguageModelError(f"n-gram {gram!r} has wrong order for n={self.n}")
            if c < 0:
                raise LanguageModelError(f"negative count for {gram!r}")
            ctx[gram[:-1]] += c
        object.__setattr__(self, "context_counts", dict(ctx))

    @classmethod
    def uniform(cls, level, n, vocabulary, alpha=0.1) -> "NGramModel":
        return cls(level, n, frozenset(vocabulary), {}, alpha)

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    def map_word(self, word: str) -> str:
        return word if word in self.vocabulary else UNK

    def prob(self, word: str, context: tuple = ()) -> float:
        context = tuple(context)[-(self.n - 1):] if self.n > 1 else ()
        gram = context + (word,)
        num = self.counts.get(gram, 0) + self.alpha
        den = self.context_counts.get(context, 0) + self.alpha * self.vocab_size
        return num / den

    def log_prob_sum(self, doc: Document) -> tuple[float, int]:
        total, positions = 0.0, 0
        for words in sentence_units(doc):
            mapped = [self.map_word(w) for w in words]
            for gram in padded_ngrams(mapped, self.n):
                total += math.log(self.prob(gram[-1], gram[:-1]))
                positions += 1
        return total, positions

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "unit": self.unit,
            "vocabulary": sorted(self.vocabulary),
            "counts": {" ".join(g): c for g, c in sorted(self.counts.items())},
        }

    @classmethod
    def from_dict(cls, level: str, data: dict) -> "NGramModel":
        counts = {tuple(k.split(" ")): int(v) for k, v in data["counts"].items()}
        return cls(level, int(data["n"]), frozenset(data["vocabulary"]), counts,
                   float(data["alpha"]), data.get("unit", "word"))


def train_lm(corpus: Iterable[Document], level: str, n: int, alpha: float = 0.1,
             unit: str = "word") -> NGramModel:
    _check_params(level, n, alpha, unit)
    docs = list(corpus)
    counts: Counter = Counter()
    types: set = set()
    for doc in docs:
        for words in sentence_units(doc):
            types.update(words)
            counts.update(padded_ngrams(words, n))
    if not counts:
        raise LanguageModelError("cannot train a language model on an empty corpus")
    return NGramModel(level, n, frozenset(types), dict(counts), alpha, unit)


def perplexity(model: NGramModel, doc: Document) -> float:
    """exp of the mean negative log-probability over predicted positions.

    A document with no words has no predicted positions; its perplexity is
    defined as the vocabulary size, the value a uniform model would give.
    """
    total, positions = model.log_prob_sum(doc)
    if positions == 0:
        return float(model.vocab_size)
    return math.exp(-total / positions)


def lm_features(doc: Document, models: Mapping[tuple[str, int], NGramModel]) -> list[float]:
    """Perplexities ordered L1n1, L1n2, L1n3, L2n1, ..., L3n3."""
    missing = [f"{lv}n{n}" for lv in LEVELS for n in ORDERS if (lv, n) not in models]
    if missing:
        raise LanguageModelError(f"missing language models: {', '.join(missing)}")
    return [perplexity(models[(lv, n)], doc) for lv in LEVELS for n in ORDERS]


def dumps_models(models: Sequence[NGramModel]) -> str:
    """Serialize the models of one level as sorted, byte-stable JSON."""
    levels = {m.level for m in models}
    if len(levels) != 1:
        raise LanguageModelError("an LM file holds models of exactly one level")
    data = {
        "schema": LM_SCHEMA,
        "level": levels.pop(),
        "models": [m.to_dict() for m in sorted(models, key=lambda m: m.n)],
    }
    return json.dumps(data, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def dump_models(models: Sequence[NGramModel], path) -> None:
    Path(path).write_text(dumps_models(models), encoding="utf-8")


def load_models(path) -> list[NGramModel]:
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise LanguageModelError(f"{path}: not a JSON document ({exc})") from None
    if not isinstance(data, dict) or data.get("schema") != LM_SCHEMA:
        raise LanguageModelError(f"{path}: not a {LM_SCHEMA} file")
    try:
        return [NGramModel.from_dict(data["level"], m) for m in data["models"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise LanguageModelError(f"{path}: malformed LM file ({exc})") from None


def load_model_dir(directory) -> dict[tuple[str, int], NGramModel]:
    """Collect every model found in the ``*.json`` LM files of *directory*."""
    directory = Path(directory)
    if not directory.is_dir():
        raise LanguageModelError(f"LM directory not found: {directory}")
    models = {}
    for path in sorted(directory.glob("*.json")):
        for model in load_models(path):
            key = (model.level, model.n)
            if key in models:
                raise LanguageModelError(f"duplicate model {model.level}n{model.n} in {directory}")
            models[key] = model
    return models
