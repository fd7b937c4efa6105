"""Feature extraction and the canonical feature dictionary.

The full vector has 48 predictors in five sets, always in this order:
TRAD (7), LEX (9), LM (9), SYLL (10), MORPH (13). Only the 13 verb
focus/aspect densities that can be enumerated are produced for MORPH.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import nglm
from .syllabifier import OTHER, PATTERNS, default_onsets, syllabify
from .tagger import (ASPECTS, CONTENT_TAGS, FOCI, FUNCTION, NOUN,
                     UNDETERMINED, VERB, RuleTable, analyze_verb, default_rules, tag)
from .textcore import PHRASE_DELIMITERS, Document, phrase_segments, tokenize

FEATURE_SETS = ("TRAD", "LEX", "LM", "SYLL", "MORPH")

FEATURE_NAMES = {
    "TRAD": (
        "trad_word_count",
        "trad_sentence_count",
        "trad_phrase_count",
        "trad_polysyllabic_count",
        "trad_avg_word_length",
        "trad_avg_sentence_length",
        "trad_avg_syllables_per_word",
    ),
    "LEX": (
        "lex_ttr",
        "lex_ttr_log",
        "lex_ttr_corrected",
        "lex_ttr_root",
        "lex_noun_ratio",
        "lex_verb_ratio",
        "lex_lexical_density",
        "lex_foreign_density",
        "lex_compound_density",
    ),
    "LM": tuple(f"lm_{lv.lower()}_n{n}" for lv in nglm.LEVELS for n in nglm.ORDERS),
    "SYLL": ("syll_cluster_density",) + tuple(f"syll_{p}" for p in PATTERNS),
    "MORPH": tuple(f"morph_focus_{f}" for f in FOCI)
    + tuple(f"morph_aspect_{a}" for a in ASPECTS),
}

FOREIGN_LETTERS = frozenset("cfjqvxz")
POLYSYLLABIC_THRESHOLD = 3


class FeatureError(ValueError):
    pass


def parse_mask(spec) -> tuple[str, ...]:
    """Canonically ordered feature sets from ``"TRAD,SYLL"``, ``"ALL"`` or an iterable."""
    if isinstance(spec, str):
        parts = [p.strip().upper() for p in spec.replace("+", ",").split(",") if p.strip()]
    else:
        parts = [str(p).upper() for p in spec]
    if parts == ["ALL"]:
        parts = list(FEATURE_SETS)
    unknown = sorted(set(parts) - set(FEATURE_SETS))
    if unknown:
        raise FeatureError(f"unknown feature set(s): {', '.join(unknown)}")
    if not parts:
        raise FeatureError("feature mask must contain at least one set")
    return tuple(s for s in FEATURE_SETS if s in parts)


def mask_label(mask: Sequence[str]) -> str:
    mask = parse_mask(mask)
    return "ALL" if mask == FEATURE_SETS else " + ".join(mask)


def feature_names(mask=FEATURE_SETS) -> list[str]:
    return [name for s in parse_mask(mask) for name in FEATURE_NAMES[s]]


@dataclass(frozen=True)
class FeatureVector:
    doc_id: str
    label: int | None
    values: tuple[float, ...]
    names: tuple[str, ...]

    def __post_init__(self):
        if len(self.values) != len(self.names):
            raise FeatureError("feature values and names differ in length")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))


def _safe_div(num, den) -> float:
    return num / den if den else 0.0


def syllabify_doc(doc: Document, onsets=None):
    return [syllabify(t, onsets) for t in doc.words]


def extract_trad(doc: Document, syllabified=None,
                 polysyllabic_threshold: int = POLYSYLLABIC_THRESHOLD,
                 delimiters=PHRASE_DELIMITERS) -> list[float]:
    words = doc.words
    syllabified = syllabify_doc(doc) if syllabified is None else syllabified
    n_words = len(words)
    n_sentences = sum(1 for s in doc.sentences if s.words)
    n_phrases = sum(phrase_segments(doc, delimiters))
    n_letters = sum(len(t.letters) for t in words)
    n_syllables = sum(len(w) for w in syllabified)
    poly = sum(1 for w in syllabified if len(w) >= polysyllabic_threshold)
    return [
        float(n_words),
        float(n_sentences),
        float(n_phrases),
        float(poly),
        _safe_div(n_letters, n_words),
        _safe_div(n_words, n_sentences),
        _safe_div(n_syllables, n_words),
    ]


def is_foreign(word, tag_value: str) -> bool:
    """Loanword heuristic over a syllabified word.

    A word counts as foreign when it contains a letter outside the native
    abakada inventory, or when every one of its syllables falls outside the
    listed native patterns. Function words are never foreign.
    """
    if tag_value == FUNCTION:
        return False
    if FOREIGN_LETTERS & set(word.token.normalized):
        return True
    return bool(word.syllables) and all(s.pattern == OTHER for s in word.syllables)


def extract_lex(doc: Document, tags: Sequence[str], syllabified=None) -> list[float]:
    words = doc.words
    if len(tags) != len(words):
        raise FeatureError("one tag per word token is required")
    n = len(words)
    if n == 0:
        return [0.0] * 9
    syllabified = syllabify_doc(doc) if syllabified is None else syllabified
    types = len({t.normalized for t in words})
    counts = Counter(tags)
    foreign = sum(1 for w, tg in zip(syllabified, tags) if is_foreign(w, tg))
    compound = sum(1 for t in words if "-" in t.normalized)
    return [
        types / n,
        math.log(types) / math.log(n) if n > 1 else 0.0,
        types / math.sqrt(2 * n),
        types / math.sqrt(n),
        counts[NOUN] / n,
        counts[VERB] / n,
        sum(counts[t] for t in CONTENT_TAGS) / n,
        foreign / n,
        compound / n,
    ]


def pattern_counts(syllabified) -> Counter:
    """Syllable counts per pattern label (including ``"other"``) and clusters."""
    counts = Counter()
    for word in syllabified:
        for syl in word.syllables:
            counts[syl.pattern] += 1
            if syl.has_cluster:
                counts["cluster"] += 1
    return counts


def extract_syll(doc: Document, syllabified=None) -> list[float]:
    syllabified = syllabify_doc(doc) if syllabified is None else syllabified
    counts = pattern_counts(syllabified)
    total = sum(counts[p] for p in PATTERNS) + counts[OTHER]
    if total == 0:
        return [0.0] * 10
    return [counts["cluster"] / total] + [counts[p] / total for p in PATTERNS]


def analyze_doc(doc: Document, tags: Sequence[str], rules: RuleTable):
    return [analyze_verb(t, rules) if tg == VERB else None
            for t, tg in zip(doc.words, tags)]


def extract_morph(doc: Document, tags: Sequence[str], analyses) -> list[float]:
    n = len(doc.words)
    if n == 0:
        return [0.0] * 13
    focus = Counter(a.focus for a in analyses if a is not None)
    aspect = Counter(a.aspect for a in analyses if a is not None)
    focus.pop(UNDETERMINED, None)
    aspect.pop(UNDETERMINED, None)
    return [focus[f] / n for f in FOCI] + [aspect[a] / n for a in ASPECTS]


def assemble(doc_id: str, label, parts: Mapping[str, Sequence[float]], mask) -> FeatureVector:
    mask = parse_mask(mask)
    values: list[float] = []
    for name in mask:
        if name not in parts or parts[name] is None:
            raise FeatureError(f"missing extractor output for {name}")
        part = list(parts[name])
        if len(part) != len(FEATURE_NAMES[name]):
            raise FeatureError(f"{name} expects {len(FEATURE_NAMES[name])} values, got {len(part)}")
        values.extend(float(v) for v in part)
    return FeatureVector(doc_id, label, tuple(values), tuple(feature_names(mask)))


class FeatureExtractor:
    """Configured pipeline from raw text to a masked :class:`FeatureVector`."""

    def __init__(self, rules: RuleTable | None = None, onsets=None,
                 lm_models: Mapping | None = None,
                 polysyllabic_threshold: int = POLYSYLLABIC_THRESHOLD,
                 delimiters=PHRASE_DELIMITERS):
        self.rules = default_rules() if rules is None else rules
        self.onsets = default_onsets() if onsets is None else onsets
        self.lm_models = lm_models
        self.polysyllabic_threshold = polysyllabic_threshold
        self.delimiters = frozenset(delimiters)

    def parts(self, doc: Document, mask=FEATURE_SETS) -> dict[str, list[float]]:
        mask = parse_mask(mask)
        out: dict[str, list[float]] = {}
        syl = syllabify_doc(doc, self.onsets) if {"TRAD", "LEX", "SYLL"} & set(mask) else None
        tags = tag(doc, self.rules) if {"LEX", "MORPH"} & set(mask) else None
        if "TRAD" in mask:
            out["TRAD"] = extract_trad(doc, syl, self.polysyllabic_threshold, self.delimiters)
        if "LEX" in mask:
            out["LEX"] = extract_lex(doc, tags, syl)
        if "LM" in mask:
            if self.lm_models is None:
                raise FeatureError("LM features need language models (--lm-dir)")
            out["LM"] = nglm.lm_features(doc, self.lm_models)
        if "SYLL" in mask:
            out["SYLL"] = extract_syll(doc, syl)
        if "MORPH" in mask:
            out["MORPH"] = extract_morph(doc, tags, analyze_doc(doc, tags, self.rules))
        return out

    def extract_doc(self, doc: Document, label=None, mask=FEATURE_SETS) -> FeatureVector:
        return assemble(doc.source_id, label, self.parts(doc, mask), mask)

    def extract(self, text: str, doc_id: str = "", label=None, mask=FEATURE_SETS) -> FeatureVector:
        return self.extract_doc(tokenize(text, doc_id), label, mask)


def format_value(value: float) -> str:
    return f"{value:.9g}"


def write_feature_file(vectors: Iterable[FeatureVector], path_or_buffer) -> None:
    """CSV with header ``doc_id,label,<names>``; rows sorted by doc_id."""
    vectors = sorted(vectors, key=lambda v: v.doc_id)
    if not vectors:
        raise FeatureError("no feature vectors to write")
    names = vectors[0].names
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["doc_id", "label", *names])
    for vec in vectors:
        if vec.names != names:
            raise FeatureError("feature vectors with different columns")
        label = "" if vec.label is None else str(vec.label)
        writer.writerow([vec.doc_id, label, *map(format_value, vec.values)])
    if hasattr(path_or_buffer, "write"):
        path_or_buffer.write(buf.getvalue())
    else:
        Path(path_or_buffer).write_text(buf.getvalue(), encoding="utf-8")


@dataclass
class FeatureTable:
    doc_ids: list[str]
    labels: list[int | None]
    names: list[str]
    rows: list[list[float]]

    def columns_for(self, mask) -> list[int]:
        wanted = feature_names(mask)
        index = {n: i for i, n in enumerate(self.names)}
        missing = [n for n in wanted if n not in index]
        if missing:
            raise FeatureError(f"feature file lacks columns: {', '.join(missing[:5])}"
                               + (" ..." if len(missing) > 5 else ""))
        return [index[n] for n in wanted]

    def sets_present(self) -> tuple[str, ...]:
        have = set(self.names)
        return tuple(s for s in FEATURE_SETS if set(FEATURE_NAMES[s]) <= have)

    def matrix(self, mask):
        import numpy as np
        cols = self.columns_for(mask)
        return np.asarray(self.rows, dtype=float)[:, cols] if self.rows else np.zeros((0, len(cols)))


def read_feature_file(path) -> FeatureTable:
    text = Path(path).read_text("utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FeatureError(f"{path}: empty feature file") from None
    if header[:2] != ["doc_id", "label"]:
        raise FeatureError(f"{path}: header must start with doc_id,label")
    names = header[2:]
    known = {n for s in FEATURE_SETS for n in FEATURE_NAMES[s]}
    unknown = [n for n in names if n not in known]
    if unknown:
        raise FeatureError(f"{path}: unknown feature column {unknown[0]!r}")
    table = FeatureTable([], [], names, [])
    for lineno, row in enumerate(reader, 2):
        if not row:
            continue
        if len(row) != len(header):
            raise FeatureError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            label = int(row[1]) if row[1] else None
            values = [float(v) for v in row[2:]]
        except ValueError as exc:
            raise FeatureError(f"{path}:{lineno}: {exc}") from None
        table.doc_ids.append(row[0])
        table.labels.append(label)
        table.rows.append(values)
    if not table.rows:
        raise FeatureError(f"{path}: no data rows")
    return table
