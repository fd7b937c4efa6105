"""Lexicon and affix based part-of-speech tagging and verb analysis.

All linguistic knowledge lives in a rule file (see ``data/rules.txt``);
this module only knows how to match affix patterns against a word.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .textcore import Document, Token

NOUN, VERB, ADJECTIVE, ADVERB, FUNCTION, OTHER = (
    "noun", "verb", "adjective", "adverb", "function", "other")
POS_TAGS = (NOUN, VERB, ADJECTIVE, ADVERB, FUNCTION, OTHER)
CONTENT_TAGS = frozenset({NOUN, VERB, ADJECTIVE, ADVERB})

FOCI = ("actor", "object", "benefactive", "locative", "instrumental", "referential")
ASPECTS = ("infinitive", "perfective", "imperfective", "contemplative",
           "participle", "recent_past", "auxiliary")
UNDETERMINED = "undetermined"

SECTIONS = ("function", "auxiliary", "adverb", "adjective", "nominal", "focus", "aspect")
MIN_STEM = 3
_VOWELS = frozenset("aeiou")


class RuleFileError(ValueError):
    pass


class NotAVerbError(ValueError):
    pass


def _valid_stem(stem: str) -> bool:
    return len(stem) >= MIN_STEM and any(c in _VOWELS for c in stem)


def _onset(word: str) -> str:
    if word.startswith("ng"):
        return "ng"
    if word and word[0] not in _VOWELS:
        return word[0]
    return ""


def has_reduplication(word: str) -> bool:
    """True if *word* starts with a copied (C)V syllable, e.g. ``ka-kain``."""
    onset = _onset(word)
    if len(word) <= len(onset) or word[len(onset)] not in _VOWELS:
        return False
    cv = word[:len(onset) + 1]
    rest = word[len(cv):]
    return rest.startswith(cv) and _valid_stem(rest)


@dataclass(frozen=True)
class AffixPattern:
    """One affix pattern such as ``mag-``, ``-an``, ``-um-`` or ``ka-...-an``."""

    source: str
    kind: str  # prefix, suffix, infix, circumfix, redup, lexicon
    prefix: str = ""
    suffix: str = ""
    infix: str = ""
    redup: bool = False

    @classmethod
    def parse(cls, text: str) -> "AffixPattern":
        src = text
        if text.startswith("@"):
            if text != "@auxiliary":
                raise RuleFileError(f"unknown lexicon reference {text!r}")
            return cls(src, "lexicon")
        if text == "R":
            return cls(src, "redup", redup=True)
        redup = text.endswith("+R")
        if redup:
            text = text[:-2]
        if "..." in text:
            pre, suf = text.split("...")
            if not (pre.endswith("-") and suf.startswith("-")):
                raise RuleFileError(f"bad circumfix {src!r}")
            return cls(src, "circumfix", prefix=pre[:-1], suffix=suf[1:], redup=redup)
        body = text.strip("-")
        if not body or not body.isalpha():
            raise RuleFileError(f"bad affix pattern {src!r}")
        if text.startswith("-") and text.endswith("-"):
            return cls(src, "infix", infix=body, redup=redup)
        if text.endswith("-"):
            return cls(src, "prefix", prefix=body, redup=redup)
        if text.startswith("-"):
            return cls(src, "suffix", suffix=body, redup=redup)
        raise RuleFileError(f"affix pattern needs an anchor: {src!r}")

    @property
    def affix_length(self) -> int:
        return len(self.prefix) + len(self.suffix) + len(self.infix)

    def stem(self, word: str, auxiliaries=frozenset()):
        """Return the remaining stem when the pattern matches, else None."""
        word = word.replace("-", "")
        if self.kind == "lexicon":
            return word if word in auxiliaries else None
        if self.kind == "redup":
            return word if has_reduplication(word) else None
        if self.kind == "prefix":
            stem = word[len(self.prefix):] if word.startswith(self.prefix) else None
        elif self.kind == "suffix":
            stem = None
            if word.endswith(self.suffix):
                stem = word[:-len(self.suffix)]
                # vowel-initial suffixes attach to consonant-final roots only;
                # vowel-final roots take the h- variant
                if self.suffix[0] in _VOWELS and (not stem or stem[-1] in _VOWELS):
                    stem = None
        elif self.kind == "circumfix":
            stem = None
            if (word.startswith(self.prefix) and word.endswith(self.suffix)
                    and len(word) > len(self.prefix) + len(self.suffix)):
                stem = word[len(self.prefix):len(word) - len(self.suffix)]
        else:
            stem = None
            onset = _onset(word)
            if onset and word[len(onset):].startswith(self.infix):
                stem = onset + word[len(onset) + len(self.infix):]
            elif not onset and word.startswith(self.infix):
                rest = word[len(self.infix):]
                if rest and rest[0] in _VOWELS:
                    stem = rest
        if stem is None or not _valid_stem(stem):
            return None
        if self.redup and not has_reduplication(stem):
            return None
        return stem


@dataclass(frozen=True)
class Rule:
    patterns: tuple[AffixPattern, ...]
    label: str

    def match(self, word: str, auxiliaries=frozenset()):
        """Longest matching pattern of this rule, or None."""
        best = None
        for pat in self.patterns:
            if pat.stem(word, auxiliaries) is not None:
                if best is None or pat.affix_length > best.affix_length:
                    best = pat
        return best


@dataclass(frozen=True)
class RuleTable:
    function_lexicon: frozenset = frozenset()
    adverb_lexicon: frozenset = frozenset()
    auxiliary_lexicon: frozenset = frozenset()
    adjective_rules: tuple = ()
    nominal_rules: tuple = ()
    focus_rules: tuple = ()
    aspect_rules: tuple = ()
    digest: str = field(default="", compare=False)

    @classmethod
    def parse(cls, text: str) -> "RuleTable":
        lexica = {"function": set(), "auxiliary": set(), "adverb": set()}
        rules = {"adjective": [], "nominal": [], "focus": [], "aspect": []}
        section = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in SECTIONS:
                    raise RuleFileError(f"line {lineno}: unknown section [{section}]")
                continue
            if section is None:
                raise RuleFileError(f"line {lineno}: entry outside any section")
            if section in lexica:
                lexica[section].add(line.lower())
                continue
            if section in ("focus", "aspect"):
                alts, _, label = line.rpartition(" ")
                label = label.strip()
                allowed = FOCI if section == "focus" else ASPECTS
                if label not in allowed:
                    raise RuleFileError(f"line {lineno}: unknown {section} label {label!r}")
            else:
                alts, label = line, section
            try:
                pats = tuple(AffixPattern.parse(p.strip()) for p in alts.split("|"))
            except RuleFileError as exc:
                raise RuleFileError(f"line {lineno}: {exc}") from None
            rules[section].append(Rule(pats, label))
        return cls(
            function_lexicon=frozenset(lexica["function"]),
            adverb_lexicon=frozenset(lexica["adverb"]),
            auxiliary_lexicon=frozenset(lexica["auxiliary"]),
            adjective_rules=tuple(rules["adjective"]),
            nominal_rules=tuple(rules["nominal"]),
            focus_rules=tuple(rules["focus"]),
            aspect_rules=tuple(rules["aspect"]),
            digest=hashlib.sha256(text.encode("utf-8")).hexdigest(),
        )

    @classmethod
    def load(cls, path) -> "RuleTable":
        return cls.parse(Path(path).read_text("utf-8"))


def default_rules_text() -> str:
    return resources.files("basa.data").joinpath("rules.txt").read_text("utf-8")


@lru_cache(maxsize=None)
def default_rules() -> RuleTable:
    return RuleTable.parse(default_rules_text())


def _first(rules, word, auxiliaries):
    for rule in rules:
        if rule.match(word, auxiliaries) is not None:
            return rule.label
    return None


@dataclass(frozen=True)
class VerbAnalysis:
    focus: str = UNDETERMINED
    aspect: str = UNDETERMINED


def _analysis(word: str, rules: RuleTable) -> VerbAnalysis:
    aux = rules.auxiliary_lexicon
    return VerbAnalysis(_first(rules.focus_rules, word, aux) or UNDETERMINED,
                        _first(rules.aspect_rules, word, aux) or UNDETERMINED)


def tag_word(word: str, rules: RuleTable) -> str:
    """Tag a single normalized word form."""
    if word in rules.function_lexicon:
        return FUNCTION
    if word in rules.auxiliary_lexicon:
        return VERB
    analysis = _analysis(word, rules)
    if analysis.focus != UNDETERMINED or analysis.aspect != UNDETERMINED:
        return VERB
    for rule in rules.adjective_rules:
        pat = rule.match(word)
        if pat is not None and not has_reduplication(pat.stem(word)):
            return ADJECTIVE
    if word in rules.adverb_lexicon:
        return ADVERB
    # nominal derivations and the default path both give noun
    return NOUN


def tag(doc: Document, rules: RuleTable | None = None) -> list[str]:
    """One tag per word token of *doc*, in surface order."""
    rules = default_rules() if rules is None else rules
    return [tag_word(t.normalized, rules) for t in doc.words]


def analyze_verb(token: Token, rules: RuleTable | None = None) -> VerbAnalysis:
    rules = default_rules() if rules is None else rules
    if not token.has_letter or tag_word(token.normalized, rules) != VERB:
        raise NotAVerbError(f"not tagged as a verb: {token.surface!r}")
    return _analysis(token.normalized, rules)
