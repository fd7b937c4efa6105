"""Rule-based Filipino syllabification.

Words are first split into graphemes: ``ng`` is a single consonant, the
five letters ``a e i o u`` are vowels and every other letter (including
``ñ``, ``y`` and ``w``) is a consonant. Each vowel is one syllable nucleus.
Consonants between two nuclei are divided as follows:

* one consonant starts the next syllable (``ba.ta``);
* two consonants split 1/1 (``bun.dok``) unless the pair is a permissible
  onset, in which case both start the next syllable (``a.klat`` style);
* three or more consonants: the longest permissible onset at the end of
  the run starts the next syllable, otherwise only the last consonant does.

Hyphens are hard boundaries. A word without any vowel is *degenerate* and
has no syllables.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .textcore import Token

VOWELS = frozenset("aeiou")
PATTERNS = ("v", "cv", "vc", "cvc", "vcc", "cvcc", "ccvc", "ccvcc", "ccvccc")
OTHER = "other"


class SyllabificationError(ValueError):
    pass


def graphemes(word: str) -> list[str]:
    """Split a hyphen-free lowercase word into letter symbols."""
    out = []
    i = 0
    while i < len(word):
        if word.startswith("ng", i):
            out.append("ng")
            i += 2
        else:
            out.append(word[i])
            i += 1
    return out


def is_vowel(symbol: str) -> bool:
    return symbol in VOWELS


def signature(symbols) -> str:
    return "".join("v" if is_vowel(s) else "c" for s in symbols)


def pattern_of(syllable) -> str:
    """One of the nine listed c/v patterns, or ``"other"``."""
    sig = syllable if isinstance(syllable, str) else signature(syllable.graphemes)
    return sig if sig in PATTERNS else OTHER


@dataclass(frozen=True)
class Syllable:
    graphemes: tuple[str, ...]

    @property
    def text(self) -> str:
        return "".join(self.graphemes)

    @property
    def signature(self) -> str:
        return signature(self.graphemes)

    @property
    def pattern(self) -> str:
        return pattern_of(self.signature)

    @property
    def has_cluster(self) -> bool:
        return "cc" in self.signature


@dataclass(frozen=True)
class SyllabifiedWord:
    token: Token
    syllables: tuple[Syllable, ...]

    @property
    def degenerate(self) -> bool:
        return not self.syllables

    def __len__(self):
        return len(self.syllables)


def load_onsets(path=None) -> frozenset[tuple[str, ...]]:
    """Read an onset-cluster table; ``#`` starts a comment."""
    if path is None:
        text = resources.files("basa.data").joinpath("onsets.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    onsets = set()
    for line in text.splitlines():
        entry = line.split("#", 1)[0].strip().lower()
        if not entry:
            continue
        symbols = graphemes(entry)
        if len(symbols) < 2 or any(is_vowel(s) for s in symbols):
            raise ValueError(f"invalid onset cluster: {entry!r}")
        onsets.add(tuple(symbols))
    return frozenset(onsets)


@lru_cache(maxsize=None)
def default_onsets() -> frozenset[tuple[str, ...]]:
    return load_onsets()


def _onset_length(run: list[str], onsets) -> int:
    """How many trailing consonants of an intervocalic run start the next syllable."""
    for size in range(min(len(run), 3), 1, -1):
        if tuple(run[-size:]) in onsets:
            return size
    return 1


def _split_part(symbols: list[str], onsets) -> list[list[str]]:
    nuclei = [i for i, s in enumerate(symbols) if is_vowel(s)]
    if not nuclei:
        return []
    cuts = []
    for left, right in zip(nuclei, nuclei[1:]):
        run = symbols[left + 1:right]
        if not run:
            cuts.append(right)
        else:
            cuts.append(right - _onset_length(run, onsets))
    bounds = [0] + cuts + [len(symbols)]
    return [symbols[a:b] for a, b in zip(bounds, bounds[1:])]


def split_word(word: str, onsets=None) -> list[list[str]]:
    """Syllabify a normalized word into grapheme lists."""
    onsets = default_onsets() if onsets is None else onsets
    result: list[list[str]] = []
    pending: list[str] = []  # consonants of vowel-free parts before any syllable
    for part in word.split("-"):
        if not part:
            continue
        symbols = graphemes(part)
        pieces = _split_part(symbols, onsets)
        if not pieces:
            if result:
                result[-1].extend(symbols)
            else:
                pending.extend(symbols)
            continue
        if pending:
            pieces[0] = pending + pieces[0]
            pending = []
        result.extend(pieces)
    return result


@lru_cache(maxsize=65536)
def _cached(word: str, onsets) -> tuple[Syllable, ...]:
    return tuple(Syllable(tuple(s)) for s in split_word(word, onsets))


def syllabify(word: Token, onsets=None) -> SyllabifiedWord:
    if not word.has_letter:
        raise SyllabificationError(f"token has no letters: {word.surface!r}")
    onsets = default_onsets() if onsets is None else onsets
    return SyllabifiedWord(word, _cached(word.normalized, onsets))
