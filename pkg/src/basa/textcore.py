"""Normalization, tokenization and sentence/phrase segmentation.

Every extractor works on a :class:`Document`. Text is NFC-normalized,
split into sentences on terminal punctuation (``. ! ? …``) followed by
whitespace or end of text, and into tokens on whitespace. Blank lines are
hard sentence boundaries so that titles and headings without a final period
do not run into the next sentence.

Phrase delimiters (``, ; : — –``) also separate tokens. Every punctuation
character stripped from a token edge is remembered together with its token
offset, which lets :func:`phrase_segments` count delimiters for any
configurable delimiter set without re-reading the text.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

TERMINATORS = ".!?…"
PHRASE_DELIMITERS = frozenset(",;:—–")

_SENTENCE_END = re.compile(r"[.!?…]+[\"'”’)\]»]*(?=\s|$)")
_PARAGRAPH = re.compile(r"\n[ \t\r\f\v]*\n")
_CHUNK_SPLIT = re.compile(r"[\s—–,;:]+|[—–,;:]")


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    has_letter: bool

    @property
    def is_word(self) -> bool:
        return self.has_letter

    @property
    def letters(self) -> str:
        """Normalized form with hyphens removed."""
        return self.normalized.replace("-", "")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    # (punctuation char, number of tokens preceding it) in surface order
    marks: tuple[tuple[str, int], ...] = ()

    @property
    def words(self) -> tuple[Token, ...]:
        return tuple(t for t in self.tokens if t.has_letter)


@dataclass(frozen=True)
class Document:
    sentences: tuple[Sentence, ...] = ()
    source_id: str = ""
    tokens: tuple[Token, ...] = field(init=False)

    def __post_init__(self):
        flat = tuple(t for s in self.sentences for t in s.tokens)
        object.__setattr__(self, "tokens", flat)

    @property
    def words(self) -> tuple[Token, ...]:
        return tuple(t for t in self.tokens if t.has_letter)

    def __add__(self, other: "Document") -> "Document":
        return Document(self.sentences + other.sentences, self.source_id)


def _fold_char(ch: str) -> str:
    # strip diacritics except the tilde of ñ
    if ch in "ñÑ":
        return ch
    decomposed = unicodedata.normalize("NFD", ch)
    base = "".join(c for c in decomposed if not unicodedata.combining(c))
    return unicodedata.normalize("NFC", base) or ch


def normalize_word(surface: str) -> str:
    """Lowercase *surface*, keep letters and hyphens between letters."""
    kept = []
    for ch in surface.lower():
        if ch.isalpha():
            kept.append(_fold_char(ch))
        elif ch == "-":
            kept.append("-")
    text = "".join(kept)
    text = re.sub(r"-+", "-", text)
    return text.strip("-")


def make_token(surface: str) -> Token:
    normalized = normalize_word(surface)
    return Token(surface, normalized, bool(normalized))


def _strip_edges(chunk: str) -> tuple[str, str, str]:
    start, end = 0, len(chunk)
    while start < end and not chunk[start].isalnum():
        start += 1
    while end > start and not chunk[end - 1].isalnum():
        end -= 1
    return chunk[:start], chunk[start:end], chunk[end:]


def _split_sentences(text: str) -> list[str]:
    pieces = []
    for para in _PARAGRAPH.split(text):
        pos = 0
        for m in _SENTENCE_END.finditer(para):
            pieces.append(para[pos:m.end()])
            pos = m.end()
        pieces.append(para[pos:])
    return pieces


def _segment_sentence(text: str) -> Sentence:
    tokens: list[Token] = []
    marks: list[tuple[str, int]] = []
    pos = 0
    pieces = []
    for m in _CHUNK_SPLIT.finditer(text):
        pieces.append(text[pos:m.start()])
        pieces.append(m.group())
        pos = m.end()
    pieces.append(text[pos:])
    for i, piece in enumerate(pieces):
        if i % 2:
            # separator run: whitespace and phrase delimiters
            marks.extend((ch, len(tokens)) for ch in piece if not ch.isspace())
            continue
        if not piece:
            continue
        lead, core, trail = _strip_edges(piece)
        marks.extend((ch, len(tokens)) for ch in lead)
        if core:
            tokens.append(make_token(core))
        marks.extend((ch, len(tokens)) for ch in trail)
    return Sentence(tuple(tokens), tuple(marks))


def tokenize(text: str, source_id: str = "") -> Document:
    """Split raw text into a :class:`Document`.

    Sentences without any token (stray punctuation, blank paragraphs) are
    dropped. Tokens without letters (numerals, symbols) are kept but flagged
    ``has_letter=False`` so word-based predictors can skip them.
    """
    text = unicodedata.normalize("NFC", text)
    sentences = []
    for raw in _split_sentences(text):
        sent = _segment_sentence(raw)
        if sent.tokens:
            sentences.append(sent)
    return Document(tuple(sentences), source_id)


def render(doc: Document) -> str:
    """Join normalized word forms, one sentence per line."""
    lines = []
    for sent in doc.sentences:
        words = [t.normalized for t in sent.words]
        if words:
            lines.append(" ".join(words) + ".")
    return "\n".join(lines)


def sentence_phrases(sent: Sentence, delimiters=PHRASE_DELIMITERS) -> int:
    word_offsets = [i for i, t in enumerate(sent.tokens) if t.has_letter]
    if not word_offsets:
        return 0
    first, last = word_offsets[0], word_offsets[-1]
    inner = sum(1 for ch, off in sent.marks
                if ch in delimiters and first < off <= last)
    return 1 + inner


def phrase_segments(doc: Document, delimiters=PHRASE_DELIMITERS) -> list[int]:
    """Phrase count per sentence.

    A sentence contributes one phrase plus one for every delimiter that has
    at least one word token on each side of it within the sentence.
    """
    return [sentence_phrases(s, delimiters) for s in doc.sentences]
