"""Corpus ingestion: grade-labelled directory trees and manifest files."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

GRADES = (1, 2, 3)
_GRADE_DIR = re.compile(r"^(?:grade)?([0-9]+)$", re.IGNORECASE)


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestRow:
    doc_id: str
    label: int
    path: Path


def grade_of(dirname: str) -> int:
    m = _GRADE_DIR.match(dirname)
    if not m or int(m.group(1)) not in GRADES:
        raise CorpusError(f"unknown grade directory {dirname!r}; "
                          "expected grade1/grade2/grade3 or 1/2/3")
    return int(m.group(1))


def text_files(directory) -> list[Path]:
    """Visible ``*.txt`` files below *directory*, in lexicographic order."""
    directory = Path(directory)
    found = [p for p in directory.rglob("*.txt")
             if p.is_file() and not any(part.startswith(".")
                                        for part in p.relative_to(directory).parts)]
    return sorted(found, key=lambda p: p.relative_to(directory).as_posix())


def ingest(root) -> list[ManifestRow]:
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"corpus directory not found: {root}")
    rows = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith(".")):
        label = grade_of(sub.name)
        for path in text_files(sub):
            rows.append(ManifestRow(path.relative_to(root).as_posix(), label, path))
    if not rows:
        raise CorpusError(f"no text files found under {root}")
    return sorted(rows, key=lambda r: r.doc_id)


def read_text(path) -> str:
    try:
        return Path(path).read_text("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    except OSError as exc:
        raise CorpusError(f"{path}: cannot read ({exc.strerror})") from None


def format_manifest(rows, base_dir) -> str:
    """CSV ``doc_id,label,path``.

    Paths below *base_dir* are written relative to it, anything else as an
    absolute path.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["doc_id", "label", "path"])
    base = Path(base_dir).resolve()
    for row in rows:
        full = Path(row.path).resolve()
        shown = full.relative_to(base) if full.is_relative_to(base) else full
        writer.writerow([row.doc_id, row.label, shown.as_posix()])
    return buf.getvalue()


def read_manifest(path) -> list[ManifestRow]:
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise CorpusError(f"{path}: cannot read manifest ({exc.strerror})") from None
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["doc_id", "label", "path"]:
        raise CorpusError(f"{path}: manifest header must be doc_id,label,path")
    rows = []
    for lineno, rec in enumerate(reader, 2):
        if not rec:
            continue
        if len(rec) != 3:
            raise CorpusError(f"{path}:{lineno}: expected 3 fields")
        doc_id, label, rel = rec
        try:
            label = int(label)
        except ValueError:
            raise CorpusError(f"{path}:{lineno}: label {label!r} is not a grade") from None
        if label not in GRADES:
            raise CorpusError(f"{path}:{lineno}: label {label} outside grades 1-3")
        file = (path.parent / rel)
        if not file.is_file():
            raise CorpusError(f"{path}:{lineno}: missing text file {rel}")
        rows.append(ManifestRow(doc_id, label, file))
    if not rows:
        raise CorpusError(f"{path}: empty manifest")
    return rows


def bundled_corpus() -> Path:
    """Directory of the synthetic grade1/grade2/grade3 mini-corpus."""
    return Path(str(resources.files("basa.data").joinpath("corpus")))


def bundled_lm_corpus(level: str) -> Path:
    return Path(str(resources.files("basa.data").joinpath("lm_corpus", level)))
