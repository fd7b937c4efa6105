"""Regenerate the bundled synthetic Filipino mini-corpora.

Writes ``src/basa/data/corpus/grade{1,2,3}/*.txt`` (10 stories per grade,
the classification corpus) and ``src/basa/data/lm_corpus/L{1,2,3}/*.txt``
(8 stories per level, used only to train the language models). Higher
grades get longer sentences, more clauses, more polysyllabic words and
more loanwords with consonant clusters.

    python tools/make_synthetic_corpus.py
"""

import random
import shutil
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "basa" / "data"

NAMES = ["Ana", "Ben", "Lito", "Mara", "Tomas", "Rosa", "Nena", "Pedro", "Lina", "Dodo"]

NOUNS = {
    1: ["bata", "aso", "pusa", "bola", "bahay", "puno", "ibon", "manok", "isda", "mesa",
        "saging", "gatas", "tubig", "baso", "bato"],
    2: ["halaman", "guro", "libro", "lapis", "bintana", "mangga", "kalabaw", "payong",
        "kuwento", "laruan", "tinapay", "kapatid", "kusina", "bulaklak"],
    3: ["prutas", "plato", "tren", "klase", "trabaho", "programa", "drama", "braso",
        "gripo", "kompyuter", "tsinelas", "tsokolate", "bisikleta", "telebisyon",
        "kuwaderno", "proyekto", "probinsya", "eksperimento", "trak", "grupo"],
}
ADJS = {
    1: ["masaya", "malaki", "maliit", "mabait", "maganda", "mainit"],
    2: ["mabilis", "malinis", "mabango", "matamis", "masarap"],
    3: ["matalino", "masipag", "makulay", "mapagmahal", "maingat", "matiyaga",
        "responsable", "kakaiba"],
}
PERF = {
    1: ["kumain", "uminom", "tumakbo", "natulog", "lumangoy"],
    2: ["naglaro", "bumili", "nagluto", "kinain", "sumulat", "nagbasa"],
    3: ["nagplano", "nagtrabaho", "nagpraktis", "ipinagluto", "nakapagtapos", "nagdrowing"],
}
IMPERF = {
    1: ["kumakain", "tumatakbo"],
    2: ["naglalaro", "bumibili", "nagluluto", "sumusulat"],
    3: ["nagtatrabaho", "nagpaplano", "nagpapraktis", "pinag-aaralan", "nagbabasa"],
}
CONTEMP = {
    1: ["kakain", "iinom"],
    2: ["maglalaro", "bibili", "magluluto", "susulat"],
    3: ["magtatrabaho", "magpaplano", "magpapraktis", "pag-aaralan", "kakakain"],
}
PLACES = {
    1: ["bahay", "parke", "ilog"],
    2: ["paaralan", "palengke", "hardin", "kusina"],
    3: ["silid-aklatan", "eskwelahan", "ospital", "istasyon", "opisina", "plasa"],
}
TIMES = ["umaga", "hapon", "gabi", "Sabado", "Linggo"]


def pool(table, grade):
    out = []
    for g in range(1, grade + 1):
        out.extend(table[g])
    # weight the grade's own vocabulary heavier
    return out + table[grade] * 3


def sentence(rng, grade):
    name = rng.choice(NAMES)
    n1, n2 = rng.choice(pool(NOUNS, grade)), rng.choice(pool(NOUNS, grade))
    adj = rng.choice(pool(ADJS, grade))
    perf = rng.choice(pool(PERF, grade))
    imp = rng.choice(pool(IMPERF, grade))
    con = rng.choice(pool(CONTEMP, grade))
    place = rng.choice(pool(PLACES, grade))
    if grade == 1:
        forms = [
            f"Si {name} ay {adj}.",
            f"Ang {n1} ay {adj}.",
            f"{perf.capitalize()} si {name}.",
            f"May {n1} si {name}.",
            f"{imp.capitalize()} ang {n1}.",
            f"Nasa {place} ang {n1}.",
        ]
    elif grade == 2:
        forms = [
            f"{perf.capitalize()} si {name} ng {n1} sa {place}.",
            f"Ang {adj} na {n1} ay nasa {place}, at {imp} si {name}.",
            f"{con.capitalize()} si {name} ng {n1} mamaya.",
            f"Sabi ni {name}, {adj} ang {n1} sa {place}.",
            f"Si {name} ay {adj} na bata, at may {n1} siya.",
        ]
    else:
        time = rng.choice(TIMES)
        other = rng.choice(NAMES)
        forms = [
            f"Noong {time}, {imp} si {name} sa {place} habang {con} naman si {other} ng {n1}.",
            f"Dahil {adj} ang kanilang {n1}, {perf} si {name} kasama ang {n2} sa {place}.",
            f"Ayon kay {other}, kailangan nilang {con} ng {n1} para sa {n2} ng klase.",
            f"Ang {adj} na {n1} at ang {n2} ay dinala ni {name} sa {place}; {perf} sila hanggang {time}.",
            f"Si {name}, na {adj} at {rng.choice(pool(ADJS, grade))}, ay {imp} ng {n1} para sa {n2}.",
        ]
    return rng.choice(forms)


def story(rng, grade):
    counts = {1: (5, 7), 2: (7, 9), 3: (9, 12)}[grade]
    title = rng.choice(pool(NOUNS, grade)).capitalize()
    body = " ".join(sentence(rng, grade) for _ in range(rng.randint(*counts)))
    return f"Ang {title}\n\n{body}\n"


def write(root, dirname, grade, n, rng):
    target = root / dirname
    target.mkdir(parents=True)
    for i in range(1, n + 1):
        (target / f"{dirname}_{i:02d}.txt").write_text(story(rng, grade), encoding="utf-8")


def main():
    for sub in ("corpus", "lm_corpus"):
        shutil.rmtree(DATA / sub, ignore_errors=True)
    rng = random.Random(20210501)
    for g in (1, 2, 3):
        write(DATA / "corpus", f"grade{g}", g, 10, rng)
    rng = random.Random(19790101)
    for g in (1, 2, 3):
        write(DATA / "lm_corpus", f"L{g}", g, 8, rng)


if __name__ == "__main__":
    main()
