import hashlib
from importlib import resources
from pathlib import Path

import pytest

from basa.tagger import (ASPECTS, FOCI, UNDETERMINED, NotAVerbError, RuleFileError, RuleTable,
                         VerbAnalysis, analyze_verb, default_rules, has_reduplication, tag,
                         tag_word)
from basa.textcore import make_token, tokenize


@pytest.mark.parametrize("word,expected", [
    ("ang", "function"),
    ("kumain", "verb"),
    ("masaya", "adjective"),
    ("dapat", "verb"),
    ("ngayon", "adverb"),
    ("bata", "noun"),
    ("pagkain", "noun"),
    ("matutulog", "verb"),
])
def test_tag_word(word, expected):
    assert tag_word(word, default_rules()) == expected


@pytest.mark.parametrize("word,focus,aspect", [
    ("kumain", "actor", "perfective"),
    ("kumakain", "actor", "imperfective"),
    ("kakain", UNDETERMINED, "contemplative"),
    ("dapat", UNDETERMINED, "auxiliary"),
    ("kinain", "object", "perfective"),
    ("kinakain", "object", "imperfective"),
    ("magluto", "actor", "infinitive"),
    ("nagluto", "actor", "perfective"),
    ("nagluluto", "actor", "imperfective"),
    ("magluluto", "actor", "contemplative"),
    ("kakakain", UNDETERMINED, "recent_past"),
    ("nakakain", "actor", "participle"),
    ("ipanghiwa", "instrumental", UNDETERMINED),
    ("ikasaya", "referential", UNDETERMINED),
    ("ibili", "benefactive", UNDETERMINED),
    ("basahin", "object", UNDETERMINED),
    ("sulatan", "locative", UNDETERMINED),
])
def test_analyze_verb(word, focus, aspect):
    assert analyze_verb(make_token(word)) == VerbAnalysis(focus, aspect)


def test_analyze_non_verb_raises():
    with pytest.raises(NotAVerbError):
        analyze_verb(make_token("bata"))


def test_vowel_suffix_needs_consonant_final_stem():
    # -in after a vowel would be the -hin variant
    assert tag_word("kakain", default_rules()) == "verb"
    assert analyze_verb(make_token("kakain")).focus == UNDETERMINED


def test_reduplication():
    assert has_reduplication("kakain")
    assert has_reduplication("aalis")
    assert has_reduplication("ngingiti")
    assert not has_reduplication("kain")
    assert not has_reduplication("oo")


def test_tag_document_one_per_word():
    doc = tokenize("Ang bata ay masaya, 3 beses.")
    tags = tag(doc)
    assert len(tags) == len(doc.words) == 5
    assert tags[:4] == ["function", "noun", "function", "adjective"]


def test_empty_rule_table_tags_nouns():
    empty = RuleTable.parse("")
    doc = tokenize("Ang bata ay kumain ng masarap na pagkain.")
    assert set(tag(doc, empty)) == {"noun"}


def test_rule_table_precedence_and_order():
    rules = RuleTable.parse("""
[function]
ang
[focus]
-um-  actor
[aspect]
-um-+R imperfective
-um- perfective
""")
    assert tag_word("ang", rules) == "function"
    assert analyze_verb(make_token("kumakain"), rules) == VerbAnalysis("actor", "imperfective")
    assert analyze_verb(make_token("kumain"), rules) == VerbAnalysis("actor", "perfective")
    assert tag_word("masaya", rules) == "noun"


def test_longest_match_within_line():
    rules = RuleTable.parse("[focus]\nipan- | ipang- instrumental\n")
    rule = rules.focus_rules[0]
    assert rule.match("ipanghiwa").source == "ipang-"


@pytest.mark.parametrize("text", [
    "[bogus]\nx\n",
    "ang\n",
    "[focus]\n-um- sideways\n",
    "[focus]\num actor\n",
    "[aspect]\n@nouns auxiliary\n",
])
def test_rule_file_errors(text):
    with pytest.raises(RuleFileError):
        RuleTable.parse(text)


def test_default_lexicon_sizes():
    rules = default_rules()
    assert 140 <= len(rules.function_lexicon) <= 200
    assert 25 <= len(rules.adverb_lexicon) <= 40
    assert len(rules.auxiliary_lexicon) == 10


def test_every_rule_label_known():
    rules = default_rules()
    assert {r.label for r in rules.focus_rules} <= set(FOCI)
    assert {r.label for r in rules.aspect_rules} <= set(ASPECTS)


def test_default_rule_file_hash_documented():
    text = resources.files("basa.data").joinpath("rules.txt").read_bytes()
    digest = hashlib.sha256(text).hexdigest()
    readme = (Path(__file__).parent.parent / "README.md").read_text("utf-8")
    assert digest in readme
    assert default_rules().digest == digest


def test_affix_rule_always_supplies_a_dimension():
    rules = default_rules()
    for word in ["kumain", "nagluto", "kakain", "ipinagluto", "sulatan", "inalis", "umalis"]:
        if tag_word(word, rules) == "verb":
            a = analyze_verb(make_token(word), rules)
            assert (a.focus, a.aspect) != (UNDETERMINED, UNDETERMINED)
