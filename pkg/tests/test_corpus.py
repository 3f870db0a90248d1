"""Corpus parsing, validation, and round-trips."""

import pytest

from clsim import (
    AlignedPair,
    AlignedPairCorpus,
    CorpusFormatError,
    TaggedToken,
    TextualUnit,
    UnknownTagError,
    load_tag_mapping,
    normalize_tag,
    parse_corpus,
    serialize_corpus,
    write_corpus,
)
from clsim.corpus import TAG_ORDER, UNIVERSAL_TAGS

from conftest import make_corpus, make_unit

GOOD_LINE = "p0\ten\tthe/DET cat/NOUN sleeps/VERB ./.\tfr\tle/DET chat/NOUN dort/VERB ./.\n"


def write(tmp_path, text, name="corpus.tsv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_tag_order_is_the_12_tag_set():
    assert len(TAG_ORDER) == 12
    assert set(TAG_ORDER) == UNIVERSAL_TAGS
    assert "." in UNIVERSAL_TAGS


def test_tagged_token_validation():
    TaggedToken("chat", "NOUN")
    with pytest.raises(CorpusFormatError):
        TaggedToken("", "NOUN")
    with pytest.raises(CorpusFormatError):
        TaggedToken("two words", "NOUN")
    with pytest.raises(CorpusFormatError):
        TaggedToken("chat", "NN")


def test_unit_validation():
    with pytest.raises(CorpusFormatError):
        TextualUnit("u", "en", "chunk", ())
    with pytest.raises(CorpusFormatError):
        make_unit("u", "en", ["cat"], granularity="paragraph")


def test_pair_rejects_same_language():
    a = make_unit("u", "en", ["cat"])
    b = make_unit("u", "en", ["dog"])
    with pytest.raises(CorpusFormatError):
        AlignedPair(a, b)


def test_corpus_rejects_mixed_language_pairs():
    p0 = AlignedPair(make_unit("a", "en", ["cat"]), make_unit("a", "fr", ["chat"]))
    p1 = AlignedPair(make_unit("b", "en", ["dog"]), make_unit("b", "de", ["hund"]))
    with pytest.raises(CorpusFormatError):
        AlignedPairCorpus("c", (p0, p1))


def test_corpus_rejects_duplicate_ids():
    p0 = AlignedPair(make_unit("a", "en", ["cat"]), make_unit("a", "fr", ["chat"]))
    p1 = AlignedPair(make_unit("a", "en", ["dog"]), make_unit("a", "fr", ["chien"]))
    with pytest.raises(CorpusFormatError):
        AlignedPairCorpus("c", (p0, p1))


def test_parse_basic(tmp_path):
    path = write(tmp_path, "# comment\n" + GOOD_LINE)
    corpus = parse_corpus(path, "chunk")
    assert corpus.name == "corpus"
    assert len(corpus) == 1
    assert corpus.source_lang == "en"
    assert corpus.target_lang == "fr"
    assert corpus.pairs[0].source.surfaces == ("the", "cat", "sleeps", ".")
    assert corpus.pairs[0].target.tokens[1].upos == "NOUN"


def test_parse_surface_may_contain_slash(tmp_path):
    line = "p0\ten\tkm/h/NOUN\tfr\tkm/h/NOUN\n"
    corpus = parse_corpus(write(tmp_path, line), "chunk")
    assert corpus.pairs[0].source.tokens[0].surface == "km/h"


@pytest.mark.parametrize("bad, fragment", [
    ("p0\ten\tcat/NOUN\tfr\n", "5 tab-separated fields"),
    ("p0\ten\tcat/NOUN\tfr\tchat/NN\n", "unknown POS tag"),
    ("p0\ten\tcatNOUN\tfr\tchat/NOUN\n", "surface/TAG"),
    ("p0\ten\t\tfr\tchat/NOUN\n", "empty unit"),
    ("\ten\tcat/NOUN\tfr\tchat/NOUN\n", "empty pair id"),
])
def test_parse_errors_name_file_and_line(tmp_path, bad, fragment):
    path = write(tmp_path, bad)
    with pytest.raises(CorpusFormatError) as err:
        parse_corpus(path, "chunk")
    assert str(path) in str(err.value)
    assert ":1" in str(err.value)
    assert fragment in str(err.value)


def test_parse_empty_file_errors(tmp_path):
    with pytest.raises(CorpusFormatError, match="no pairs"):
        parse_corpus(write(tmp_path, "# nothing here\n"), "chunk")


def test_parse_bad_granularity(tmp_path):
    with pytest.raises(CorpusFormatError, match="granularity"):
        parse_corpus(write(tmp_path, GOOD_LINE), "paragraph")


def test_round_trip(tmp_path):
    corpus = make_corpus(n_pairs=5, seed=3)
    path = tmp_path / "out.tsv"
    write_corpus(corpus, path)
    again = parse_corpus(path, "chunk", name=corpus.name)
    assert again == corpus
    assert serialize_corpus(again) == serialize_corpus(corpus)


def test_tag_mapping(tmp_path):
    map_path = write(tmp_path, "NOM\tNOUN\nVER\tVERB\nSENT\t.\n", "tags.tsv")
    mapping = load_tag_mapping(map_path)
    assert normalize_tag("NOM", mapping) == "NOUN"
    with pytest.raises(UnknownTagError):
        normalize_tag("ABR", mapping)

    line = "p0\ten\tcat/NOUN\tfr\tchat/NOM ./SENT\n"
    corpus = parse_corpus(write(tmp_path, line), "chunk", tag_map=mapping)
    assert [t.upos for t in corpus.pairs[0].target.tokens] == ["NOUN", "."]


def test_tag_mapping_rejects_bad_universal(tmp_path):
    path = write(tmp_path, "NOM\tNOPE\n", "tags.tsv")
    with pytest.raises(CorpusFormatError):
        load_tag_mapping(path)


def test_unmapped_raw_tag_still_fails_parse(tmp_path):
    mapping = {"NOM": "NOUN"}
    line = "p0\ten\tcat/NOUN\tfr\tchat/XYZ\n"
    with pytest.raises(CorpusFormatError, match="XYZ"):
        parse_corpus(write(tmp_path, line), "chunk", tag_map=mapping)
