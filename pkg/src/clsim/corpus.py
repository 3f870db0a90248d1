"""Aligned cross-language corpora of pre-tokenized, POS-tagged textual units.

Corpora arrive pre-tokenized and pre-tagged with the 12-category universal
tagset; tokenization and tagging are upstream concerns.  The on-disk format
is one aligned pair per line:

    id <TAB> src_lang <TAB> src_tokens <TAB> tgt_lang <TAB> tgt_tokens

where each token field is a space-separated list of ``surface/TAG`` items
(the last ``/`` separates surface from tag, so surfaces may contain ``/``).
Lines starting with ``#`` are comments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CorpusFormatError, UnknownTagError

# The 12 universal POS categories; punctuation is written ".".
TAG_ORDER = ("NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM", "CONJ", "PRT", ".", "X")
UNIVERSAL_TAGS = frozenset(TAG_ORDER)
PUNCT_TAG = "."

GRANULARITIES = ("chunk", "sentence")


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    upos: str

    def __post_init__(self):
        if not self.surface or any(c.isspace() for c in self.surface):
            raise CorpusFormatError(f"token surface must be nonempty and whitespace-free: {self.surface!r}")
        if self.upos not in UNIVERSAL_TAGS:
            raise CorpusFormatError(f"unknown universal tag {self.upos!r} (expected one of {sorted(UNIVERSAL_TAGS)})")

    def __str__(self):
        return f"{self.surface}/{self.upos}"


@dataclass(frozen=True)
class TextualUnit:
    """One chunk or sentence: an ordered sequence of tagged tokens."""

    id: str
    lang: str
    granularity: str
    tokens: tuple[TaggedToken, ...]

    def __post_init__(self):
        if not self.tokens:
            raise CorpusFormatError(f"unit {self.id!r}: token list is empty")
        if self.granularity not in GRANULARITIES:
            raise CorpusFormatError(f"unit {self.id!r}: granularity must be one of {GRANULARITIES}")
        if not self.lang:
            raise CorpusFormatError(f"unit {self.id!r}: empty language code")

    def __len__(self):
        return len(self.tokens)

    @property
    def surfaces(self) -> tuple[str, ...]:
        return tuple(t.surface for t in self.tokens)


@dataclass(frozen=True)
class AlignedPair:
    source: TextualUnit
    target: TextualUnit

    def __post_init__(self):
        if self.source.lang == self.target.lang:
            raise CorpusFormatError(f"pair {self.source.id!r}: source and target share language {self.source.lang!r}")


@dataclass(frozen=True)
class AlignedPairCorpus:
    """An ordered collection of aligned cross-language unit pairs."""

    name: str
    pairs: tuple[AlignedPair, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.pairs:
            raise CorpusFormatError(f"corpus {self.name!r} has no pairs")
        src_lang = self.pairs[0].source.lang
        tgt_lang = self.pairs[0].target.lang
        seen = set()
        for p in self.pairs:
            if p.source.lang != src_lang or p.target.lang != tgt_lang:
                raise CorpusFormatError(
                    f"corpus {self.name!r}: pair {p.source.id!r} has languages "
                    f"({p.source.lang}, {p.target.lang}), expected ({src_lang}, {tgt_lang})"
                )
            if p.source.id in seen:
                raise CorpusFormatError(f"corpus {self.name!r}: duplicate pair id {p.source.id!r}")
            seen.add(p.source.id)

    def __len__(self):
        return len(self.pairs)

    @property
    def source_lang(self) -> str:
        return self.pairs[0].source.lang

    @property
    def target_lang(self) -> str:
        return self.pairs[0].target.lang

    @property
    def source_units(self) -> tuple[TextualUnit, ...]:
        return tuple(p.source for p in self.pairs)

    @property
    def target_units(self) -> tuple[TextualUnit, ...]:
        return tuple(p.target for p in self.pairs)


def _parse_token(item: str, where: str, tag_map: dict[str, str] | None = None) -> TaggedToken:
    sep = item.rfind("/")
    if sep <= 0 or sep == len(item) - 1:
        raise CorpusFormatError(f"{where}: cannot split {item!r} into surface/TAG")
    surface, tag = item[:sep], item[sep + 1 :]
    if tag_map is not None and tag in tag_map:
        tag = tag_map[tag]
    if tag not in UNIVERSAL_TAGS:
        raise CorpusFormatError(f"{where}: unknown POS tag {tag!r} in {item!r}")
    return TaggedToken(surface, tag)


def _parse_unit(tokens_field: str, unit_id: str, lang: str, granularity: str, where: str,
                tag_map: dict[str, str] | None = None) -> TextualUnit:
    items = tokens_field.split(" ") if tokens_field else []
    items = [it for it in items if it]
    if not items:
        raise CorpusFormatError(f"{where}: empty unit")
    return TextualUnit(unit_id, lang, granularity,
                       tuple(_parse_token(it, where, tag_map) for it in items))


def parse_corpus(path, granularity: str, name: str | None = None,
                 tag_map: dict[str, str] | None = None) -> AlignedPairCorpus:
    """Parse an aligned-pairs file into a validated corpus.

    Line k of the file becomes pair k.  Malformed lines raise
    CorpusFormatError naming the file and line number.  When a tag map
    is given, raw tagger tags are rewritten to universal categories
    before validation (tags already universal pass through).
    """
    if granularity not in GRANULARITIES:
        raise CorpusFormatError(f"granularity must be one of {GRANULARITIES}, got {granularity!r}")
    path = str(path)
    if name is None:
        base = path.rsplit("/", 1)[-1]
        name = base.rsplit(".", 1)[0] if "." in base else base
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    except OSError as e:
        raise CorpusFormatError(f"cannot read corpus file {path}: {e}") from e

    pairs = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        where = f"{path}:{line_no}"
        fields = line.split("\t")
        if len(fields) != 5:
            raise CorpusFormatError(f"{where}: expected 5 tab-separated fields, got {len(fields)}")
        pair_id, src_lang, src_tokens, tgt_lang, tgt_tokens = fields
        if not pair_id.strip():
            raise CorpusFormatError(f"{where}: empty pair id")
        source = _parse_unit(src_tokens, pair_id, src_lang, granularity, f"{where} (source)", tag_map)
        target = _parse_unit(tgt_tokens, pair_id, tgt_lang, granularity, f"{where} (target)", tag_map)
        try:
            pairs.append(AlignedPair(source, target))
        except CorpusFormatError as e:
            raise CorpusFormatError(f"{where}: {e}") from e
    if not pairs:
        raise CorpusFormatError(f"{path}: no pairs found")
    return AlignedPairCorpus(name, tuple(pairs))


def serialize_corpus(corpus: AlignedPairCorpus) -> str:
    """Inverse of parse_corpus on valid corpora (comments are not preserved)."""
    lines = []
    for p in corpus.pairs:
        src = " ".join(str(t) for t in p.source.tokens)
        tgt = " ".join(str(t) for t in p.target.tokens)
        lines.append(f"{p.source.id}\t{p.source.lang}\t{src}\t{p.target.lang}\t{tgt}")
    return "\n".join(lines) + "\n"


def write_corpus(corpus: AlignedPairCorpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_corpus(corpus))


def load_tag_mapping(path) -> dict[str, str]:
    """Load a raw-tagset -> universal-tag mapping file (lines: raw <TAB> universal)."""
    mapping = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise CorpusFormatError(f"{path}:{line_no}: expected 'raw<TAB>universal', got {line!r}")
            raw, uni = fields
            if uni not in UNIVERSAL_TAGS:
                raise CorpusFormatError(f"{path}:{line_no}: {uni!r} is not a universal tag")
            mapping[raw] = uni
    return mapping


def normalize_tag(raw: str, mapping: dict[str, str]) -> str:
    """Map a raw tagger-specific tag to its universal category."""
    try:
        return mapping[raw]
    except KeyError:
        raise UnknownTagError(f"raw tag {raw!r} is not covered by the tag mapping") from None
