"""Review ingestion: aspect-term XML, span alignment, dataset records."""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from enum import Enum

from .conllu import DepTree, Token, make_tree, parse_conllu_blocks
from .errors import (
    AlignmentError,
    CountMismatchError,
    SpanOutOfBoundsError,
    UnknownPolarityError,
    XmlSyntaxError,
)


class PolarityLabel(Enum):
    """Gold sentiment classes; the integer codes are the on-disk format."""

    POSITIVE = 0
    NEGATIVE = 1
    NEUTRAL = 2
    CONFLICT = 3

    @classmethod
    def from_string(cls, name: str) -> "PolarityLabel":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise UnknownPolarityError(f"unknown polarity {name!r}") from None

    @classmethod
    def from_code(cls, code: int) -> "PolarityLabel":
        try:
            return cls(code)
        except ValueError:
            raise UnknownPolarityError(f"unknown polarity code {code!r}") from None

    def __str__(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class AspectTerm:
    """One opinion target inside a sentence; ``start``/``end`` are character
    offsets, end-exclusive."""

    term: str
    polarity: PolarityLabel
    start: int
    end: int


@dataclass(frozen=True)
class SentenceRecord:
    sentence_id: str
    text: str
    terms: tuple[AspectTerm, ...]


@dataclass(frozen=True)
class ReviewInstance:
    """One (sentence, aspect term) classification example.

    ``aspect_span`` is a 1-based inclusive token range [s, e]; sentences with
    several aspect terms yield several instances sharing one tree.
    """

    tree: DepTree
    aspect_span: tuple[int, int]
    label: PolarityLabel
    sentence_id: str = ""
    char_span: tuple[int, int] = (0, 0)
    term: str = ""

    def __post_init__(self) -> None:
        s, e = self.aspect_span
        if not (1 <= s <= e <= self.tree.n):
            raise SpanOutOfBoundsError(
                f"aspect span [{s}, {e}] outside tokens 1..{self.tree.n}")


def parse_semeval_xml(text: str, keep_empty: bool = False) -> list[SentenceRecord]:
    """Extract sentences and their aspect terms from review XML.

    Sentences without aspect terms are dropped unless ``keep_empty`` is set
    (ingestion keeps them long enough to pair against the parse file).
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise XmlSyntaxError(f"bad XML: {exc}") from exc
    records = []
    for sent in root.iter("sentence"):
        sid = sent.get("id", "")
        text_el = sent.find("text")
        sent_text = (text_el.text or "") if text_el is not None else ""
        terms = []
        for term_el in sent.iterfind("aspectTerms/aspectTerm"):
            polarity = PolarityLabel.from_string(term_el.get("polarity", ""))
            try:
                start = int(term_el.get("from", ""))
                end = int(term_el.get("to", ""))
            except ValueError:
                raise SpanOutOfBoundsError(
                    f"sentence {sid!r}: non-integer from/to attributes") from None
            if not (0 <= start < end <= len(sent_text)):
                raise SpanOutOfBoundsError(
                    f"sentence {sid!r}: span [{start}, {end}) outside text "
                    f"of length {len(sent_text)}")
            terms.append(AspectTerm(term=term_el.get("term", ""),
                                    polarity=polarity, start=start, end=end))
        if terms or keep_empty:
            records.append(SentenceRecord(sentence_id=sid, text=sent_text,
                                          terms=tuple(terms)))
    return records


def token_extents(tree: DepTree, text: str) -> list[tuple[int, int]]:
    """Character extent of each token, located left to right in ``text``.

    Only whitespace may separate consecutive tokens; any other gap means the
    tokenization does not match the text and raises :class:`AlignmentError`.
    """
    extents = []
    cursor = 0
    for tok in tree.tokens:
        pos = text.find(tok.form, cursor)
        if pos < 0 or text[cursor:pos].strip():
            raise AlignmentError(
                f"token {tok.index} {tok.form!r} not found after offset {cursor}")
        extents.append((pos, pos + len(tok.form)))
        cursor = pos + len(tok.form)
    return extents


def align_span(tree: DepTree, text: str, start: int, end: int) -> tuple[int, int]:
    """Map character offsets [start, end) to the minimal covering token span.

    Returns a 1-based inclusive (s, e) pair.
    """
    if end <= start:
        raise AlignmentError(f"empty character span [{start}, {end})")
    extents = token_extents(tree, text)
    hits = [i for i, (ts, te) in enumerate(extents, start=1)
            if ts < end and te > start]
    if not hits:
        raise AlignmentError(f"character span [{start}, {end}) covers no token")
    return hits[0], hits[-1]


def build_dataset(xml_text: str, conllu_text: str) -> list[ReviewInstance]:
    """Pair review XML with its parses, positionally, and emit instances.

    The parse file must contain one sentence block per XML sentence (aspect
    filtering happens after pairing). When a block carries a ``# sent_id``
    comment it is cross-checked against the XML sentence id.
    """
    records = parse_semeval_xml(xml_text, keep_empty=True)
    blocks = parse_conllu_blocks(conllu_text)
    if len(records) != len(blocks):
        raise CountMismatchError(
            f"{len(records)} XML sentences vs {len(blocks)} parsed sentences")
    instances = []
    for rec, (tree, meta) in zip(records, blocks):
        meta_id = meta.get("sent_id", "")
        if meta_id and rec.sentence_id and meta_id != rec.sentence_id:
            raise CountMismatchError(
                f"sentence id mismatch: XML {rec.sentence_id!r} vs parse {meta_id!r}")
        for term in rec.terms:
            s, e = align_span(tree, rec.text, term.start, term.end)
            instances.append(ReviewInstance(
                tree=tree, aspect_span=(s, e), label=term.polarity,
                sentence_id=rec.sentence_id, char_span=(term.start, term.end),
                term=term.term))
    return instances


def class_counts(instances: list[ReviewInstance]) -> dict[PolarityLabel, int]:
    counts = {label: 0 for label in PolarityLabel}
    for inst in instances:
        counts[inst.label] += 1
    return counts


# Line-delimited dataset records. Schema per line:
#   sentence_id, tokens, heads, deprels, aspect_span [s, e] (1-based inclusive),
#   label (integer code), char_span [from, to), term.

def instance_to_record(inst: ReviewInstance) -> dict:
    return {
        "sentence_id": inst.sentence_id,
        "tokens": inst.tree.forms(),
        "heads": inst.tree.heads(),
        "deprels": inst.tree.deprels(),
        "aspect_span": list(inst.aspect_span),
        "label": inst.label.value,
        "char_span": list(inst.char_span),
        "term": inst.term,
    }


def instance_from_record(record: dict) -> ReviewInstance:
    tokens = [Token(index=i + 1, form=form, head=head, deprel=rel)
              for i, (form, head, rel) in enumerate(
                  zip(record["tokens"], record["heads"], record["deprels"]))]
    span = record["aspect_span"]
    return ReviewInstance(
        tree=make_tree(tokens),
        aspect_span=(int(span[0]), int(span[1])),
        label=PolarityLabel.from_code(int(record["label"])),
        sentence_id=record.get("sentence_id", ""),
        char_span=tuple(record.get("char_span", (0, 0))),
        term=record.get("term", ""),
    )


def save_dataset(instances: list[ReviewInstance], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(instance_to_record(inst), ensure_ascii=False))
            fh.write("\n")


def load_dataset(path: str) -> list[ReviewInstance]:
    instances = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                instances.append(instance_from_record(json.loads(line)))
    return instances
