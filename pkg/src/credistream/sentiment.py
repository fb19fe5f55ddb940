"""Sentiment classification with trigger-word overrides and topic filtering.

External sentiment and translation services are interfaces here.  The
shipped default provider is a five-grade word-lexicon classifier, and the
neutral-override step reclassifies provider-neutral text whenever a trigger
word appears (negative triggers win over positive ones).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Protocol

from .model import SentimentLabel, word_tokens

#: The six fixed topic section names.
TOPIC_SECTIONS = (
    "NATO",
    "EU",
    "FightAndAttack",
    "Civilian",
    "Peace",
    "RefugeeCrisis",
)

#: Default trigger words for the neutral-override step.
DEFAULT_NEGATIVE_TRIGGERS = frozenset(
    {"silly", "death", "fuck", "kill", "bad", "lose", "fucking", "block", "incident", "protest"}
)
DEFAULT_POSITIVE_TRIGGERS = frozenset(
    {"great", "champion", "good", "inspiring", "thank"}
)

_GRADE_CODES = {
    "vneg": SentimentLabel.VERY_NEGATIVE,
    "neg": SentimentLabel.NEGATIVE,
    "neu": SentimentLabel.NEUTRAL,
    "pos": SentimentLabel.POSITIVE,
    "vpos": SentimentLabel.VERY_POSITIVE,
}

_POLARITY = {
    SentimentLabel.VERY_NEGATIVE: -2,
    SentimentLabel.NEGATIVE: -1,
    SentimentLabel.NEUTRAL: 0,
    SentimentLabel.POSITIVE: 1,
    SentimentLabel.VERY_POSITIVE: 2,
}


class SentimentProviderError(RuntimeError):
    """A sentiment provider failed; distinct from a Neutral result."""


class UnknownLanguageError(ValueError):
    """No keyword list exists for the requested language."""


class SentimentProvider(Protocol):
    def classify(self, text: str) -> SentimentLabel:
        """Return NEGATIVE, NEUTRAL or POSITIVE for a whole text."""
        ...


class Translator(Protocol):
    def translate(self, text: str, from_language: str, to_language: str) -> str: ...


@dataclass(frozen=True)
class TriggerLexicon:
    negative_triggers: frozenset[str] = DEFAULT_NEGATIVE_TRIGGERS
    positive_triggers: frozenset[str] = DEFAULT_POSITIVE_TRIGGERS

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "negative_triggers", frozenset(w.lower() for w in self.negative_triggers)
        )
        object.__setattr__(
            self, "positive_triggers", frozenset(w.lower() for w in self.positive_triggers)
        )
        if self.negative_triggers & self.positive_triggers:
            raise ValueError("trigger sets must be disjoint")


DEFAULT_TRIGGERS = TriggerLexicon()


# ---------------------------------------------------------------------------
# Five-grade word lexicon
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WordLexicon:
    """Case-insensitive token -> five-grade label lookup."""

    entries: Mapping[str, SentimentLabel] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "entries", {word.lower(): label for word, label in self.entries.items()}
        )

    def label(self, token: str) -> SentimentLabel:
        return self.entries.get(token.lower(), SentimentLabel.NEUTRAL)


def load_word_lexicon(path: str | Path) -> WordLexicon:
    """Read a ``word<TAB>grade`` file, grades in {vneg,neg,neu,pos,vpos}."""
    entries: dict[str, SentimentLabel] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{line_no}: expected word<TAB>grade")
        word, grade = parts
        if grade not in _GRADE_CODES:
            raise ValueError(f"{path}:{line_no}: unknown grade {grade!r}")
        entries[word] = _GRADE_CODES[grade]
    return WordLexicon(entries)


def word_sentiment(token: str, lexicon: WordLexicon) -> SentimentLabel:
    """Five-grade label for one token; NEUTRAL when absent from the lexicon."""
    return lexicon.label(token)


class LexiconSentimentProvider:
    """Text-level three-grade provider backed by a five-grade word lexicon.

    Sums signed word polarities (vneg -2 .. vpos +2); the sign of the total
    picks the label, zero is neutral.
    """

    def __init__(self, lexicon: WordLexicon):
        self._lexicon = lexicon

    def classify(self, text: str) -> SentimentLabel:
        total = sum(_POLARITY[self._lexicon.label(tok)] for tok in word_tokens(text))
        if total > 0:
            return SentimentLabel.POSITIVE
        if total < 0:
            return SentimentLabel.NEGATIVE
        return SentimentLabel.NEUTRAL


def classify_text(
    text: str,
    provider: SentimentProvider,
    lexicon: TriggerLexicon = DEFAULT_TRIGGERS,
) -> SentimentLabel:
    """Provider label with the neutral-override: a Neutral result is
    reclassified Negative/Positive when trigger words are present (negative
    triggers take precedence).  Non-neutral provider labels pass through."""
    label = provider.classify(text)
    if label not in (SentimentLabel.NEGATIVE, SentimentLabel.NEUTRAL, SentimentLabel.POSITIVE):
        raise SentimentProviderError(f"provider returned a non-text-level label: {label}")
    if label is not SentimentLabel.NEUTRAL:
        return label
    tokens = {tok.lower() for tok in word_tokens(text)}
    if tokens & lexicon.negative_triggers:
        return SentimentLabel.NEGATIVE
    if tokens & lexicon.positive_triggers:
        return SentimentLabel.POSITIVE
    return SentimentLabel.NEUTRAL


# ---------------------------------------------------------------------------
# Topic keyword lists
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TopicKeywordList:
    """Per-language keyword sets for the six fixed sections."""

    sections: Mapping[str, Mapping[str, frozenset[str]]]  # language -> section -> words

    def __post_init__(self) -> None:
        normalized: dict[str, dict[str, frozenset[str]]] = {}
        for language, per_section in self.sections.items():
            missing = set(TOPIC_SECTIONS) - set(per_section)
            if missing:
                raise ValueError(
                    f"language {language!r} is missing sections: {sorted(missing)}"
                )
            unknown = set(per_section) - set(TOPIC_SECTIONS)
            if unknown:
                raise ValueError(f"unknown sections for {language!r}: {sorted(unknown)}")
            normalized[language] = {
                section: frozenset(w.lower() for w in words)
                for section, words in per_section.items()
            }
        object.__setattr__(self, "sections", normalized)

    @property
    def languages(self) -> frozenset[str]:
        return frozenset(self.sections)


def load_topics(path: str | Path) -> TopicKeywordList:
    """Read a ``section<TAB>language<TAB>word`` file."""
    sections: dict[str, dict[str, set[str]]] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{path}:{line_no}: expected section<TAB>language<TAB>word")
        section, language, word = parts
        if section not in TOPIC_SECTIONS:
            raise ValueError(f"{path}:{line_no}: unknown section {section!r}")
        sections.setdefault(language, {name: set() for name in TOPIC_SECTIONS})
        sections[language][section].add(word)
    return TopicKeywordList(
        {lang: {sec: frozenset(words) for sec, words in per.items()} for lang, per in sections.items()}
    )


def topic_filter(text: str, topics: TopicKeywordList, language: str) -> set[str]:
    """Section names whose keywords intersect the text's tokens.

    Whole-token, case-insensitive matching, no stemming.
    """
    if language not in topics.sections:
        raise UnknownLanguageError(f"no keyword list for language {language!r}")
    tokens = {tok.lower() for tok in word_tokens(text)}
    return {
        section for section, words in topics.sections[language].items() if tokens & words
    }


# ---------------------------------------------------------------------------
# Translation
# ---------------------------------------------------------------------------


class IdentityTranslator:
    def translate(self, text: str, from_language: str, to_language: str) -> str:
        return text


def translate(text: str, from_language: str, to_language: str, translator: Translator) -> str:
    """Delegate to the pluggable translator; same-language calls short-circuit."""
    if from_language == to_language:
        return text
    return translator.translate(text, from_language, to_language)


def default_word_lexicon() -> WordLexicon:
    """The lexicon shipped with the package."""
    return load_word_lexicon(Path(__file__).parent / "data" / "sentiment_lexicon_en.tsv")


def default_topics() -> TopicKeywordList:
    """The sample topic keyword list shipped with the package."""
    return load_topics(Path(__file__).parent / "data" / "topics_sample.tsv")
