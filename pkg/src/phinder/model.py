"""Shared domain types: the six-concept taxonomy, URLs, email messages,
worms, and explainable detection reports.

Everything here is an immutable value after construction; instances are safe
to share between sessions and threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union


class PhishingConcept(Enum):
    """The closed set of six attack categories the game teaches."""

    MALICIOUS_URL = "malicious_url"
    LOOKALIKE_DOMAIN = "lookalike_domain"
    SUSPICIOUS_SUBJECT = "suspicious_subject"
    DISPLAY_NAME_SPOOF = "display_name_spoof"
    REPLY_TO_SPOOF = "reply_to_spoof"
    HTML_BODY = "html_body"


_CONCEPT_DESCRIPTIONS = {
    PhishingConcept.MALICIOUS_URL: (
        "The web address itself gives the attack away: a raw IP address, a "
        "number-led name, a company name followed by a hyphen, or a link "
        "shortener hiding the real destination."
    ),
    PhishingConcept.LOOKALIKE_DOMAIN: (
        "A character in a familiar domain name has been swapped for a "
        "look-alike, such as an 'o' becoming a '0'."
    ),
    PhishingConcept.SUSPICIOUS_SUBJECT: (
        "The subject line piles on punctuation marks or urgent wording to "
        "rush the reader into acting without thinking."
    ),
    PhishingConcept.DISPLAY_NAME_SPOOF: (
        "The sender shows a familiar name, but the address behind it belongs "
        "to someone else entirely."
    ),
    PhishingConcept.REPLY_TO_SPOOF: (
        "Replies to the message are silently routed to a different address "
        "than the one that wrote to you."
    ),
    PhishingConcept.HTML_BODY: (
        "The message carries HTML markup in its body, a common vehicle for "
        "disguised links."
    ),
}

CONCEPT_ORDER = tuple(PhishingConcept)


def concept_catalog() -> list[tuple[PhishingConcept, str]]:
    """All six concepts in fixed catalog order with one-line descriptions."""
    return [(c, _CONCEPT_DESCRIPTIONS[c]) for c in CONCEPT_ORDER]


def concept_index(concept: PhishingConcept) -> int:
    return CONCEPT_ORDER.index(concept)


def sort_concepts(concepts) -> tuple[PhishingConcept, ...]:
    """Stable catalog-order tuple for sets of concepts."""
    return tuple(sorted(concepts, key=concept_index))


class HostKind(Enum):
    DNS_NAME = "dns_name"
    IPV4_LITERAL = "ipv4_literal"


class GroundTruth(Enum):
    LEGITIMATE = "legitimate"
    PHISHING = "phishing"


@dataclass(frozen=True)
class Url:
    """Structural decomposition of a web address.

    ``raw`` keeps the text exactly as it appeared (scheme may be absent) and
    is excluded from equality; two URLs are equal when their normalized
    components are.
    """

    raw: str = field(compare=False)
    scheme: str
    host: str
    host_kind: HostKind
    port: Optional[int]
    path: str
    query: Optional[str]

    def __post_init__(self) -> None:
        if not self.host:
            raise ValueError("url host must be non-empty")
        if self.port is not None and not 1 <= self.port <= 65535:
            raise ValueError(f"port out of range: {self.port}")

    @property
    def serialized(self) -> str:
        """Canonical form: scheme://host[:port]path[?query]."""
        out = f"{self.scheme}://{self.host}"
        if self.port is not None:
            out += f":{self.port}"
        out += self.path
        if self.query is not None:
            out += f"?{self.query}"
        return out

    @property
    def display_text(self) -> str:
        """What the player sees: the original raw text."""
        return self.raw


@dataclass(frozen=True)
class EmailAddress:
    local: str
    domain: str

    def __post_init__(self) -> None:
        if not self.local or not self.domain:
            raise ValueError("address needs non-empty local and domain parts")
        if "@" in self.local or "@" in self.domain:
            raise ValueError("exactly one '@' may separate local and domain")
        if "." not in self.domain:
            raise ValueError(f"domain needs at least one dot: {self.domain!r}")

    @property
    def address(self) -> str:
        return f"{self.local}@{self.domain}"


@dataclass(frozen=True)
class PlainText:
    text: str


@dataclass(frozen=True)
class HtmlFragment:
    text: str
    embedded_urls: tuple[Url, ...] = ()


BodySegment = Union[PlainText, HtmlFragment]


@dataclass(frozen=True)
class EmailMessage:
    """Parsed message: simplified header block plus segmented body."""

    display_name: Optional[str]
    from_addr: EmailAddress
    reply_to: Optional[EmailAddress]
    to: EmailAddress
    subject: str
    body: tuple[BodySegment, ...]

    def __post_init__(self) -> None:
        if not self.body:
            raise ValueError("email body must be non-empty")

    @property
    def body_text(self) -> str:
        """The body as one string; segment texts concatenate exactly."""
        return "".join(seg.text for seg in self.body)

    @property
    def from_field_text(self) -> str:
        """The From header value as serialized."""
        if self.display_name is not None:
            return f"{self.display_name} <{self.from_addr.address}>"
        return self.from_addr.address

    @property
    def serialized(self) -> str:
        """Canonical header block + blank line + body text."""
        lines = [f"From: {self.from_field_text}", f"To: {self.to.address}"]
        if self.reply_to is not None:
            lines.append(f"Reply-To: {self.reply_to.address}")
        lines.append(f"Subject: {self.subject}")
        return "\n".join(lines) + "\n\n" + self.body_text

    def html_fragments(self) -> list[HtmlFragment]:
        return [seg for seg in self.body if isinstance(seg, HtmlFragment)]


@dataclass(frozen=True)
class UrlChallenge:
    url: Url


@dataclass(frozen=True)
class EmailChallenge:
    message: EmailMessage


WormContent = Union[UrlChallenge, EmailChallenge]


def content_kind(content: WormContent) -> str:
    return "url" if isinstance(content, UrlChallenge) else "email"


def content_display_text(content: WormContent) -> str:
    if isinstance(content, UrlChallenge):
        return content.url.display_text
    return content.message.serialized


@dataclass(frozen=True)
class Provenance:
    corpus_item_id: str
    mutation_seed: int


@dataclass(frozen=True)
class Worm:
    """One game challenge: content, ground-truth label, and the concepts its
    mutations were meant to exercise."""

    id: str
    content: WormContent
    ground_truth: GroundTruth
    intended_concepts: frozenset[PhishingConcept]
    bonus: bool
    provenance: Provenance

    def __post_init__(self) -> None:
        if self.ground_truth is GroundTruth.LEGITIMATE and self.intended_concepts:
            raise ValueError("legitimate worms carry no intended concepts")
        if self.ground_truth is GroundTruth.PHISHING and not self.intended_concepts:
            raise ValueError("phishing worms need at least one intended concept")


@dataclass(frozen=True)
class Span:
    """Byte range inside one named field's serialized text."""

    field_name: str
    byte_start: int
    byte_end: int

    def __post_init__(self) -> None:
        if not 0 <= self.byte_start < self.byte_end:
            raise ValueError(f"empty or inverted span: {self}")


def byte_span(field_name: str, text: str, start: int, end: int) -> Span:
    """Span from character offsets into ``text``, stored as UTF-8 byte offsets."""
    return Span(
        field_name,
        len(text[:start].encode("utf-8")),
        len(text[:end].encode("utf-8")),
    )


def slice_field(text: str, span: Span) -> str:
    """The substring a span points at (byte offsets into the field text)."""
    return text.encode("utf-8")[span.byte_start : span.byte_end].decode("utf-8")


@dataclass(frozen=True)
class Evidence:
    """One triggered rule: which concept, where, and why.

    ``detail`` starts with a machine-readable rule id token followed by a
    human-readable fragment; parameters the advice templates need are quoted
    within it.
    """

    concept: PhishingConcept
    span: Span
    detail: str

    @property
    def rule_id(self) -> str:
        return self.detail.split(" ", 1)[0]


@dataclass(frozen=True)
class DetectionReport:
    verdict: GroundTruth
    findings: tuple[Evidence, ...]
    advice: tuple[str, ...]

    def __post_init__(self) -> None:
        phishing = self.verdict is GroundTruth.PHISHING
        if phishing != bool(self.findings):
            raise ValueError("verdict must be phishing iff findings exist")
        if len(self.advice) != len(self.findings):
            raise ValueError("one advice message per finding")

    def concepts(self) -> frozenset[PhishingConcept]:
        return frozenset(e.concept for e in self.findings)
