"""Parsers for raw URL strings and raw email text.

The email grammar is a deliberate subset of real-world mail: one header block
of ``Name: value`` lines (no folding), a single blank line, then the body.
Recognized headers are From, To, Reply-To and Subject; anything else is
accepted and ignored. The URL grammar has no userinfo or IPv6 — an ``@`` is
treated as an ordinary host character, which is exactly how look-alike hosts
such as ``p@ypal.com`` read to a human.

Both parsers track source offsets so detection evidence can point at exact
characters.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .model import (
    BodySegment,
    EmailAddress,
    EmailMessage,
    HostKind,
    HtmlFragment,
    PlainText,
    Url,
)


class DiagnosticKind(Enum):
    MALFORMED_URL = "malformed_url"
    MISSING_HEADER = "missing_header"
    BAD_ADDRESS = "bad_address"
    EMPTY_BODY = "empty_body"


@dataclass(frozen=True)
class ParseDiagnostic:
    kind: DiagnosticKind
    position: int
    message: str


class ParseError(ValueError):
    """Raised on unparsable input; carries a :class:`ParseDiagnostic`."""

    def __init__(self, kind: DiagnosticKind, position: int, message: str):
        super().__init__(f"{kind.value} at offset {position}: {message}")
        self.diagnostic = ParseDiagnostic(kind, position, message)
        self.kind = kind
        self.position = position


_SCHEME_RE = re.compile(r"^([A-Za-z][A-Za-z0-9+.-]*)://")
_HOST_CHARS_RE = re.compile(r"^[a-z0-9._@-]+$")
_IPV4_RE = re.compile(r"^\d{1,3}\.\d{1,3}\.\d{1,3}\.\d{1,3}$")


def classify_host(host: str) -> HostKind:
    """IPv4 literal iff four dot-separated decimal octets, each 0–255."""
    if _IPV4_RE.match(host) and all(int(o) <= 255 for o in host.split(".")):
        return HostKind.IPV4_LITERAL
    return HostKind.DNS_NAME


def parse_url(raw: str) -> Url:
    """Parse a URL, defaulting the scheme to ``http`` for bare hosts."""
    raw = raw.strip()
    if not raw:
        raise ParseError(DiagnosticKind.MALFORMED_URL, 0, "empty input")

    m = _SCHEME_RE.match(raw)
    if m:
        scheme = m.group(1).lower()
        rest_at = m.end()
    else:
        scheme = "http"
        rest_at = 0
    rest = raw[rest_at:]

    # host[:port] runs to the first '/' or '?'
    cut = len(rest)
    for ch in "/?":
        idx = rest.find(ch)
        if idx != -1:
            cut = min(cut, idx)
    hostport, tail = rest[:cut], rest[cut:]

    host, port = hostport, None
    if ":" in hostport:
        host, _, port_text = hostport.rpartition(":")
        if not port_text.isdigit():
            raise ParseError(
                DiagnosticKind.MALFORMED_URL,
                rest_at + len(host) + 1,
                f"bad port {port_text!r}",
            )
        port = int(port_text)
        if not 1 <= port <= 65535:
            raise ParseError(
                DiagnosticKind.MALFORMED_URL,
                rest_at + len(host) + 1,
                f"port out of range: {port}",
            )

    host = host.lower()
    if not host:
        raise ParseError(DiagnosticKind.MALFORMED_URL, rest_at, "empty host")
    if not _HOST_CHARS_RE.match(host):
        raise ParseError(
            DiagnosticKind.MALFORMED_URL, rest_at, f"bad host characters in {host!r}"
        )

    if tail.startswith("?"):
        path, query = "/", tail[1:]
    elif "?" in tail:
        path, _, query = tail.partition("?")
    else:
        path, query = tail or "/", None

    return Url(
        raw=raw,
        scheme=scheme,
        host=host,
        host_kind=classify_host(host),
        port=port,
        path=path,
        query=query,
    )


# --- registrable domains ---------------------------------------------------

def _load_two_level_suffixes() -> frozenset[str]:
    text = (
        resources.files("phinder.data")
        .joinpath("two_level_suffixes.txt")
        .read_text("utf-8")
    )
    return frozenset(
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


TWO_LEVEL_SUFFIXES = _load_two_level_suffixes()


def registrable_domain(host: str) -> str:
    """Suffix-plus-one-label portion of a DNS hostname.

    Keeps the last two labels, or three when the final two form a bundled
    two-level suffix (``bank.com.au``). Single-label hosts return themselves.
    """
    labels = host.lower().split(".")
    if len(labels) <= 2:
        return host.lower()
    if ".".join(labels[-2:]) in TWO_LEVEL_SUFFIXES:
        return ".".join(labels[-3:])
    return ".".join(labels[-2:])


# --- email body segmentation -------------------------------------------------

_VOID_TAGS = frozenset({"br", "hr", "img", "input", "meta", "link"})
_OPEN_TAG_RE = re.compile(r"<([A-Za-z][A-Za-z0-9]*)((?:\s[^<>]*)?)(/?)>")
_HREF_RE = re.compile(r"""href\s*=\s*(?:"([^"]*)"|'([^']*)')""", re.IGNORECASE)
# RFC-style plain-text link reference: <https://example.org/x>
_ANGLE_LINK_RE = re.compile(r"<(https?://[^\s<>]+)>")


def split_body(text: str) -> tuple[BodySegment, ...]:
    """Split body text into plain/HTML segments; texts concatenate exactly.

    An HTML fragment starts at a well-formed opening tag and runs through its
    matching close (or is the void/self-closing tag itself). Tag-like spans
    without a close, and angle-bracket link references, stay plain text.
    """
    segments: list[BodySegment] = []
    plain_start = 0
    pos = 0
    while True:
        m = _OPEN_TAG_RE.search(text, pos)
        if m is None:
            break
        name = m.group(1).lower()
        if m.group(3) == "/" or name in _VOID_TAGS:
            frag_start, frag_end = m.start(), m.end()
        else:
            close = re.compile(rf"</{re.escape(name)}\s*>", re.IGNORECASE)
            cm = close.search(text, m.end())
            if cm is None:
                pos = m.start() + 1
                continue
            frag_start, frag_end = m.start(), cm.end()
        if frag_start > plain_start:
            segments.append(PlainText(text[plain_start:frag_start]))
        frag_text = text[frag_start:frag_end]
        segments.append(HtmlFragment(frag_text, _extract_hrefs(frag_text)))
        plain_start = pos = frag_end
    if plain_start < len(text):
        segments.append(PlainText(text[plain_start:]))
    return tuple(segments)


def href_links(fragment_text: str) -> list[tuple[str, int, int]]:
    """href attribute values in an HTML fragment: (url text, start, end)."""
    out = []
    for m in _HREF_RE.finditer(fragment_text):
        group = 1 if m.group(1) is not None else 2
        out.append((m.group(group), m.start(group), m.end(group)))
    return out


def _extract_hrefs(fragment_text: str) -> tuple[Url, ...]:
    urls = []
    for target, _, _ in href_links(fragment_text):
        try:
            urls.append(parse_url(target))
        except ParseError:
            continue  # unanalyzable href; nothing to classify
    return tuple(urls)


def angle_bracket_links(text: str) -> list[tuple[str, int, int]]:
    """``<scheme://...>`` references in plain text: (url text, start, end)."""
    return [(m.group(1), m.start(1), m.end(1)) for m in _ANGLE_LINK_RE.finditer(text)]


# --- email parsing -----------------------------------------------------------

_HEADER_LINE_RE = re.compile(r"^([A-Za-z][A-Za-z0-9-]*):[ \t]?(.*)$")
_ANGLE_ADDR_RE = re.compile(r"^(.*?)<([^<>]*)>\s*$")


def _parse_address(value: str, at: int) -> EmailAddress:
    value = value.strip()
    local, sep, domain = value.partition("@")
    if not sep or not local or not domain or "@" in domain:
        raise ParseError(
            DiagnosticKind.BAD_ADDRESS, at, f"not a local@domain address: {value!r}"
        )
    if "." not in domain:
        raise ParseError(
            DiagnosticKind.BAD_ADDRESS, at, f"domain has no dot: {domain!r}"
        )
    return EmailAddress(local=local, domain=domain.lower())


def _parse_from_value(value: str, at: int) -> tuple[str | None, EmailAddress]:
    m = _ANGLE_ADDR_RE.match(value.strip())
    if m:
        display = m.group(1).strip().strip('"').strip()
        addr = _parse_address(m.group(2), at)
        return (display or None), addr
    return None, _parse_address(value, at)


def parse_email_with_offsets(raw: str) -> tuple[EmailMessage, dict[str, tuple[int, int]]]:
    """Parse and also report each field's (start, end) source offsets."""
    header_part, sep, body = raw.partition("\n\n")
    if not sep:
        raise ParseError(
            DiagnosticKind.EMPTY_BODY, len(raw), "no blank line before body"
        )

    headers: dict[str, tuple[str, int]] = {}
    offsets: dict[str, tuple[int, int]] = {}
    line_at = 0
    for line in header_part.split("\n"):
        m = _HEADER_LINE_RE.match(line)
        if m:
            name = m.group(1).lower()
            value = m.group(2)
            start = line_at + m.start(2) + (len(value) - len(value.lstrip()))
            end = line_at + m.start(2) + len(value.rstrip())
            if name not in headers and start < end:  # first occurrence wins
                headers[name] = (value.strip(), start)
                offsets[name] = (start, end)
        line_at += len(line) + 1

    for required in ("from", "to", "subject"):
        if required not in headers:
            raise ParseError(
                DiagnosticKind.MISSING_HEADER,
                len(header_part),
                f"missing {required.title()} header",
            )

    from_value, from_at = headers["from"]
    display_name, from_addr = _parse_from_value(from_value, from_at)
    to_value, to_at = headers["to"]
    to_addr = _parse_address(to_value, to_at)
    reply_to = None
    if "reply-to" in headers:
        rt_value, rt_at = headers["reply-to"]
        reply_to = _parse_address(rt_value, rt_at)

    if not body.strip():
        raise ParseError(DiagnosticKind.EMPTY_BODY, len(raw), "body is empty")

    body_at = len(header_part) + 2
    offsets["body"] = (body_at, len(raw))

    subject, _ = headers["subject"]
    message = EmailMessage(
        display_name=display_name,
        from_addr=from_addr,
        reply_to=reply_to,
        to=to_addr,
        subject=subject.strip(),
        body=split_body(body),
    )
    return message, offsets


def parse_email(raw: str) -> EmailMessage:
    message, _ = parse_email_with_offsets(raw)
    return message
