"""Explainable rule engine: maps worm content to a detection report.

Every rule emits :class:`Evidence` whose ``detail`` begins with a stable rule
id; ``advice_for`` turns each piece of evidence into one Shifu message. The
engine is pure: identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .model import (
    DetectionReport,
    EmailChallenge,
    EmailMessage,
    Evidence,
    GroundTruth,
    HostKind,
    HtmlFragment,
    PhishingConcept,
    PlainText,
    Url,
    UrlChallenge,
    WormContent,
    byte_span,
    concept_index,
)
from .parsing import (
    ParseError,
    angle_bracket_links,
    href_links,
    parse_url,
    registrable_domain,
)

# Rule ids (first token of Evidence.detail).
RULE_URL_IP = "url_ip_literal"
RULE_URL_LEADING_DIGIT = "url_leading_number"
RULE_URL_BRAND_HYPHEN = "url_brand_hyphen"
RULE_URL_SHORTENER = "url_shortener"
RULE_LOOKALIKE = "lookalike_substitution"
RULE_SUBJECT_PUNCT = "subject_punctuation"
RULE_SUBJECT_KEYWORD = "subject_keyword"
RULE_DISPLAY_SPOOF = "display_name_spoof"
RULE_REPLY_TO = "reply_to_mismatch"
RULE_HTML = "html_fragment"


@dataclass(frozen=True)
class Brand:
    """One known organization: token, its real domains, its display names."""

    name: str
    legitimate_domains: frozenset[str]
    display_names: frozenset[str]
    # legitimate domains that do not contain the brand token (e.g. gmail.com
    # for google) must be listed here explicitly
    whitelist: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not re.fullmatch(r"[a-z0-9]+", self.name):
            raise ValueError(f"brand token must be a lowercase word: {self.name!r}")
        for domain in self.legitimate_domains:
            if self.name not in domain and domain not in self.whitelist:
                raise ValueError(
                    f"domain {domain!r} neither contains {self.name!r} nor is whitelisted"
                )


@dataclass(frozen=True)
class BrandDirectory:
    brands: tuple[Brand, ...]

    def __post_init__(self) -> None:
        names = [b.name for b in self.brands]
        if len(names) != len(set(names)):
            raise ValueError("brand tokens must be unique")

    def tokens(self) -> tuple[str, ...]:
        return tuple(b.name for b in self.brands)

    def by_token(self, token: str) -> Brand | None:
        for b in self.brands:
            if b.name == token:
                return b
        return None

    def by_display_name(self, display: str) -> Brand | None:
        wanted = display.strip().casefold()
        for b in self.brands:
            if wanted in {d.casefold() for d in b.display_names}:
                return b
        return None


DEFAULT_HOMOGLYPHS = {"0": "o", "1": "l", "3": "e", "5": "s", "@": "a", "vv": "w"}
DEFAULT_URGENCY_KEYWORDS = (
    "urgent",
    "immediately",
    "verify",
    "suspended",
    "password",
    "account number",
    "act now",
)
DEFAULT_SHORTENERS = frozenset({"bit.ly", "tinyurl.com", "goo.gl", "t.co", "ow.ly"})


@dataclass(frozen=True)
class RuleConfig:
    homoglyph_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_HOMOGLYPHS))
    punctuation_threshold: int = 3
    urgency_keywords: tuple[str, ...] = DEFAULT_URGENCY_KEYWORDS
    shortener_domains: frozenset[str] = DEFAULT_SHORTENERS

    def __post_init__(self) -> None:
        if self.punctuation_threshold < 1:
            raise ValueError("punctuation_threshold must be >= 1")
        for sub, canonical in self.homoglyph_map.items():
            if not (canonical.isascii() and canonical.isalpha()):
                raise ValueError(f"homoglyph target must be an ASCII letter: {sub}:{canonical}")

    def inverse_homoglyphs(self) -> dict[str, str]:
        """canonical letter -> substitute (first mapping wins)."""
        inverse: dict[str, str] = {}
        for sub, canonical in self.homoglyph_map.items():
            inverse.setdefault(canonical, sub)
        return inverse


def default_rule_config() -> RuleConfig:
    return RuleConfig()


def default_brand_directory() -> BrandDirectory:
    return BrandDirectory(
        brands=(
            Brand(
                "google",
                frozenset({"google.com", "googlemail.com", "gmail.com"}),
                frozenset({"Google", "Google Accounts"}),
                whitelist=frozenset({"gmail.com"}),
            ),
            Brand("paypal", frozenset({"paypal.com"}), frozenset({"PayPal"})),
            Brand("amazon", frozenset({"amazon.com"}), frozenset({"Amazon"})),
            Brand(
                "apple",
                frozenset({"apple.com", "icloud.com"}),
                frozenset({"Apple", "Apple Support"}),
                whitelist=frozenset({"icloud.com"}),
            ),
            Brand(
                "microsoft",
                frozenset({"microsoft.com", "outlook.com"}),
                frozenset({"Microsoft", "Microsoft Account Team"}),
                whitelist=frozenset({"outlook.com"}),
            ),
            Brand("netflix", frozenset({"netflix.com"}), frozenset({"Netflix"})),
        )
    )


# --- config file loading -----------------------------------------------------

def _split_list(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def load_rules_file(text: str) -> tuple[BrandDirectory, RuleConfig]:
    """Parse the line-oriented ``key = value`` rules/brands config format.

    Lists are comma-separated; homoglyph pairs are ``substitute:canonical``;
    brand keys look like ``brand.<token>.domains``.
    """
    plain: dict[str, str] = {}
    brand_keys: dict[str, dict[str, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = key.strip(), value.strip()
        if key.startswith("brand."):
            _, token, attr = key.split(".", 2)
            brand_keys.setdefault(token, {})[attr] = value
        else:
            plain[key] = value

    cfg_kwargs: dict = {}
    if "punctuation_threshold" in plain:
        cfg_kwargs["punctuation_threshold"] = int(plain.pop("punctuation_threshold"))
    if "urgency_keywords" in plain:
        cfg_kwargs["urgency_keywords"] = tuple(
            k.lower() for k in _split_list(plain.pop("urgency_keywords"))
        )
    if "shortener_domains" in plain:
        cfg_kwargs["shortener_domains"] = frozenset(
            d.lower() for d in _split_list(plain.pop("shortener_domains"))
        )
    if "homoglyph_map" in plain:
        pairs = {}
        for entry in _split_list(plain.pop("homoglyph_map")):
            sub, sep, canonical = entry.partition(":")
            if not sep:
                raise ValueError(f"homoglyph entry needs substitute:canonical, got {entry!r}")
            pairs[sub.strip()] = canonical.strip()
        cfg_kwargs["homoglyph_map"] = pairs
    if plain:
        raise ValueError(f"unknown config keys: {sorted(plain)}")

    brands = []
    for token, attrs in brand_keys.items():
        unknown = set(attrs) - {"domains", "display_names", "whitelist"}
        if unknown:
            raise ValueError(f"unknown brand keys for {token!r}: {sorted(unknown)}")
        brands.append(
            Brand(
                token,
                frozenset(d.lower() for d in _split_list(attrs.get("domains", ""))),
                frozenset(_split_list(attrs.get("display_names", ""))),
                whitelist=frozenset(d.lower() for d in _split_list(attrs.get("whitelist", ""))),
            )
        )
    directory = BrandDirectory(tuple(brands)) if brands else default_brand_directory()
    return directory, RuleConfig(**cfg_kwargs)


def load_rules_path(path) -> tuple[BrandDirectory, RuleConfig]:
    with open(path, encoding="utf-8") as fh:
        return load_rules_file(fh.read())


def bundled_rules() -> tuple[BrandDirectory, RuleConfig]:
    text = resources.files("phinder.data").joinpath("default_rules.cfg").read_text("utf-8")
    return load_rules_file(text)


# --- look-alike canonicalization ----------------------------------------------

def canonicalize_label(label: str, homoglyph_map: dict[str, str]):
    """Apply the homoglyph map across a label.

    Returns the canonical string plus the substitutions found, each as
    (start, end, canonical_text) in raw-label coordinates. Longer map keys
    match first so digraphs like 'vv' beat single characters.
    """
    keys = sorted(homoglyph_map, key=len, reverse=True)
    out: list[str] = []
    subs: list[tuple[int, int, str]] = []
    i = 0
    while i < len(label):
        for key in keys:
            if label.startswith(key, i):
                out.append(homoglyph_map[key])
                subs.append((i, i + len(key), homoglyph_map[key]))
                i += len(key)
                break
        else:
            out.append(label[i])
            i += 1
    return "".join(out), subs


def _registrable_first_label(host: str) -> tuple[str, int]:
    """First label of the registrable domain and its offset within host."""
    rdom = registrable_domain(host)
    label = rdom.split(".", 1)[0]
    return label, len(host) - len(rdom)


# Internal findings carry character offsets into the host string; they are
# translated to body coordinates when the URL came from an email.
@dataclass(frozen=True)
class _HostFinding:
    concept: PhishingConcept
    detail: str
    start: int
    end: int


def _lookalike_findings(url: Url, brands: BrandDirectory, cfg: RuleConfig) -> list[_HostFinding]:
    if url.host_kind is not HostKind.DNS_NAME:
        return []
    label, label_at = _registrable_first_label(url.host)
    canonical, subs = canonicalize_label(label, cfg.homoglyph_map)
    if canonical == label or brands.by_token(canonical) is None:
        return []
    findings = []
    for start, end, canonical_text in subs:
        findings.append(
            _HostFinding(
                PhishingConcept.LOOKALIKE_DOMAIN,
                f"{RULE_LOOKALIKE} '{label[start:end]}' stands in for "
                f"'{canonical_text}' in label '{label}' (imitates brand '{canonical}')",
                label_at + start,
                label_at + end,
            )
        )
    return findings


def _malicious_url_findings(
    url: Url, cfg: RuleConfig, brands: BrandDirectory
) -> list[_HostFinding]:
    host = url.host
    findings = []

    # (a) raw IPv4 literal
    if url.host_kind is HostKind.IPV4_LITERAL:
        findings.append(
            _HostFinding(
                PhishingConcept.MALICIOUS_URL,
                f"{RULE_URL_IP} host '{host}' is a raw IPv4 address",
                0,
                len(host),
            )
        )
        return findings  # the remaining sub-rules only apply to DNS names

    first_label = host.split(".", 1)[0]
    reg_label, reg_label_at = _registrable_first_label(host)

    # (b) leading digit, unless the same label already reads as a look-alike
    if first_label and first_label[0].isdigit():
        lookalike_here = reg_label_at == 0 and _lookalike_findings(url, brands, cfg)
        if not lookalike_here:
            findings.append(
                _HostFinding(
                    PhishingConcept.MALICIOUS_URL,
                    f"{RULE_URL_LEADING_DIGIT} host label '{first_label}' leads with a digit",
                    0,
                    len(first_label),
                )
            )

    # (c) brand token immediately followed by '-'
    for token in brands.tokens():
        idx = reg_label.find(token + "-")
        if idx != -1:
            findings.append(
                _HostFinding(
                    PhishingConcept.MALICIOUS_URL,
                    f"{RULE_URL_BRAND_HYPHEN} brand '{token}' followed by '-' in label '{reg_label}'",
                    reg_label_at + idx,
                    reg_label_at + idx + len(token) + 1,
                )
            )
            break

    # (d) link-shortening service
    rdom = registrable_domain(host)
    if rdom in cfg.shortener_domains:
        rdom_at = len(host) - len(rdom)
        findings.append(
            _HostFinding(
                PhishingConcept.MALICIOUS_URL,
                f"{RULE_URL_SHORTENER} '{rdom}' is a link-shortening service",
                rdom_at,
                len(host),
            )
        )
    return findings


def _materialize_host(url: Url, findings: list[_HostFinding]) -> list[Evidence]:
    return [
        Evidence(f.concept, byte_span("host", url.host, f.start, f.end), f.detail)
        for f in findings
    ]


def rule_lookalike(url: Url, brands: BrandDirectory, cfg: RuleConfig) -> list[Evidence]:
    """Homoglyph look-alike of a brand in the registrable domain's first label."""
    return _materialize_host(url, _lookalike_findings(url, brands, cfg))


def rule_malicious_url(url: Url, cfg: RuleConfig, brands: BrandDirectory) -> list[Evidence]:
    """IP-literal, leading-digit, brand-hyphen and shortener sub-rules."""
    return _materialize_host(url, _malicious_url_findings(url, cfg, brands))


# --- email rules ---------------------------------------------------------------

def rule_suspicious_subject(msg: EmailMessage, cfg: RuleConfig) -> list[Evidence]:
    subject = msg.subject
    findings = []
    marks = [i for i, ch in enumerate(subject) if ch in "!?"]
    if len(marks) >= cfg.punctuation_threshold:
        findings.append(
            Evidence(
                PhishingConcept.SUSPICIOUS_SUBJECT,
                byte_span("subject", subject, marks[0], marks[-1] + 1),
                f"{RULE_SUBJECT_PUNCT} {len(marks)} exclamation/question marks "
                f"(threshold {cfg.punctuation_threshold})",
            )
        )
    lowered = subject.casefold()
    for keyword in cfg.urgency_keywords:
        at = lowered.find(keyword.casefold())
        if at != -1:
            findings.append(
                Evidence(
                    PhishingConcept.SUSPICIOUS_SUBJECT,
                    byte_span("subject", subject, at, at + len(keyword)),
                    f"{RULE_SUBJECT_KEYWORD} urgency keyword '{keyword}'",
                )
            )
    findings.sort(key=lambda e: e.span.byte_start)
    return findings


def rule_display_spoof(msg: EmailMessage, brands: BrandDirectory) -> list[Evidence]:
    if msg.display_name is None:
        return []
    brand = brands.by_display_name(msg.display_name)
    if brand is None:
        return []
    sender_rdom = registrable_domain(msg.from_addr.domain)
    if sender_rdom in brand.legitimate_domains:
        return []
    field_text = msg.from_field_text
    domain_at = field_text.rfind(msg.from_addr.domain)
    return [
        Evidence(
            PhishingConcept.DISPLAY_NAME_SPOOF,
            byte_span("from", field_text, domain_at, domain_at + len(msg.from_addr.domain)),
            f"{RULE_DISPLAY_SPOOF} display name '{msg.display_name}' but sender "
            f"domain '{sender_rdom}' is not a '{brand.name}' domain",
        )
    ]


def rule_replyto_spoof(msg: EmailMessage) -> list[Evidence]:
    if msg.reply_to is None:
        return []
    reply_rdom = registrable_domain(msg.reply_to.domain)
    from_rdom = registrable_domain(msg.from_addr.domain)
    if reply_rdom == from_rdom:
        return []
    field_text = msg.reply_to.address
    return [
        Evidence(
            PhishingConcept.REPLY_TO_SPOOF,
            byte_span("reply_to", field_text, 0, len(field_text)),
            f"{RULE_REPLY_TO} replies divert to '{reply_rdom}' while the sender is at '{from_rdom}'",
        )
    ]


def rule_html_body(msg: EmailMessage) -> list[Evidence]:
    findings = []
    body = msg.body_text
    at = 0
    for seg in msg.body:
        if isinstance(seg, HtmlFragment):
            findings.append(
                Evidence(
                    PhishingConcept.HTML_BODY,
                    byte_span("body", body, at, at + len(seg.text)),
                    f"{RULE_HTML} HTML markup in message body",
                )
            )
        at += len(seg.text)
    return findings


# --- whole-content detection -----------------------------------------------------

def linked_urls_with_spans(msg: EmailMessage) -> list[tuple[Url, int, int]]:
    """Every URL the message links to, with its (start, end) in the body text.

    Covers href attributes inside HTML fragments and angle-bracket references
    (``<https://...>``) in plain text.
    """
    out = []
    at = 0
    for seg in msg.body:
        links = (
            href_links(seg.text)
            if isinstance(seg, HtmlFragment)
            else angle_bracket_links(seg.text) if isinstance(seg, PlainText) else []
        )
        for url_text, start, end in links:
            try:
                url = parse_url(url_text)
            except ParseError:
                continue
            out.append((url, at + start, at + end))
        at += len(seg.text)
    return out


def _translate_to_body(
    body: str, url: Url, url_start: int, url_end: int, finding: _HostFinding
) -> Evidence:
    url_text = body[url_start:url_end]
    host_at = url_text.lower().find(url.host)
    if host_at == -1:  # host not literally present; point at the whole link
        return Evidence(finding.concept, byte_span("body", body, url_start, url_end), finding.detail)
    base = url_start + host_at
    return Evidence(
        finding.concept,
        byte_span("body", body, base + finding.start, base + finding.end),
        finding.detail,
    )


def detect(content: WormContent, brands: BrandDirectory, cfg: RuleConfig) -> DetectionReport:
    """Run every applicable rule and assemble the explainable report."""
    findings: list[Evidence] = []
    if isinstance(content, UrlChallenge):
        url = content.url
        findings.extend(rule_malicious_url(url, cfg, brands))
        findings.extend(rule_lookalike(url, brands, cfg))
    elif isinstance(content, EmailChallenge):
        msg = content.message
        body = msg.body_text
        for url, start, end in linked_urls_with_spans(msg):
            host_findings = _malicious_url_findings(url, cfg, brands) + _lookalike_findings(
                url, brands, cfg
            )
            findings.extend(_translate_to_body(body, url, start, end, f) for f in host_findings)
        findings.extend(rule_suspicious_subject(msg, cfg))
        findings.extend(rule_display_spoof(msg, brands))
        findings.extend(rule_replyto_spoof(msg))
        findings.extend(rule_html_body(msg))
    else:
        raise TypeError(f"not worm content: {content!r}")

    findings.sort(key=lambda e: (concept_index(e.concept), e.span.byte_start, e.span.byte_end))
    verdict = GroundTruth.PHISHING if findings else GroundTruth.LEGITIMATE
    return DetectionReport(
        verdict=verdict,
        findings=tuple(findings),
        advice=tuple(advice_for(e) for e in findings),
    )


# --- Shifu advice ---------------------------------------------------------------

_QUOTED_RE = re.compile(r"'([^']*)'")

ADVICE_BRAND_HYPHEN = "a company name followed by a hyphen in a URL is generally a scam"
ADVICE_LEADING_NUMBER = "website addresses associated with numbers in the front are generally scams"
ADVICE_ACCOUNT_NUMBER = "your bank will not send an email to ask you about your account number"


def advice_for(evidence: Evidence) -> str:
    """One Shifu message per finding, phrased simply; deterministic."""
    params = _QUOTED_RE.findall(evidence.detail)
    rule = evidence.rule_id
    if rule == RULE_URL_IP:
        return (
            "a website address made of raw numbers is hiding its real name, "
            "so do not trust it"
        )
    if rule == RULE_URL_LEADING_DIGIT:
        return ADVICE_LEADING_NUMBER
    if rule == RULE_URL_BRAND_HYPHEN:
        return ADVICE_BRAND_HYPHEN
    if rule == RULE_URL_SHORTENER:
        return (
            f"'{params[0]}' is a link shortener, so you cannot see where the "
            "link really leads before you click"
        )
    if rule == RULE_LOOKALIKE:
        sub, canonical, label, brand = params[:4]
        return (
            f"look closely: the '{sub}' in '{label}' is standing in for "
            f"'{canonical}', so this is not the real {brand} website"
        )
    if rule == RULE_SUBJECT_PUNCT:
        return (
            "a subject line crowded with exclamation and question marks is "
            "trying to rush you into a mistake"
        )
    if rule == RULE_SUBJECT_KEYWORD:
        keyword = params[0]
        if keyword == "account number":
            return ADVICE_ACCOUNT_NUMBER
        return (
            f"wording like '{keyword}' is pressure to act quickly; slow down "
            "and check who is really asking"
        )
    if rule == RULE_DISPLAY_SPOOF:
        display, domain, brand = params[:3]
        return (
            f"the sender calls itself '{display}' but writes from '{domain}', "
            f"which does not belong to {brand}"
        )
    if rule == RULE_REPLY_TO:
        reply_domain, from_domain = params[:2]
        return (
            f"your reply would go to '{reply_domain}', not back to "
            f"'{from_domain}'; always check the reply-to address"
        )
    if rule == RULE_HTML:
        return "this message hides HTML code in its body; treat emails carrying HTML as suspect"
    raise KeyError(f"no advice template for rule {rule!r}")
