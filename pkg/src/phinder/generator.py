"""Worm generation: turns a validated-clean corpus into labeled challenges.

One mutation operator per concept; every operator is deterministic in
(content, concept, seed) and guarantees the detector reports the concept it
injected. Randomness is threaded explicitly through ``random.Random``
instances; nothing reads global RNG state.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .detector import BrandDirectory, RuleConfig, detect, linked_urls_with_spans
from .model import (
    CONCEPT_ORDER,
    EmailAddress,
    EmailChallenge,
    EmailMessage,
    GroundTruth,
    PhishingConcept,
    PlainText,
    Provenance,
    UrlChallenge,
    Url,
    Worm,
    WormContent,
    content_kind,
    sort_concepts,
)
from .parsing import (
    angle_bracket_links,
    parse_email,
    parse_url,
    registrable_domain,
    split_body,
)


class GeneratorError(Exception):
    pass


class InapplicableConcept(GeneratorError):
    """The concept cannot be expressed on this kind of content."""


class NoMutablePosition(GeneratorError):
    """No character/site in the content can host the requested mutation."""


class ExhaustedCorpus(GeneratorError):
    """No compatible corpus item was found within the redraw bound."""


REDRAW_BOUND = 100

_URL_CONCEPTS = frozenset({PhishingConcept.MALICIOUS_URL, PhishingConcept.LOOKALIKE_DOMAIN})

# TEST-NET prefixes: never routable, safe to show players.
_IP_PREFIXES = ("192.0.2", "198.51.100", "203.0.113")
_HYPHEN_WORDS = ("secure", "login", "verify", "support", "billing", "update")
_SPOOF_LOCALS = ("support", "accounts", "security", "service")
_REPLY_LOCALS = ("refunds", "claims", "replies", "billing")
_BASE62 = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"


def derive_seed(base: int, *tags: str) -> int:
    """Stable 64-bit sub-seed; never uses Python's randomized hash()."""
    h = hashlib.blake2b(digest_size=8)
    h.update(base.to_bytes(8, "big"))
    for tag in tags:
        h.update(tag.encode("utf-8"))
    return int.from_bytes(h.digest(), "big")


def attacker_domains() -> tuple[str, ...]:
    text = resources.files("phinder.data").joinpath("attacker_domains.txt").read_text("utf-8")
    return tuple(
        line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


# --- corpus -------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusUrl:
    id: str
    url: Url

    @property
    def content(self) -> WormContent:
        return UrlChallenge(self.url)


@dataclass(frozen=True)
class CorpusEmail:
    id: str
    message: EmailMessage

    @property
    def content(self) -> WormContent:
        return EmailChallenge(self.message)


@dataclass(frozen=True)
class Corpus:
    urls: tuple[CorpusUrl, ...]
    emails: tuple[CorpusEmail, ...]

    def __post_init__(self) -> None:
        ids = [item.id for item in self.items()]
        if len(ids) != len(set(ids)):
            raise ValueError("corpus item ids must be unique")

    def items(self) -> tuple:
        return self.urls + self.emails


def _parse_url_lines(text: str, stem: str) -> list[CorpusUrl]:
    items = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        items.append(CorpusUrl(f"{stem}:u{len(items)}", parse_url(line)))
    return items


def _parse_email_blocks(text: str, stem: str) -> list[CorpusEmail]:
    items = []
    for block in re.split(r"^%%$", text, flags=re.MULTILINE):
        block = block.strip("\n")
        if not block.strip():
            continue
        items.append(CorpusEmail(f"{stem}:e{len(items)}", parse_email(block)))
    return items


def load_corpus(path: str | Path) -> Corpus:
    """Load a corpus directory (``*.urls.txt`` and ``*.emails.txt`` files)."""
    path = Path(path)
    url_files = sorted(path.glob("*.urls.txt"))
    email_files = sorted(path.glob("*.emails.txt"))
    if not url_files and not email_files:
        raise FileNotFoundError(f"no *.urls.txt or *.emails.txt under {path}")
    urls: list[CorpusUrl] = []
    emails: list[CorpusEmail] = []
    for f in url_files:
        urls.extend(_parse_url_lines(f.read_text("utf-8"), f.name.removesuffix(".urls.txt")))
    for f in email_files:
        emails.extend(_parse_email_blocks(f.read_text("utf-8"), f.name.removesuffix(".emails.txt")))
    return Corpus(tuple(urls), tuple(emails))


def bundled_corpus() -> Corpus:
    data = resources.files("phinder.data").joinpath("corpus")
    urls = _parse_url_lines(data.joinpath("starter.urls.txt").read_text("utf-8"), "starter")
    emails = _parse_email_blocks(data.joinpath("starter.emails.txt").read_text("utf-8"), "starter")
    return Corpus(tuple(urls), tuple(emails))


@dataclass(frozen=True)
class ValidationEntry:
    item_id: str
    report: object  # DetectionReport


def validate_corpus(corpus: Corpus, brands: BrandDirectory, cfg: RuleConfig) -> list[ValidationEntry]:
    """Every item must be detector-clean; returns the offenders (empty = clean)."""
    bad = []
    for item in corpus.items():
        report = detect(item.content, brands, cfg)
        if report.verdict is not GroundTruth.LEGITIMATE:
            bad.append(ValidationEntry(item.id, report))
    return bad


# --- level configuration --------------------------------------------------------

@dataclass(frozen=True)
class LevelConfig:
    level: int
    allowed_concepts: frozenset[PhishingConcept]
    concepts_per_phish: int
    worm_count: int
    phish_fraction: float
    time_limit: float
    bonus_probability: float = 0.1
    bonus_window: float = 30.0

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if not 1 <= self.concepts_per_phish <= len(self.allowed_concepts):
            raise ValueError("concepts_per_phish must fit inside allowed_concepts")
        if not 0 <= self.phish_fraction <= 1:
            raise ValueError("phish_fraction must be in [0,1]")
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if not 0 <= self.bonus_probability < 1:
            raise ValueError("bonus_probability must be in [0,1)")


def default_level_configs() -> dict[int, LevelConfig]:
    c = PhishingConcept
    ladder = [
        (1, {c.MALICIOUS_URL, c.LOOKALIKE_DOMAIN}, 1, 10, 600.0),
        (2, {c.MALICIOUS_URL, c.LOOKALIKE_DOMAIN, c.SUSPICIOUS_SUBJECT}, 1, 12, 540.0),
        (
            3,
            {
                c.MALICIOUS_URL,
                c.LOOKALIKE_DOMAIN,
                c.SUSPICIOUS_SUBJECT,
                c.DISPLAY_NAME_SPOOF,
                c.REPLY_TO_SPOOF,
            },
            1,
            14,
            480.0,
        ),
        (4, set(CONCEPT_ORDER), 1, 16, 480.0),
        (5, set(CONCEPT_ORDER), 2, 18, 420.0),
    ]
    return {
        level: LevelConfig(level, frozenset(allowed), per, count, 0.5, limit)
        for level, allowed, per, count, limit in ladder
    }


# --- mutation operators -----------------------------------------------------------

def _splice(text: str, start: int, end: int, replacement: str) -> str:
    return text[:start] + replacement + text[end:]


def _reg_first_label(host: str) -> tuple[str, int]:
    rdom = registrable_domain(host)
    return rdom.split(".", 1)[0], len(host) - len(rdom)


def _replace_host_in_raw(url: Url, new_host: str) -> str:
    at = url.raw.lower().find(url.host)
    if at == -1:
        base = url.serialized
        at = base.lower().find(url.host)
        return _splice(base, at, at + len(url.host), new_host)
    return _splice(url.raw, at, at + len(url.host), new_host)


def _lookalike_host(host: str, brands: BrandDirectory, cfg: RuleConfig, rng: random.Random) -> str:
    label, label_at = _reg_first_label(host)
    if brands.by_token(label) is None:
        raise InapplicableConcept(f"label {label!r} is not a known brand")
    inverse = cfg.inverse_homoglyphs()
    positions = [i for i, ch in enumerate(label) if ch in inverse]
    if not positions:
        raise NoMutablePosition(f"no homoglyph-mappable character in {label!r}")
    pos = positions[rng.randrange(len(positions))]
    new_label = label[:pos] + inverse[label[pos]] + label[pos + 1 :]
    return _splice(host, label_at, label_at + len(label), new_label)


def _lookalike_applicable(url: Url, brands: BrandDirectory, cfg: RuleConfig) -> bool:
    label, _ = _reg_first_label(url.host)
    if brands.by_token(label) is None:
        return False
    inverse = cfg.inverse_homoglyphs()
    return any(ch in inverse for ch in label)


def _malicious_host_rewrite(
    url: Url, brands: BrandDirectory, cfg: RuleConfig, rng: random.Random
) -> str:
    """Whole new raw URL text expressing one malicious-URL trick."""
    label, label_at = _reg_first_label(url.host)
    ops = ["ip"]
    if brands.by_token(label) is not None:
        ops.append("hyphen")
    ops.append("shortener")
    op = ops[rng.randrange(len(ops))]
    if op == "ip":
        ip = f"{_IP_PREFIXES[rng.randrange(len(_IP_PREFIXES))]}.{rng.randrange(1, 255)}"
        return _replace_host_in_raw(url, ip)
    if op == "hyphen":
        word = _HYPHEN_WORDS[rng.randrange(len(_HYPHEN_WORDS))]
        new_host = _splice(url.host, label_at, label_at + len(label), f"{label}-{word}")
        return _replace_host_in_raw(url, new_host)
    shortener = sorted(cfg.shortener_domains)[rng.randrange(len(cfg.shortener_domains))]
    token = "".join(_BASE62[rng.randrange(62)] for _ in range(7))
    return f"https://{shortener}/{token}"


def _brand_base_url(brands: BrandDirectory, rng: random.Random) -> str:
    """A clean brand-labelled URL to corrupt, e.g. https://www.paypal.com/account."""
    candidates = []
    for brand in brands.brands:
        for domain in sorted(brand.legitimate_domains):
            if domain.split(".", 1)[0] == brand.name:
                candidates.append(domain)
    if not candidates:
        raise InapplicableConcept("no brand domain available to imitate")
    return f"https://www.{candidates[rng.randrange(len(candidates))]}/account"


def _rebuild_email_body(msg: EmailMessage, new_body_text: str) -> EmailMessage:
    return replace(msg, body=split_body(new_body_text))


def _append_link(msg: EmailMessage, url_text: str) -> EmailMessage:
    return _rebuild_email_body(msg, msg.body_text + f"\n\nMore details: <{url_text}>")


def _mutate_email_link(
    msg: EmailMessage,
    brands: BrandDirectory,
    cfg: RuleConfig,
    rng: random.Random,
    concept: PhishingConcept,
) -> EmailMessage:
    """Rewrite the first suitable linked URL, or append a fresh poisoned link."""
    body = msg.body_text
    for url, start, end in linked_urls_with_spans(msg):
        if concept is PhishingConcept.LOOKALIKE_DOMAIN:
            if not _lookalike_applicable(url, brands, cfg):
                continue
            new_host = _lookalike_host(url.host, brands, cfg, rng)
            new_text = _replace_host_in_raw(url, new_host)
        else:
            new_text = _malicious_host_rewrite(url, brands, cfg, rng)
        return _rebuild_email_body(msg, _splice(body, start, end, new_text))

    base = parse_url(_brand_base_url(brands, rng))
    if concept is PhishingConcept.LOOKALIKE_DOMAIN:
        new_text = _replace_host_in_raw(base, _lookalike_host(base.host, brands, cfg, rng))
    else:
        new_text = _malicious_host_rewrite(base, brands, cfg, rng)
    return _append_link(msg, new_text)


def mutate(
    concept: PhishingConcept,
    content: WormContent,
    brands: BrandDirectory,
    cfg: RuleConfig,
    seed: int,
) -> WormContent:
    """Apply one concept's mutation operator; deterministic in (content, concept, seed)."""
    rng = random.Random(seed)

    if isinstance(content, UrlChallenge):
        url = content.url
        if concept is PhishingConcept.LOOKALIKE_DOMAIN:
            new_host = _lookalike_host(url.host, brands, cfg, rng)
            return UrlChallenge(parse_url(_replace_host_in_raw(url, new_host)))
        if concept is PhishingConcept.MALICIOUS_URL:
            return UrlChallenge(parse_url(_malicious_host_rewrite(url, brands, cfg, rng)))
        raise InapplicableConcept(f"{concept.value} needs an email, got a bare URL")

    msg = content.message
    if concept in _URL_CONCEPTS:
        return EmailChallenge(_mutate_email_link(msg, brands, cfg, rng, concept))

    if concept is PhishingConcept.SUSPICIOUS_SUBJECT:
        keyword = cfg.urgency_keywords[rng.randrange(len(cfg.urgency_keywords))]
        bangs = "!" * cfg.punctuation_threshold
        return EmailChallenge(replace(msg, subject=f"{keyword.upper()}{bangs} {msg.subject}"))

    if concept is PhishingConcept.DISPLAY_NAME_SPOOF:
        brand = brands.brands[rng.randrange(len(brands.brands))]
        display = sorted(brand.display_names)[rng.randrange(len(brand.display_names))]
        domain = attacker_domains()[rng.randrange(len(attacker_domains()))]
        sender = EmailAddress(_SPOOF_LOCALS[rng.randrange(len(_SPOOF_LOCALS))], domain)
        # keep reply-to aligned with the new sender so only this concept fires
        new_reply = sender if msg.reply_to is not None else None
        return EmailChallenge(
            replace(msg, display_name=display, from_addr=sender, reply_to=new_reply)
        )

    if concept is PhishingConcept.REPLY_TO_SPOOF:
        from_rdom = registrable_domain(msg.from_addr.domain)
        pool = [d for d in attacker_domains() if registrable_domain(d) != from_rdom]
        domain = pool[rng.randrange(len(pool))]
        reply = EmailAddress(_REPLY_LOCALS[rng.randrange(len(_REPLY_LOCALS))], domain)
        return EmailChallenge(replace(msg, reply_to=reply))

    if concept is PhishingConcept.HTML_BODY:
        body = msg.body_text
        offset = 0
        for seg in msg.body:
            if isinstance(seg, PlainText):
                links = angle_bracket_links(seg.text)
                if links:
                    # wrap the first <url> reference, brackets included, in an anchor
                    url_text, start, end = links[0]
                    anchor = f'<a href="{url_text}">{url_text}</a>'
                    new_body = _splice(body, offset + start - 1, offset + end + 1, anchor)
                    return EmailChallenge(_rebuild_email_body(msg, new_body))
            offset += len(seg.text)
        domain = attacker_domains()[rng.randrange(len(attacker_domains()))]
        anchor = f'<a href="https://www.{domain}/news">read the update</a>'
        return EmailChallenge(_rebuild_email_body(msg, body + "\n\n" + anchor))

    raise InapplicableConcept(f"unknown concept {concept!r}")


# --- worm generation ----------------------------------------------------------------

def _compatible(item, concepts: frozenset[PhishingConcept], brands, cfg) -> bool:
    if isinstance(item, CorpusEmail):
        return True
    # URL challenges carry at most one concept; two URL tricks cannot coexist
    # in a single host.
    if len(concepts) > 1 or not concepts <= _URL_CONCEPTS:
        return False
    if PhishingConcept.LOOKALIKE_DOMAIN in concepts:
        return _lookalike_applicable(item.url, brands, cfg)
    return True


def generate_worm(
    cfg: LevelConfig,
    corpus: Corpus,
    brands: BrandDirectory,
    rules: RuleConfig,
    rng: random.Random,
    worm_id: str = "",
):
    """Draw one worm; returns (worm, rng) with the rng state advanced."""
    pool = corpus.items()
    if not pool:
        raise ExhaustedCorpus("corpus is empty")

    phishing = rng.random() < cfg.phish_fraction
    bonus = rng.random() < cfg.bonus_probability

    if not phishing:
        item = pool[rng.randrange(len(pool))]
        worm = Worm(
            id=worm_id or item.id,
            content=item.content,
            ground_truth=GroundTruth.LEGITIMATE,
            intended_concepts=frozenset(),
            bonus=bonus,
            provenance=Provenance(item.id, 0),
        )
        return worm, rng

    allowed = sort_concepts(cfg.allowed_concepts)
    concepts = frozenset(rng.sample(allowed, cfg.concepts_per_phish))
    for _ in range(REDRAW_BOUND):
        item = pool[rng.randrange(len(pool))]
        if _compatible(item, concepts, brands, rules):
            break
    else:
        raise ExhaustedCorpus(
            f"no corpus item compatible with {sorted(c.value for c in concepts)} "
            f"after {REDRAW_BOUND} draws"
        )

    mutation_seed = rng.getrandbits(64)
    content = item.content
    for concept in sort_concepts(concepts):
        content = mutate(concept, content, brands, rules, derive_seed(mutation_seed, concept.value))

    report = detect(content, brands, rules)
    if not concepts <= report.concepts():
        raise GeneratorError(
            f"mutation lost concepts: wanted {sorted(c.value for c in concepts)}, "
            f"detector saw {sorted(c.value for c in report.concepts())}"
        )

    worm = Worm(
        id=worm_id or f"{item.id}+{mutation_seed:016x}",
        content=content,
        ground_truth=GroundTruth.PHISHING,
        intended_concepts=concepts,
        bonus=bonus,
        provenance=Provenance(item.id, mutation_seed),
    )
    return worm, rng


def generate_bank(
    level: int,
    n: int,
    seed: int,
    corpus: Corpus | None = None,
    brands: BrandDirectory | None = None,
    rules: RuleConfig | None = None,
    level_configs: dict[int, LevelConfig] | None = None,
) -> list[Worm]:
    """A deterministic offline bank of n worms for one level."""
    from .detector import default_brand_directory, default_rule_config

    configs = level_configs or default_level_configs()
    if level not in configs:
        raise KeyError(f"no config for level {level}")
    corpus = corpus or bundled_corpus()
    brands = brands or default_brand_directory()
    rules = rules or default_rule_config()
    rng = random.Random(seed)
    worms = []
    for i in range(n):
        worm, rng = generate_worm(
            configs[level], corpus, brands, rules, rng, worm_id=f"L{level}-{i:04d}"
        )
        worms.append(worm)
    return worms


# --- bank serialization ---------------------------------------------------------------

def worm_to_record(worm: Worm) -> dict:
    from .model import content_display_text

    return {
        "id": worm.id,
        "kind": content_kind(worm.content),
        "content_serialized": content_display_text(worm.content),
        "ground_truth": worm.ground_truth.value,
        "concepts": [c.value for c in sort_concepts(worm.intended_concepts)],
        "bonus": worm.bonus,
        "seed": worm.provenance.mutation_seed,
        "corpus_item_id": worm.provenance.corpus_item_id,
    }


def bank_to_text(worms: list[Worm]) -> str:
    return "".join(json.dumps(worm_to_record(w), sort_keys=False) + "\n" for w in worms)


def record_to_worm(record: dict) -> Worm:
    if record["kind"] == "url":
        content: WormContent = UrlChallenge(parse_url(record["content_serialized"]))
    else:
        content = EmailChallenge(parse_email(record["content_serialized"]))
    return Worm(
        id=record["id"],
        content=content,
        ground_truth=GroundTruth(record["ground_truth"]),
        intended_concepts=frozenset(PhishingConcept(c) for c in record["concepts"]),
        bonus=record["bonus"],
        provenance=Provenance(record.get("corpus_item_id", ""), record["seed"]),
    )


def bank_from_text(text: str) -> list[Worm]:
    return [record_to_worm(json.loads(line)) for line in text.splitlines() if line.strip()]
