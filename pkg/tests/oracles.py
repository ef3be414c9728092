"""Independent brute-force oracles for cross-checking the implementation.

Everything here is deliberately written from scratch against the documented
behavior, not by calling the code under test.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

SUFFIX_FILE = (
    Path(__file__).resolve().parents[1]
    / "src"
    / "phinder"
    / "data"
    / "two_level_suffixes.txt"
)


def ipv4_oracle(host: str) -> bool:
    """Four dot-separated decimal octets, each in 0..255."""
    parts = host.split(".")
    if len(parts) != 4:
        return False
    for part in parts:
        if not part or not all(ch in "0123456789" for ch in part):
            return False
        if int(part) > 255:
            return False
    return True


def registrable_oracle(host: str) -> str:
    """Label-splitting check against the bundled two-level suffix list."""
    suffixes = set()
    for line in SUFFIX_FILE.read_text("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            suffixes.add(line)
    labels = host.lower().split(".")
    if len(labels) <= 2:
        return host.lower()
    last_two = labels[-2] + "." + labels[-1]
    keep = 3 if last_two in suffixes else 2
    return ".".join(labels[-keep:])


def subject_findings_oracle(subject: str, threshold: int, keywords) -> int:
    """Brute-force character scan plus substring search; returns finding count."""
    punct = sum(1 for ch in subject if ch in "!?")
    count = 1 if punct >= threshold else 0
    low = subject.lower()
    for kw in keywords:
        if kw.lower() in low:
            count += 1
    return count


_SHORTENER_LIST = ("bit.ly", "tinyurl.com", "goo.gl", "t.co", "ow.ly")
_LINK_RE = re.compile(r"""(?:href\s*=\s*["']([^"']+)["'])|(?:<(https?://[^\s<>]+)>)""")


def linked_hosts_oracle(body_text: str) -> list[str]:
    """Hosts of every linked URL (hrefs and angle references), lowercased."""
    hosts = []
    for m in _LINK_RE.finditer(body_text):
        target = m.group(1) or m.group(2)
        target = re.sub(r"^[a-zA-Z][a-zA-Z0-9+.-]*://", "", target)
        host = re.split(r"[/?]", target, maxsplit=1)[0]
        host = host.rsplit(":", 1)[0] if re.search(r":\d+$", host) else host
        hosts.append(host.lower())
    return hosts


def shortener_hosts_oracle(body_text: str) -> list[str]:
    out = []
    for host in linked_hosts_oracle(body_text):
        if any(host == s or host.endswith("." + s) for s in _SHORTENER_LIST):
            out.append(host)
    return out


def html_fragment_count_oracle(body_text: str) -> int:
    """Count tag-pair or void-tag regions the documented grammar accepts."""
    count = 0
    pos = 0
    tag = re.compile(r"<([A-Za-z][A-Za-z0-9]*)((?:\s[^<>]*)?)(/?)>")
    voids = {"br", "hr", "img", "input", "meta", "link"}
    while True:
        m = tag.search(body_text, pos)
        if not m:
            return count
        name = m.group(1).lower()
        if m.group(3) == "/" or name in voids:
            count += 1
            pos = m.end()
            continue
        close = re.search(rf"</{name}\s*>", body_text[m.end():], re.IGNORECASE)
        if close:
            count += 1
            pos = m.end() + close.end()
        else:
            pos = m.start() + 1


def binomial_3sigma_bounds(n: int, p: float) -> tuple[float, float]:
    mean = n * p
    sigma = math.sqrt(n * p * (1 - p))
    return mean - 3 * sigma, mean + 3 * sigma
