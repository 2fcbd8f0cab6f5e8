"""Deterministic, idempotent name and URL normalizers.

Both normalizers are total: any input text yields a result (possibly empty
for names, absent for URLs). Matching and blocking operate exclusively on
normalized values.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Any, Mapping
from urllib.parse import urlsplit, urlunsplit

_ACCEPTED_SCHEMES = {"http", "https", "ftp"}
_DEFAULT_PORTS = {"http": 80, "https": 443, "ftp": 21}

# second-level labels that commonly sit under two-letter ccTLDs; used by the
# registrable-domain heuristic (a full public-suffix list is overkill here)
_COMMON_SLDS = {"ac", "co", "com", "edu", "go", "gov", "mil", "ne", "net", "or", "org"}


@dataclass(frozen=True)
class NormalizationOptions:
    """Flags controlling name normalization."""

    case_fold: bool = True
    strip_diacritics: bool = True
    collapse_punctuation: bool = True
    token_sort: bool = False

    def to_record(self) -> dict:
        return {
            "caseFold": self.case_fold,
            "stripDiacritics": self.strip_diacritics,
            "collapsePunctuation": self.collapse_punctuation,
            "tokenSort": self.token_sort,
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "NormalizationOptions":
        return cls(
            case_fold=bool(record.get("caseFold", True)),
            strip_diacritics=bool(record.get("stripDiacritics", True)),
            collapse_punctuation=bool(record.get("collapsePunctuation", True)),
            token_sort=bool(record.get("tokenSort", False)),
        )


def _normalize_name_once(text: str, options: NormalizationOptions) -> str:
    text = unicodedata.normalize("NFKD", text)
    if options.strip_diacritics:
        text = "".join(ch for ch in text if not unicodedata.combining(ch))
    if options.case_fold:
        text = text.casefold()
    if options.collapse_punctuation:
        # combining marks ride with their base letter when not stripped
        text = "".join(
            ch if ch.isalnum() or unicodedata.combining(ch) else " "
            for ch in text
        )
    tokens = text.split()
    if options.token_sort:
        tokens = sorted(tokens)
    return " ".join(tokens)


def normalize_name(text: str, options: NormalizationOptions | None = None) -> str:
    """Normalize a repository name for matching.

    Unicode-normalizes, case-folds, strips diacritics, collapses punctuation
    runs to single spaces and trims. Iterated to a fixed point: casefolding
    can reintroduce decomposable characters, so a single pass is not always
    stable.
    """
    options = options or NormalizationOptions()
    current = text
    for _ in range(8):
        step = _normalize_name_once(current, options)
        if step == current:
            break
        current = step
    return current


def normalize_url(text: str) -> str | None:
    """Canonicalize a homepage URL, or return None when unparseable.

    Lowercases scheme and host, strips leading ``www.`` labels, drops default
    ports and fragments, and removes trailing slashes. Values without an
    http/https/ftp scheme are treated as unparseable.
    """
    text = text.strip()
    if not text:
        return None
    try:
        parts = urlsplit(text)
    except ValueError:
        return None
    scheme = parts.scheme.lower()
    if scheme not in _ACCEPTED_SCHEMES:
        return None
    host = (parts.hostname or "").lower()
    if not host:
        return None
    while host.startswith("www.") and len(host) > 4:
        host = host[4:]
    try:
        port = parts.port
    except ValueError:
        return None
    netloc = host
    if port is not None and port != _DEFAULT_PORTS.get(scheme):
        netloc = f"{host}:{port}"
    path = parts.path
    while path.endswith("/"):
        path = path[:-1]
    return urlunsplit((scheme, netloc, path, parts.query, ""))


def url_host(url: str | None) -> str | None:
    """Host part of an already-normalized URL."""
    if not url:
        return None
    host = urlsplit(url).hostname
    return host or None


def registrable_domain(host: str | None) -> str | None:
    """Heuristic eTLD+1: keeps three labels for common ccTLD second levels.

    ``eprints.soton.ac.uk`` -> ``soton.ac.uk``. ``www`` labels are assumed to
    be stripped already by normalize_url.
    """
    if not host:
        return None
    labels = host.split(".")
    if len(labels) <= 2:
        return host
    if all(part.isdigit() for part in labels):  # IPv4 literal
        return host
    if len(labels[-1]) == 2 and labels[-2] in _COMMON_SLDS:
        return ".".join(labels[-3:])
    return ".".join(labels[-2:])
