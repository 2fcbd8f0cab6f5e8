"""Pairwise profile similarity: Jaro-Winkler over names plus URL agreement."""

from __future__ import annotations

from .errors import NotComparableError
from .model import RepositoryProfile, SimilarityConfig
from .normalize import normalize_name, registrable_domain, url_host


def jaro(s1: str, s2: str) -> float:
    """Jaro similarity with the textbook floor(max(|s1|,|s2|)/2)-1 window."""
    if not s1 or not s2:
        return 0.0
    if s1 == s2:
        return 1.0
    len1, len2 = len(s1), len(s2)
    window = max(len1, len2) // 2 - 1
    if window < 0:
        window = 0

    matched2 = [False] * len2
    matches1: list[str] = []
    match_idx2: list[int] = []
    for i, ch in enumerate(s1):
        lo = max(0, i - window)
        hi = min(len2, i + window + 1)
        for j in range(lo, hi):
            if not matched2[j] and s2[j] == ch:
                matched2[j] = True
                matches1.append(ch)
                match_idx2.append(j)
                break
    m = len(matches1)
    if m == 0:
        return 0.0
    matches2 = [s2[j] for j in sorted(match_idx2)]
    transpositions = sum(a != b for a, b in zip(matches1, matches2)) // 2
    return (m / len1 + m / len2 + (m - transpositions) / m) / 3


def jaro_winkler(s1: str, s2: str, prefix_scale: float = 0.1) -> float:
    """Jaro-Winkler: prefix-boosted Jaro, boost applied above 0.7 only."""
    base = jaro(s1, s2)
    if base <= 0.7:
        return base
    prefix = 0
    for a, b in zip(s1[:4], s2[:4]):
        if a != b:
            break
        prefix += 1
    return base + prefix * prefix_scale * (1.0 - base)


def url_component(url1: str | None, url2: str | None) -> float:
    """Agreement score for two normalized URLs: host 1.0, domain 0.5."""
    host1, host2 = url_host(url1), url_host(url2)
    if not host1 or not host2:
        return 0.0
    if host1 == host2:
        return 1.0
    if registrable_domain(host1) == registrable_domain(host2):
        return 0.5
    return 0.0


def pair_similarity(
    p: RepositoryProfile, q: RepositoryProfile, config: SimilarityConfig
) -> float:
    """Symmetric similarity of two profiles in [0, 1].

    Identical normalized URLs short-circuit to 1.0 when the exact-URL
    override is enabled. Otherwise the score is a name/URL blend; with a URL
    missing on either side the name score stands alone. Raises
    NotComparableError when either profile has no usable name - callers are
    expected to filter those out.
    """
    name_p = normalize_name(p.name, config.normalization)
    name_q = normalize_name(q.name, config.normalization)
    if not name_p or not name_q:
        raise NotComparableError(
            f"cannot compare {p.ref} and {q.ref}: empty normalized name"
        )
    if (
        config.url_exact_override
        and p.homepage_url
        and q.homepage_url
        and p.homepage_url == q.homepage_url
    ):
        return 1.0
    name_score = jaro_winkler(name_p, name_q)
    if not p.homepage_url or not q.homepage_url:
        return name_score
    return (
        config.name_weight * name_score
        + (1.0 - config.name_weight) * url_component(p.homepage_url, q.homepage_url)
    )
