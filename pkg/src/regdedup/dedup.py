"""Automatic duplicate detection across all four registries.

Two phases: cheap blocking keys bound the candidate space, then pairwise
similarity scoring keeps the pairs at or above the threshold. Connected
components over the surviving edges become clusters. Profiles without a
usable name produce no name key and unscorable pairs are skipped, so the
de-duplicator degrades gracefully on sparse records.

The result is deterministic for a given input and configuration, whatever
the worker count: candidate pairs are generated in canonical order and
scored positionally.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ContractViolationError, NotComparableError
from .model import (
    Cluster,
    MatchEdge,
    ProfileRef,
    RepositoryProfile,
    SimilarityConfig,
)
from .normalize import normalize_name, url_host
from .similarity import pair_similarity

log = logging.getLogger(__name__)


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self) -> None:
        self.parent: dict[ProfileRef, ProfileRef] = {}
        self.size: dict[ProfileRef, int] = {}

    def find(self, x: ProfileRef) -> ProfileRef:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1
            return x
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: ProfileRef, b: ProfileRef) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


@dataclass
class DedupReport:
    profiles_considered: int = 0
    blocks: int = 0
    truncated_blocks: list[str] = field(default_factory=list)
    pairs_considered: int = 0
    pairs_scored: int = 0
    pairs_not_comparable: int = 0
    matches: int = 0
    clusters: int = 0

    def to_record(self) -> dict:
        return {
            "profilesConsidered": self.profiles_considered,
            "blocks": self.blocks,
            "truncatedBlocks": list(self.truncated_blocks),
            "pairsConsidered": self.pairs_considered,
            "pairsScored": self.pairs_scored,
            "pairsNotComparable": self.pairs_not_comparable,
            "matches": self.matches,
            "clusters": self.clusters,
        }


@dataclass
class DedupResult:
    clusters: list[Cluster]
    edges: list[MatchEdge]
    report: DedupReport


def blocking_keys(profile: RepositoryProfile, config: SimilarityConfig) -> list[str]:
    """Candidate-identification keys for one profile.

    The name key concatenates the sorted leading-character fragments of the
    first few name tokens; the URL key is the normalized host. A profile
    missing a name or URL simply yields fewer keys.
    """
    keys: list[str] = []
    name = normalize_name(profile.name, config.normalization)
    if name:
        tokens = name.split()[: config.name_key_tokens]
        fragments = sorted(t[: config.name_key_chars] for t in tokens)
        keys.append("".join(fragments))
    if profile.homepage_url:
        host = url_host(profile.homepage_url)
        if host:
            keys.append(host)
    return keys


def build_blocks(
    profiles: Iterable[RepositoryProfile], config: SimilarityConfig
) -> dict[str, list[ProfileRef]]:
    """Group profiles by blocking key; members are canonically sorted."""
    blocks: dict[str, list[ProfileRef]] = {}
    for profile in profiles:
        for key in blocking_keys(profile, config):
            blocks.setdefault(key, []).append(profile.ref)
    return {key: sorted(set(refs)) for key, refs in sorted(blocks.items())}


def candidate_pairs(
    blocks: Mapping[str, Sequence[ProfileRef]],
    config: SimilarityConfig,
    report: DedupReport | None = None,
) -> list[tuple[ProfileRef, ProfileRef]]:
    """Unique candidate pairs across all blocks, canonically ordered.

    Oversized blocks are truncated to ``max_block_size`` members and a
    sliding ``window`` limits pairing to nearby members when configured;
    both trade recall for a bounded pair count on degenerate keys.
    """
    pairs: set[tuple[ProfileRef, ProfileRef]] = set()
    for key in sorted(blocks):
        members = list(blocks[key])
        if len(members) > config.max_block_size:
            log.warning(
                "block %r has %d members; truncating to %d",
                key,
                len(members),
                config.max_block_size,
            )
            if report is not None:
                report.truncated_blocks.append(key)
            members = members[: config.max_block_size]
        span = config.window if config.window is not None else len(members)
        for i, a in enumerate(members):
            for b in members[i + 1 : i + span]:
                pairs.add((a, b) if a < b else (b, a))
    return sorted(pairs)


def match_pairs(
    profiles: Mapping[ProfileRef, RepositoryProfile],
    pairs: Sequence[tuple[ProfileRef, ProfileRef]],
    config: SimilarityConfig,
    parallelism: int = 1,
    report: DedupReport | None = None,
) -> list[MatchEdge]:
    """Score candidate pairs and keep those at or above the threshold."""
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}")

    def score(pair: tuple[ProfileRef, ProfileRef]) -> float | None:
        try:
            return pair_similarity(profiles[pair[0]], profiles[pair[1]], config)
        except NotComparableError:
            return None

    if parallelism == 1:
        scores = [score(p) for p in pairs]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            scores = list(pool.map(score, pairs))

    edges: list[MatchEdge] = []
    scored = 0
    skipped = 0
    for (a, b), value in zip(pairs, scores):
        if value is None:
            skipped += 1
            continue
        scored += 1
        if value >= config.threshold:
            edges.append(MatchEdge(a, b, value))
    if report is not None:
        report.pairs_considered += len(pairs)
        report.pairs_scored += scored
        report.pairs_not_comparable += skipped
        report.matches += len(edges)
    return sorted(edges)


def connected_components(edges: Iterable[MatchEdge]) -> list[Cluster]:
    """Clusters from match edges, ordered by their smallest member."""
    edges = sorted(edges)
    uf = UnionFind()
    for e in edges:
        uf.union(e.a, e.b)
    members_by_root: dict[ProfileRef, set[ProfileRef]] = {}
    edges_by_root: dict[ProfileRef, list[MatchEdge]] = {}
    for e in edges:
        root = uf.find(e.a)
        members_by_root.setdefault(root, set()).update((e.a, e.b))
        edges_by_root.setdefault(root, []).append(e)
    ordered = sorted(members_by_root.values(), key=lambda ms: min(ms))
    clusters = []
    for n, members in enumerate(ordered, start=1):
        root = uf.find(next(iter(members)))
        clusters.append(
            Cluster(
                id=f"cl-{n:04d}",
                members=frozenset(members),
                edges=tuple(sorted(edges_by_root[root])),
            )
        )
    return clusters


def run_dedup(
    profiles: Iterable[RepositoryProfile],
    config: SimilarityConfig | None = None,
    parallelism: int = 1,
) -> DedupResult:
    """Blocking, pairwise matching, and clustering in one call."""
    config = config or SimilarityConfig()
    by_ref = {p.ref: p for p in profiles}
    if len(by_ref) == 0:
        return DedupResult(clusters=[], edges=[], report=DedupReport())
    report = DedupReport(profiles_considered=len(by_ref))
    blocks = build_blocks(by_ref.values(), config)
    report.blocks = len(blocks)
    pairs = candidate_pairs(blocks, config, report)
    edges = match_pairs(by_ref, pairs, config, parallelism, report)
    clusters = connected_components(edges)
    report.clusters = len(clusters)
    for cluster in clusters:
        if len(cluster.members) < 2:
            raise ContractViolationError(f"cluster {cluster.id} has fewer than 2 members")
    return DedupResult(clusters=clusters, edges=edges, report=report)
