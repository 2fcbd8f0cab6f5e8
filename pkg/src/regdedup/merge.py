"""Fusing claim-derived sets with similarity clusters.

Sets and clusters form a bipartite intersection graph: a cluster touches a
set when they share a member. Connected components fuse into final sets.

Provenance tracks the evidence lineage. A set that grows by cluster
evidence becomes ``extended`` (keeping its id); two or more sets bridged by
a cluster become one ``merged`` set under a fresh ``mg-`` id; a cluster
touching no set is promoted to a ``dedup-only`` set under a ``dd-`` id.
Sets the clusters leave alone pass through byte-identical, id, provenance,
status and history included, which makes the merge idempotent. Anything
grown, fused or promoted is flagged for review.

Rejected sets never participate: a curator already ruled their grouping
out, so they pass through and their members are invisible to the graph.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dedup import UnionFind
from .errors import ContractViolationError
from .model import (
    Cluster,
    DuplicateSet,
    ProfileRef,
    Provenance,
    SetStatus,
    assert_disjoint,
)

log = logging.getLogger(__name__)

_CLAIM_LINEAGE = (Provenance.CLAIMS_ONLY, Provenance.EXTENDED, Provenance.MERGED)


@dataclass
class MergeReport:
    """Accounting for one merge run.

    ``extension_events`` counts every set that gained members through
    cluster evidence; ``fusion_events`` counts the set-to-set junctions.
    Each component of the intersection graph that grew contributes its set
    count to the former and one less to the latter, so

        extension_events - fusion_events == unique_grown_sets

    always holds.
    """

    input_sets: int = 0
    input_clusters: int = 0
    extension_events: int = 0
    fusion_events: int = 0
    unique_grown_sets: int = 0
    extended_sets: int = 0
    merged_sets: int = 0
    dedup_only_sets: int = 0
    fully_overlapping_clusters: int = 0
    unchanged_sets: int = 0
    rejected_passthrough: int = 0
    events: list[dict] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "inputSets": self.input_sets,
            "inputClusters": self.input_clusters,
            "extensionEvents": self.extension_events,
            "fusionEvents": self.fusion_events,
            "uniqueGrownSets": self.unique_grown_sets,
            "extendedSets": self.extended_sets,
            "mergedSets": self.merged_sets,
            "dedupOnlySets": self.dedup_only_sets,
            "fullyOverlappingClusters": self.fully_overlapping_clusters,
            "unchangedSets": self.unchanged_sets,
            "rejectedPassthrough": self.rejected_passthrough,
            "events": list(self.events),
        }


@dataclass
class MergeResult:
    final_sets: list[DuplicateSet]
    report: MergeReport


def _next_id(prefix: str, existing: Iterable[str]) -> int:
    pattern = re.compile(rf"^{prefix}-(\d+)$")
    highest = 0
    for sid in existing:
        m = pattern.match(sid)
        if m:
            highest = max(highest, int(m.group(1)))
    return highest + 1


def _grown_provenance(previous: Provenance) -> Provenance:
    if previous is Provenance.CLAIMS_ONLY:
        return Provenance.EXTENDED
    # dedup-only growth stays dedup-only: no claim was involved, before or
    # now; extended and merged already record their mixed lineage
    return previous


def _fused_provenance(parts: Sequence[DuplicateSet]) -> Provenance:
    if any(s.provenance in _CLAIM_LINEAGE for s in parts):
        return Provenance.MERGED
    return Provenance.DEDUP_ONLY


def extend_sets(
    sets: Sequence[DuplicateSet], clusters: Sequence[Cluster]
) -> MergeResult:
    """Fuse duplicate sets with similarity clusters into final sets."""
    report = MergeReport(input_sets=len(sets), input_clusters=len(clusters))
    active: list[DuplicateSet] = []
    passthrough: list[DuplicateSet] = []
    for s in sets:
        if s.status is SetStatus.REJECTED:
            passthrough.append(s)
            report.rejected_passthrough += 1
        else:
            active.append(s)

    try:
        assert_disjoint(active)
    except ValueError as exc:
        raise ContractViolationError(f"input sets overlap: {exc}")

    # connect refs shared by any set or cluster; a component is everything
    # reachable through shared members, so clusters can chain to a set
    # through other clusters
    uf = UnionFind()
    for s in active:
        anchor, *rest = sorted(s.members)
        for m in rest:
            uf.union(anchor, m)
    for cluster in clusters:
        anchor, *rest = sorted(cluster.members)
        for m in rest:
            uf.union(anchor, m)

    sets_by_root: dict[ProfileRef, list[DuplicateSet]] = {}
    for s in active:
        sets_by_root.setdefault(uf.find(next(iter(s.members))), []).append(s)
    clusters_by_root: dict[ProfileRef, list[Cluster]] = {}
    for cluster in clusters:
        root = uf.find(next(iter(cluster.members)))
        clusters_by_root.setdefault(root, []).append(cluster)

    live = [
        {"sets": comp_sets, "clusters": clusters_by_root.get(root, [])}
        for root, comp_sets in sets_by_root.items()
    ]
    live.sort(key=lambda c: min(s.id for s in c["sets"]))
    cluster_only = [
        comp_clusters
        for root, comp_clusters in clusters_by_root.items()
        if root not in sets_by_root
    ]
    cluster_only.sort(key=lambda cs: min(c.id for c in cs))

    final: list[DuplicateSet] = list(passthrough)
    existing_ids = [s.id for s in sets]
    next_mg = _next_id("mg", existing_ids)
    next_dd = _next_id("dd", existing_ids)
    for comp in live:
        comp_sets: list[DuplicateSet] = sorted(comp["sets"], key=lambda s: s.id)
        comp_clusters: list[Cluster] = sorted(comp["clusters"], key=lambda c: c.id)
        union: set[ProfileRef] = set()
        for s in comp_sets:
            union.update(s.members)
        for c in comp_clusters:
            union.update(c.members)
        added = sorted(union - set().union(*(s.members for s in comp_sets)))

        if len(comp_sets) == 1:
            s = comp_sets[0]
            if not added:
                final.append(s)
                report.unchanged_sets += 1
                report.fully_overlapping_clusters += len(comp_clusters)
                continue
            report.extension_events += 1
            report.unique_grown_sets += 1
            report.extended_sets += 1
            cluster_ids = [c.id for c in comp_clusters]
            added_ids = [m.canonical() for m in added]
            entry = {"event": "extended", "clusters": cluster_ids, "added": added_ids}
            final.append(
                DuplicateSet(
                    id=s.id,
                    members=frozenset(union),
                    provenance=_grown_provenance(s.provenance),
                    status=SetStatus.NEEDS_REVIEW,
                    history=(*s.history, entry),
                    notes=s.notes,
                )
            )
            report.events.append(
                {"type": "extended", "set": s.id, "clusters": cluster_ids, "added": added_ids}
            )
            continue

        k = len(comp_sets)
        report.extension_events += k
        report.fusion_events += k - 1
        report.unique_grown_sets += 1
        report.merged_sets += 1
        new_id = f"mg-{next_mg:04d}"
        next_mg += 1
        entry = {
            "event": "merged",
            "sets": [s.id for s in comp_sets],
            "clusters": [c.id for c in comp_clusters],
            "added": [m.canonical() for m in added],
        }
        final.append(
            DuplicateSet(
                id=new_id,
                members=frozenset(union),
                provenance=_fused_provenance(comp_sets),
                status=SetStatus.NEEDS_REVIEW,
                history=(entry,),
            )
        )
        report.events.append(
            {
                "type": "merged",
                "id": new_id,
                "sets": entry["sets"],
                "clusters": entry["clusters"],
                "added": entry["added"],
            }
        )

    for comp_clusters in cluster_only:
        comp_clusters = sorted(comp_clusters, key=lambda c: c.id)
        new_id = f"dd-{next_dd:04d}"
        next_dd += 1
        report.dedup_only_sets += 1
        union = frozenset().union(*(c.members for c in comp_clusters))
        cluster_ids = [c.id for c in comp_clusters]
        final.append(
            DuplicateSet(
                id=new_id,
                members=union,
                provenance=Provenance.DEDUP_ONLY,
                status=SetStatus.NEEDS_REVIEW,
                history=({"event": "promoted", "clusters": cluster_ids},),
            )
        )
        report.events.append(
            {"type": "promoted", "id": new_id, "clusters": cluster_ids}
        )

    if report.extension_events - report.fusion_events != report.unique_grown_sets:
        raise ContractViolationError(
            f"merge bookkeeping is inconsistent: {report.extension_events} "
            f"extensions - {report.fusion_events} fusions != "
            f"{report.unique_grown_sets} grown sets"
        )
    try:
        assert_disjoint([s for s in final if s.status is not SetStatus.REJECTED])
    except ValueError as exc:
        raise ContractViolationError(f"merge broke disjointness: {exc}")

    final.sort(key=lambda s: s.id)
    return MergeResult(final_sets=final, report=report)
