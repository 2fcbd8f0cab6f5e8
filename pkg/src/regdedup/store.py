"""Plain-file run directory.

Every pipeline stage reads and writes ordinary JSON files under one
directory, so a run can be inspected, diffed, versioned and shipped with
nothing fancier than a shell. Record streams are JSON Lines with sorted
keys and compact separators; reports are indented JSON documents. Both are
deterministic, so rerunning a stage on the same inputs rewrites the same
bytes.

``manifest.json`` tracks which stages have run and the SHA-256 digest of
every stage output. The digests double as an integrity check and as the
run id: any stage rerun changes the run id, which lets review clients
detect that their queue went stale.

``decisions.jsonl`` is the append-only curation log. Nothing ever rewrites
it; the current status of a set is derived by replaying decisions over the
stage outputs, the latest decision per set winning.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .claimgraph import ConflationReport, ConflationResult, composition_report
from .dedup import DedupReport, DedupResult
from .errors import (
    IntegrityError,
    NotFoundError,
    StageOrderError,
    StaleRunError,
    ValidationError,
)
from .ingest import IngestReport, profile_from_record, profiles_to_records
from .merge import MergeReport, MergeResult
from .model import (
    Cluster,
    DuplicateSet,
    ProblematicSet,
    ProfileRef,
    RepositoryProfile,
    SetStatus,
    SimilarityConfig,
    parse_profile_ref,
)

log = logging.getLogger(__name__)

STAGE_ORDER = ("ingest", "conflate", "dedup", "merge")

_STAGE_FILES = {
    "ingest": ("profiles.jsonl", "ingest_report.json"),
    "conflate": ("claim_sets.jsonl", "problematic.jsonl", "conflation_report.json"),
    "dedup": ("clusters.jsonl", "dedup_report.json", "similarity_config.json"),
    "merge": ("final_sets.jsonl", "merge_report.json"),
}

_STAGE_COMMANDS = {
    "ingest": "regdedup ingest",
    "conflate": "regdedup conflate",
    "dedup": "regdedup dedup",
    "merge": "regdedup merge",
}

_DECIDABLE = ("accept", "reject", "amend")

# statuses that place a set in the curated, disjoint cover
_COVER = (SetStatus.AUTO.value, SetStatus.ACCEPTED.value, SetStatus.AMENDED.value)


def _dump_line(record: Mapping[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _dump_doc(record: Mapping[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class SetView:
    """One reviewable item: a duplicate set or a problematic set, with its
    decision-derived status applied."""

    id: str
    kind: str  # "set" or "problematic"
    members: tuple[ProfileRef, ...]
    provenance: str
    status: str
    reason: str | None = None
    note: str | None = None
    history: tuple[dict, ...] = ()
    decision: dict | None = None

    def in_cover(self) -> bool:
        if self.kind == "set":
            return self.status in _COVER
        return self.status in (SetStatus.ACCEPTED.value, SetStatus.AMENDED.value)


class RunStore:
    """All reads and writes for one run directory."""

    def __init__(self, root: str | Path, create: bool = False):
        self.root = Path(root)
        if create:
            self.root.mkdir(parents=True, exist_ok=True)
        if not self.root.is_dir():
            raise ValidationError(f"run directory does not exist: {self.root}")

    # -- low-level io ---------------------------------------------------

    def _path(self, name: str) -> Path:
        return self.root / name

    def _write_atomic(self, name: str, text: str) -> None:
        tmp = self._path(name + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, self._path(name))

    def _write_lines(self, name: str, records: Iterable[Mapping[str, Any]]) -> None:
        self._write_atomic(name, "".join(_dump_line(r) + "\n" for r in records))

    def _read_lines(self, name: str) -> list[dict]:
        path = self._path(name)
        if not path.exists():
            return []
        records = []
        with path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records

    def _read_doc(self, name: str) -> dict:
        path = self._path(name)
        if not path.exists():
            return {}
        return json.loads(path.read_text(encoding="utf-8"))

    # -- manifest and stages ---------------------------------------------

    def manifest(self) -> dict:
        return self._read_doc("manifest.json")

    def _digest(self, name: str) -> str:
        return hashlib.sha256(self._path(name).read_bytes()).hexdigest()

    def _record_stage(self, stage: str) -> None:
        manifest = self.manifest()
        stages = manifest.get("stages") or {}
        stages[stage] = {
            "files": {name: self._digest(name) for name in _STAGE_FILES[stage]}
        }
        # anything downstream of a rewritten stage is stale: drop it
        position = STAGE_ORDER.index(stage)
        for later in STAGE_ORDER[position + 1 :]:
            if later in stages:
                del stages[later]
                for name in _STAGE_FILES[later]:
                    self._path(name).unlink(missing_ok=True)
        manifest["version"] = 1
        manifest["stages"] = stages
        manifest["runId"] = self._run_id_for(stages)
        self._write_atomic("manifest.json", _dump_doc(manifest))

    @staticmethod
    def _run_id_for(stages: Mapping[str, Any]) -> str:
        h = hashlib.sha256()
        for stage in sorted(stages):
            for name, digest in sorted(stages[stage].get("files", {}).items()):
                h.update(f"{stage}:{name}:{digest}\n".encode())
        return h.hexdigest()[:12]

    def run_id(self) -> str:
        return self.manifest().get("runId", "")

    def stage_done(self, stage: str) -> bool:
        return stage in (self.manifest().get("stages") or {})

    def require_stage(self, stage: str) -> None:
        if not self.stage_done(stage):
            raise StageOrderError(
                f"stage {stage!r} has not run in {self.root}; "
                f"run `{_STAGE_COMMANDS[stage]}` first",
                expected_command=_STAGE_COMMANDS[stage],
            )

    def verify_integrity(self) -> None:
        """Recompute stage file digests against the manifest."""
        stages = self.manifest().get("stages") or {}
        for stage, entry in stages.items():
            for name, digest in entry.get("files", {}).items():
                path = self._path(name)
                if not path.exists():
                    raise IntegrityError(f"{name} is recorded in the manifest but missing")
                actual = self._digest(name)
                if actual != digest:
                    raise IntegrityError(
                        f"{name} does not match its manifest digest "
                        f"(expected {digest[:12]}…, found {actual[:12]}…)"
                    )

    # -- stage writes ----------------------------------------------------

    def write_ingest(
        self,
        profiles: Sequence[RepositoryProfile],
        reports: Sequence[IngestReport],
    ) -> None:
        ordered = sorted(profiles, key=lambda p: p.ref)
        self._write_lines("profiles.jsonl", profiles_to_records(ordered))
        self._write_atomic(
            "ingest_report.json",
            _dump_doc({"registries": [r.to_record() for r in reports]}),
        )
        self._record_stage("ingest")

    def write_conflation(self, result: ConflationResult) -> None:
        self.require_stage("ingest")
        self._write_lines("claim_sets.jsonl", (s.to_record() for s in result.sets))
        self._write_lines(
            "problematic.jsonl", (p.to_record() for p in result.problematic)
        )
        self._write_atomic(
            "conflation_report.json", _dump_doc(result.report.to_record())
        )
        self._record_stage("conflate")

    def write_dedup(self, result: DedupResult, config: SimilarityConfig) -> None:
        self.require_stage("ingest")
        self._write_lines("clusters.jsonl", (c.to_record() for c in result.clusters))
        self._write_atomic("dedup_report.json", _dump_doc(result.report.to_record()))
        self._write_atomic("similarity_config.json", _dump_doc(config.to_record()))
        self._record_stage("dedup")

    def write_merge(self, result: MergeResult) -> None:
        self.require_stage("conflate")
        self.require_stage("dedup")
        self._write_lines("final_sets.jsonl", (s.to_record() for s in result.final_sets))
        self._write_atomic("merge_report.json", _dump_doc(result.report.to_record()))
        self._record_stage("merge")

    # -- stage reads -----------------------------------------------------

    def read_profiles(self) -> list[RepositoryProfile]:
        self.require_stage("ingest")
        return [profile_from_record(r) for r in self._read_lines("profiles.jsonl")]

    def profiles_by_ref(self) -> dict[ProfileRef, RepositoryProfile]:
        return {p.ref: p for p in self.read_profiles()}

    def read_claim_sets(self) -> list[DuplicateSet]:
        self.require_stage("conflate")
        return [DuplicateSet.from_record(r) for r in self._read_lines("claim_sets.jsonl")]

    def read_problematic(self) -> list[ProblematicSet]:
        self.require_stage("conflate")
        return [
            ProblematicSet.from_record(r) for r in self._read_lines("problematic.jsonl")
        ]

    def read_clusters(self) -> list[Cluster]:
        self.require_stage("dedup")
        return [Cluster.from_record(r) for r in self._read_lines("clusters.jsonl")]

    def read_similarity_config(self) -> SimilarityConfig:
        self.require_stage("dedup")
        return SimilarityConfig.from_record(self._read_doc("similarity_config.json"))

    def read_final_sets(self) -> list[DuplicateSet]:
        self.require_stage("merge")
        return [DuplicateSet.from_record(r) for r in self._read_lines("final_sets.jsonl")]

    def read_report(self, stage: str) -> dict:
        names = {
            "ingest": "ingest_report.json",
            "conflate": "conflation_report.json",
            "dedup": "dedup_report.json",
            "merge": "merge_report.json",
        }
        self.require_stage(stage)
        return self._read_doc(names[stage])

    def current_sets(self) -> list[DuplicateSet]:
        """Final sets when the merge has run, claim sets otherwise."""
        if self.stage_done("merge"):
            return self.read_final_sets()
        return self.read_claim_sets()

    # -- decisions ---------------------------------------------------------

    def read_decisions(self) -> list[dict]:
        return self._read_lines("decisions.jsonl")

    def _latest_decisions(self) -> dict[str, dict]:
        """Latest decision per set id, ignoring decisions made against a
        different run: a rerun stage changes the run id, and a set id that
        happens to recur may describe entirely different members."""
        current = self.run_id()
        latest: dict[str, dict] = {}
        for record in self.read_decisions():
            if record.get("runId") == current:
                latest[record["setId"]] = record
        return latest

    def current_view(self) -> list[SetView]:
        """Sets and problematic sets with decisions replayed on top."""
        self.require_stage("conflate")
        latest = self._latest_decisions()
        views: list[SetView] = []
        for s in self.current_sets():
            decision = latest.get(s.id)
            status = s.status.value
            members = tuple(s.sorted_members())
            if decision is not None:
                action = decision["action"]
                if action == "accept":
                    status = SetStatus.ACCEPTED.value
                elif action == "reject":
                    status = SetStatus.REJECTED.value
                elif action == "amend":
                    status = SetStatus.AMENDED.value
                    members = tuple(
                        sorted(parse_profile_ref(m) for m in decision["members"])
                    )
            views.append(
                SetView(
                    id=s.id,
                    kind="set",
                    members=members,
                    provenance=s.provenance.value,
                    status=status,
                    note=s.notes,
                    history=s.history,
                    decision=decision,
                )
            )
        for p in self.read_problematic():
            decision = latest.get(p.id)
            status = SetStatus.NEEDS_REVIEW.value
            members = tuple(p.members)
            if decision is not None:
                action = decision["action"]
                if action == "accept":
                    status = SetStatus.ACCEPTED.value
                elif action == "reject":
                    status = SetStatus.REJECTED.value
                elif action == "amend":
                    status = SetStatus.AMENDED.value
                    members = tuple(
                        sorted(parse_profile_ref(m) for m in decision["members"])
                    )
            views.append(
                SetView(
                    id=p.id,
                    kind="problematic",
                    members=members,
                    provenance="problematic",
                    status=status,
                    reason=p.reason,
                    note=p.note,
                    decision=decision,
                )
            )
        views.sort(key=lambda v: v.id)
        return views

    def get_view(self, set_id: str) -> SetView:
        for view in self.current_view():
            if view.id == set_id:
                return view
        raise NotFoundError(f"no set {set_id!r} in this run")

    def pending_review(self) -> list[SetView]:
        return [
            v
            for v in self.current_view()
            if v.status == SetStatus.NEEDS_REVIEW.value
        ]

    def append_decision(
        self,
        set_id: str,
        action: str,
        members: Sequence[str] | None = None,
        note: str | None = None,
        decided_by: str | None = None,
        expected_run_id: str | None = None,
    ) -> dict:
        """Validate and append one curation decision.

        A decision must keep the curated cover disjoint: accepting or
        amending a set whose members already belong to another accepted,
        amended or automatic set is refused, which forces the curator to
        reject the colliding set first.
        """
        self.require_stage("conflate")
        current_run = self.run_id()
        if expected_run_id is not None and expected_run_id != current_run:
            raise StaleRunError(
                f"decision was prepared against run {expected_run_id!r} but the "
                f"directory now holds run {current_run!r}"
            )
        if action not in _DECIDABLE:
            raise ValidationError(
                f"unknown action {action!r}; expected one of {', '.join(_DECIDABLE)}"
            )
        views = {v.id: v for v in self.current_view()}
        target = views.get(set_id)
        if target is None:
            raise NotFoundError(f"no set {set_id!r} in this run")

        effective: tuple[ProfileRef, ...]
        if action == "amend":
            if not members:
                raise ValidationError("amend requires the kept member list")
            try:
                parsed = [parse_profile_ref(m) for m in members]
            except Exception as exc:
                raise ValidationError(str(exc))
            if len(set(parsed)) != len(parsed):
                raise ValidationError("amended member list repeats a profile")
            if len(parsed) < 2:
                raise ValidationError(
                    "an amended set needs at least two members; reject it instead"
                )
            known = {p.ref for p in self.read_profiles()}
            for ref in parsed:
                if ref not in known:
                    raise ValidationError(f"unknown profile {ref} in amended members")
            effective = tuple(sorted(parsed))
        else:
            if members:
                raise ValidationError(f"action {action!r} does not take members")
            effective = target.members

        if action in ("accept", "amend"):
            occupied: dict[ProfileRef, str] = {}
            for view in views.values():
                if view.id == set_id or not view.in_cover():
                    continue
                for m in view.members:
                    occupied[m] = view.id
            for ref in effective:
                if ref in occupied:
                    raise ValidationError(
                        f"{ref} already belongs to {occupied[ref]}; reject or amend "
                        "that set first to keep the curated sets disjoint"
                    )

        record: dict[str, Any] = {
            "seq": len(self.read_decisions()) + 1,
            "setId": set_id,
            "action": action,
            "decidedAt": _dt.datetime.now(_dt.timezone.utc).isoformat(
                timespec="seconds"
            ),
            "runId": current_run,
        }
        if action == "amend":
            record["members"] = [m.canonical() for m in effective]
        if note:
            record["note"] = note
        if decided_by:
            record["decidedBy"] = decided_by
        with self._path("decisions.jsonl").open("a", encoding="utf-8") as fh:
            fh.write(_dump_line(record) + "\n")
        return record

    # -- derived outputs ---------------------------------------------------

    def export_curated(self) -> list[dict]:
        """The curated cover with member detail, ready for downstream use.

        Accepted and amended sets plus automatic sets nobody disputed;
        rejected sets and anything still awaiting review are left out.
        """
        profiles = self.profiles_by_ref()
        out = []
        for view in self.current_view():
            if not view.in_cover():
                continue
            members = []
            for ref in view.members:
                profile = profiles.get(ref)
                members.append(
                    {
                        "id": ref.canonical(),
                        "registry": ref.registry.value,
                        "name": profile.name if profile else None,
                        "url": profile.homepage_url if profile else None,
                    }
                )
            out.append(
                {
                    "id": view.id,
                    "provenance": view.provenance,
                    "status": view.status,
                    "members": members,
                }
            )
        return out

    def stats(self) -> dict:
        """Status, provenance and composition summary of the current view."""
        views = self.current_view()
        by_status: dict[str, int] = {}
        by_provenance: dict[str, int] = {}
        for v in views:
            by_status[v.status] = by_status.get(v.status, 0) + 1
            by_provenance[v.provenance] = by_provenance.get(v.provenance, 0) + 1
        composition = composition_report(
            v.members for v in views if v.kind == "set" and v.status != "rejected"
        )
        return {
            "runId": self.run_id(),
            "sets": sum(1 for v in views if v.kind == "set"),
            "problematic": sum(1 for v in views if v.kind == "problematic"),
            "pendingReview": sum(
                1 for v in views if v.status == SetStatus.NEEDS_REVIEW.value
            ),
            "byStatus": dict(sorted(by_status.items())),
            "byProvenance": dict(sorted(by_provenance.items())),
            "composition": composition,
        }


__all__ = [
    "RunStore",
    "SetView",
    "STAGE_ORDER",
    "ConflationReport",
    "DedupReport",
    "MergeReport",
]
