"""Conflation of cross-registry claims into duplicate sets.

Claims are conflated in five deterministic phases:

1. FAIRsharing claims into re3data seed two-member sets, subject to
   back-claim verification: a re3data profile that claims a *different*
   FAIRsharing profile contradicts the seed, and the whole chain becomes a
   problematic set instead.
2. Each seed grows along its re3data members' claims into OpenDOAR, then
   into ROAR. A target already belonging to another set is a membership
   conflict: the growing set is marked problematic and abandoned.
3. ROAR members that joined in phase 2 contribute their OpenDOAR claims
   under the same membership rule.
4. re3data claims nobody has examined yet seed new sets, one per claiming
   profile, so a single re3data profile claiming into several registries
   yields one multi-registry set. Claims into FAIRsharing are back-claim
   verified exactly as in phase 1, with the direction reversed.
5. Remaining ROAR claims into OpenDOAR either join the set their target
   already belongs to (several ROAR profiles may fan in on one OpenDOAR
   profile) or seed a final two-member set.

Every claim examined along the way is marked processed, including
back-claims read during verification and all outgoing claims of members of
an abandoned set; a processed claim never seeds or extends anything again.

Profiles are visited in canonical ref order and claims in canonical target
order, so the result is a pure function of the input profiles.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import ContractViolationError
from .model import (
    DuplicateSet,
    ProblematicSet,
    ProfileRef,
    Provenance,
    RegistryId,
    RepositoryProfile,
    SetStatus,
    assert_disjoint,
)

log = logging.getLogger(__name__)


@dataclass
class ConflationReport:
    """Accounting for one conflation run."""

    profiles_by_registry: dict[str, int] = field(default_factory=dict)
    claims_total: int = 0
    claims_processed: int = 0
    sets_emitted: int = 0
    problematic: int = 0
    problematic_by_reason: dict[str, int] = field(default_factory=dict)
    dangling: list[tuple[str, str]] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "profilesByRegistry": dict(self.profiles_by_registry),
            "claimsTotal": self.claims_total,
            "claimsProcessed": self.claims_processed,
            "setsEmitted": self.sets_emitted,
            "problematic": self.problematic,
            "problematicByReason": dict(self.problematic_by_reason),
            "dangling": [list(d) for d in self.dangling],
        }


@dataclass
class ConflationResult:
    sets: list[DuplicateSet]
    problematic: list[ProblematicSet]
    report: ConflationReport


class _WorkingSet:
    __slots__ = ("serial", "members", "member_set", "alive")

    def __init__(self, serial: int, members: Iterable[ProfileRef]):
        self.serial = serial
        self.members: list[ProfileRef] = []
        self.member_set: set[ProfileRef] = set()
        self.alive = True
        for m in members:
            self.add(m)

    def add(self, ref: ProfileRef) -> None:
        if ref not in self.member_set:
            self.members.append(ref)
            self.member_set.add(ref)


@dataclass
class _Problem:
    members: list[ProfileRef]
    reason: str
    source_serial: int | None  # the working set that became this problem
    other_serial: int | None
    note_parts: tuple[str, ...]


class _Conflation:
    def __init__(self, profiles: Iterable[RepositoryProfile]):
        self.profiles: dict[ProfileRef, RepositoryProfile] = {}
        for p in profiles:
            if p.ref in self.profiles:
                raise ContractViolationError(f"duplicate profile {p.ref}")
            self.profiles[p.ref] = p
        self.processed: set[tuple[ProfileRef, ProfileRef]] = set()
        self.membership: dict[ProfileRef, _WorkingSet] = {}
        self.working: list[_WorkingSet] = []
        self.problems: list[_Problem] = []
        self.dangling: list[tuple[ProfileRef, ProfileRef]] = []

    # -- claim bookkeeping ------------------------------------------------

    def _refs(self, registry: RegistryId) -> list[ProfileRef]:
        return sorted(r for r in self.profiles if r.registry is registry)

    def _targets(
        self, ref: ProfileRef, registry: RegistryId | None = None
    ) -> list[ProfileRef]:
        profile = self.profiles.get(ref)
        if profile is None:
            return []
        targets = set(profile.claims)
        if registry is not None:
            targets = {t for t in targets if t.registry is registry}
        return sorted(targets)

    def _consume(self, source: ProfileRef, target: ProfileRef) -> bool:
        """Mark a claim processed; False if it already was."""
        if (source, target) in self.processed:
            return False
        self.processed.add((source, target))
        return True

    def _dangle(self, source: ProfileRef, target: ProfileRef) -> None:
        self.dangling.append((source, target))
        log.info("dangling claim %s -> %s (target not in any dump)", source, target)

    def _back_conflict(
        self, source: ProfileRef, target: ProfileRef
    ) -> list[ProfileRef] | None:
        """Check the target's claims back into the source's registry.

        Returns the conflicting targets when the back-claims exist but none
        points at ``source``; returns None (and consumes a matching
        back-claim) when the join is fine. No back-claims at all is fine:
        absence of evidence is not a contradiction.
        """
        back = self._targets(target, source.registry)
        if not back:
            return None
        if source in back:
            self.processed.add((target, source))
            return None
        for b in back:
            self.processed.add((target, b))
        return back

    # -- set construction -------------------------------------------------

    def _new_set(self, *members: ProfileRef) -> _WorkingSet:
        ws = _WorkingSet(len(self.working), members)
        self.working.append(ws)
        for m in ws.members:
            self.membership[m] = ws
        return ws

    def _discard(self, ws: _WorkingSet) -> None:
        ws.alive = False
        for m in ws.members:
            if self.membership.get(m) is ws:
                del self.membership[m]

    def _chain_problem(self, members: list[ProfileRef], note: str) -> None:
        self.problems.append(
            _Problem(
                members=list(dict.fromkeys(members)),
                reason="back-claim-mismatch",
                source_serial=None,
                other_serial=None,
                note_parts=(note,),
            )
        )

    def _membership_conflict(
        self, ws: _WorkingSet, contested: ProfileRef, other: _WorkingSet
    ) -> None:
        """Abandon the growing set; the set already holding ``contested``
        survives and the curator sees the full union as one review item."""
        merged = list(dict.fromkeys([*ws.members, contested, *other.members]))
        ws.alive = False
        for m in ws.members:
            for t in self._targets(m):
                self.processed.add((m, t))
        self.problems.append(
            _Problem(
                members=merged,
                reason="membership-conflict",
                source_serial=ws.serial,
                other_serial=other.serial,
                note_parts=(contested.canonical(),),
            )
        )

    def _extend(self, ws: _WorkingSet, target: ProfileRef) -> bool:
        """Add ``target`` to ``ws`` under the membership rule.

        Returns False when the attempt abandoned ``ws``.
        """
        if target in ws.member_set:
            return True
        other = self.membership.get(target)
        if other is None:
            ws.add(target)
            self.membership[target] = ws
            return True
        self._membership_conflict(ws, target, other)
        return False

    def _link(self, source: ProfileRef, target: ProfileRef) -> None:
        """Join a verified claim pair, growing the source's set."""
        ws = self.membership.get(source)
        other = self.membership.get(target)
        if ws is None and other is None:
            self._new_set(source, target)
            return
        if ws is other:
            return
        if ws is None:
            ws = self._new_set(source)
        self._extend(ws, target)

    # -- phases -------------------------------------------------------

    def _phase1_fairsharing_seeds(self) -> None:
        for source in self._refs(RegistryId.FAIRSHARING):
            for target in self._targets(source):
                if not self._consume(source, target):
                    continue
                if target not in self.profiles:
                    self._dangle(source, target)
                    continue
                conflict = self._back_conflict(source, target)
                if conflict is not None:
                    cited = ", ".join(c.canonical() for c in conflict)
                    self._chain_problem(
                        [source, target, *conflict],
                        f"{source} claims {target}, but {target} claims {cited}",
                    )
                    continue
                self._link(source, target)

    def _phase2_grow_seeds(self) -> None:
        for ws in list(self.working):
            if not ws.alive:
                continue
            rd_members = [m for m in ws.members if m.registry is RegistryId.RE3DATA]
            for registry in (RegistryId.OPENDOAR, RegistryId.ROAR):
                for member in rd_members:
                    for target in self._targets(member, registry):
                        if not self._consume(member, target):
                            continue
                        if target not in self.profiles:
                            self._dangle(member, target)
                            continue
                        if not self._extend(ws, target):
                            break
                    if not ws.alive:
                        break
                if not ws.alive:
                    break

    def _phase3_joined_roar_claims(self) -> None:
        for ws in list(self.working):
            if not ws.alive:
                continue
            rr_members = [m for m in ws.members if m.registry is RegistryId.ROAR]
            for member in rr_members:
                for target in self._targets(member, RegistryId.OPENDOAR):
                    if not self._consume(member, target):
                        continue
                    if target not in self.profiles:
                        self._dangle(member, target)
                        continue
                    if not self._extend(ws, target):
                        break
                if not ws.alive:
                    break

    def _phase4_re3data_seeds(self) -> None:
        for source in self._refs(RegistryId.RE3DATA):
            pending = [
                t
                for t in self._targets(source)
                if (source, t) not in self.processed
            ]
            if not pending:
                continue
            ws = self.membership.get(source)
            created = False
            if ws is None:
                ws = self._new_set(source)
                created = True
            for target in pending:
                if not self._consume(source, target):
                    continue
                if target not in self.profiles:
                    self._dangle(source, target)
                    continue
                if target.registry is RegistryId.FAIRSHARING:
                    conflict = self._back_conflict(source, target)
                    if conflict is not None:
                        cited = ", ".join(c.canonical() for c in conflict)
                        self._chain_problem(
                            [source, target, *conflict],
                            f"{source} claims {target}, but {target} claims {cited}",
                        )
                        continue
                if not self._extend(ws, target):
                    break
            if created and ws.alive and len(ws.members) < 2:
                self._discard(ws)

    def _phase5_roar_pairs(self) -> None:
        for source in self._refs(RegistryId.ROAR):
            for target in self._targets(source, RegistryId.OPENDOAR):
                if not self._consume(source, target):
                    continue
                if target not in self.profiles:
                    self._dangle(source, target)
                    continue
                target_set = self.membership.get(target)
                source_set = self.membership.get(source)
                if target_set is not None:
                    if source_set is target_set:
                        continue
                    if source_set is None:
                        # fan-in: another ROAR profile claiming the same
                        # OpenDOAR profile joins the existing set
                        target_set.add(source)
                        self.membership[source] = target_set
                    else:
                        self._membership_conflict(target_set, source, source_set)
                elif source_set is not None:
                    self._extend(source_set, target)
                else:
                    self._new_set(source, target)

    # -- finalization ---------------------------------------------------

    def run(self) -> ConflationResult:
        self._phase1_fairsharing_seeds()
        self._phase2_grow_seeds()
        self._phase3_joined_roar_claims()
        self._phase4_re3data_seeds()
        self._phase5_roar_pairs()
        return self._finalize()

    def _finalize(self) -> ConflationResult:
        serial_to_id: dict[int, str] = {}
        survivors: list[_WorkingSet] = []
        for ws in self.working:
            if ws.alive and len(ws.members) >= 2:
                survivors.append(ws)
                serial_to_id[ws.serial] = f"cs-{len(survivors):04d}"
        for n, problem in enumerate(self.problems, start=1):
            if problem.source_serial is not None:
                serial_to_id[problem.source_serial] = f"pr-{n:04d}"

        sets = [
            DuplicateSet(
                id=serial_to_id[ws.serial],
                members=frozenset(ws.members),
                provenance=Provenance.CLAIMS_ONLY,
                status=SetStatus.AUTO,
            )
            for ws in survivors
        ]
        problematic: list[ProblematicSet] = []
        for n, problem in enumerate(self.problems, start=1):
            involved: tuple[str, ...] = ()
            note = problem.note_parts[0]
            if problem.reason == "membership-conflict":
                own = ""
                if problem.source_serial is not None:
                    own = serial_to_id.get(problem.source_serial, "")
                other = ""
                if problem.other_serial is not None:
                    other = serial_to_id.get(problem.other_serial, "")
                involved = tuple(i for i in (own, other) if i)
                note = (
                    f"{problem.note_parts[0]} already belongs to {other or 'another set'}; "
                    "the memberships overlap and need curation"
                )
            problematic.append(
                ProblematicSet(
                    id=f"pr-{n:04d}",
                    members=tuple(problem.members),
                    reason=problem.reason,
                    involved_sets=involved,
                    note=note,
                )
            )

        try:
            assert_disjoint(sets)
        except ValueError as exc:
            raise ContractViolationError(f"conflation broke disjointness: {exc}")

        claims_total = sum(len(set(p.claims)) for p in self.profiles.values())
        if len(self.processed) != claims_total:
            raise ContractViolationError(
                f"conflation examined {len(self.processed)} claims "
                f"out of {claims_total}"
            )

        by_registry: dict[str, int] = {r.value: 0 for r in RegistryId}
        for ref in self.profiles:
            by_registry[ref.registry.value] += 1
        by_reason: dict[str, int] = {}
        for p in problematic:
            by_reason[p.reason] = by_reason.get(p.reason, 0) + 1
        report = ConflationReport(
            profiles_by_registry=by_registry,
            claims_total=claims_total,
            claims_processed=len(self.processed),
            sets_emitted=len(sets),
            problematic=len(problematic),
            problematic_by_reason=by_reason,
            dangling=sorted(
                (s.canonical(), t.canonical()) for s, t in self.dangling
            ),
        )
        return ConflationResult(sets=sets, problematic=problematic, report=report)


def conflate_claims(profiles: Iterable[RepositoryProfile]) -> ConflationResult:
    """Conflate cross-registry claims into duplicate sets.

    Deterministic: the same profiles produce the same sets, ids included.
    """
    return _Conflation(profiles).run()


def composition_report(member_sets: Iterable[Iterable[ProfileRef]]) -> dict:
    """Histogram of set sizes with per-size registry combinations.

    Combination labels count repeats, e.g. ``"1x OpenDOAR + 2x ROAR"``, in
    fixed registry order.
    """
    sizes: dict[int, dict] = {}
    total = 0
    for members in member_sets:
        members = list(members)
        total += 1
        counts = {r: 0 for r in RegistryId}
        for m in members:
            counts[m.registry] += 1
        label = " + ".join(
            f"{c}x {r.display_name}" for r, c in counts.items() if c
        )
        bucket = sizes.setdefault(len(members), {"count": 0, "combinations": {}})
        bucket["count"] += 1
        bucket["combinations"][label] = bucket["combinations"].get(label, 0) + 1
    by_size = {}
    for n in sorted(sizes):
        bucket = sizes[n]
        share = bucket["count"] / total if total else 0.0
        by_size[str(n)] = {
            "count": bucket["count"],
            "share": round(share, 4),
            "combinations": dict(
                sorted(bucket["combinations"].items(), key=lambda kv: (-kv[1], kv[0]))
            ),
        }
    return {"total": total, "bySize": by_size}
