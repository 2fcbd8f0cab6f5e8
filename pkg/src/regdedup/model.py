"""Canonical domain types shared by all pipeline stages.

Profiles are identified by a two-letter registry prefix plus the
registry-native identifier, e.g. ``fs:2114`` or ``rd:r3d100010191``. That
canonical text form is the bit-exact join key across every file, report and
API payload in this package.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import ClaimDirectionError, RefParseError
from .normalize import NormalizationOptions


class RegistryId(str, enum.Enum):
    FAIRSHARING = "fairsharing"
    RE3DATA = "re3data"
    OPENDOAR = "opendoar"
    ROAR = "roar"

    @property
    def prefix(self) -> str:
        return _PREFIXES[self]

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]


_PREFIXES: dict[RegistryId, str] = {
    RegistryId.FAIRSHARING: "fs",
    RegistryId.RE3DATA: "rd",
    RegistryId.OPENDOAR: "od",
    RegistryId.ROAR: "rr",
}

_BY_PREFIX: dict[str, RegistryId] = {p: r for r, p in _PREFIXES.items()}

_DISPLAY_NAMES: dict[RegistryId, str] = {
    RegistryId.FAIRSHARING: "FAIRsharing",
    RegistryId.RE3DATA: "re3data",
    RegistryId.OPENDOAR: "OpenDOAR",
    RegistryId.ROAR: "ROAR",
}

# Who may claim into whom. Claims are always cross-registry; OpenDOAR emits
# none in the Feb 2022 data, so it is claim-free here until a dump proves
# otherwise.
CLAIM_MATRIX: dict[RegistryId, frozenset[RegistryId]] = {
    RegistryId.FAIRSHARING: frozenset({RegistryId.RE3DATA}),
    RegistryId.RE3DATA: frozenset(
        {RegistryId.FAIRSHARING, RegistryId.OPENDOAR, RegistryId.ROAR}
    ),
    RegistryId.OPENDOAR: frozenset(),
    RegistryId.ROAR: frozenset({RegistryId.OPENDOAR}),
}


@dataclass(frozen=True, order=True)
class ProfileRef:
    """One registry's identifier for a repository profile.

    Ordering and equality follow the canonical text form, so sorting a list
    of refs sorts by ``"<prefix>:<localId>"``.
    """

    registry: RegistryId = field(compare=False)
    local_id: str = field(compare=False)
    _key: str = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.local_id:
            raise RefParseError("profile ref has empty local id")
        object.__setattr__(self, "_key", f"{self.registry.prefix}:{self.local_id}")

    def canonical(self) -> str:
        return self._key

    def __str__(self) -> str:
        return self._key


def parse_profile_ref(text: str) -> ProfileRef:
    """Parse canonical ``"<prefix>:<localId>"`` text into a ProfileRef."""
    if not text:
        raise RefParseError("empty profile ref")
    if any(ch.isspace() for ch in text):
        raise RefParseError(f"profile ref contains whitespace: {text!r}")
    prefix, sep, local_id = text.partition(":")
    if not sep:
        raise RefParseError(f"profile ref has no ':' separator: {text!r}")
    registry = _BY_PREFIX.get(prefix)
    if registry is None:
        raise RefParseError(f"unknown registry prefix {prefix!r} in {text!r}")
    if not local_id:
        raise RefParseError(f"profile ref has empty local id: {text!r}")
    return ProfileRef(registry, local_id)


def format_profile_ref(ref: ProfileRef) -> str:
    """Inverse of :func:`parse_profile_ref`."""
    return ref.canonical()


@dataclass(frozen=True)
class RepositoryProfile:
    """One registry's record of a repository, with its outgoing claims.

    ``name`` may be empty when the source record had no mappable name; such
    profiles stay claimable but are excluded from similarity matching.
    Claim directions are checked at construction.
    """

    ref: ProfileRef
    name: str = ""
    homepage_url: str | None = None
    claims: tuple[ProfileRef, ...] = ()
    raw: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        allowed = CLAIM_MATRIX[self.ref.registry]
        for target in self.claims:
            if target.registry == self.ref.registry:
                raise ClaimDirectionError(
                    f"{self.ref} claims {target} within its own registry"
                )
            if target.registry not in allowed:
                raise ClaimDirectionError(
                    f"{self.ref} ({self.ref.registry.value}) may not claim into "
                    f"{target.registry.value} ({target})"
                )


class Provenance(str, enum.Enum):
    CLAIMS_ONLY = "claims-only"
    DEDUP_ONLY = "dedup-only"
    EXTENDED = "extended"
    MERGED = "merged"


class SetStatus(str, enum.Enum):
    AUTO = "auto"
    NEEDS_REVIEW = "needs-review"
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    AMENDED = "amended"


@dataclass(frozen=True)
class DuplicateSet:
    """A group of profiles asserted to be the same repository."""

    id: str
    members: frozenset[ProfileRef]
    provenance: Provenance
    status: SetStatus
    history: tuple[dict, ...] = ()
    notes: str | None = None

    def sorted_members(self) -> list[ProfileRef]:
        return sorted(self.members)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "members": [m.canonical() for m in self.sorted_members()],
            "provenance": self.provenance.value,
            "status": self.status.value,
            "history": list(self.history),
            "notes": self.notes,
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "DuplicateSet":
        return cls(
            id=record["id"],
            members=frozenset(parse_profile_ref(m) for m in record["members"]),
            provenance=Provenance(record["provenance"]),
            status=SetStatus(record["status"]),
            history=tuple(record.get("history") or ()),
            notes=record.get("notes"),
        )


@dataclass(frozen=True)
class ProblematicSet:
    """A conflict found while conflating claims; a human has to untangle it.

    Members keep discovery order because the chain reads better that way in
    review (claimer, claimed, then whatever the claimed profile points at).
    ``involved_sets`` names the set ids whose membership collided, when the
    reason is a membership conflict.
    """

    id: str
    members: tuple[ProfileRef, ...]
    reason: str
    involved_sets: tuple[str, ...] = ()
    note: str | None = None

    def __post_init__(self) -> None:
        if len(self.members) < 3:
            raise ValueError(
                f"problematic set {self.id} has {len(self.members)} members; "
                "a conflict always involves at least three profiles"
            )
        if len(set(self.members)) != len(self.members):
            raise ValueError(f"problematic set {self.id} repeats a member")
        if self.reason not in ("back-claim-mismatch", "membership-conflict"):
            raise ValueError(f"unknown problematic reason {self.reason!r}")

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "members": [m.canonical() for m in self.members],
            "reason": self.reason,
            "involvedSets": list(self.involved_sets),
            "note": self.note,
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "ProblematicSet":
        return cls(
            id=record["id"],
            members=tuple(parse_profile_ref(m) for m in record["members"]),
            reason=record["reason"],
            involved_sets=tuple(record.get("involvedSets") or ()),
            note=record.get("note"),
        )


@dataclass(frozen=True, order=True)
class MatchEdge:
    """An undirected similarity match, stored with a < b canonically."""

    a: ProfileRef
    b: ProfileRef
    score: float

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError(f"self-edge on {self.a}")
        if not self.a < self.b:
            raise ValueError(f"edge not canonically ordered: {self.a} >= {self.b}")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")


@dataclass(frozen=True)
class Cluster:
    """A connected component emitted by the automatic de-duplicator."""

    id: str
    members: frozenset[ProfileRef]
    edges: tuple[MatchEdge, ...]

    def sorted_members(self) -> list[ProfileRef]:
        return sorted(self.members)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "members": [m.canonical() for m in self.sorted_members()],
            "edges": [
                {"a": e.a.canonical(), "b": e.b.canonical(), "score": e.score}
                for e in self.edges
            ],
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "Cluster":
        return cls(
            id=record["id"],
            members=frozenset(parse_profile_ref(m) for m in record["members"]),
            edges=tuple(
                MatchEdge(
                    parse_profile_ref(e["a"]), parse_profile_ref(e["b"]), e["score"]
                )
                for e in record.get("edges") or ()
            ),
        )


@dataclass(frozen=True)
class SimilarityConfig:
    """Knobs for blocking and pairwise matching.

    The 0.9 default threshold is deliberately precision-leaning. ``window``
    is the sliding-window size within a block; ``None`` compares every pair
    in the block. Blocks larger than ``max_block_size`` are truncated (with
    a warning) to bound degenerate keys.
    """

    threshold: float = 0.9
    name_weight: float = 0.8
    url_exact_override: bool = True
    window: int | None = None
    max_block_size: int = 50
    name_key_tokens: int = 2
    name_key_chars: int = 3
    normalization: NormalizationOptions = field(default_factory=NormalizationOptions)

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")
        if not 0.0 <= self.name_weight <= 1.0:
            raise ValueError(f"nameWeight {self.name_weight} outside [0, 1]")
        if self.window is not None and self.window < 2:
            raise ValueError(f"window size {self.window} < 2")
        if self.max_block_size < 2:
            raise ValueError(f"max block size {self.max_block_size} < 2")

    def to_record(self) -> dict:
        return {
            "threshold": self.threshold,
            "nameWeight": self.name_weight,
            "urlExactOverride": self.url_exact_override,
            "window": self.window,
            "maxBlockSize": self.max_block_size,
            "nameKeyTokens": self.name_key_tokens,
            "nameKeyChars": self.name_key_chars,
            "normalization": self.normalization.to_record(),
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "SimilarityConfig":
        kwargs: dict[str, Any] = {}
        if "threshold" in record:
            kwargs["threshold"] = float(record["threshold"])
        if "nameWeight" in record:
            kwargs["name_weight"] = float(record["nameWeight"])
        if "urlExactOverride" in record:
            kwargs["url_exact_override"] = bool(record["urlExactOverride"])
        if "window" in record:
            kwargs["window"] = record["window"]
        if "maxBlockSize" in record:
            kwargs["max_block_size"] = int(record["maxBlockSize"])
        if "nameKeyTokens" in record:
            kwargs["name_key_tokens"] = int(record["nameKeyTokens"])
        if "nameKeyChars" in record:
            kwargs["name_key_chars"] = int(record["nameKeyChars"])
        if "normalization" in record:
            kwargs["normalization"] = NormalizationOptions.from_record(
                record["normalization"]
            )
        return cls(**kwargs)


def assert_disjoint(sets: Iterable[DuplicateSet]) -> None:
    """Raise ValueError if any profile appears in two of the given sets."""
    seen: dict[ProfileRef, str] = {}
    for s in sets:
        for m in s.members:
            if m in seen:
                raise ValueError(
                    f"{m} appears in both {seen[m]} and {s.id}"
                )
            seen[m] = s.id
