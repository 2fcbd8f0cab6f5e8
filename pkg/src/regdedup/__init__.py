"""Semi-automated de-duplication of scholarly repository registries.

The pipeline ingests dumps of FAIRsharing, re3data, OpenDOAR and ROAR,
conflates the cross-registry claims those registries make about each
other, detects further duplicates by name and homepage similarity, fuses
both kinds of evidence into final duplicate sets, and keeps a curator in
the loop for everything the automation is not sure about.
"""

from .claimgraph import (
    ConflationReport,
    ConflationResult,
    composition_report,
    conflate_claims,
)
from .dedup import (
    DedupReport,
    DedupResult,
    UnionFind,
    blocking_keys,
    build_blocks,
    candidate_pairs,
    connected_components,
    match_pairs,
    run_dedup,
)
from .errors import (
    ClaimDirectionError,
    ContractViolationError,
    IngestError,
    IntegrityError,
    NotComparableError,
    NotFoundError,
    RefParseError,
    RegdedupError,
    StageOrderError,
    StaleRunError,
    ValidationError,
)
from .ingest import (
    ClaimRule,
    FieldMapping,
    IngestReport,
    default_mapping,
    ingest_dump_file,
    ingest_json_dump,
    ingest_multiline_csv,
    load_mapping,
    load_mapping_file,
)
from .merge import MergeReport, MergeResult, extend_sets
from .model import (
    CLAIM_MATRIX,
    Cluster,
    DuplicateSet,
    MatchEdge,
    ProblematicSet,
    ProfileRef,
    Provenance,
    RegistryId,
    RepositoryProfile,
    SetStatus,
    SimilarityConfig,
    assert_disjoint,
    format_profile_ref,
    parse_profile_ref,
)
from .normalize import (
    NormalizationOptions,
    normalize_name,
    normalize_url,
    registrable_domain,
    url_host,
)
from .similarity import jaro, jaro_winkler, pair_similarity, url_component
from .store import RunStore, SetView

__version__ = "0.1.0"

__all__ = [
    "CLAIM_MATRIX",
    "ClaimDirectionError",
    "ClaimRule",
    "Cluster",
    "ConflationReport",
    "ConflationResult",
    "ContractViolationError",
    "DedupReport",
    "DedupResult",
    "DuplicateSet",
    "FieldMapping",
    "IngestError",
    "IngestReport",
    "IntegrityError",
    "MatchEdge",
    "MergeReport",
    "MergeResult",
    "NormalizationOptions",
    "NotComparableError",
    "NotFoundError",
    "ProblematicSet",
    "ProfileRef",
    "Provenance",
    "RefParseError",
    "RegdedupError",
    "RegistryId",
    "RepositoryProfile",
    "RunStore",
    "SetStatus",
    "SetView",
    "SimilarityConfig",
    "StageOrderError",
    "StaleRunError",
    "UnionFind",
    "ValidationError",
    "assert_disjoint",
    "blocking_keys",
    "build_blocks",
    "candidate_pairs",
    "composition_report",
    "conflate_claims",
    "connected_components",
    "default_mapping",
    "extend_sets",
    "format_profile_ref",
    "ingest_dump_file",
    "ingest_json_dump",
    "ingest_multiline_csv",
    "jaro",
    "jaro_winkler",
    "load_mapping",
    "load_mapping_file",
    "match_pairs",
    "normalize_name",
    "normalize_url",
    "pair_similarity",
    "parse_profile_ref",
    "registrable_domain",
    "run_dedup",
    "url_component",
    "url_host",
]
