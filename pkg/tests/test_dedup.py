"""Blocking, pair scoring, and clustering."""

from __future__ import annotations

import random

import pytest

from regdedup import (
    MatchEdge,
    ProfileRef,
    RegistryId,
    SimilarityConfig,
    parse_profile_ref,
)
from regdedup.dedup import (
    UnionFind,
    blocking_keys,
    build_blocks,
    candidate_pairs,
    connected_components,
    match_pairs,
    run_dedup,
)
from tests._oracles import components_reference
from tests.conftest import make_profile

DEFAULTS = SimilarityConfig()


def ref(text: str) -> ProfileRef:
    return parse_profile_ref(text)


class TestBlockingKeys:
    def test_name_key_from_first_two_tokens(self):
        p = make_profile("od:1", "Open Free Registry", "http://x.example.org")
        keys = blocking_keys(p, DEFAULTS)
        # fragments "ope" and "fre", sorted then concatenated
        assert "freope" in keys
        assert "x.example.org" in keys

    def test_short_tokens(self):
        p = make_profile("od:1", "Registry of Things")
        assert blocking_keys(p, DEFAULTS) == ["ofreg"]

    def test_single_token_name(self):
        p = make_profile("od:1", "MycoBank")
        assert blocking_keys(p, DEFAULTS) == ["myc"]

    def test_no_name_no_url(self):
        p = make_profile("od:1", "")
        assert blocking_keys(p, DEFAULTS) == []

    def test_url_only(self):
        p = make_profile("od:1", "", "https://www.roar.eprints.org/x")
        assert blocking_keys(p, DEFAULTS) == ["roar.eprints.org"]

    def test_custom_key_shape(self):
        config = SimilarityConfig(name_key_tokens=3, name_key_chars=2)
        p = make_profile("od:1", "Alpha Beta Gamma Delta")
        assert blocking_keys(p, config)[0] == "albega"

    def test_identical_names_identical_keys(self):
        a = make_profile("od:1", "Registry of Open Access")
        b = make_profile("rr:2", "registry OF open access!")
        assert blocking_keys(a, DEFAULTS) == blocking_keys(b, DEFAULTS)


class TestBlocks:
    def test_members_sorted_and_unique(self):
        profiles = [
            make_profile("rr:2", "Same Name"),
            make_profile("od:1", "Same Name"),
            make_profile("rr:10", "Same Name"),
        ]
        blocks = build_blocks(profiles, DEFAULTS)
        (members,) = blocks.values()
        assert members == [ref("od:1"), ref("rr:10"), ref("rr:2")]

    def test_shared_url_host_blocks_together(self):
        profiles = [
            make_profile("od:1", "Alpha", "http://shared.example.org/a"),
            make_profile("rr:2", "Omega", "http://shared.example.org/b"),
        ]
        blocks = build_blocks(profiles, DEFAULTS)
        assert blocks["shared.example.org"] == [ref("od:1"), ref("rr:2")]


class TestCandidatePairs:
    def test_all_pairs_within_block(self):
        blocks = {"k": [ref("od:1"), ref("rr:2"), ref("rr:3")]}
        pairs = candidate_pairs(blocks, DEFAULTS)
        assert pairs == [
            (ref("od:1"), ref("rr:2")),
            (ref("od:1"), ref("rr:3")),
            (ref("rr:2"), ref("rr:3")),
        ]

    def test_pair_deduplicated_across_blocks(self):
        blocks = {
            "a": [ref("od:1"), ref("rr:2")],
            "b": [ref("od:1"), ref("rr:2")],
        }
        assert len(candidate_pairs(blocks, DEFAULTS)) == 1

    def test_truncation(self):
        config = SimilarityConfig(max_block_size=3)
        members = [ref(f"rr:{i:03d}") for i in range(5)]
        from regdedup.dedup import DedupReport

        report = DedupReport()
        pairs = candidate_pairs({"k": members}, config, report)
        assert len(pairs) == 3  # C(3,2) after truncation
        assert report.truncated_blocks == ["k"]
        kept = {m for pair in pairs for m in pair}
        assert kept == set(members[:3])

    def test_window_limits_span(self):
        config = SimilarityConfig(window=2)
        members = [ref(f"rr:{i}") for i in range(1, 5)]
        pairs = candidate_pairs({"k": members}, config)
        # only adjacent members pair up under a window of 2
        assert pairs == [
            (ref("rr:1"), ref("rr:2")),
            (ref("rr:2"), ref("rr:3")),
            (ref("rr:3"), ref("rr:4")),
        ]

    def test_exhaustive_window_equals_no_window(self):
        members = [ref(f"rr:{i}") for i in range(1, 8)]
        wide = SimilarityConfig(window=len(members))
        assert candidate_pairs({"k": members}, wide) == candidate_pairs(
            {"k": members}, DEFAULTS
        )


class TestMatchPairs:
    def make_fixture(self):
        profiles = {
            p.ref: p
            for p in [
                make_profile("od:1", "MycoBank", "http://myco.example.org"),
                make_profile("rr:2", "MycoBank", "http://myco.example.org"),
                make_profile("rr:3", "Completely Different"),
                make_profile("rr:4", "", "http://myco.example.org"),
            ]
        }
        pairs = [
            (ref("od:1"), ref("rr:2")),
            (ref("od:1"), ref("rr:3")),
            (ref("od:1"), ref("rr:4")),
        ]
        return profiles, pairs

    def test_threshold_is_inclusive(self):
        profiles = {
            p.ref: p
            for p in [make_profile("od:1", "abcdef"), make_profile("rr:2", "abcdef")]
        }
        config = SimilarityConfig(threshold=1.0)
        edges = match_pairs(profiles, [(ref("od:1"), ref("rr:2"))], config)
        assert len(edges) == 1
        assert edges[0].score == 1.0

    def test_not_comparable_pairs_skipped(self):
        profiles, pairs = self.make_fixture()
        from regdedup.dedup import DedupReport

        report = DedupReport()
        edges = match_pairs(profiles, pairs, DEFAULTS, report=report)
        assert [(e.a, e.b) for e in edges] == [(ref("od:1"), ref("rr:2"))]
        assert report.pairs_not_comparable == 1
        assert report.pairs_scored == 2
        assert report.matches == 1

    def test_parallelism_matches_serial(self):
        profiles, pairs = self.make_fixture()
        serial = match_pairs(profiles, pairs, DEFAULTS, parallelism=1)
        for workers in (2, 4, 7):
            assert match_pairs(profiles, pairs, DEFAULTS, parallelism=workers) == serial

    def test_parallelism_validated(self):
        with pytest.raises(ValueError):
            match_pairs({}, [], DEFAULTS, parallelism=0)


class TestUnionFind:
    def test_basic(self):
        uf = UnionFind()
        uf.union(1, 2)
        uf.union(2, 3)
        assert uf.find(1) == uf.find(3)
        assert uf.find(4) == 4

    def test_matches_bfs_oracle_on_random_graphs(self):
        rng = random.Random(55)
        for _ in range(200):
            n = rng.randint(2, 30)
            edge_count = min(rng.randint(0, n * 2), n * (n - 1) // 2)
            raw_edges = set()
            while len(raw_edges) < edge_count:
                a, b = rng.sample(range(n), 2)
                raw_edges.add((min(a, b), max(a, b)))
            uf = UnionFind()
            for a, b in raw_edges:
                uf.union(a, b)
            groups: dict[int, set[int]] = {}
            for v in {v for e in raw_edges for v in e}:
                groups.setdefault(uf.find(v), set()).add(v)
            ours = {frozenset(g) for g in groups.values()}
            assert ours == components_reference(raw_edges)


class TestConnectedComponents:
    def test_clusters_ordered_by_smallest_member(self):
        edges = [
            MatchEdge(ref("rr:8"), ref("rr:9"), 0.95),
            MatchEdge(ref("od:1"), ref("rr:5"), 0.92),
        ]
        clusters = connected_components(edges)
        assert [c.id for c in clusters] == ["cl-0001", "cl-0002"]
        assert min(clusters[0].members) == ref("od:1")

    def test_edges_attached_to_cluster(self):
        e1 = MatchEdge(ref("od:1"), ref("rr:5"), 0.92)
        e2 = MatchEdge(ref("rr:5"), ref("rr:9"), 0.91)
        (cluster,) = connected_components([e2, e1])
        assert cluster.members == {ref("od:1"), ref("rr:5"), ref("rr:9")}
        assert cluster.edges == (e1, e2)

    def test_matches_oracle(self):
        rng = random.Random(56)
        pool = [ref(f"rr:{i}") for i in range(40)]
        for _ in range(200):
            edges = []
            seen = set()
            for _ in range(rng.randint(0, 50)):
                a, b = rng.sample(pool, 2)
                a, b = (a, b) if a < b else (b, a)
                if (a, b) in seen:
                    continue
                seen.add((a, b))
                edges.append(MatchEdge(a, b, rng.uniform(0.9, 1.0)))
            clusters = connected_components(edges)
            ours = {frozenset(c.members) for c in clusters}
            assert ours == components_reference((e.a, e.b) for e in edges)


class TestRunDedup:
    def test_corpus_clusters(self, corpus_profiles):
        result = run_dedup(corpus_profiles)
        got = {c.id: frozenset(m.canonical() for m in c.members) for c in result.clusters}
        assert got == {
            "cl-0001": frozenset({"fs:2114", "rd:r3d100010191"}),
            "cl-0002": frozenset({"od:4194", "rd:r3d100011201"}),
            "cl-0003": frozenset({"rr:976", "rr:978"}),
        }
        assert all(e.score == 1.0 for c in result.clusters for e in c.edges)

    def test_report_accounting(self, corpus_profiles):
        result = run_dedup(corpus_profiles)
        report = result.report
        assert report.profiles_considered == len(corpus_profiles)
        assert report.pairs_scored + report.pairs_not_comparable == (
            report.pairs_considered
        )
        assert report.matches == sum(len(c.edges) for c in result.clusters)
        assert report.clusters == 3

    def test_empty_input(self):
        result = run_dedup([])
        assert result.clusters == []
        assert result.edges == []

    def test_deterministic_across_parallelism(self, corpus_profiles):
        base = run_dedup(corpus_profiles, parallelism=1)
        for workers in (2, 5):
            again = run_dedup(corpus_profiles, parallelism=workers)
            assert again.clusters == base.clusters
            assert again.edges == base.edges

    def test_deterministic_across_input_order(self, corpus_profiles):
        base = run_dedup(corpus_profiles)
        rng = random.Random(57)
        for _ in range(10):
            shuffled = list(corpus_profiles)
            rng.shuffle(shuffled)
            assert run_dedup(shuffled).clusters == base.clusters

    def test_lower_threshold_only_adds_edges(self, corpus_profiles):
        strict = {
            (e.a, e.b) for e in run_dedup(corpus_profiles).edges
        }
        lax = {
            (e.a, e.b)
            for e in run_dedup(
                corpus_profiles, SimilarityConfig(threshold=0.7)
            ).edges
        }
        assert strict <= lax
