"""Dump ingestion: JSON and CSV parsing, field mappings, accounting."""

from __future__ import annotations

import json

import pytest

from regdedup import (
    ClaimDirectionError,
    IngestError,
    RegistryId,
    parse_profile_ref,
)
from regdedup.ingest import (
    ClaimRule,
    FieldMapping,
    default_mapping,
    extract_path,
    ingest_dump_file,
    ingest_json_dump,
    ingest_multiline_csv,
    load_mapping,
    profile_from_record,
    profiles_to_records,
)

FS_MAPPING = default_mapping(RegistryId.FAIRSHARING)
RD_MAPPING = default_mapping(RegistryId.RE3DATA)
OD_MAPPING = default_mapping(RegistryId.OPENDOAR)
RR_MAPPING = default_mapping(RegistryId.ROAR)


def fs_record(local_id, name="Repo", homepage="http://x.example.org", refs=()):
    return {
        "id": local_id,
        "attributes": {
            "name": name,
            "homepage": homepage,
            "cross_references": [{"url": u} for u in refs],
        },
    }


class TestExtractPath:
    def test_dotted_traversal(self):
        assert extract_path({"a": {"b": 3}}, "a.b") == [3]

    def test_exact_key_beats_traversal(self):
        # CSV headers may themselves contain dots
        assert extract_path({"a.b": 1, "a": {"b": 2}}, "a.b") == [1]

    def test_lists_fan_out(self):
        record = {"xs": [{"v": 1}, {"v": 2}, {"w": 9}]}
        assert extract_path(record, "xs.v") == [1, 2]

    def test_missing(self):
        assert extract_path({"a": 1}, "z") == []
        assert extract_path({"a": 1}, "a.b") == []


class TestJsonIngest:
    def test_wrapped_array(self):
        dump = json.dumps(
            {"data": [fs_record(2114, "MycoBank", refs=[
                "https://www.re3data.org/repository/r3d100010191"
            ])]}
        )
        profiles, report = ingest_json_dump(dump, FS_MAPPING)
        assert len(profiles) == 1
        p = profiles[0]
        assert p.ref.canonical() == "fs:2114"
        assert p.name == "MycoBank"
        assert p.homepage_url == "http://x.example.org"
        assert [c.canonical() for c in p.claims] == ["rd:r3d100010191"]
        assert report.records_read == 1
        assert report.profiles_emitted == 1
        assert report.claims_emitted == 1

    def test_bare_array(self):
        mapping = FieldMapping(registry=RegistryId.OPENDOAR, local_id="id")
        profiles, _ = ingest_json_dump(json.dumps([{"id": 7}]), mapping)
        assert profiles[0].ref.canonical() == "od:7"

    def test_jsonl_fallback(self):
        mapping = FieldMapping(registry=RegistryId.OPENDOAR, local_id="id", name="n")
        text = '{"id": 1, "n": "A"}\n\n{"id": 2, "n": "B"}\n'
        profiles, report = ingest_json_dump(text, mapping)
        assert [p.ref.canonical() for p in profiles] == ["od:1", "od:2"]
        assert report.records_read == 2

    def test_jsonl_bad_line_is_fatal(self):
        mapping = FieldMapping(registry=RegistryId.OPENDOAR, local_id="id")
        with pytest.raises(IngestError) as err:
            ingest_json_dump('{"id": 1}\n{oops\n', mapping)
        assert "line 2" in str(err.value)

    def test_single_object_without_records_path(self):
        mapping = FieldMapping(registry=RegistryId.OPENDOAR, local_id="id")
        profiles, _ = ingest_json_dump('{"id": 3}', mapping)
        assert [p.ref.canonical() for p in profiles] == ["od:3"]

    def test_missing_local_id_skipped(self):
        dump = json.dumps({"data": [fs_record(1), {"attributes": {"name": "x"}}]})
        profiles, report = ingest_json_dump(dump, FS_MAPPING)
        assert len(profiles) == 1
        assert len(report.skipped) == 1
        index, reason = report.skipped[0]
        assert index == 1
        assert "local id" in reason

    def test_duplicate_local_id_first_wins(self):
        dump = json.dumps(
            {"data": [fs_record(5, name="First"), fs_record(5, name="Second")]}
        )
        profiles, report = ingest_json_dump(dump, FS_MAPPING)
        assert len(profiles) == 1
        assert profiles[0].name == "First"
        assert any("duplicate" in reason for _, reason in report.skipped)

    def test_conservation(self):
        records = [fs_record(i) for i in range(6)]
        records.insert(2, {"attributes": {}})
        records.append(fs_record(1))  # duplicate
        profiles, report = ingest_json_dump(json.dumps({"data": records}), FS_MAPPING)
        assert report.records_read == len(records)
        assert report.profiles_emitted == len(profiles)
        assert report.profiles_emitted + len(report.skipped) == report.records_read

    def test_unnamed_profile_kept_and_counted(self):
        dump = json.dumps({"data": [fs_record(9, name="")]})
        profiles, report = ingest_json_dump(dump, FS_MAPPING)
        assert profiles[0].name == ""
        assert report.unnamed_profiles == 1

    def test_unparseable_url_counted(self):
        dump = json.dumps({"data": [fs_record(9, homepage="not a url")]})
        profiles, report = ingest_json_dump(dump, FS_MAPPING)
        assert profiles[0].homepage_url is None
        assert report.unparseable_urls == 1

    def test_claims_deduplicated_in_order(self):
        dump = json.dumps(
            {
                "data": [
                    fs_record(
                        1,
                        refs=[
                            "https://www.re3data.org/repository/r3d100010191",
                            "https://www.re3data.org/repository/r3d100000039",
                            "https://www.re3data.org/repository/r3d100010191",
                        ],
                    )
                ]
            }
        )
        profiles, report = ingest_json_dump(dump, FS_MAPPING)
        assert [c.canonical() for c in profiles[0].claims] == [
            "rd:r3d100010191",
            "rd:r3d100000039",
        ]
        assert report.claims_emitted == 2

    def test_illegal_claim_direction_dropped_record_kept(self):
        mapping = FieldMapping(
            registry=RegistryId.ROAR,
            local_id="id",
            claims=(ClaimRule(path="link", registry=None),),
        )
        profiles, report = ingest_json_dump(
            json.dumps([{"id": 1, "link": "fs:3"}]), mapping
        )
        assert len(profiles) == 1
        assert profiles[0].claims == ()
        assert len(report.claims_dropped) == 1
        assert "fs:3" in report.claims_dropped[0][1]

    def test_canonical_text_rule(self):
        mapping = FieldMapping(
            registry=RegistryId.RE3DATA,
            local_id="id",
            claims=(ClaimRule(path="links", registry=None),),
        )
        profiles, _ = ingest_json_dump(
            json.dumps([{"id": "r3dX", "links": ["fs:1", "od:2"]}]), mapping
        )
        assert [c.canonical() for c in profiles[0].claims] == ["fs:1", "od:2"]


class TestCsvIngest:
    def test_multiline_quoted_cell(self):
        text = (
            "eprintid,title,home_page,opendoarid\n"
            '42,"Line one\nline two",http://a.example.org,101\n'
        )
        profiles, report = ingest_multiline_csv(text, RR_MAPPING)
        assert len(profiles) == 1
        assert "\n" in profiles[0].name
        assert [c.canonical() for c in profiles[0].claims] == ["od:101"]
        assert report.records_read == 1

    def test_ragged_row_skipped(self):
        text = (
            "eprintid,title,home_page,opendoarid\n"
            "1,Good,http://a.example.org,0\n"
            "2,TooShort\n"
        )
        profiles, report = ingest_multiline_csv(text, RR_MAPPING)
        assert [p.ref.canonical() for p in profiles] == ["rr:1"]
        assert len(report.skipped) == 1
        assert "ragged" in report.skipped[0][1]

    def test_unparseable_csv_is_fatal(self):
        text = "eprintid,title,home_page,opendoarid\n1,bad\x00cell,http://x,0\n"
        with pytest.raises(IngestError) as err:
            ingest_multiline_csv(text, RR_MAPPING)
        assert "line" in str(err.value)

    def test_unclosed_quote_at_eof_tolerated(self):
        # the csv module closes a dangling quote at end of input; the row
        # parses with the remainder as one cell and is then length-checked
        text = 'eprintid,title,home_page,opendoarid\n1,"oops,http://x,0\n'
        profiles, report = ingest_multiline_csv(text, RR_MAPPING)
        assert profiles == []
        assert len(report.skipped) == 1

    def test_empty_claim_cell_produces_no_claim(self):
        text = (
            "eprintid,title,home_page,opendoarid\n"
            "1,A,http://a.example.org,\n"
        )
        profiles, _ = ingest_multiline_csv(text, RR_MAPPING)
        assert profiles[0].claims == ()

    def test_header_only(self):
        profiles, report = ingest_multiline_csv(
            "eprintid,title,home_page,opendoarid\n", RR_MAPPING
        )
        assert profiles == []
        assert report.records_read == 0


class TestMappings:
    def test_default_mappings_load_for_all_registries(self):
        for registry in RegistryId:
            mapping = default_mapping(registry)
            assert mapping.registry is registry

    def test_load_mapping_from_yaml_text(self):
        mapping = load_mapping(
            "registry: roar\n"
            "format: csv\n"
            "localId: eprintid\n"
            "name: title\n"
            "claims:\n"
            "  - path: opendoarid\n"
            "    registry: opendoar\n"
            "    pattern: '(\\d+)'\n"
        )
        assert mapping.registry is RegistryId.ROAR
        assert mapping.format == "csv"
        assert mapping.claims[0].registry is RegistryId.OPENDOAR

    def test_mapping_rejects_illegal_claim_direction(self):
        with pytest.raises(ClaimDirectionError):
            load_mapping(
                "registry: fairsharing\n"
                "localId: id\n"
                "claims:\n"
                "  - path: x\n"
                "    registry: roar\n"
            )

    def test_mapping_requires_local_id(self):
        with pytest.raises((ValueError, KeyError)):
            load_mapping("registry: roar\nname: title\n")

    def test_non_mapping_document_rejected(self):
        with pytest.raises(ValueError):
            load_mapping("- just\n- a list\n")


class TestDumpFile:
    def test_round_trip_through_file(self, tmp_path):
        path = tmp_path / "fs.json"
        path.write_text(json.dumps({"data": [fs_record(2114, "MycoBank")]}))
        profiles, _ = ingest_dump_file(str(path), FS_MAPPING)
        assert profiles[0].ref.canonical() == "fs:2114"

    def test_missing_file(self):
        with pytest.raises(IngestError):
            ingest_dump_file("/nonexistent/dump.json", FS_MAPPING)

    def test_utf8_errors_replaced_not_fatal(self, tmp_path):
        path = tmp_path / "od.json"
        raw = json.dumps({"items": [
            {"system_metadata": {"id": 1},
             "repository_metadata": {"name": [{"name": "Café"}],
                                     "url": "http://c.example.org"}}
        ]}).encode("utf-8")
        path.write_bytes(raw.replace("Café".encode(), b"Caf\xff"))
        profiles, _ = ingest_dump_file(str(path), OD_MAPPING)
        assert profiles[0].name.startswith("Caf")


class TestProfileRecords:
    def test_roundtrip(self):
        dump = json.dumps(
            {"data": [fs_record(1, refs=[
                "https://www.re3data.org/repository/r3d100010191"
            ])]}
        )
        profiles, _ = ingest_json_dump(dump, FS_MAPPING)
        records = list(profiles_to_records(profiles))
        again = [profile_from_record(r) for r in records]
        assert again == profiles

    def test_record_shape(self):
        dump = json.dumps({"data": [fs_record(1)]})
        profiles, _ = ingest_json_dump(dump, FS_MAPPING)
        (record,) = profiles_to_records(profiles)
        assert set(record) == {"id", "registry", "name", "url", "claims"}
        assert record["id"] == "fs:1"
        assert record["registry"] == "fairsharing"

    def test_record_claims_are_canonical_text(self):
        record = {
            "id": "rr:9",
            "registry": "roar",
            "name": "R",
            "url": None,
            "claims": ["od:1"],
        }
        profile = profile_from_record(record)
        assert profile.claims == (parse_profile_ref("od:1"),)
