"""Shared fixtures: an in-memory corpus exercising every pipeline feature,
plus writers that serialize it into the four registry dump formats."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from regdedup import ProfileRef, RepositoryProfile, parse_profile_ref
from regdedup.normalize import normalize_url


def make_profile(
    ref: str, name: str = "", url: str | None = None, claims: tuple[str, ...] = ()
) -> RepositoryProfile:
    return RepositoryProfile(
        ref=parse_profile_ref(ref),
        name=name,
        homepage_url=normalize_url(url) if url else None,
        claims=tuple(parse_profile_ref(c) for c in claims),
    )


def refs(*texts: str) -> frozenset[ProfileRef]:
    return frozenset(parse_profile_ref(t) for t in texts)


# (ref, name, raw url, claims) for the whole corpus; the raw URLs keep www
# prefixes and default ports on purpose so the pipeline normalizes them
CORPUS = [
    # confirmed round-trip pair
    ("fs:2114", "MycoBank", "https://www.mycobank.org", ("rd:r3d100010191",)),
    ("rd:r3d100010191", "MycoBank", "https://www.mycobank.org:443/", ("fs:2114",)),
    # six conflicting claim chains; the first two start from FAIRsharing,
    # the other four start from re3data and leave a surviving companion pair
    ("fs:3652", "Aspera Data Vault", "http://aspera.example.org", ("rd:r3d100012729",)),
    ("rd:r3d100012729", "Aspera Vault", "http://aspera-vault.example.org", ("fs:1724",)),
    ("fs:1724", "Chain End Archive", "http://chainend.example.org", ()),
    ("fs:3340", "Borealis Collection", "http://borealis.example.net", ("rd:r3d100010543",)),
    ("rd:r3d100010543", "Borealis Repo", "http://borealis-repo.example.net", ("fs:2107",)),
    ("fs:2107", "Boreal Plant Index", "http://boreal-index.example.net", ()),
    ("rd:r3d100010412", "Corvid Mirror", "http://corvid-mirror.example.org", ("fs:2424",)),
    ("fs:2424", "Corvid Genome Hub", "http://corvid.example.org", ("rd:r3d100011538",)),
    ("rd:r3d100011538", "Corvid Genome Store", "http://corvid-genomes.example.org", ()),
    ("rd:r3d100011257", "Delta Flux Mirror", "http://delta-mirror.example.com", ("fs:1730",)),
    ("fs:1730", "Delta Flux Tables", "http://deltaflux.example.com", ("rd:r3d100012862",)),
    ("rd:r3d100012862", "Delta Flux Data", "http://delta-data.example.com", ()),
    ("rd:r3d100011343", "Eos Mirror", "http://eos-mirror.example.org", ("fs:2163",)),
    ("fs:2163", "Eos Solar Archive", "http://eos.example.org", ("rd:r3d100000039",)),
    ("rd:r3d100000039", "Eos Heliophysics Archive", "http://eos-archive.example.org", ()),
    ("rd:r3d100013223", "Fjord Mirror", "http://fjord-mirror.example.no", ("fs:2524",)),
    ("fs:2524", "Fjord Bathymetry Store", "http://fjord.example.no", ("rd:r3d100012397",)),
    ("rd:r3d100012397", "Fjord Depth Data", "http://fjord-data.example.no", ()),
    # extension material: the pair below plus od:4194 sharing a homepage
    ("fs:2560", "Kondo Materials Repository", "http://kondo-materials.example.org", ("rd:r3d100011201",)),
    ("rd:r3d100011201", "Kondo Repository", "http://kondo.example.org", ()),
    ("od:4194", "Kondo Repository", "http://www.kondo.example.org", ()),
    # fan-in: two ROAR profiles claim one OpenDOAR profile
    ("od:1047", "Philica", "http://philica.example.edu", ()),
    ("rr:919", "Philica Repository", "http://philica-roar.example.edu", ("od:1047",)),
    ("rr:5425", "Philica Preprints", "http://philica-pre.example.edu", ("od:1047",)),
    # merge material: {od:241, rr:978} and {od:239, rr:2328, rr:5221, rr:976}
    # bridged by the shared homepage of rr:976 and rr:978
    ("od:241", "Ethos Print Archive", "http://ethos-print.example.ac.uk", ()),
    ("rr:978", "Ethos Archive", "http://ethos.example.ac.uk", ("od:241",)),
    ("od:239", "Nordic Thesis Base", "http://nordic-thesis.example.se", ()),
    ("rr:2328", "Nordic Theses", "http://nordic1.example.se", ("od:239",)),
    ("rr:5221", "Scandinavian Thesis Portal", "http://nordic2.example.se", ("od:239",)),
    ("rr:976", "Ethos Archive Mirror", "http://www.ethos.example.ac.uk", ("od:239",)),
]

# the six problematic chains the corpus encodes, in conflict-event order
EXPECTED_CHAINS = [
    ("fs:3340", "rd:r3d100010543", "fs:2107"),
    ("fs:3652", "rd:r3d100012729", "fs:1724"),
    ("rd:r3d100010412", "fs:2424", "rd:r3d100011538"),
    ("rd:r3d100011257", "fs:1730", "rd:r3d100012862"),
    ("rd:r3d100011343", "fs:2163", "rd:r3d100000039"),
    ("rd:r3d100013223", "fs:2524", "rd:r3d100012397"),
]

# companion pairs that survive conflation next to chains 3-6
EXPECTED_COMPANIONS = [
    refs("fs:2424", "rd:r3d100011538"),
    refs("fs:1730", "rd:r3d100012862"),
    refs("fs:2163", "rd:r3d100000039"),
    refs("fs:2524", "rd:r3d100012397"),
]


@pytest.fixture()
def corpus_profiles() -> list[RepositoryProfile]:
    return [make_profile(*row) for row in CORPUS]


def _row(ref: str):
    for row in CORPUS:
        if row[0] == ref:
            return row
    raise KeyError(ref)


def write_corpus_dumps(directory: Path) -> dict[str, Path]:
    """Serialize the corpus into the four documented dump formats."""
    directory.mkdir(parents=True, exist_ok=True)
    fs_records = []
    rd_records = []
    od_records = []
    rr_rows = []
    for ref_text, name, url, claims in CORPUS:
        ref = parse_profile_ref(ref_text)
        prefix = ref.registry.prefix
        if prefix == "fs":
            fs_records.append(
                {
                    "id": int(ref.local_id),
                    "attributes": {
                        "name": name,
                        "homepage": url,
                        "cross_references": [
                            {
                                "url": "https://www.re3data.org/repository/"
                                + parse_profile_ref(c).local_id
                            }
                            for c in claims
                        ],
                    },
                }
            )
        elif prefix == "rd":
            cross: dict[str, str] = {}
            for c in claims:
                target = parse_profile_ref(c)
                cross[target.registry.value] = target.local_id
            rd_records.append(
                {
                    "id": ref.local_id,
                    "repositoryName": name,
                    "repositoryURL": url,
                    "crossReferences": cross,
                }
            )
        elif prefix == "od":
            od_records.append(
                {
                    "system_metadata": {"id": int(ref.local_id)},
                    "repository_metadata": {"name": [{"name": name}], "url": url},
                }
            )
        else:
            od_claim = ""
            for c in claims:
                od_claim = parse_profile_ref(c).local_id
            rr_rows.append([ref.local_id, name, url, od_claim])

    paths = {
        "fairsharing": directory / "fairsharing.json",
        "re3data": directory / "re3data.json",
        "opendoar": directory / "opendoar.json",
        "roar": directory / "roar.csv",
    }
    paths["fairsharing"].write_text(
        json.dumps({"data": fs_records}, indent=1), encoding="utf-8"
    )
    paths["re3data"].write_text(json.dumps(rd_records, indent=1), encoding="utf-8")
    paths["opendoar"].write_text(
        json.dumps({"items": od_records}, indent=1), encoding="utf-8"
    )
    with paths["roar"].open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eprintid", "title", "home_page", "opendoarid"])
        writer.writerows(rr_rows)
    return paths


@pytest.fixture()
def corpus_dumps(tmp_path: Path) -> dict[str, Path]:
    return write_corpus_dumps(tmp_path / "dumps")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Repeat the acceptance verdict lines after the run summary; capture
    would otherwise swallow them."""
    import sys

    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for line in verdicts:
        terminalreporter.write_line(line)
