"""Command-line pipeline driver.

One subcommand per stage plus serving, stats and export. Stage outputs live
in a run directory (``--run-dir`` or ``REGDEDUP_RUN_DIR``); stages refuse
to run out of order and mutating commands take a lock file so two commands
cannot write the same run at once.

Exit codes: 0 success, 2 validation or input problems, 3 stage-order
violations, 4 integrity failures.
"""

from __future__ import annotations

import contextlib
import functools
import json
import logging
import os
import sys
from pathlib import Path

import click

from . import __version__
from .claimgraph import conflate_claims
from .dedup import run_dedup
from .errors import (
    IntegrityError,
    NotFoundError,
    RegdedupError,
    StageOrderError,
    StaleRunError,
    ValidationError,
)
from .ingest import default_mapping, ingest_dump_file, load_mapping_file
from .merge import extend_sets
from .model import RegistryId, SimilarityConfig
from .normalize import NormalizationOptions
from .store import RunStore

log = logging.getLogger(__name__)

_EXIT_VALIDATION = 2
_EXIT_STAGE_ORDER = 3
_EXIT_INTEGRITY = 4

_REGISTRY_TOKENS = {r.value: r for r in RegistryId}
_REGISTRY_TOKENS.update({r.prefix: r for r in RegistryId})


def _registry(token: str) -> RegistryId:
    registry = _REGISTRY_TOKENS.get(token.strip().lower())
    if registry is None:
        known = ", ".join(sorted(_REGISTRY_TOKENS))
        raise ValidationError(f"unknown registry {token!r}; expected one of {known}")
    return registry


def _split_assignment(text: str, what: str) -> tuple[RegistryId, str]:
    token, sep, path = text.partition("=")
    if not sep or not path:
        raise ValidationError(f"{what} must look like registry=path, got {text!r}")
    return _registry(token), path


@contextlib.contextmanager
def _locked(run_dir: Path):
    lock = run_dir / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ValidationError(
            f"another command holds the lock on {run_dir} "
            f"(remove {lock} if that command crashed)"
        )
    try:
        os.write(fd, f"{os.getpid()}\n".encode())
        os.close(fd)
        yield
    finally:
        with contextlib.suppress(FileNotFoundError):
            lock.unlink()


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except StageOrderError as exc:
            _fail(str(exc), _EXIT_STAGE_ORDER)
        except IntegrityError as exc:
            _fail(str(exc), _EXIT_INTEGRITY)
        except (ValidationError, NotFoundError, StaleRunError) as exc:
            message = exc.args[0] if exc.args else str(exc)
            _fail(str(message), _EXIT_VALIDATION)
        except RegdedupError as exc:
            _fail(str(exc), _EXIT_VALIDATION)
        except ValueError as exc:
            _fail(str(exc), _EXIT_VALIDATION)

    return wrapper


_run_dir_option = click.option(
    "--run-dir",
    envvar="REGDEDUP_RUN_DIR",
    required=True,
    type=click.Path(path_type=Path),
    help="Run directory (or set REGDEDUP_RUN_DIR).",
)


@click.group()
@click.version_option(version=__version__, prog_name="regdedup")
@click.option("-v", "--verbose", is_flag=True, help="Log at DEBUG level.")
def main(verbose: bool) -> None:
    """Semi-automated de-duplication of scholarly repository registries."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@main.command()
@_run_dir_option
@click.option(
    "--input",
    "inputs",
    multiple=True,
    required=True,
    help="Dump to ingest, as registry=path. Repeatable.",
)
@click.option(
    "--mapping",
    "mappings",
    multiple=True,
    help="Override a field mapping, as registry=mapping.yaml. Repeatable.",
)
@_guarded
def ingest(run_dir: Path, inputs: tuple[str, ...], mappings: tuple[str, ...]) -> None:
    """Parse registry dumps into canonical profiles."""
    overrides = {}
    for assignment in mappings:
        registry, path = _split_assignment(assignment, "--mapping")
        overrides[registry] = load_mapping_file(path)
    parsed = [_split_assignment(i, "--input") for i in inputs]
    seen = set()
    for registry, _ in parsed:
        if registry in seen:
            raise ValidationError(f"registry {registry.value} given twice")
        seen.add(registry)

    store = RunStore(run_dir, create=True)
    with _locked(store.root):
        profiles = []
        reports = []
        for registry, path in parsed:
            mapping = overrides.get(registry, default_mapping(registry))
            if mapping.registry is not registry:
                raise ValidationError(
                    f"mapping file declares registry {mapping.registry.value}, "
                    f"but was assigned to {registry.value}"
                )
            batch, report = ingest_dump_file(path, mapping)
            profiles.extend(batch)
            reports.append(report)
            click.echo(
                f"{registry.value}: {report.profiles_emitted} profiles, "
                f"{report.claims_emitted} claims"
                + (f", {len(report.skipped)} skipped" if report.skipped else "")
            )
        store.write_ingest(profiles, reports)
    click.echo(f"ingested {len(profiles)} profiles into {run_dir}")


@main.command()
@_run_dir_option
@_guarded
def conflate(run_dir: Path) -> None:
    """Conflate cross-registry claims into duplicate sets."""
    store = RunStore(run_dir)
    store.verify_integrity()
    with _locked(store.root):
        result = conflate_claims(store.read_profiles())
        store.write_conflation(result)
    click.echo(
        f"{result.report.sets_emitted} claim sets, "
        f"{result.report.problematic} problematic, "
        f"{len(result.report.dangling)} dangling claims"
    )


@main.command()
@_run_dir_option
@click.option("--threshold", type=float, default=0.9, show_default=True)
@click.option("--name-weight", type=float, default=0.8, show_default=True)
@click.option(
    "--window",
    type=int,
    default=None,
    help="Sliding window within a block; all pairs when omitted.",
)
@click.option("--max-block-size", type=int, default=50, show_default=True)
@click.option(
    "--url-override/--no-url-override",
    default=True,
    show_default=True,
    help="Treat an exact normalized URL match as a certain duplicate.",
)
@click.option("--keep-case", is_flag=True, help="Skip case folding in name keys.")
@click.option("--parallelism", type=int, default=1, show_default=True)
@_guarded
def dedup(
    run_dir: Path,
    threshold: float,
    name_weight: float,
    window: int | None,
    max_block_size: int,
    url_override: bool,
    keep_case: bool,
    parallelism: int,
) -> None:
    """Detect likely duplicates by blocking and pairwise similarity."""
    store = RunStore(run_dir)
    store.verify_integrity()
    config = SimilarityConfig(
        threshold=threshold,
        name_weight=name_weight,
        window=window,
        max_block_size=max_block_size,
        url_exact_override=url_override,
        normalization=NormalizationOptions(case_fold=not keep_case),
    )
    with _locked(store.root):
        result = run_dedup(store.read_profiles(), config, parallelism=parallelism)
        store.write_dedup(result, config)
    click.echo(
        f"{result.report.pairs_considered} candidate pairs, "
        f"{result.report.matches} matches, {result.report.clusters} clusters"
    )


@main.command()
@_run_dir_option
@_guarded
def merge(run_dir: Path) -> None:
    """Fuse claim sets with similarity clusters into final sets."""
    store = RunStore(run_dir)
    store.verify_integrity()
    with _locked(store.root):
        result = extend_sets(store.read_claim_sets(), store.read_clusters())
        store.write_merge(result)
    report = result.report
    click.echo(
        f"{report.extended_sets} extended, {report.merged_sets} merged, "
        f"{report.dedup_only_sets} dedup-only, {report.unchanged_sets} unchanged"
    )


@main.command()
@_run_dir_option
@click.argument("set_id")
@click.argument("action", type=click.Choice(["accept", "reject", "amend"]))
@click.option("--members", help="Comma-separated members kept by an amend.")
@click.option("--note", help="Why the curator decided this way.")
@click.option("--by", "decided_by", help="Curator identifier.")
@_guarded
def decide(
    run_dir: Path,
    set_id: str,
    action: str,
    members: str | None,
    note: str | None,
    decided_by: str | None,
) -> None:
    """Record one curation decision on a set."""
    store = RunStore(run_dir)
    store.verify_integrity()
    member_list = [m.strip() for m in members.split(",")] if members else None
    with _locked(store.root):
        record = store.append_decision(
            set_id, action, members=member_list, note=note, decided_by=decided_by
        )
    click.echo(f"{set_id} {record['action']} (decision #{record['seq']})")


@main.command()
@_run_dir_option
@click.option("--json", "as_json", is_flag=True, help="Emit the raw stats document.")
@_guarded
def stats(run_dir: Path, as_json: bool) -> None:
    """Summarize the current sets and review backlog."""
    store = RunStore(run_dir)
    store.verify_integrity()
    doc = store.stats()
    if as_json:
        click.echo(json.dumps(doc, indent=2, sort_keys=True))
        return
    click.echo(f"run {doc['runId']}")
    click.echo(
        f"{doc['sets']} sets, {doc['problematic']} problematic, "
        f"{doc['pendingReview']} awaiting review"
    )
    click.echo("by status: " + ", ".join(f"{k}={v}" for k, v in doc["byStatus"].items()))
    click.echo(
        "by provenance: "
        + ", ".join(f"{k}={v}" for k, v in doc["byProvenance"].items())
    )
    composition = doc["composition"]
    click.echo(f"composition of {composition['total']} sets:")
    for size, bucket in composition["bySize"].items():
        share = f"{bucket['share'] * 100:.1f}%"
        click.echo(f"  {size} members: {bucket['count']} ({share})")
        for combo, count in bucket["combinations"].items():
            click.echo(f"    {combo}: {count}")


@main.command()
@_run_dir_option
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    help="Write to a file instead of stdout.",
)
@_guarded
def export(run_dir: Path, out: Path | None) -> None:
    """Export the curated sets with member detail, one JSON per line."""
    store = RunStore(run_dir)
    store.verify_integrity()
    store.require_stage("merge")
    records = store.export_curated()
    lines = "".join(
        json.dumps(r, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"
        for r in records
    )
    if out is None:
        click.echo(lines, nl=False)
    else:
        out.write_text(lines, encoding="utf-8")
        click.echo(f"wrote {len(records)} sets to {out}", err=True)


@main.command()
@_run_dir_option
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8321, show_default=True)
@click.option(
    "--cors",
    "cors_origins",
    multiple=True,
    help="Origin allowed to call the API from a browser. Repeatable.",
)
@_guarded
def serve(run_dir: Path, host: str, port: int, cors_origins: tuple[str, ...]) -> None:
    """Serve the review API over HTTP."""
    import uvicorn

    from .api import create_app

    store = RunStore(run_dir)
    store.verify_integrity()
    store.require_stage("conflate")
    app = create_app(store, allow_origins=list(cors_origins) or None)
    click.echo(f"serving run {store.run_id()} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
