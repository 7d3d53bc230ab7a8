"""End-to-end pipeline: enumerate, materialize, analyze, aggregate, persist.

A run is prepared once (enumeration pinned into the manifest together with
the ruleset fingerprint) and then executed commit by commit, oldest first.
Execution is resumable: on-disk records are the source of truth, so a
killed run picks up exactly where it stopped and produces byte-identical
records. Per-snapshot failures become gaps, never aborts.
"""

from __future__ import annotations

import logging
import re
import shutil
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fnmatch import fnmatch
from pathlib import Path
from urllib.parse import urlsplit, urlunsplit

from .analyzer import ANALYZER_VERSION, analyze_file
from .canon import digest
from .duplication import detect_duplicates, duplication_issues, normalized_stream
from .errors import ComparabilityViolation, CoverageFormatError, EmptyRun
from .lcov import ingest_coverage
from .metrics import SnapshotMetrics, aggregate
from .profiles import ProfileRegistry, default_registry
from .rulepack import Rulepack, default_rulepack, load_rulepack, rulepack_from_data
from .store import DONE, FAILED, PENDING, Store, ruleset_fingerprint
from .vcs import (
    GitRepository,
    HistoryFilter,
    SnapshotTree,
    clone_remote,
    enumerate_commits,
    materialize_snapshot,
    open_repository,
)

logger = logging.getLogger(__name__)

_URL_RE = re.compile(r"^[a-z][a-z0-9+.-]*://|^[\w.-]+@[\w.-]+:")


@dataclass(frozen=True)
class AnalysisConfig:
    repo: str
    branch: str
    since: int | None = None
    until: int | None = None
    author_patterns: tuple[str, ...] | None = None
    max_snapshots: int | None = None
    rulepack_path: str | None = None
    rulepack_data: dict | None = None
    coverage_glob: str | None = None

    def __post_init__(self):
        # fail on bad filters before any repository work happens
        HistoryFilter(
            branch=self.branch,
            since=self.since,
            until=self.until,
            author_patterns=self.author_patterns,
            max_snapshots=self.max_snapshots,
        )

    def load_rulepack(self) -> Rulepack:
        if self.rulepack_data is not None:
            return rulepack_from_data(self.rulepack_data)
        if self.rulepack_path is not None:
            return load_rulepack(self.rulepack_path)
        return default_rulepack()

    def echo(self, rulepack: Rulepack) -> dict:
        """The config as persisted in manifests: canonical, token-free."""
        return {
            "repo": scrub_source(self.repo),
            "branch": self.branch,
            "since": self.since,
            "until": self.until,
            "authors": sorted(self.author_patterns) if self.author_patterns else None,
            "max_snapshots": self.max_snapshots,
            "coverage_glob": self.coverage_glob,
            "rulepack": rulepack.canonical(),
        }


@dataclass(frozen=True)
class RunProgress:
    total: int
    done: int
    failed: int
    current_commit: str | None
    phase: str


def scrub_source(source: str) -> str:
    """Strip any credentials from a repo URL before it can be persisted."""
    if "://" not in source:
        return source
    parts = urlsplit(source)
    host = parts.netloc.split("@", 1)[-1]
    return urlunsplit((parts.scheme, host, parts.path, parts.query, parts.fragment))


def resolve_repo(source: str, store: Store, access_token: str | None = None) -> GitRepository:
    """Open a local repository, or clone (and cache) a remote one."""
    if not _URL_RE.match(source):
        return open_repository(source)
    dest = store.data_dir / "clones" / digest(scrub_source(source))[:16]
    if dest.exists():
        return open_repository(dest)
    return clone_remote(source, access_token, dest)


def analyze_tree(
    tree: SnapshotTree,
    registry: ProfileRegistry,
    rulepack: Rulepack,
    coverage_glob: str | None = None,
    max_workers: int = 4,
) -> SnapshotMetrics:
    """Analyze every file of one materialized snapshot and aggregate."""

    def one(path: str):
        return analyze_file(path, (tree.root / path).read_bytes(), registry, rulepack)

    if max_workers > 1 and len(tree.file_list) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            analyses = list(pool.map(one, tree.file_list))
    else:
        analyses = [one(path) for path in tree.file_list]

    files = [a.metrics for a in analyses]
    issues = [issue for a in analyses for issue in a.issues]
    streams = {
        path: normalized_stream(a.tokens) for path, a in zip(tree.file_list, analyses)
    }
    duplication = detect_duplicates(streams, rulepack.dup_window)
    issues.extend(duplication_issues(duplication.blocks, rulepack))

    coverage = None
    if coverage_glob:
        reports = [
            (tree.root / path).read_text(encoding="utf-8", errors="replace")
            for path in tree.file_list
            if fnmatch(path, coverage_glob)
        ]
        if reports:
            try:
                coverage = ingest_coverage(reports, set(tree.file_list))
            except CoverageFormatError as exc:
                logger.warning(
                    "commit %s: unreadable coverage report, proceeding without coverage: %s",
                    tree.commit.commit_id[:8],
                    exc,
                )
    return aggregate(tree.commit, files, issues, duplication, coverage)


def prepare_run(
    store: Store, config: AnalysisConfig, access_token: str | None = None
) -> str:
    """Create (or find) the run for *config*: enumerate and pin the manifest.

    An existing run with identical config echo and fingerprint is reused,
    which is what makes plain re-invocation resume instead of duplicating
    work.
    """
    rulepack = config.load_rulepack()
    registry = default_registry()
    fingerprint = ruleset_fingerprint(rulepack, registry, ANALYZER_VERSION, rulepack.dup_window)
    echo = config.echo(rulepack)

    existing = store.find_matching_run(echo, fingerprint)
    if existing is not None:
        return existing

    repo = resolve_repo(config.repo, store, access_token)
    history_filter = HistoryFilter(
        branch=config.branch,
        since=config.since,
        until=config.until,
        author_patterns=config.author_patterns,
        max_snapshots=config.max_snapshots,
    )
    commits = enumerate_commits(repo, history_filter)
    if not commits:
        raise EmptyRun("no commits qualify under the given branch/time/author filters")
    manifest = store.create_run(echo, fingerprint, commits)
    return manifest.run_id


def execute_run(
    store: Store,
    run_id: str,
    access_token: str | None = None,
    on_snapshot=None,
    max_workers: int = 4,
) -> RunProgress:
    """Analyze every pending commit of the run, oldest to newest.

    *on_snapshot*, when given, is called with a RunProgress after each
    snapshot is persisted; exceptions it raises abort the run exactly like
    a crash would (nothing is rolled back, resume picks up the rest).
    """
    manifest = store.load_manifest(run_id)
    rulepack = rulepack_from_data(manifest.config["rulepack"])
    registry = default_registry()
    fingerprint = ruleset_fingerprint(rulepack, registry, ANALYZER_VERSION, rulepack.dup_window)
    if fingerprint != manifest.fingerprint:
        raise ComparabilityViolation(
            f"run {run_id} was recorded under fingerprint {manifest.fingerprint[:12]}..., "
            f"current analyzer semantics give {fingerprint[:12]}..."
        )

    repo = resolve_repo(manifest.config["repo"], store, access_token)
    store.reconcile(run_id)
    store.set_phase(run_id, "analyzing")

    coverage_glob = manifest.config.get("coverage_glob")
    for commit in manifest.commits:
        manifest = store.load_manifest(run_id)
        if manifest.status[commit.commit_id] != PENDING:
            continue
        workspace = tempfile.mkdtemp(prefix=f"chronolint-{commit.commit_id[:8]}-")
        try:
            tree = materialize_snapshot(repo, commit, workspace)
            snapshot = analyze_tree(tree, registry, rulepack, coverage_glob, max_workers)
            store.write_snapshot(run_id, snapshot, fingerprint)
        except Exception as exc:  # degrade this snapshot to a gap, keep going
            logger.warning("snapshot %s failed: %s", commit.commit_id[:8], exc)
            store.mark_failed(run_id, commit.commit_id, f"{type(exc).__name__}: {exc}")
        finally:
            shutil.rmtree(workspace, ignore_errors=True)
        if on_snapshot is not None:
            on_snapshot(progress(store, run_id))

    store.set_phase(run_id, "finalizing")
    store.set_phase(run_id, "complete")
    return progress(store, run_id)


def run_analysis(
    store: Store,
    config: AnalysisConfig,
    access_token: str | None = None,
    on_snapshot=None,
    max_workers: int = 4,
) -> str:
    """The whole pipeline; returns the run id."""
    run_id = prepare_run(store, config, access_token)
    execute_run(store, run_id, access_token, on_snapshot, max_workers)
    return run_id


def rerun_with_rulepack(
    store: Store,
    run_id: str,
    rulepack: Rulepack,
    access_token: str | None = None,
    on_snapshot=None,
    max_workers: int = 4,
) -> str:
    """Fresh run over the same commit list under a (possibly) new fingerprint."""
    original = store.load_manifest(run_id)
    registry = default_registry()
    fingerprint = ruleset_fingerprint(rulepack, registry, ANALYZER_VERSION, rulepack.dup_window)
    config = dict(original.config)
    config["rulepack"] = rulepack.canonical()
    manifest = store.create_run(config, fingerprint, original.commits)
    execute_run(store, manifest.run_id, access_token, on_snapshot, max_workers)
    return manifest.run_id


def progress(store: Store, run_id: str) -> RunProgress:
    manifest = store.load_manifest(run_id)
    done = sum(1 for s in manifest.status.values() if s == DONE)
    failed = sum(1 for s in manifest.status.values() if s == FAILED)
    current = None
    if manifest.phase == "analyzing":
        for commit in manifest.commits:
            if manifest.status[commit.commit_id] == PENDING:
                current = commit.commit_id
                break
    return RunProgress(
        total=len(manifest.commits),
        done=done,
        failed=failed,
        current_commit=current,
        phase=manifest.phase,
    )
