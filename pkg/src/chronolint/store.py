"""Append-only run store: manifests, snapshot records, fingerprints, CSV.

A run directory holds one manifest plus one canonical JSON record per
analyzed commit. Records never contain wall-clock values or run ids, so two
runs with the same fingerprint over the same history produce byte-identical
records; that property is what makes resume and rerun verifiable. Records
are written whole-file atomically (temp + rename) and carry an integrity
digest, so a crashed writer can never leave a half-record behind and any
byte-level tampering is detected on load.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .analyzer import FileMetrics, Issue
from .canon import canonical_bytes, digest
from .duplication import DupBlock, Occurrence
from .errors import ComparabilityViolation, NotFound, StoreCorruption
from .metrics import SnapshotMetrics
from .profiles import ProfileRegistry
from .rulepack import Rulepack
from .vcs import CommitRef

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_HEADER = (
    "commit_id,committed_at,bugs,vulnerabilities,code_smells,"
    "ncloc,complexity,duplicated_line_density,coverage"
)

PENDING = "pending"
DONE = "done"
FAILED = "failed"


def ruleset_fingerprint(
    rulepack: Rulepack,
    profiles: ProfileRegistry,
    analyzer_version: str,
    dup_window: int,
) -> str:
    """Digest binding a run to one exact analysis semantics."""
    material = {
        "analyzer_version": analyzer_version,
        "dup_window": dup_window,
        "profiles": profiles.canonical_table(),
        "rulepack": rulepack.canonical(),
    }
    return digest(material)


@dataclass
class RunManifest:
    run_id: str
    created_at: str
    fingerprint: str
    config: dict
    phase: str
    commits: list[CommitRef]
    status: dict[str, str]
    errors: dict[str, str] = field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict:
        d = {
            "schema": SCHEMA_VERSION,
            "run_id": self.run_id,
            "created_at": self.created_at,
            "fingerprint": self.fingerprint,
            "config": self.config,
            "phase": self.phase,
            "commits": [c.to_dict() for c in self.commits],
            "status": self.status,
            "errors": self.errors,
        }
        if self.error is not None:
            d["error"] = self.error
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        return cls(
            run_id=d["run_id"],
            created_at=d["created_at"],
            fingerprint=d["fingerprint"],
            config=d["config"],
            phase=d["phase"],
            commits=[CommitRef.from_dict(c) for c in d["commits"]],
            status=dict(d["status"]),
            errors=dict(d.get("errors", {})),
            error=d.get("error"),
        )

    def comparable(self) -> dict:
        """Manifest content minus the fields allowed to differ between reruns."""
        d = self.to_dict()
        d.pop("run_id")
        d.pop("created_at")
        return d


class Store:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.runs_dir = self.data_dir / "runs"
        self.runs_dir.mkdir(parents=True, exist_ok=True)

    # -- paths ---------------------------------------------------------

    def run_dir(self, run_id: str) -> Path:
        return self.runs_dir / run_id

    def _manifest_path(self, run_id: str) -> Path:
        return self.run_dir(run_id) / "manifest.json"

    def snapshot_path(self, run_id: str, commit_id: str) -> Path:
        return self.run_dir(run_id) / "snapshots" / f"{commit_id}.json"

    # -- manifests -----------------------------------------------------

    def create_run(
        self,
        config: dict,
        fingerprint: str,
        commits: list[CommitRef],
        run_id: str | None = None,
    ) -> RunManifest:
        run_id = run_id or uuid.uuid4().hex[:12]
        manifest = RunManifest(
            run_id=run_id,
            created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            fingerprint=fingerprint,
            config=config,
            phase="enumerating",
            commits=list(commits),
            status={c.commit_id: PENDING for c in commits},
        )
        (self.run_dir(run_id) / "snapshots").mkdir(parents=True, exist_ok=True)
        self.save_manifest(manifest)
        return manifest

    def save_manifest(self, manifest: RunManifest) -> None:
        _atomic_write(self._manifest_path(manifest.run_id), canonical_bytes(manifest.to_dict()))

    def load_manifest(self, run_id: str) -> RunManifest:
        path = self._manifest_path(run_id)
        if not path.exists():
            raise NotFound(f"run {run_id!r} not found")
        try:
            return RunManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (ValueError, KeyError) as exc:
            raise StoreCorruption(f"manifest of run {run_id} is unreadable: {exc}") from exc

    def list_runs(self) -> list[RunManifest]:
        manifests = []
        for entry in sorted(self.runs_dir.iterdir()) if self.runs_dir.exists() else []:
            if (entry / "manifest.json").exists():
                manifests.append(self.load_manifest(entry.name))
        manifests.sort(key=lambda m: (m.created_at, m.run_id))
        return manifests

    def find_matching_run(self, config: dict, fingerprint: str) -> str | None:
        """Most recent run with identical config echo and fingerprint, if any."""
        matches = [
            m for m in self.list_runs() if m.fingerprint == fingerprint and m.config == config
        ]
        return matches[-1].run_id if matches else None

    def set_phase(self, run_id: str, phase: str) -> None:
        manifest = self.load_manifest(run_id)
        manifest.phase = phase
        self.save_manifest(manifest)

    def set_error(self, run_id: str, message: str) -> None:
        manifest = self.load_manifest(run_id)
        manifest.error = message
        manifest.phase = "complete"
        self.save_manifest(manifest)

    def mark_failed(self, run_id: str, commit_id: str, message: str) -> None:
        manifest = self.load_manifest(run_id)
        if manifest.status.get(commit_id) != PENDING:
            raise ComparabilityViolation(
                f"commit {commit_id} is {manifest.status.get(commit_id)!r}, cannot fail it"
            )
        manifest.status[commit_id] = FAILED
        manifest.errors[commit_id] = message
        self.save_manifest(manifest)

    def reconcile(self, run_id: str) -> None:
        """Reset `done` statuses whose record files are gone back to pending.

        This is the resume-repair step: on-disk records are the source of
        truth, the manifest status is a cache of their presence.
        """
        manifest = self.load_manifest(run_id)
        changed = False
        for commit in manifest.commits:
            if manifest.status[commit.commit_id] == DONE and not self.snapshot_path(
                run_id, commit.commit_id
            ).exists():
                manifest.status[commit.commit_id] = PENDING
                changed = True
        if changed:
            self.save_manifest(manifest)

    # -- snapshot records ------------------------------------------------

    def write_snapshot(
        self, run_id: str, snapshot: SnapshotMetrics, fingerprint: str
    ) -> str:
        manifest = self.load_manifest(run_id)
        commit_id = snapshot.commit.commit_id
        if commit_id not in manifest.status:
            raise NotFound(f"commit {commit_id} is not part of run {run_id}")
        if fingerprint != manifest.fingerprint:
            raise ComparabilityViolation(
                f"run {run_id} is pinned to fingerprint {manifest.fingerprint[:12]}..., "
                f"refusing record under {fingerprint[:12]}..."
            )
        path = self.snapshot_path(run_id, commit_id)
        if manifest.status[commit_id] == DONE and path.exists():
            logger.warning("snapshot %s already recorded in run %s; skipping", commit_id, run_id)
            return commit_id

        record = snapshot_record(snapshot, fingerprint)
        _atomic_write(path, canonical_bytes(record))
        manifest.status[commit_id] = DONE
        manifest.errors.pop(commit_id, None)
        self.save_manifest(manifest)
        return commit_id

    def _read_record(self, run_id: str, commit_id: str) -> dict:
        path = self.snapshot_path(run_id, commit_id)
        if not path.exists():
            raise NotFound(f"no snapshot record for {commit_id} in run {run_id}")
        raw = path.read_bytes()
        try:
            record = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, ValueError) as exc:
            raise StoreCorruption(f"record {path.name} is not valid JSON: {exc}") from exc
        if canonical_bytes(record) != raw:
            raise StoreCorruption(f"record {path.name} is not in canonical form")
        stored_digest = record.get("digest")
        body = {k: v for k, v in record.items() if k != "digest"}
        if digest(body) != stored_digest:
            raise StoreCorruption(f"record {path.name} fails its integrity digest")
        return record

    def read_snapshot(self, run_id: str, commit_id: str) -> SnapshotMetrics:
        return snapshot_from_record(self._read_record(run_id, commit_id))

    def load_run(self, run_id: str) -> tuple[RunManifest, list[SnapshotMetrics | None]]:
        """Manifest plus snapshots in manifest order; failures/missing are None gaps."""
        manifest = self.load_manifest(run_id)
        snapshots: list[SnapshotMetrics | None] = []
        for commit in manifest.commits:
            commit_id = commit.commit_id
            if manifest.status.get(commit_id) != DONE or not self.snapshot_path(
                run_id, commit_id
            ).exists():
                snapshots.append(None)
                continue
            record = self._read_record(run_id, commit_id)
            if record["fingerprint"] != manifest.fingerprint:
                raise ComparabilityViolation(
                    f"record {commit_id} in run {run_id} was written under a different fingerprint"
                )
            snapshots.append(snapshot_from_record(record))
        return manifest, snapshots

    # -- export ----------------------------------------------------------

    def export_csv(self, run_id: str) -> str:
        manifest, snapshots = self.load_run(run_id)
        lines = [CSV_HEADER]
        for commit, snapshot in zip(manifest.commits, snapshots):
            if snapshot is None:
                lines.append(f"{commit.commit_id},{commit.committed_at},,,,,,,")
                continue
            coverage = "" if snapshot.coverage is None else repr(snapshot.coverage)
            lines.append(
                ",".join(
                    [
                        commit.commit_id,
                        str(commit.committed_at),
                        str(snapshot.bugs),
                        str(snapshot.vulnerabilities),
                        str(snapshot.code_smells),
                        str(snapshot.ncloc),
                        str(snapshot.complexity),
                        repr(snapshot.duplicated_line_density),
                        coverage,
                    ]
                )
            )
        return "\n".join(lines) + "\n"


def snapshot_record(snapshot: SnapshotMetrics, fingerprint: str) -> dict:
    """Plain-data record for one snapshot; no wall-clock, no run id."""
    record = {
        "schema": SCHEMA_VERSION,
        "fingerprint": fingerprint,
        "commit": snapshot.commit.to_dict(),
        "metrics": {
            "bugs": snapshot.bugs,
            "vulnerabilities": snapshot.vulnerabilities,
            "code_smells": snapshot.code_smells,
            "ncloc": snapshot.ncloc,
            "complexity": snapshot.complexity,
            "duplicated_lines": snapshot.duplicated_lines,
            "duplicated_line_density": snapshot.duplicated_line_density,
            "coverage": snapshot.coverage,
            "file_count": snapshot.file_count,
        },
        "files": [
            {
                "path": f.path,
                "ncloc": f.ncloc,
                "comment_lines": f.comment_lines,
                "blank_lines": f.blank_lines,
                "complexity": f.complexity,
                "profile_id": f.profile_id,
            }
            for f in snapshot.files
        ],
        "issues": [
            {
                "rule_id": i.rule_id,
                "category": i.category,
                "severity": i.severity,
                "file": i.file,
                "line": i.line,
                "message": i.message,
            }
            for i in snapshot.issues
        ],
        "duplicated_blocks": [
            {
                "window_tokens": b.window_tokens,
                "occurrences": [
                    {"file": o.file, "start_line": o.start_line, "end_line": o.end_line}
                    for o in b.occurrences
                ],
            }
            for b in snapshot.dup_blocks
        ],
    }
    record["digest"] = digest(record)
    return record


def snapshot_from_record(record: dict) -> SnapshotMetrics:
    metrics = record["metrics"]
    return SnapshotMetrics(
        commit=CommitRef.from_dict(record["commit"]),
        bugs=metrics["bugs"],
        vulnerabilities=metrics["vulnerabilities"],
        code_smells=metrics["code_smells"],
        ncloc=metrics["ncloc"],
        complexity=metrics["complexity"],
        duplicated_lines=metrics["duplicated_lines"],
        duplicated_line_density=metrics["duplicated_line_density"],
        coverage=metrics["coverage"],
        file_count=metrics["file_count"],
        files=tuple(
            FileMetrics(
                path=f["path"],
                ncloc=f["ncloc"],
                comment_lines=f["comment_lines"],
                blank_lines=f["blank_lines"],
                complexity=f["complexity"],
                profile_id=f["profile_id"],
            )
            for f in record["files"]
        ),
        issues=tuple(
            Issue(
                rule_id=i["rule_id"],
                category=i["category"],
                severity=i["severity"],
                file=i["file"],
                line=i["line"],
                message=i["message"],
            )
            for i in record["issues"]
        ),
        dup_blocks=tuple(
            DupBlock(
                occurrences=tuple(
                    Occurrence(o["file"], o["start_line"], o["end_line"])
                    for o in b["occurrences"]
                ),
                window_tokens=b["window_tokens"],
            )
            for b in record.get("duplicated_blocks", [])
        ),
    )


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        os.write(fd, data)
        os.close(fd)
        os.replace(tmp, path)
    except OSError:
        try:
            os.close(fd)
        except OSError:
            pass
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
