"""Read-only git access: enumerate branch history, extract commit trees.

All operations go through git plumbing commands that never touch the working
tree or the index, so analyzing a live repository cannot disturb it. Trees
are materialized by reading blobs out of object storage (cat-file), never by
checkout.
"""

from __future__ import annotations

import os
import re
import subprocess
from dataclasses import dataclass
from fnmatch import fnmatchcase
from pathlib import Path

from .errors import (
    AuthError,
    BranchNotFound,
    CorruptHistory,
    InvalidRange,
    RemoteError,
    RepoAccessError,
    WorkspaceError,
)

_COMMIT_ID_RE = re.compile(r"^[0-9a-f]{40}$")
_FIELD_SEP = "\x1f"
_RECORD_SEP = "\x1e"
_LOG_FORMAT = _FIELD_SEP.join(["%H", "%ct", "%an", "%ae", "%s", "%P"]) + _RECORD_SEP

_AUTH_MARKERS = (
    "authentication failed",
    "could not read username",
    "could not read password",
    "terminal prompts disabled",
    "http basic: access denied",
    "invalid credentials",
    "401",
    "403",
)


@dataclass(frozen=True)
class CommitRef:
    commit_id: str
    committed_at: int
    author_name: str
    author_email: str
    summary: str
    parent_count: int

    def __post_init__(self):
        if not _COMMIT_ID_RE.match(self.commit_id):
            raise ValueError(f"not a commit id: {self.commit_id!r}")
        if self.committed_at < 0:
            raise ValueError("committed_at must be >= 0")

    def to_dict(self) -> dict:
        return {
            "commit_id": self.commit_id,
            "committed_at": self.committed_at,
            "author_name": self.author_name,
            "author_email": self.author_email,
            "summary": self.summary,
            "parent_count": self.parent_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CommitRef":
        return cls(
            commit_id=d["commit_id"],
            committed_at=int(d["committed_at"]),
            author_name=d["author_name"],
            author_email=d["author_email"],
            summary=d["summary"],
            parent_count=int(d["parent_count"]),
        )


@dataclass(frozen=True)
class HistoryFilter:
    branch: str
    since: int | None = None
    until: int | None = None
    author_patterns: tuple[str, ...] | None = None
    max_snapshots: int | None = None

    def __post_init__(self):
        if self.since is not None and self.until is not None and self.since > self.until:
            raise InvalidRange(f"since ({self.since}) is after until ({self.until})")
        if self.max_snapshots is not None and self.max_snapshots < 2:
            raise InvalidRange("max_snapshots must be >= 2 (first and last are always kept)")


@dataclass(frozen=True)
class SnapshotTree:
    commit: CommitRef
    root: Path
    file_list: tuple[str, ...]


class GitRepository:
    """Handle on a local repository; commands run read-only in its directory."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        probe = self._run(["rev-parse", "--git-dir"], check=False)
        if probe.returncode != 0:
            raise RepoAccessError(f"not a readable git repository: {self.path}")

    def _run(self, args: list[str], check: bool = True, binary: bool = False):
        try:
            result = subprocess.run(
                ["git", *args],
                cwd=self.path,
                capture_output=True,
                text=not binary,
            )
        except OSError as exc:
            raise RepoAccessError(f"cannot run git in {self.path}: {exc}") from exc
        if check and result.returncode != 0:
            stderr = result.stderr if isinstance(result.stderr, str) else result.stderr.decode(
                "utf-8", "replace"
            )
            raise RepoAccessError(f"git {args[0]} failed: {stderr.strip()}")
        return result

    def resolve_branch(self, branch: str) -> str:
        """Resolve a branch name to its tip commit id (local, then origin)."""
        for ref in (f"refs/heads/{branch}", f"refs/remotes/origin/{branch}"):
            result = self._run(["rev-parse", "--verify", "--quiet", ref], check=False)
            if result.returncode == 0:
                return result.stdout.strip()
        raise BranchNotFound(f"branch {branch!r} not found in {self.path}")


def open_repository(path: str | Path) -> GitRepository:
    return GitRepository(path)


def clone_remote(
    url: str, access_token: str | None = None, destination: str | Path = "."
) -> GitRepository:
    """Full-history clone of *url* into *destination*.

    The token is injected into the fetch URL only for http(s) remotes and is
    scrubbed from every error message; it is never persisted anywhere.
    """
    dest = Path(destination)
    if dest.exists() and any(dest.iterdir()):
        raise WorkspaceError(f"clone destination {dest} is not empty")
    dest.mkdir(parents=True, exist_ok=True)

    effective = url
    if access_token and url.startswith(("http://", "https://")):
        scheme, rest = url.split("://", 1)
        rest = rest.split("@", 1)[-1]  # drop any userinfo already present
        effective = f"{scheme}://oauth2:{access_token}@{rest}"

    result = subprocess.run(
        ["git", "clone", "--quiet", effective, str(dest)],
        capture_output=True,
        text=True,
        env={**os.environ, "GIT_TERMINAL_PROMPT": "0"},
    )
    if result.returncode != 0:
        message = result.stderr.strip()
        if access_token:
            message = message.replace(access_token, "***")
        lowered = message.lower()
        if any(marker in lowered for marker in _AUTH_MARKERS):
            raise AuthError(f"authentication failed cloning {url}: {message}")
        raise RemoteError(f"clone of {url} failed: {message}")
    return GitRepository(dest)


def enumerate_commits(repo: GitRepository, history_filter: HistoryFilter) -> list[CommitRef]:
    """First-parent history of the branch tip, filtered and optionally subsampled.

    Output is ordered oldest to newest: ascending committed_at, ties broken
    by position in the first-parent chain (predecessor first).
    """
    tip = repo.resolve_branch(history_filter.branch)
    result = repo._run(["log", "--first-parent", f"--format={_LOG_FORMAT}", tip])
    commits = _parse_log(result.stdout)
    commits.reverse()  # chain order, oldest first
    commits.sort(key=lambda c: c.committed_at)  # stable: ties keep chain order

    qualifying = [c for c in commits if _matches(c, history_filter)]
    if history_filter.max_snapshots is not None:
        qualifying = _subsample(qualifying, history_filter.max_snapshots)
    return qualifying


def materialize_snapshot(
    repo: GitRepository, commit: CommitRef, workspace: str | Path
) -> SnapshotTree:
    """Extract the commit's tree into *workspace* by reading blobs directly."""
    root = Path(workspace)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise WorkspaceError(f"cannot create workspace {root}: {exc}") from exc

    exists = repo._run(["cat-file", "-e", f"{commit.commit_id}^{{commit}}"], check=False)
    if exists.returncode != 0:
        raise CorruptHistory(f"commit {commit.commit_id} not found in {repo.path}")

    listing = repo._run(["ls-tree", "-r", "-z", commit.commit_id], binary=True)
    entries = _parse_tree_listing(listing.stdout)
    entries.sort(key=lambda e: e[1].encode("utf-8", "surrogateescape"))

    _extract_blobs(repo, entries, root)
    return SnapshotTree(commit=commit, root=root, file_list=tuple(path for _, path in entries))


def _parse_log(output: str) -> list[CommitRef]:
    commits = []
    for record in output.split(_RECORD_SEP):
        record = record.strip("\n")
        if not record:
            continue
        fields = record.split(_FIELD_SEP)
        if len(fields) != 6:
            raise CorruptHistory(f"unparseable log record: {record!r}")
        commit_id, committed_at, name, email, summary, parents = fields
        commits.append(
            CommitRef(
                commit_id=commit_id,
                committed_at=int(committed_at),
                author_name=name,
                author_email=email,
                summary=summary,
                parent_count=len(parents.split()) if parents else 0,
            )
        )
    return commits


def _matches(commit: CommitRef, history_filter: HistoryFilter) -> bool:
    if history_filter.since is not None and commit.committed_at < history_filter.since:
        return False
    if history_filter.until is not None and commit.committed_at > history_filter.until:
        return False
    patterns = history_filter.author_patterns
    if patterns:
        name = commit.author_name.lower()
        email = commit.author_email.lower()
        if not any(
            fnmatchcase(name, p.lower()) or fnmatchcase(email, p.lower()) for p in patterns
        ):
            return False
    return True


def _subsample(commits: list[CommitRef], max_snapshots: int) -> list[CommitRef]:
    q = len(commits)
    if q <= max_snapshots:
        return commits
    # Index-uniform, endpoints always kept; integer steps are strictly
    # increasing because (q-1)/(m-1) >= 1.
    m = max_snapshots
    return [commits[i * (q - 1) // (m - 1)] for i in range(m)]


def _parse_tree_listing(data: bytes) -> list[tuple[str, str]]:
    entries: list[tuple[str, str]] = []
    for chunk in data.split(b"\x00"):
        if not chunk:
            continue
        header, _, raw_path = chunk.partition(b"\t")
        parts = header.split()
        if len(parts) != 3:
            raise CorruptHistory(f"unparseable tree entry: {chunk!r}")
        mode, obj_type, sha = (p.decode("ascii") for p in parts)
        if obj_type != "blob":
            continue  # submodule commits (160000) are not part of the tree's blobs
        path = raw_path.decode("utf-8", "surrogateescape")
        if path.startswith("/") or ".." in path.split("/"):
            raise CorruptHistory(f"refusing unsafe tree path {path!r}")
        entries.append((sha, path))
    return entries


def _extract_blobs(repo: GitRepository, entries: list[tuple[str, str]], root: Path) -> None:
    if not entries:
        return
    proc = subprocess.Popen(
        ["git", "cat-file", "--batch"],
        cwd=repo.path,
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
    )
    try:
        assert proc.stdin is not None and proc.stdout is not None
        for sha, path in entries:
            proc.stdin.write(sha.encode("ascii") + b"\n")
            proc.stdin.flush()
            header = proc.stdout.readline().split()
            if len(header) != 3 or header[1] != b"blob":
                raise CorruptHistory(f"missing blob {sha} for {path}")
            size = int(header[2])
            payload = proc.stdout.read(size)
            proc.stdout.read(1)  # trailing newline of the batch protocol
            if len(payload) != size:
                raise CorruptHistory(f"short read for blob {sha}")
            target = root / Path(*path.split("/"))
            try:
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_bytes(payload)
            except OSError as exc:
                raise WorkspaceError(f"cannot write {target}: {exc}") from exc
    finally:
        if proc.stdin:
            proc.stdin.close()
        proc.wait()
