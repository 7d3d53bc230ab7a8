"""Pydantic request/response models for the HTTP API.

Field names match the store schema one-to-one so API consumers, CSV exports
and on-disk records all speak the same vocabulary.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class RunRequest(BaseModel):
    repo: str
    branch: str
    since: int | None = None
    until: int | None = None
    authors: list[str] | None = None
    max_snapshots: int | None = None
    coverage_glob: str | None = None
    rulepack: dict | None = None


class RunCreated(BaseModel):
    run_id: str
    status: str  # "started" | "queued"


class EnumerateRequest(BaseModel):
    repo: str
    branch: str
    since: int | None = None
    until: int | None = None


class AuthorOut(BaseModel):
    name: str
    email: str


class EnumerateOut(BaseModel):
    commit_count: int
    authors: list[AuthorOut]


class CommitOut(BaseModel):
    commit_id: str
    committed_at: int
    author_name: str
    author_email: str
    summary: str
    parent_count: int


class ProgressOut(BaseModel):
    total: int
    done: int
    failed: int
    current_commit: str | None
    phase: str


class RunSummary(BaseModel):
    run_id: str
    created_at: str
    fingerprint: str
    branch: str
    repo: str
    phase: str
    total: int
    done: int
    failed: int


class RunDetail(BaseModel):
    run_id: str
    created_at: str
    fingerprint: str
    config: dict
    phase: str
    progress: ProgressOut
    commits: list[CommitOut]
    status: dict[str, str]
    errors: dict[str, str] = Field(default_factory=dict)
    error: str | None = None


class SeriesOut(BaseModel):
    run_id: str
    commits: list[CommitOut]
    metrics: dict[str, list[float | None]]


class WeightsRequest(BaseModel):
    weights: dict[str, float]
    renormalize: bool = False
    top_n: int = 10
    absolute_ranking: bool = False


class HotspotOut(BaseModel):
    index: int
    commit_id: str
    committed_at: int
    score: float
    contributions: dict[str, float]


class SignificanceOut(BaseModel):
    run_id: str
    weights: dict[str, float]
    commits: list[CommitOut]
    scores: list[float]
    contributions: dict[str, list[float]]
    hotspots: list[HotspotOut]


class IssueOut(BaseModel):
    rule_id: str
    category: str
    severity: str
    file: str
    line: int
    message: str


class IssuesOut(BaseModel):
    run_id: str
    commit_id: str
    issues: list[IssueOut]


class ApiErrorBody(BaseModel):
    code: str
    message: str
