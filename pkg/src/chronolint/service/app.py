"""FastAPI service wrapping the core package.

One worker thread per data directory executes analysis runs sequentially;
POSTs beyond the active run queue up. Everything else is read-only over the
store, so any number of concurrent readers is safe while a run is writing.
"""

from __future__ import annotations

import threading
from collections import deque
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..errors import ChronoLintError, UnknownMetric
from ..metrics import SnapshotMetrics, compute_deltas
from ..orchestrator import AnalysisConfig, execute_run, prepare_run, progress, resolve_repo
from ..significance import WeightProfile, rank_hotspots, weighted_significance
from ..store import Store
from ..vcs import CommitRef, HistoryFilter, enumerate_commits
from .schemas import (
    AuthorOut,
    CommitOut,
    EnumerateOut,
    EnumerateRequest,
    HotspotOut,
    IssueOut,
    IssuesOut,
    ProgressOut,
    RunCreated,
    RunDetail,
    RunRequest,
    RunSummary,
    SeriesOut,
    SignificanceOut,
    WeightsRequest,
)

SERIES_METRICS = (
    "bugs",
    "vulnerabilities",
    "code_smells",
    "ncloc",
    "complexity",
    "duplicated_lines",
    "duplicated_line_density",
    "coverage",
    "file_count",
)


class AnalysisWorker:
    """Executes runs one at a time; additional submissions queue."""

    def __init__(self, store: Store, access_token: str | None = None):
        self._store = store
        self._token = access_token
        self._lock = threading.Lock()
        self._queue: deque[str] = deque()
        self._current: str | None = None
        self._thread: threading.Thread | None = None

    def submit(self, run_id: str) -> str:
        with self._lock:
            busy = self._thread is not None and self._thread.is_alive()
            self._queue.append(run_id)
            if not busy:
                self._thread = threading.Thread(target=self._loop, daemon=True)
                self._thread.start()
                return "started"
            return "queued"

    def state(self, run_id: str) -> str | None:
        with self._lock:
            if run_id == self._current:
                return "running"
            if run_id in self._queue:
                return "queued"
        return None

    def _loop(self) -> None:
        while True:
            with self._lock:
                if not self._queue:
                    self._current = None
                    self._thread = None
                    return
                self._current = self._queue.popleft()
            run_id = self._current
            try:
                execute_run(self._store, run_id, self._token)
            except ChronoLintError as exc:
                self._store.set_error(run_id, f"{exc.code}: {exc.message}")
            except Exception as exc:  # never kill the worker loop
                self._store.set_error(run_id, f"InternalError: {exc}")


def create_app(
    data_dir: str | Path,
    ui_dir: str | Path | None = None,
    access_token: str | None = None,
) -> FastAPI:
    store = Store(data_dir)
    worker = AnalysisWorker(store, access_token)

    app = FastAPI(title="chronolint", docs_url="/api/docs", openapi_url="/api/openapi.json")
    app.state.store = store
    app.state.worker = worker

    @app.exception_handler(ChronoLintError)
    async def tool_error(request: Request, exc: ChronoLintError):
        return JSONResponse(
            status_code=exc.http_status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422, content={"code": "ValidationError", "message": str(exc)}
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/api/runs", status_code=202, response_model=RunCreated)
    def start_run(req: RunRequest):
        config = AnalysisConfig(
            repo=req.repo,
            branch=req.branch,
            since=req.since,
            until=req.until,
            author_patterns=tuple(req.authors) if req.authors else None,
            max_snapshots=req.max_snapshots,
            rulepack_data=req.rulepack,
            coverage_glob=req.coverage_glob,
        )
        run_id = prepare_run(store, config, access_token)
        status = worker.submit(run_id)
        return RunCreated(run_id=run_id, status=status)

    @app.post("/api/enumerate", response_model=EnumerateOut)
    def enumerate_preview(req: EnumerateRequest):
        """Preview a branch's qualifying history, mainly to populate author pickers."""
        repo = resolve_repo(req.repo, store, access_token)
        commits = enumerate_commits(
            repo, HistoryFilter(branch=req.branch, since=req.since, until=req.until)
        )
        authors = sorted({(c.author_name, c.author_email) for c in commits})
        return EnumerateOut(
            commit_count=len(commits),
            authors=[AuthorOut(name=n, email=e) for n, e in authors],
        )

    @app.get("/api/runs", response_model=list[RunSummary])
    def list_runs():
        out = []
        for manifest in store.list_runs():
            prog = progress(store, manifest.run_id)
            out.append(
                RunSummary(
                    run_id=manifest.run_id,
                    created_at=manifest.created_at,
                    fingerprint=manifest.fingerprint,
                    branch=manifest.config.get("branch", ""),
                    repo=manifest.config.get("repo", ""),
                    phase=manifest.phase,
                    total=prog.total,
                    done=prog.done,
                    failed=prog.failed,
                )
            )
        return out

    @app.get("/api/runs/{run_id}", response_model=RunDetail)
    def run_detail(run_id: str):
        manifest = store.load_manifest(run_id)
        prog = progress(store, run_id)
        return RunDetail(
            run_id=manifest.run_id,
            created_at=manifest.created_at,
            fingerprint=manifest.fingerprint,
            config=manifest.config,
            phase=manifest.phase,
            progress=ProgressOut(
                total=prog.total,
                done=prog.done,
                failed=prog.failed,
                current_commit=prog.current_commit,
                phase=prog.phase,
            ),
            commits=[_commit_out(c) for c in manifest.commits],
            status=manifest.status,
            errors=manifest.errors,
            error=manifest.error,
        )

    @app.get("/api/runs/{run_id}/series", response_model=SeriesOut)
    def run_series(run_id: str, metrics: str | None = None):
        manifest, snapshots = store.load_run(run_id)
        names = SERIES_METRICS if metrics is None else tuple(metrics.split(","))
        for name in names:
            if name not in SERIES_METRICS:
                raise UnknownMetric(f"unknown metric {name!r}")
        series = {
            name: [_metric_value(snap, name) for snap in snapshots] for name in names
        }
        return SeriesOut(
            run_id=run_id,
            commits=[_commit_out(c) for c in manifest.commits],
            metrics=series,
        )

    @app.post("/api/runs/{run_id}/significance", response_model=SignificanceOut)
    def run_significance(run_id: str, req: WeightsRequest):
        manifest, snapshots = store.load_run(run_id)
        deltas = compute_deltas(snapshots)
        profile = WeightProfile(req.weights)
        series = weighted_significance(deltas, profile, renormalize=req.renormalize)
        hotspots = rank_hotspots(series, req.top_n, absolute=req.absolute_ranking)
        return SignificanceOut(
            run_id=run_id,
            weights=series.weights,
            commits=[_commit_out(c) for c in manifest.commits],
            scores=series.scores,
            contributions=series.contributions,
            hotspots=[
                HotspotOut(
                    index=index,
                    commit_id=manifest.commits[index].commit_id,
                    committed_at=manifest.commits[index].committed_at,
                    score=score,
                    contributions=contributions,
                )
                for index, score, contributions in hotspots
            ],
        )

    @app.get("/api/runs/{run_id}/snapshots/{commit_id}/issues", response_model=IssuesOut)
    def snapshot_issues(run_id: str, commit_id: str):
        snapshot = store.read_snapshot(run_id, commit_id)
        return IssuesOut(
            run_id=run_id,
            commit_id=commit_id,
            issues=[
                IssueOut(
                    rule_id=i.rule_id,
                    category=i.category,
                    severity=i.severity,
                    file=i.file,
                    line=i.line,
                    message=i.message,
                )
                for i in snapshot.issues
            ],
        )

    @app.get("/api/runs/{run_id}/export.csv", response_class=PlainTextResponse)
    def export_csv(run_id: str):
        return PlainTextResponse(store.export_csv(run_id), media_type="text/csv")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _commit_out(commit: CommitRef) -> CommitOut:
    return CommitOut(**commit.to_dict())


def _metric_value(snapshot: SnapshotMetrics | None, name: str) -> float | None:
    if snapshot is None:
        return None
    value = getattr(snapshot, name)
    return None if value is None else float(value)
