"""Snapshot-level aggregation and consecutive deltas across a run.

One SnapshotMetrics record is the complete analyzer output for one commit.
The delta series is what the significance score consumes: per weightable
category, the signed change of a scalar metric between consecutive
snapshots (counts for the three issue categories, percentages for
duplication density and coverage).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analyzer import FileMetrics, Issue
from .duplication import DupBlock, DuplicationResult
from .errors import EmptyRun
from .rulepack import MAINTAINABILITY, RELIABILITY, SECURITY
from .vcs import CommitRef

COVERAGE = "COVERAGE"
DUPLICATION = "DUPLICATION"
DELTA_CATEGORIES = (RELIABILITY, SECURITY, MAINTAINABILITY, DUPLICATION, COVERAGE)


@dataclass(frozen=True)
class SnapshotMetrics:
    commit: CommitRef
    bugs: int
    vulnerabilities: int
    code_smells: int
    ncloc: int
    complexity: int
    duplicated_lines: int
    duplicated_line_density: float
    coverage: float | None
    file_count: int
    files: tuple[FileMetrics, ...]
    issues: tuple[Issue, ...]
    dup_blocks: tuple[DupBlock, ...] = ()

    def scalar(self, category: str) -> float | None:
        if category == RELIABILITY:
            return float(self.bugs)
        if category == SECURITY:
            return float(self.vulnerabilities)
        if category == MAINTAINABILITY:
            return float(self.code_smells)
        if category == DUPLICATION:
            return self.duplicated_line_density
        if category == COVERAGE:
            return self.coverage
        raise KeyError(category)


@dataclass(frozen=True)
class DeltaSeries:
    """Per-category signed changes; index 0 is always 0, gaps are None."""

    length: int
    deltas: dict[str, list[float | None]]
    present: dict[str, bool] = field(default_factory=dict)


def aggregate(
    commit: CommitRef,
    file_metrics: list[FileMetrics],
    issues: list[Issue],
    duplication: DuplicationResult | None = None,
    coverage: float | None = None,
) -> SnapshotMetrics:
    """Fold per-file outputs into one snapshot record, canonically ordered."""
    files = tuple(sorted(file_metrics, key=lambda f: f.path))
    ordered_issues = tuple(sorted(issues, key=Issue.sort_key))

    total_lines = sum(f.total_lines for f in files)
    dup_lines = duplication.duplicated_line_count() if duplication else 0
    density = 100.0 * dup_lines / max(1, total_lines)

    return SnapshotMetrics(
        commit=commit,
        bugs=sum(1 for i in ordered_issues if i.category == RELIABILITY),
        vulnerabilities=sum(1 for i in ordered_issues if i.category == SECURITY),
        code_smells=sum(1 for i in ordered_issues if i.category == MAINTAINABILITY),
        ncloc=sum(f.ncloc for f in files),
        complexity=sum(f.complexity for f in files),
        duplicated_lines=dup_lines,
        duplicated_line_density=density,
        coverage=coverage,
        file_count=len(files),
        files=files,
        issues=ordered_issues,
        dup_blocks=duplication.blocks if duplication else (),
    )


def compute_deltas(snapshots: list[SnapshotMetrics | None]) -> DeltaSeries:
    """Signed consecutive changes per category over a snapshot list.

    d(0) is 0 by definition. A delta is None (absent) when either neighbor
    lacks the value: coverage missing from a snapshot, or a failed-snapshot
    gap in the run.
    """
    if len(snapshots) < 1:
        raise EmptyRun("delta series needs at least one snapshot")

    deltas: dict[str, list[float | None]] = {}
    present: dict[str, bool] = {}
    for category in DELTA_CATEGORIES:
        values = [
            snap.scalar(category) if snap is not None else None for snap in snapshots
        ]
        series: list[float | None] = [0.0]
        for i in range(1, len(values)):
            if values[i] is None or values[i - 1] is None:
                series.append(None)
            else:
                series.append(values[i] - values[i - 1])
        deltas[category] = series
        present[category] = any(v is not None for v in values)
    return DeltaSeries(length=len(snapshots), deltas=deltas, present=present)
