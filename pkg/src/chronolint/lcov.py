"""LCOV line-coverage ingestion.

Coverage is never measured by this tool; it is read from LCOV tracefiles
committed or archived alongside the code (records `SF:`, `DA:`, `LF:`,
`LH:`, `end_of_record`). The snapshot coverage percentage aggregates hit/
instrumented line totals over the report files whose source paths match
files actually present in the snapshot.
"""

from __future__ import annotations

from .errors import CoverageFormatError


def parse_lcov(text: str) -> list[tuple[str, int, int]]:
    """Parse one tracefile into (source_file, lines_found, lines_hit) rows.

    LF/LH records win when present; otherwise the totals are derived from
    the DA records of the section.
    """
    rows: list[tuple[str, int, int]] = []
    source: str | None = None
    lf: int | None = None
    lh: int | None = None
    da_found = 0
    da_hit = 0

    def flush() -> None:
        nonlocal source, lf, lh, da_found, da_hit
        if source is not None:
            found = lf if lf is not None else da_found
            hit = lh if lh is not None else da_hit
            rows.append((source, found, hit))
        source, lf, lh, da_found, da_hit = None, None, None, 0, 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("TN:"):
            continue
        if line == "end_of_record":
            flush()
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise CoverageFormatError(f"line {lineno}: not an LCOV record: {raw!r}")
        try:
            if key == "SF":
                if source is not None:
                    flush()
                source = value.strip()
            elif key == "DA":
                _, hits = value.split(",")[:2]
                da_found += 1
                if int(hits) > 0:
                    da_hit += 1
            elif key == "LF":
                lf = int(value)
            elif key == "LH":
                lh = int(value)
            # other record types (FN, FNDA, BRDA, ...) are ignored
        except (ValueError, IndexError) as exc:
            raise CoverageFormatError(f"line {lineno}: bad LCOV record {raw!r}") from exc
    flush()
    return rows


def ingest_coverage(report_texts: list[str], snapshot_files: set[str]) -> float | None:
    """Aggregate coverage over report entries matching snapshot files.

    Returns the percentage 100 * sum(LH) / sum(LF), or None when no report
    entry matches a file in the snapshot.
    """
    total_found = 0
    total_hit = 0
    matched = False
    for text in report_texts:
        for source, found, hit in parse_lcov(text):
            if _matches_snapshot(source, snapshot_files):
                matched = True
                total_found += found
                total_hit += hit
    if not matched or total_found == 0:
        return None
    return 100.0 * total_hit / total_found


def _matches_snapshot(source: str, snapshot_files: set[str]) -> bool:
    normalized = source.replace("\\", "/")
    while normalized.startswith("./"):
        normalized = normalized[2:]
    if normalized in snapshot_files:
        return True
    # absolute paths in reports still match their repo-relative suffix
    return any(normalized.endswith("/" + f) for f in snapshot_files)
