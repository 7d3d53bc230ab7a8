"""Command-line interface.

Thin client over the core package: `analyze` runs the pipeline, `significance`
and `export` read a stored run, `serve` starts the HTTP service. Numbers are
printed with full float precision so CLI output is bit-comparable with API
responses. Errors map to documented exit codes (see errors module / README).
"""

from __future__ import annotations

import argparse
import os
import socket
import sys
from datetime import datetime, timezone
from pathlib import Path

from .errors import ChronoLintError, InvalidRange
from .metrics import DELTA_CATEGORIES, compute_deltas
from .orchestrator import AnalysisConfig, progress, run_analysis
from .plotting import render_significance_svg
from .significance import WeightProfile, parse_weights, rank_hotspots, weighted_significance
from .store import Store

TOKEN_ENV = "CHRONOLINT_TOKEN"


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ChronoLintError as exc:
        print(f"{exc.code}: {exc.message}", file=sys.stderr)
        return exc.exit_code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronolint",
        description="Reconstruct the code-quality history of a git repository.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="analyze a branch's history into a run")
    analyze.add_argument("--repo", required=True, help="local path or clone URL")
    analyze.add_argument("--branch", required=True)
    analyze.add_argument("--since", help="ISO-8601 lower bound (inclusive)")
    analyze.add_argument("--until", help="ISO-8601 upper bound (inclusive)")
    analyze.add_argument("--authors", help="comma-separated name/email globs")
    analyze.add_argument("--max-snapshots", type=int)
    analyze.add_argument("--rulepack", help="rulepack JSON file")
    analyze.add_argument("--coverage-glob", help="glob for LCOV reports inside each snapshot")
    analyze.add_argument("--data", required=True, help="data directory")
    analyze.add_argument("--quiet", action="store_true")
    analyze.set_defaults(handler=_cmd_analyze)

    significance = sub.add_parser("significance", help="weighted significance for a run")
    significance.add_argument("--run", required=True)
    significance.add_argument("--weights", required=True, help="e.g. SECURITY=0.5,RELIABILITY=0.5")
    significance.add_argument("--renormalize", action="store_true")
    significance.add_argument("--abs-rank", action="store_true")
    significance.add_argument("--top", type=int, default=10)
    significance.add_argument("--svg", help="write a deterministic SVG chart here")
    significance.add_argument("--data", required=True)
    significance.set_defaults(handler=_cmd_significance)

    export = sub.add_parser("export", help="export a run as CSV")
    export.add_argument("--run", required=True)
    export.add_argument("--output", help="file path; stdout when omitted")
    export.add_argument("--data", required=True)
    export.set_defaults(handler=_cmd_export)

    runs = sub.add_parser("runs", help="list runs in a data directory")
    runs.add_argument("--data", required=True)
    runs.set_defaults(handler=_cmd_runs)

    serve = sub.add_parser("serve", help="serve the HTTP API (and UI bundle, if built)")
    serve.add_argument("--port", type=int, required=True)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--ui", help="directory of the built web UI")
    serve.add_argument("--data", required=True)
    serve.set_defaults(handler=_cmd_serve)

    return parser


def _cmd_analyze(args) -> int:
    store = Store(args.data)
    config = AnalysisConfig(
        repo=args.repo,
        branch=args.branch,
        since=_parse_timestamp(args.since) if args.since else None,
        until=_parse_timestamp(args.until) if args.until else None,
        author_patterns=tuple(a.strip() for a in args.authors.split(",")) if args.authors else None,
        max_snapshots=args.max_snapshots,
        rulepack_path=args.rulepack,
        coverage_glob=args.coverage_glob,
    )

    def report(prog):
        if not args.quiet:
            print(
                f"[{prog.done + prog.failed}/{prog.total}] analyzed", file=sys.stderr
            )

    run_id = run_analysis(
        store, config, access_token=os.environ.get(TOKEN_ENV), on_snapshot=report
    )
    print(run_id)
    return 0


def _cmd_significance(args) -> int:
    store = Store(args.data)
    manifest, snapshots = store.load_run(args.run)
    deltas = compute_deltas(snapshots)
    profile = WeightProfile(parse_weights(args.weights))
    series = weighted_significance(deltas, profile, renormalize=args.renormalize)

    weights_text = ", ".join(
        f"{c}={series.weights[c]!r}" for c in DELTA_CATEGORIES if series.weights[c] > 0
    )
    print(f"run {args.run}  weights: {weights_text}")
    print("index  commit        committed_at          score")
    for i, commit in enumerate(manifest.commits):
        when = datetime.fromtimestamp(commit.committed_at, tz=timezone.utc).isoformat()
        print(f"{i:>5}  {commit.commit_id[:12]}  {when}  {series.scores[i]!r}")

    hotspots = rank_hotspots(series, args.top, absolute=args.abs_rank)
    print()
    print(f"top {len(hotspots)} hotspots ({'|score|' if args.abs_rank else 'score'} ranking):")
    for rank, (index, score, contributions) in enumerate(hotspots, start=1):
        leading = ", ".join(
            f"{c}={contributions[c]!r}"
            for c in sorted(contributions, key=lambda c: -abs(contributions[c]))
            if contributions[c] != 0.0
        )
        commit = manifest.commits[index]
        print(f"{rank:>3}. [{index}] {commit.commit_id[:12]}  score={score!r}  {leading}")

    if args.svg:
        labels = [str(i) for i in range(len(series.scores))]
        Path(args.svg).write_text(
            render_significance_svg(series.scores, labels), encoding="utf-8"
        )
        print(f"wrote {args.svg}", file=sys.stderr)
    return 0


def _cmd_export(args) -> int:
    store = Store(args.data)
    csv_text = store.export_csv(args.run)
    if args.output:
        Path(args.output).write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    return 0


def _cmd_runs(args) -> int:
    store = Store(args.data)
    for manifest in store.list_runs():
        prog = progress(store, manifest.run_id)
        print(
            f"{manifest.run_id}  {manifest.phase:<12} {prog.done}+{prog.failed}/{prog.total}"
            f"  {manifest.config.get('branch')}  {manifest.config.get('repo')}"
        )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"PortBusy: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 5
    finally:
        probe.close()

    app = create_app(args.data, ui_dir=args.ui, access_token=os.environ.get(TOKEN_ENV))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _parse_timestamp(text: str) -> int:
    try:
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise InvalidRange(f"not an ISO-8601 timestamp: {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


if __name__ == "__main__":
    sys.exit(main())
