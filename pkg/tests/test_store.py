from __future__ import annotations

import json

import pytest

from chronolint.analyzer import ANALYZER_VERSION
from chronolint.errors import ComparabilityViolation, NotFound, StoreCorruption
from chronolint.metrics import SnapshotMetrics, aggregate
from chronolint.profiles import default_registry
from chronolint.rulepack import default_rulepack, rulepack_from_data
from chronolint.store import Store, ruleset_fingerprint, snapshot_record
from chronolint.vcs import CommitRef

REG = default_registry()
PACK = default_rulepack()
FP = ruleset_fingerprint(PACK, REG, ANALYZER_VERSION, PACK.dup_window)


def commit(n: int) -> CommitRef:
    return CommitRef(f"{n:040x}", 1609459200 + n, "A", "a@x.com", f"c{n}", 1)


def snap(n: int) -> SnapshotMetrics:
    return aggregate(commit(n), [], [], None, None)


@pytest.fixture()
def store(tmp_path) -> Store:
    return Store(tmp_path / "data")


# --- fingerprint ---------------------------------------------------------------


def test_fingerprint_deterministic():
    assert ruleset_fingerprint(PACK, REG, ANALYZER_VERSION, 50) == ruleset_fingerprint(
        PACK, REG, ANALYZER_VERSION, 50
    )
    assert len(FP) == 64


def test_fingerprint_changes_with_threshold():
    changed = rulepack_from_data(
        {"rules": [{"rule_id": "R-SMELL-002", "params": {"max_complexity": 40}}]}
    )
    assert ruleset_fingerprint(changed, REG, ANALYZER_VERSION, 50) != FP


def test_fingerprint_ignores_key_order(tmp_path):
    a = {"pack_version": "1", "rules": [{"rule_id": "R-SMELL-002", "params": {"max_complexity": 9}}]}
    b = {"rules": [{"params": {"max_complexity": 9}, "rule_id": "R-SMELL-002"}], "pack_version": "1"}
    pa = rulepack_from_data(json.loads(json.dumps(a)))
    pb = rulepack_from_data(json.loads(json.dumps(b)))
    assert ruleset_fingerprint(pa, REG, ANALYZER_VERSION, 50) == ruleset_fingerprint(
        pb, REG, ANALYZER_VERSION, 50
    )


def test_fingerprint_changes_with_dup_window():
    assert ruleset_fingerprint(PACK, REG, ANALYZER_VERSION, 40) != FP


def test_fingerprint_changes_with_analyzer_version():
    assert ruleset_fingerprint(PACK, REG, "999.0.0", 50) != FP


# --- write / read ----------------------------------------------------------------


def test_write_then_read_roundtrip(store):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0)])
    record_id = store.write_snapshot(manifest.run_id, snap(0), FP)
    assert record_id == commit(0).commit_id
    loaded = store.read_snapshot(manifest.run_id, record_id)
    assert loaded == snap(0)
    reloaded = store.load_manifest(manifest.run_id)
    assert reloaded.status[record_id] == "done"


def test_write_already_done_is_noop(store, caplog):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0)])
    store.write_snapshot(manifest.run_id, snap(0), FP)
    first_bytes = store.snapshot_path(manifest.run_id, commit(0).commit_id).read_bytes()
    with caplog.at_level("WARNING"):
        store.write_snapshot(manifest.run_id, snap(0), FP)
    assert "already recorded" in caplog.text
    assert store.snapshot_path(manifest.run_id, commit(0).commit_id).read_bytes() == first_bytes


def test_write_under_other_fingerprint_rejected(store):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0)])
    other = ruleset_fingerprint(PACK, REG, ANALYZER_VERSION, 40)
    with pytest.raises(ComparabilityViolation):
        store.write_snapshot(manifest.run_id, snap(0), other)


def test_write_unknown_commit_rejected(store):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0)])
    with pytest.raises(NotFound):
        store.write_snapshot(manifest.run_id, snap(9), FP)


def test_records_are_byte_deterministic(store):
    m1 = store.create_run({"branch": "main"}, FP, [commit(0)])
    m2 = store.create_run({"branch": "main"}, FP, [commit(0)])
    store.write_snapshot(m1.run_id, snap(0), FP)
    store.write_snapshot(m2.run_id, snap(0), FP)
    b1 = store.snapshot_path(m1.run_id, commit(0).commit_id).read_bytes()
    b2 = store.snapshot_path(m2.run_id, commit(0).commit_id).read_bytes()
    assert b1 == b2
    assert m1.comparable() == m2.comparable()


def test_record_contains_no_wallclock(store):
    record = snapshot_record(snap(0), FP)
    dumped = json.dumps(record)
    assert "created_at" not in dumped
    assert "run_id" not in dumped


# --- load_run ---------------------------------------------------------------------


def test_load_complete_run(store):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0), commit(1)])
    store.write_snapshot(manifest.run_id, snap(0), FP)
    store.write_snapshot(manifest.run_id, snap(1), FP)
    loaded, snapshots = store.load_run(manifest.run_id)
    assert len(snapshots) == 2
    assert all(s is not None for s in snapshots)


def test_failed_snapshot_is_gap(store):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0), commit(1)])
    store.write_snapshot(manifest.run_id, snap(0), FP)
    store.mark_failed(manifest.run_id, commit(1).commit_id, "boom")
    _, snapshots = store.load_run(manifest.run_id)
    assert snapshots[0] is not None
    assert snapshots[1] is None


def test_tampered_record_detected(store):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0)])
    store.write_snapshot(manifest.run_id, snap(0), FP)
    path = store.snapshot_path(manifest.run_id, commit(0).commit_id)
    raw = bytearray(path.read_bytes())
    target = raw.find(b'"ncloc": 0')
    raw[target + len(b'"ncloc": ')] = ord("7")
    path.write_bytes(bytes(raw))
    with pytest.raises(StoreCorruption) as excinfo:
        store.load_run(manifest.run_id)
    assert commit(0).commit_id in str(excinfo.value)


def test_whitespace_tamper_detected(store):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0)])
    store.write_snapshot(manifest.run_id, snap(0), FP)
    path = store.snapshot_path(manifest.run_id, commit(0).commit_id)
    path.write_bytes(path.read_bytes().replace(b"\n", b" \n", 1))
    with pytest.raises(StoreCorruption):
        store.read_snapshot(manifest.run_id, commit(0).commit_id)


def test_load_missing_run(store):
    with pytest.raises(NotFound):
        store.load_run("missing")


def test_status_transitions_guarded(store):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0)])
    store.write_snapshot(manifest.run_id, snap(0), FP)
    with pytest.raises(ComparabilityViolation):
        store.mark_failed(manifest.run_id, commit(0).commit_id, "late")


def test_reconcile_restores_pending(store):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0), commit(1)])
    store.write_snapshot(manifest.run_id, snap(0), FP)
    store.write_snapshot(manifest.run_id, snap(1), FP)
    store.snapshot_path(manifest.run_id, commit(1).commit_id).unlink()
    store.reconcile(manifest.run_id)
    reloaded = store.load_manifest(manifest.run_id)
    assert reloaded.status[commit(0).commit_id] == "done"
    assert reloaded.status[commit(1).commit_id] == "pending"


def test_find_matching_run(store):
    config = {"branch": "main", "repo": "x"}
    manifest = store.create_run(config, FP, [commit(0)])
    assert store.find_matching_run(config, FP) == manifest.run_id
    assert store.find_matching_run({"branch": "dev", "repo": "x"}, FP) is None
    other = ruleset_fingerprint(PACK, REG, ANALYZER_VERSION, 40)
    assert store.find_matching_run(config, other) is None


# --- CSV ---------------------------------------------------------------------------


def test_csv_export_header_and_rows(store):
    manifest = store.create_run({"branch": "main"}, FP, [commit(0), commit(1)])
    store.write_snapshot(manifest.run_id, snap(0), FP)
    store.mark_failed(manifest.run_id, commit(1).commit_id, "boom")
    csv_text = store.export_csv(manifest.run_id)
    lines = csv_text.strip().split("\n")
    assert lines[0] == (
        "commit_id,committed_at,bugs,vulnerabilities,code_smells,"
        "ncloc,complexity,duplicated_line_density,coverage"
    )
    assert lines[1].startswith(commit(0).commit_id)
    assert lines[1].endswith(",0,0,0,0,0,0.0,")  # coverage empty
    assert lines[2] == f"{commit(1).commit_id},{commit(1).committed_at},,,,,,,"
