"""Rulepack: the versioned, fingerprintable analysis configuration.

The built-in catalog is small on purpose: one representative rule per issue
pattern the analyzer can actually prove from token streams. A rulepack file
(JSON) overrides severities, enabled flags and parameters per rule; every
effective value ends up in the ruleset fingerprint, so any change creates a
new comparability domain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import RulepackError

RELIABILITY = "RELIABILITY"
SECURITY = "SECURITY"
MAINTAINABILITY = "MAINTAINABILITY"
CATEGORIES = (RELIABILITY, SECURITY, MAINTAINABILITY)

SEVERITIES = ("INFO", "MINOR", "MAJOR", "CRITICAL")

DEFAULT_DUP_WINDOW = 50

# rule_id -> (category, default severity, default params, param validators)
_CATALOG: dict[str, tuple[str, str, dict]] = {
    "R-BUG-001": (RELIABILITY, "MAJOR", {}),
    "R-VULN-001": (SECURITY, "CRITICAL", {}),
    "R-VULN-002": (SECURITY, "MAJOR", {}),
    "R-SMELL-001": (MAINTAINABILITY, "INFO", {"markers": ["TODO", "FIXME"]}),
    "R-SMELL-002": (MAINTAINABILITY, "MAJOR", {"max_complexity": 50}),
    "R-SMELL-003": (MAINTAINABILITY, "MINOR", {"max_ncloc": 1000}),
    "R-SMELL-004": (MAINTAINABILITY, "MINOR", {"min_tokens": DEFAULT_DUP_WINDOW}),
}

_PARAM_MINIMUMS = {"max_complexity": 1, "max_ncloc": 1, "min_tokens": 2}


@dataclass(frozen=True)
class Rule:
    rule_id: str
    category: str
    severity: str
    enabled: bool
    params: dict

    def param(self, key: str):
        return self.params[key]


@dataclass(frozen=True)
class Rulepack:
    pack_version: str
    rules: tuple[Rule, ...]

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.rule_id == rule_id:
                return r
        raise KeyError(rule_id)

    def is_enabled(self, rule_id: str) -> bool:
        try:
            return self.rule(rule_id).enabled
        except KeyError:
            return False

    @property
    def dup_window(self) -> int:
        """Duplication window in normalized tokens (R-SMELL-004 parameter)."""
        try:
            return int(self.rule("R-SMELL-004").param("min_tokens"))
        except KeyError:
            return DEFAULT_DUP_WINDOW

    def canonical(self) -> dict:
        """Deterministic plain-data form used as fingerprint material."""
        return {
            "pack_version": self.pack_version,
            "rules": [
                {
                    "rule_id": r.rule_id,
                    "category": r.category,
                    "severity": r.severity,
                    "enabled": r.enabled,
                    "params": {k: r.params[k] for k in sorted(r.params)},
                }
                for r in sorted(self.rules, key=lambda r: r.rule_id)
            ],
        }


def default_rulepack() -> Rulepack:
    rules = tuple(
        Rule(rule_id, category, severity, True, dict(params))
        for rule_id, (category, severity, params) in sorted(_CATALOG.items())
    )
    return Rulepack(pack_version="1", rules=rules)


def load_rulepack(path: str | Path) -> Rulepack:
    """Load a rulepack file and merge it over the built-in defaults.

    Rules omitted from the file keep their defaults; unknown rule ids,
    unknown parameters, bad categories and out-of-range thresholds all fail
    here, never mid-analysis.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RulepackError(f"cannot read rulepack {path}: {exc}") from exc
    return rulepack_from_data(raw)


def rulepack_from_data(raw: dict) -> Rulepack:
    if not isinstance(raw, dict):
        raise RulepackError("rulepack root must be an object")
    pack_version = str(raw.get("pack_version", "1"))
    overrides = raw.get("rules", [])
    if not isinstance(overrides, list):
        raise RulepackError("rulepack 'rules' must be a list")

    merged = {rid: [cat, sev, True, dict(params)] for rid, (cat, sev, params) in _CATALOG.items()}
    seen: set[str] = set()
    for entry in overrides:
        if not isinstance(entry, dict) or "rule_id" not in entry:
            raise RulepackError("each rule entry needs a rule_id")
        rid = entry["rule_id"]
        if rid not in _CATALOG:
            raise RulepackError(f"unknown rule id {rid!r}")
        if rid in seen:
            raise RulepackError(f"duplicate rule id {rid!r}")
        seen.add(rid)
        cat, default_sev, default_params = _CATALOG[rid]
        if "category" in entry and entry["category"] != cat:
            raise RulepackError(f"rule {rid} is {cat}; category cannot be reassigned")
        severity = entry.get("severity", default_sev)
        if severity not in SEVERITIES:
            raise RulepackError(f"rule {rid}: unknown severity {severity!r}")
        enabled = entry.get("enabled", True)
        if not isinstance(enabled, bool):
            raise RulepackError(f"rule {rid}: 'enabled' must be a boolean")
        params = dict(default_params)
        for key, value in entry.get("params", {}).items():
            if key not in default_params:
                raise RulepackError(f"rule {rid}: unknown parameter {key!r}")
            params[key] = value
        _validate_params(rid, params)
        merged[rid] = [cat, severity, enabled, params]

    rules = tuple(
        Rule(rid, cat, sev, enabled, params)
        for rid, (cat, sev, enabled, params) in sorted(merged.items())
    )
    return Rulepack(pack_version=pack_version, rules=rules)


def _validate_params(rule_id: str, params: dict) -> None:
    for key, value in params.items():
        minimum = _PARAM_MINIMUMS.get(key)
        if minimum is not None:
            if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
                raise RulepackError(
                    f"rule {rule_id}: parameter {key!r} must be an integer >= {minimum}"
                )
        if key == "markers":
            if not isinstance(value, list) or not all(isinstance(m, str) for m in value):
                raise RulepackError(f"rule {rule_id}: 'markers' must be a list of strings")
