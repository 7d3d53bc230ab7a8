from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronolint.analyzer import (
    analyze_file,
    apply_rules,
    classify_lines,
    file_complexity,
)
from chronolint.lexer import count_physical_lines, tokenize
from chronolint.profiles import default_registry
from chronolint.rulepack import default_rulepack, rulepack_from_data

REG = default_registry()
SCRIPT = REG.get("script-like")
C_LIKE = REG.get("c-like")
PACK = default_rulepack()


def metrics_for(text: str, path: str = "f.py"):
    return analyze_file(path, text.encode(), REG, PACK).metrics


def issues_for(text: str, path: str = "f.py"):
    return analyze_file(path, text.encode(), REG, PACK).issues


# --- line classification -------------------------------------------------


def test_classify_one_of_each():
    text = "a=1\n\n# c\n"
    tokens = tokenize(text, "f.py", SCRIPT)
    assert classify_lines(tokens, count_physical_lines(text)) == (1, 1, 1)


def test_classify_empty_file():
    assert classify_lines([], 0) == (0, 0, 0)


def test_trailing_comment_counts_as_code():
    text = "a=1  # trailing\n"
    tokens = tokenize(text, "f.py", SCRIPT)
    assert classify_lines(tokens, 1) == (1, 0, 0)


# --- complexity ----------------------------------------------------------


def test_straight_line_complexity_is_one():
    tokens = tokenize("x = 1\ny = x\n", "f.py", SCRIPT)
    assert file_complexity(tokens, SCRIPT) == 1


def test_if_for_and_logical_and():
    body = "void f() {\n  if (a) {}\n  for (;;) {}\n  x = a && b;\n}\n"
    tokens = tokenize(body, "f.c", C_LIKE)
    assert file_complexity(tokens, C_LIKE) == 4


def test_empty_file_complexity_zero():
    assert file_complexity([], SCRIPT) == 0


def test_comment_only_file_complexity_zero():
    tokens = tokenize("# just a note\n", "f.py", SCRIPT)
    assert file_complexity(tokens, SCRIPT) == 0


def test_decision_token_inside_string_not_counted():
    tokens = tokenize('x = "if and while"\n', "f.py", SCRIPT)
    assert file_complexity(tokens, SCRIPT) == 1


# --- rules ---------------------------------------------------------------


def test_secret_assignment_flagged():
    issues = issues_for('password = "hunter2"\n')
    assert [(i.rule_id, i.line) for i in issues] == [("R-VULN-001", 1)]
    assert issues[0].category == "SECURITY"


def test_todo_only_issue_on_low_complexity_file():
    text = "// TODO fix\nint f() { return 1; }\n"
    issues = issues_for(text, "f.c")
    assert [i.rule_id for i in issues] == ["R-SMELL-001"]


def test_issue_free_minimal_file():
    assert issues_for("x = 1\n") == ()


def test_dangerous_call():
    issues = issues_for('eval("1")\n')
    assert [i.rule_id for i in issues] == ["R-VULN-002"]


def test_dangerous_name_without_call_not_flagged():
    assert issues_for("eval = 3\n") == ()


def test_empty_except_pass():
    text = "try:\n    f()\nexcept KeyError:\n    pass\n"
    issues = issues_for(text)
    assert [(i.rule_id, i.line) for i in issues] == [("R-BUG-001", 3)]


def test_nonempty_except_ok():
    text = "try:\n    f()\nexcept KeyError:\n    handle()\n"
    assert issues_for(text) == ()


def test_empty_catch_braces():
    text = "class A {\n  void f() {\n    try { g(); } catch (E e) {}\n  }\n}\n"
    issues = issues_for(text, "A.java")
    assert [(i.rule_id, i.line) for i in issues] == [("R-BUG-001", 3)]


def test_nonempty_catch_ok():
    text = "class A {\n  void f() {\n    try { g(); } catch (E e) { h(); }\n  }\n}\n"
    assert issues_for(text, "A.java") == ()


def test_complexity_threshold_rule():
    pack = rulepack_from_data(
        {"rules": [{"rule_id": "R-SMELL-002", "params": {"max_complexity": 2}}]}
    )
    text = "if a:\n    b()\nif c:\n    d()\n"
    analysis = analyze_file("f.py", text.encode(), REG, pack)
    assert "R-SMELL-002" in [i.rule_id for i in analysis.issues]


def test_ncloc_threshold_rule():
    pack = rulepack_from_data(
        {"rules": [{"rule_id": "R-SMELL-003", "params": {"max_ncloc": 3}}]}
    )
    text = "".join(f"x{i} = {i}\n" for i in range(5))
    analysis = analyze_file("f.py", text.encode(), REG, pack)
    assert "R-SMELL-003" in [i.rule_id for i in analysis.issues]


def test_disabling_rule_removes_only_its_issues():
    text = '# TODO one\npassword = "x"\n'
    baseline = issues_for(text)
    assert sorted(i.rule_id for i in baseline) == ["R-SMELL-001", "R-VULN-001"]
    pack = rulepack_from_data({"rules": [{"rule_id": "R-SMELL-001", "enabled": False}]})
    remaining = analyze_file("f.py", text.encode(), REG, pack).issues
    assert [i.rule_id for i in remaining] == ["R-VULN-001"]


def test_generic_profile_has_no_rules():
    text = 'password = "x"  # TODO\n'
    assert issues_for(text, "notes.txt") == ()


def test_undecodable_degrades_to_generic():
    analysis = analyze_file("weird.py", b"password = \xff\xfe\x00\n", REG, PACK)
    assert analysis.metrics.profile_id == "generic"
    assert analysis.issues == ()
    assert analysis.metrics.ncloc == 1


def test_issues_sorted_by_file_line_rule():
    text = '# TODO late\npassword = "x"\n# FIXME early\n'
    issues = issues_for(text)
    assert [(i.line, i.rule_id) for i in issues] == [
        (1, "R-SMELL-001"),
        (2, "R-VULN-001"),
        (3, "R-SMELL-001"),
    ]


# --- determinism and invariants -------------------------------------------

_SAFE_LINES = st.one_of(
    st.just(""),
    st.just("x = y + 1"),
    st.just("# a note"),
    st.just("if x:"),
    st.just("    call(x)"),
    st.just('s = "text"'),
    st.just("while running:"),
    st.builds(lambda n: f"v{n} = {n}", st.integers(0, 99)),
)


@given(st.lists(_SAFE_LINES, max_size=30))
@settings(max_examples=60, deadline=None)
def test_line_conservation(lines):
    text = "\n".join(lines) + ("\n" if lines else "")
    analysis = analyze_file("f.py", text.encode(), REG, PACK)
    m = analysis.metrics
    assert m.ncloc + m.comment_lines + m.blank_lines == count_physical_lines(text)


@given(st.lists(_SAFE_LINES, min_size=1, max_size=30))
@settings(max_examples=60, deadline=None)
def test_complexity_monotonicity(lines):
    base = "\n".join(lines) + "\n"
    tokens = tokenize(base, "f.py", SCRIPT)
    before = file_complexity(tokens, SCRIPT)
    appended = base + "if extra:\n"
    after = file_complexity(tokenize(appended, "f.py", SCRIPT), SCRIPT)
    if before == 0:
        assert after == 2  # file gained its first code AND a decision
    else:
        assert after == before + 1


@given(st.binary(max_size=300))
@settings(max_examples=60, deadline=None)
def test_analysis_is_deterministic(data):
    first = analyze_file("f.py", data, REG, PACK)
    second = analyze_file("f.py", data, REG, PACK)
    assert first == second


@given(st.binary(max_size=300))
@settings(max_examples=60, deadline=None)
def test_every_issue_category_matches_rule(data):
    analysis = analyze_file("f.py", data, REG, PACK)
    for issue in analysis.issues:
        assert issue.category in ("RELIABILITY", "SECURITY", "MAINTAINABILITY")
        assert PACK.rule(issue.rule_id).category == issue.category
