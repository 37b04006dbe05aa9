"""Instance documents, pipeline verdicts, report/DOT output, CLI behavior."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from tracktree import (
    corpus,
    crossing_exhibit,
    dot_document,
    fig1_exhibit,
    instance_to_text,
    parse_instance_text,
    report_document,
    run_instance,
)
from tracktree.cli import main
from tracktree.errors import ParseError

INSTANCE_DIR = Path(__file__).resolve().parent.parent / "demos" / "instances"


# --------------------------------------------------------------------------
# parsing


def test_corpus_round_trips_through_text():
    for name, spec in corpus().items():
        assert parse_instance_text(instance_to_text(spec)) == spec, name


def test_explicit_round_trip():
    spec = crossing_exhibit()
    assert parse_instance_text(instance_to_text(spec)) == spec


def test_parse_rejects_margin_at_least_radius():
    text = instance_to_text(corpus()["E1"]).replace("margin = 2", "margin = 9")
    with pytest.raises(ParseError):
        parse_instance_text(text)


def test_parse_rejects_radius_below_twice_margin():
    text = instance_to_text(corpus()["E1"]).replace("radius = 8", "radius = 3")
    with pytest.raises(ParseError):
        parse_instance_text(text)


def test_parse_rejects_missing_identity_translation():
    text = instance_to_text(corpus()["E1"]).replace("TT, T, 1, t, tt", "t, tt")
    with pytest.raises(ParseError):
        parse_instance_text(text)


def test_parse_rejects_bad_rule():
    text = instance_to_text(corpus()["E1"]).replace("rule = t in", "rule = t sideways")
    with pytest.raises(ParseError):
        parse_instance_text(text)


def test_parse_rejects_stray_keys():
    with pytest.raises(ParseError):
        parse_instance_text("name = foo\n")


def test_shipped_instance_files_parse_to_corpus():
    for name, spec in corpus().items():
        parsed = parse_instance_text((INSTANCE_DIR / f"{name}.ini").read_text())
        assert parsed == spec


# --------------------------------------------------------------------------
# pipeline verdicts


def test_corpus_all_pass():
    for name, spec in corpus().items():
        result = run_instance(spec)
        assert result.report.status == "pass", (name, result.report.witnesses)
        assert result.report.exit_code() == 0


def test_expectations_checked():
    import dataclasses
    spec = corpus()["E1"]
    wrong = dataclasses.replace(
        spec, expectations=dataclasses.replace(spec.expectations, tree_vertices=7))
    result = run_instance(wrong)
    assert result.report.status == "fail"
    assert any(c.name == "expectations" and c.status == "fail" for c in result.report.checks)


def test_crossing_exhibit_fails_with_witness():
    result = run_instance(crossing_exhibit())
    assert result.report.status == "fail"
    nest = [c for c in result.report.checks if c.name == "nestedness"][0]
    assert nest.status == "fail"
    assert "a" in nest.witness and "b" in nest.witness
    assert result.report.exit_code() == 2


def test_fig1_exhibit_passes():
    result = run_instance(fig1_exhibit())
    assert result.report.status == "pass"
    assert result.report.counts["tree_vertices"] == 8


def test_radius_margin_overrides():
    result = run_instance(corpus()["E1"], radius=10, margin=2)
    assert result.report.status == "pass"
    assert result.report.counts["omega"] == 21


def test_uncertified_run_aborts():
    import dataclasses
    spec = dataclasses.replace(corpus()["E1"], radius=4, margin=1,
                               translations=("1", "tttt"))
    result = run_instance(spec)
    assert result.report.status == "uncertified"
    assert result.report.exit_code() == 3
    assert result.report.checks[-1].name == "family_certification"


# --------------------------------------------------------------------------
# report and DOT documents


def test_report_document_deterministic():
    spec = corpus()["E2"]
    doc1 = report_document(run_instance(spec).report)
    doc2 = report_document(run_instance(spec).report)
    assert doc1 == doc2
    payload = json.loads(doc1)
    assert payload["timing_ms"] == 0
    assert list(payload) == ["instance", "status", "counts", "checks", "witnesses", "timing_ms"]


def test_failing_checks_always_carry_witnesses():
    result = run_instance(crossing_exhibit())
    payload = json.loads(report_document(result.report))
    for check in payload["checks"]:
        if check["status"] == "fail":
            assert check["witness"]
    assert payload["witnesses"]


def test_dot_document_shape():
    result = run_instance(corpus()["E1"])
    dot = dot_document(result.tree, "E1")
    assert dot.startswith('graph "E1" {')
    assert 'label="o", shape=doublecircle' in dot
    assert dot.count(" -- ") == 4
    assert '[label="1"]' in dot  # the identity coset labels one edge


# --------------------------------------------------------------------------
# CLI


def test_cli_check_pass(capsys):
    code = main(["check", str(INSTANCE_DIR / "E1.ini")])
    out = capsys.readouterr().out
    assert code == 0
    assert json.loads(out)["status"] == "pass"


def test_cli_check_multiple_jobs(capsys):
    paths = [str(INSTANCE_DIR / f"{n}.ini") for n in ("E1", "E2", "E3", "E4")]
    code = main(["check", *paths, "--jobs", "4"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.count('"status": "pass"') >= 4


def test_cli_crossing_exit_code(capsys):
    code = main(["check", str(INSTANCE_DIR / "crossing.ini")])
    assert code == 2
    capsys.readouterr()


def test_cli_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text(instance_to_text(corpus()["E1"]).replace("margin = 2", "margin = 9"))
    assert main(["check", str(bad)]) == 4
    assert "input error" in capsys.readouterr().err


def test_cli_missing_file(capsys):
    assert main(["check", "/nonexistent/spec.ini"]) == 4
    capsys.readouterr()


def test_cli_tree_dot(capsys):
    code = main(["tree", str(INSTANCE_DIR / "E4.ini"), "--format", "dot"])
    out = capsys.readouterr().out
    assert code == 0 and out.startswith('graph "E4"')


def test_cli_tree_report(capsys):
    code = main(["tree", str(INSTANCE_DIR / "E2.ini"), "--format", "report"])
    out = capsys.readouterr().out
    assert code == 0 and json.loads(out)["instance"] == "E2"


def test_cli_oracle(capsys):
    code = main(["oracle", str(INSTANCE_DIR / "E3.ini")])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["orientations_match"] and out["all_within_class"]


def test_cli_demo(capsys):
    code = main(["demo", "E1"])
    out = capsys.readouterr().out
    assert code == 0 and "graph" in out
    assert main(["demo", "E9"]) == 4
    capsys.readouterr()


def test_cli_random(capsys):
    code = main(["random", "--seed", "11"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0 and out["status"] == "pass"


def test_cli_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code = main(["check", str(INSTANCE_DIR / "E1.ini"), "--out", str(target)])
    capsys.readouterr()
    assert code == 0
    assert json.loads(target.read_text())["status"] == "pass"


def test_cli_byte_identical_across_processes():
    # different hash seeds must not leak into the report bytes
    outputs = []
    for seed in ("1", "2"):
        proc = subprocess.run(
            [sys.executable, "-m", "tracktree.cli", "check", str(INSTANCE_DIR / "E4.ini")],
            capture_output=True, env={"PYTHONHASHSEED": seed, "PATH": ""},
            cwd=str(INSTANCE_DIR))
        assert proc.returncode == 0, proc.stderr
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1]


def test_write_atomic_io_error(tmp_path):
    from tracktree.errors import IoError
    from tracktree.reports import write_atomic

    with pytest.raises(IoError):
        write_atomic(tmp_path / "missing_dir" / "report.json", "{}")


def test_dot_single_vertex_tree():
    from tracktree import build_track_system, build_tree, explicit_family

    fam = explicit_family(["a"], [("v", frozenset(["a"]))])
    tree = build_tree(build_track_system(fam))
    dot = dot_document(tree, "degenerate")
    assert 'label="o"' in dot and " -- " not in dot
