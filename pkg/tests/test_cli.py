import json
from pathlib import Path

import jsonschema
import pytest

from fusionkit.cli import (
    EXIT_BREACH,
    EXIT_OK,
    EXIT_USAGE,
    JobConfig,
    UsageError,
    main,
    parse_decomposition,
    parse_weight,
    render_term,
)

SCHEMA = json.loads((Path(__file__).resolve().parents[1] / "docs" / "cli-schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    return code, payload


def test_fuse_sp4_worked_example(capsys):
    code, payload = run_json(capsys, "fuse", "--alg", "sp4", "-k", "2", "--lhs", "1,1", "--rhs", "1,1")
    assert code == EXIT_OK
    assert {tuple(t["weight"]): t["multiplicity"] for t in payload["terms"]} == {(0, 0): 1, (0, 1): 1, (2, 0): 1}


def test_fuse_identity(capsys):
    code, payload = run_json(capsys, "fuse", "--alg", "su2", "-k", "0", "--lhs", "0", "--rhs", "0")
    assert code == EXIT_OK
    assert payload["terms"] == [{"weight": [0], "multiplicity": 1, "thresholds": [0]}]


def test_fuse_su3_adjoint(capsys):
    _, payload = run_json(capsys, "fuse", "--alg", "su3", "-k", "3", "--lhs", "1,1", "--rhs", "1,1")
    mult = {tuple(t["weight"]): t["multiplicity"] for t in payload["terms"]}
    assert mult[(1, 1)] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("fuse", "--alg", "sp4", "-k", "2", "--lhs", "1,1", "--rhs", "1,1"),
        ("tensor", "--alg", "sp4", "--lhs", "1,1", "--rhs", "1,1"),
        ("tensor", "--alg", "su3", "--lhs", "2,1", "--rhs", "1,2"),
    ],
)
def test_table_and_json_agree(capsys, argv):
    _, payload = run_json(capsys, *argv)
    _, table, _ = run(capsys, *argv)
    rhs = table.splitlines()[0].split(" = ", 1)[1]
    parsed = parse_decomposition(rhs)
    assert parsed == {tuple(t["weight"]): t["thresholds"] for t in payload["terms"]}
    assert all(len(v) == t["multiplicity"] for v, t in zip(parsed.values(), payload["terms"]))


@pytest.mark.parametrize(
    "argv",
    [
        ("threshold", "--alg", "sp4", "--lhs", "1,1", "--rhs", "1,1", "--target", "2,0"),
        ("basis", "--alg", "su3"),
        ("verify", "bases"),
    ],
)
def test_json_roundtrip(capsys, argv):
    _, payload = run_json(capsys, *argv)
    assert json.loads(json.dumps(payload)) == payload


def test_threshold_command(capsys):
    _, payload = run_json(capsys, "threshold", "--alg", "sp4", "--lhs", "1,1", "--rhs", "1,1", "--target", "2,0")
    assert payload["thresholds"] == payload["closed_form"] == [2, 3]


@pytest.mark.parametrize("tag,n", [("su2", 1), ("su3", 3), ("su4", 10)])
def test_basis_k_rows(capsys, tag, n):
    code, payload = run_json(capsys, "basis", "--alg", tag)
    assert code == EXIT_OK
    assert len(payload["k_rows"]) == n
    assert payload["roundtrip"]


def test_basis_table(capsys):
    code, out, _ = run(capsys, "basis", "--alg", "sp4")
    assert code == EXIT_OK
    assert "k-rows (4):" in out
    assert "round trip: pass" in out


def test_verify_bases(capsys):
    code, payload = run_json(capsys, "verify", "bases")
    assert code == EXIT_OK
    assert payload["passed"] == payload["total"] == 4


def test_verify_series_order(capsys):
    code, payload = run_json(capsys, "verify", "series", "--quick", "--order", "3")
    assert code == EXIT_OK
    assert any("su4" in c["name"] for c in payload["checks"])


@pytest.mark.parametrize(
    "argv",
    [
        ("fuse", "--alg", "su3", "-k", "1", "--lhs", "2,0", "--rhs", "1,0"),
        ("fuse", "--alg", "su3", "-k", "2", "--lhs", "1", "--rhs", "1,0"),
        ("fuse", "--alg", "su3", "-k", "2", "--lhs", "a,b", "--rhs", "1,0"),
        ("fuse", "--alg", "e8", "-k", "2", "--lhs", "1", "--rhs", "1"),
        ("fuse", "--alg", "su3", "-k", "-1", "--lhs", "0,0", "--rhs", "0,0"),
        ("basis", "--alg", "g2"),
        ("verify", "series", "--order", "0"),
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert err.startswith("fusionkit: error:")


def test_argparse_rejects_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nothing"])
    assert exc.value.code == 2


def test_invariant_breach_exit(capsys, monkeypatch):
    import fusionkit.cli as cli

    def broken(*args):
        raise cli.InvariantBreach("forced")

    monkeypatch.setattr(cli, "tensor_payload", broken)
    code, _, err = run(capsys, "tensor", "--alg", "su2", "--lhs", "1", "--rhs", "1")
    assert code == EXIT_BREACH
    assert "forced" in err


def test_verify_failure_exit(capsys, monkeypatch):
    import fusionkit.cli as cli

    monkeypatch.setattr(cli, "run_suite", lambda *a: [cli.Check("bases", "x", False, "forced")])
    code, out, _ = run(capsys, "verify", "bases")
    assert code == 1
    assert out.startswith("FAIL")


def test_helpers():
    assert parse_weight("1,0,2") == (1, 0, 2)
    with pytest.raises(UsageError):
        parse_weight("1;2")
    assert render_term((2, 1), [3, 3]) == "(2,1)_{3,3}"
    assert render_term((0,), [2]) == "(0)_2"
    with pytest.raises(UsageError):
        JobConfig("su3", 1, [(1, 0)], box=0)


def test_schema_ships_with_repo():
    assert SCHEMA["$defs"].keys() >= {"fuse", "tensor", "threshold", "basis", "verify"}
