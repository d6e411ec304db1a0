import json

import pytest
from click.testing import CliRunner

from shadiv.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_analyze_five_primes(runner):
    result = runner.invoke(
        main, ["analyze", "--curve", "0,-1,1,-7,10", "--label", "121-B1", "--primes", "3,5,7,11,13"]
    )
    assert result.exit_code == 0
    assert result.output.count("@ p=") == 5
    assert "121-B1 @ p=13: Guaranteed" in result.output
    assert "rational.large_prime" in result.output


def test_analyze_json_round_trip(runner):
    args = ["analyze", "--curve", "0,-1,1,-7,10", "--primes", "3,13", "--format", "json"]
    result = runner.invoke(main, args)
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert len(payload["reports"]) == 2
    for report in payload["reports"]:
        assert set(report) == {"curve", "p", "outcome", "chain", "evidence"}
        for step in report["chain"]:
            assert set(step) == {"theorem", "quote_tag", "inputs", "rigor"}
    # bytewise deterministic
    again = runner.invoke(main, args)
    assert again.output == result.output


def test_analyze_tsv(runner):
    result = runner.invoke(
        main, ["analyze", "--embedded", "121-C1", "--primes", "11", "--format", "tsv"]
    )
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == "curve\tp\toutcome\tfirst_reason"
    assert lines[1].split("\t") == ["121-C1", "11", "Guaranteed", "rational.large_prime"]


def test_analyze_parse_error_exit_code(runner):
    result = runner.invoke(main, ["analyze", "--curve", "1,2,3", "--primes", "5"])
    assert result.exit_code != 0
    assert "expected 5" in result.output
    result = runner.invoke(main, ["analyze", "--curve", "1,2,x,4,5", "--primes", "5"])
    assert result.exit_code != 0
    assert "column" in result.output


def test_analyze_curve_file(runner, tmp_path):
    path = tmp_path / "curves.txt"
    path.write_text(
        "# embedded reproductions\n"
        "121-B1: 0,-1,1,-7,10\n"
        "plain, no label is fine -> next line\n".replace("plain, no label is fine -> next line\n", "")
        + "0,0,0,-1,0\n"
    )
    result = runner.invoke(main, ["analyze", "--curve-file", str(path), "--primes", "13", "--format", "tsv"])
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert len(lines) == 3
    assert lines[1].startswith("121-B1\t13")


def test_analyze_curve_file_error_line_number(runner, tmp_path):
    path = tmp_path / "curves.txt"
    path.write_text("0,0,0,-1,0\nbad: 1,2,three,4,5\n")
    result = runner.invoke(main, ["analyze", "--curve-file", str(path), "--primes", "5"])
    assert result.exit_code != 0
    assert "line 2" in result.output


def test_analyze_threads_env_determinism(runner):
    args = ["analyze", "--embedded", "selmer-jacobian", "--primes", "3,5,7", "--format", "json"]
    single = runner.invoke(main, args, env={"SHA_DIV_THREADS": "1"})
    multi = runner.invoke(main, args, env={"SHA_DIV_THREADS": "4"})
    assert single.exit_code == multi.exit_code == 0
    assert single.output == multi.output


def test_groupcrit_verify_exhaustive_p3(runner):
    result = runner.invoke(main, ["groupcrit-verify", "--p", "3", "--mode", "exhaustive", "--format", "json"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["subgroups_checked"] == 55
    assert payload["mismatches"] == 0


def test_groupcrit_verify_requires_seed(runner):
    result = runner.invoke(main, ["groupcrit-verify", "--p", "5", "--mode", "sampled"])
    assert result.exit_code != 0
    assert "seed" in result.output


def test_groupcrit_verify_sampled_deterministic(runner):
    args = ["groupcrit-verify", "--p", "5", "--mode", "sampled", "--count", "150", "--seed", "9", "--format", "json"]
    a = runner.invoke(main, args)
    b = runner.invoke(main, args)
    assert a.exit_code == 0
    assert a.output == b.output
    payload = json.loads(a.output)
    assert payload["mismatches"] == 0
    assert payload["subgroups_checked"] == 150


def test_tables_p11(runner):
    result = runner.invoke(main, ["tables", "--which", "p11", "--format", "json"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["reference_row"] == [3, 3, -1, 0, 1, -3]
    assert payload["pass"] is True
    assert payload["curves"]["121-B1"]["consistent_pairs"] == [[3, 8]]


def test_tables_nv3(runner):
    result = runner.invoke(main, ["tables", "--which", "nv3", "--format", "json"])
    payload = json.loads(result.output)
    assert payload["setA"] == [1, 2, 3, 4, 5, 6, 7]
    assert payload["setB"] == [12, 2, 4, 12, 20, 22, 12]
    assert payload["threshold"] == 11
    assert payload["pass"] is True


def test_tables_bounds(runner):
    result = runner.invoke(main, ["tables", "--which", "bounds", "--format", "json"])
    payload = json.loads(result.output)
    got = {row["degree"]: row["minimal_admissible_prime"] for row in payload["rows"]}
    assert got == {1: 13, 2: 37, 3: 127, 4: 401, 5: 1423}
    assert payload["pass"] is True


def test_selmer_example_text_and_json(runner):
    text = runner.invoke(main, ["selmer-example"])
    assert text.exit_code == 0
    assert "3X^3 + 4Y^3 + 5Z^3" in text.output
    assert "[computed]" in text.output and "[cited]" in text.output
    as_json = runner.invoke(main, ["selmer-example", "--format", "json"])
    payload = json.loads(as_json.output)
    sections = next(s for s in payload["steps"] if s["name"] == "coordinate-sections-at-3")
    assert sections["detail"]["S"] is True and sections["detail"]["S'"] is False


def test_twist_scan_command(runner):
    result = runner.invoke(
        main,
        ["twist-scan", "--embedded", "selmer-jacobian", "--p", "3", "--dmax", "30", "--format", "json"],
    )
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["failures"] == [1, -3]
    assert payload["failure_count"] <= payload["cap"]
    dmax1 = runner.invoke(
        main, ["twist-scan", "--embedded", "121-B1", "--p", "7", "--dmax", "1", "--format", "json"]
    )
    rows = json.loads(dmax1.output)["rows"]
    assert rows == [{"d": 1, "outcome": "Guaranteed"}]


def test_exit_zero_for_mathematical_failures(runner):
    # CriterionFails is a mathematical outcome, not an error
    result = runner.invoke(main, ["analyze", "--embedded", "selmer-jacobian", "--primes", "3"])
    assert result.exit_code == 0
    assert "CriterionFails" in result.output


def test_unsupported_prime_is_a_clean_error(runner):
    result = runner.invoke(main, ["analyze", "--embedded", "121-B1", "--primes", "2"])
    assert result.exit_code != 0
    assert "odd primes" in result.output
    result = runner.invoke(
        main, ["twist-scan", "--embedded", "121-B1", "--p", "11", "--dmax", "5"]
    )
    assert result.exit_code != 0
    assert "twist caps" in result.output
