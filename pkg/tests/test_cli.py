import json
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1] / "pathPowers"
sys.path.insert(0, str(ROOT))
sys.path.insert(0, str(ROOT / "src"))

from cli.commands import RunConfig, build_parser, reproduce_table, run, table_rows
from tournament.graph import c3chain, random_tournament
from tournament.serialization import read_tournament, serialize, write_tournament
from utils.errors import UsageError


def json_lines(out: str):
    return [json.loads(line) for line in out.strip().splitlines()]


@pytest.fixture
def chain9(tmp_path):
    path = tmp_path / "c9.txt"
    write_tournament(c3chain(9), path)
    return str(path)


def test_gen_is_reproducible(capsys):
    assert run(["gen", "--model", "random", "--n", "10", "--seed", "3"]) == 0
    first = capsys.readouterr().out
    assert run(["gen", "--model", "random", "--n", "10", "--seed", "3"]) == 0
    assert capsys.readouterr().out == first == serialize(random_tournament(10, 3))


def test_gen_writes_file(tmp_path, capsys):
    out = tmp_path / "t.txt"
    assert run(["gen", "--model", "c3chain", "--n", "9", "--out", str(out), "--format", "json"]) == 0
    assert read_tournament(out) == c3chain(9)
    assert json_lines(capsys.readouterr().out) == [{"model": "c3chain", "n": 9, "seed": 0, "out": str(out)}]


def test_embed_square_on_triangle_chain(chain9, tmp_path, capsys):
    witness_file = tmp_path / "w.json"
    code = run(["embed", "--mode", "square", "--in", chain9, "--out", str(witness_file), "--format", "json"])
    assert code == 0
    [record] = json_lines(capsys.readouterr().out)
    assert record["k"] == 2 and record["length"] >= 6
    assert run(["verify", "--in", chain9, "--witness", str(witness_file)]) == 0


def test_embed_hamilton_text_output(capsys):
    assert run(["embed", "--mode", "hamilton", "--model", "random", "--n", "40", "--seed", "5"]) == 0
    out = capsys.readouterr().out
    assert "hamilton" in out and "length" in out


def test_embed_power_trace(tmp_path, capsys):
    trace = tmp_path / "trace.jsonl"
    code = run([
        "embed", "--mode", "power", "--model", "transitive", "--n", "100", "--k", "2",
        "--t", "8", "--a-star", "5", "--blocks", "5", "--trace-out", str(trace), "--format", "json",
    ])
    assert code == 0
    [record] = json_lines(capsys.readouterr().out)
    assert record["length"] == 19 and not record["partial"]
    lines = trace.read_text().strip().splitlines()
    assert len(lines) == 8
    assert json.loads(lines[-1]) == {"final": [53, 54, 55, 56, 57]}


@pytest.mark.parametrize(
    "argv",
    [
        ["embed", "--model", "random", "--n", "10"],
        ["embed", "--mode", "square", "--model", "random", "--n", "10", "--t", "8"],
        ["embed", "--mode", "hamilton", "--model", "random", "--n", "10", "--k", "2"],
        ["embed", "--mode", "power", "--model", "random", "--n", "50", "--t", "4", "--a-star", "5"],
        ["embed", "--mode", "power", "--model", "transitive", "--n", "50", "--t", "8", "--a-star", "5", "--mode-guaranteed"],
        ["embed", "--mode", "square"],
        ["table", "--k", "3", "--nmax", "3"],
        ["compose", "only-one.txt"],
        ["verify", "--in", "x.txt"],
        ["certify", "--k", "3", "--n", "12"],
        ["ell-exact", "--n", "4", "--k", "2", "--shards", "2", "--shard-index", "2"],
    ],
)
def test_usage_errors_exit_2(argv):
    assert run(argv) == 2


def test_capacity_exit_3():
    assert run(["ell-exact", "--n", "8", "--k", "2"]) == 3
    assert run(["oracle", "--model", "random", "--n", "30", "--k", "2"]) == 3


def test_parse_error_exit_2(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("PTv1 3\n10\n11\n")
    assert run(["oracle", "--in", str(bad), "--k", "2"]) == 2


def test_oracle_on_triangle_chain(chain9, capsys):
    assert run(["oracle", "--in", chain9, "--k", "2", "--format", "json"]) == 0
    [record] = json_lines(capsys.readouterr().out)
    assert record["max_vertices"] == 6
    assert len(record["witness"]) == 6


def test_verify_witnesses(chain9, tmp_path):
    good = tmp_path / "good.json"
    good.write_text('{"k":2,"mode":"plain","vertices":[0,1,3,4,6,7]}\n')
    bad = tmp_path / "bad.json"
    bad.write_text('{"k":2,"mode":"plain","vertices":[2,1,0]}\n')
    outside = tmp_path / "outside.json"
    outside.write_text('{"k":2,"mode":"plain","vertices":[0,1,42]}\n')
    assert run(["verify", "--in", chain9, "--witness", str(good)]) == 0
    assert run(["verify", "--in", chain9, "--witness", str(bad)]) == 4
    assert run(["verify", "--in", chain9, "--witness", str(outside)]) == 4


def test_ell_exact_and_shards(capsys):
    assert run(["ell-exact", "--n", "4", "--k", "2", "--format", "json"]) == 0
    [record] = json_lines(capsys.readouterr().out)
    assert record["value"] == 3 and record["enumerated"] == 64
    values = []
    for index in range(2):
        assert run(["ell-exact", "--n", "4", "--k", "2", "--shards", "2", "--shard-index", str(index),
                    "--format", "json"]) == 0
        values.append(json_lines(capsys.readouterr().out)[0]["value"])
    assert min(values) == 3


def test_table(capsys):
    assert run(["table", "--nmax", "3", "--format", "json"]) == 0
    rows = json_lines(capsys.readouterr().out)
    assert [row["ell_exact"] for row in rows] == [1, 2, 2]
    assert all(row["status"] == "MATCH" for row in rows)


def test_table_helpers():
    rows = table_rows(2, 4)
    assert [row["formula"] for row in rows] == [1, 2, 2, 3]
    text = reproduce_table(2, 3)
    assert "MATCH" in text and "ell_exact" in text
    with pytest.raises(UsageError):
        table_rows(3, 3)


def test_bounds(capsys):
    assert run(["bounds", "--k", "2", "--n", "9", "--format", "json"]) == 0
    records = json_lines(capsys.readouterr().out)
    assert records[0] == {"quantity": "square_path_formula", "value": 6}
    assert run(["bounds", "--k", "5", "--n", "32", "--format", "json"]) == 0
    records = json_lines(capsys.readouterr().out)
    assert {"quantity": "upper_bound", "value": 28} in records
    assert records[0]["quantity"] == "lower_length_bound"


def test_certify_triangle_chain(tmp_path, capsys):
    out = tmp_path / "chain.txt"
    assert run(["certify", "--k", "2", "--n", "9", "--out", str(out), "--format", "json"]) == 0
    [record] = json_lines(capsys.readouterr().out)
    assert record == {"k": 2, "n": 9, "bound": 6, "blocks": [3, 3, 3], "oracle": 6}
    assert read_tournament(out) == c3chain(9)


def test_search_verify_and_certify_k5(tmp_path, capsys):
    cert = tmp_path / "block.txt"
    assert run(["search-avoider", "--k", "5", "--trials", "200", "--seed", "7", "--out", str(cert),
                "--format", "json"]) == 0
    [record] = json_lines(capsys.readouterr().out)
    assert record["found"] and record["m"] == 15
    assert run(["verify", "--cert", str(cert), "--format", "json"]) == 0
    [record] = json_lines(capsys.readouterr().out)
    assert record == {"k": 5, "m": 15, "n": 16, "verified": True}
    assert run(["certify", "--k", "5", "--n", "32", "--cert", str(cert), "--format", "json"]) == 0
    [record] = json_lines(capsys.readouterr().out)
    assert record["bound"] == 28 and record["oracle"] is None


def test_search_avoider_exhausted_budget_exits_1(capsys):
    assert run(["search-avoider", "--k", "5", "--m", "2", "--trials", "3", "--format", "json"]) == 1
    [record] = json_lines(capsys.readouterr().out)
    assert not record["found"] and record["trials"] == 3


def test_compose(tmp_path, capsys):
    first, second = tmp_path / "a.txt", tmp_path / "b.txt"
    write_tournament(c3chain(3), first)
    write_tournament(c3chain(6), second)
    assert run(["compose", str(first), str(second)]) == 0
    assert capsys.readouterr().out == serialize(c3chain(9))


def test_run_config_rejects_unknown_keys():
    args = vars(build_parser().parse_args(["bounds", "--k", "2", "--n", "3"]))
    assert RunConfig.model_validate(args).k == 2
    with pytest.raises(ValueError):
        RunConfig.model_validate({**args, "unexpected": 1})
