from __future__ import annotations

import io
import json
import subprocess
import sys

import jsonschema
import pytest

from currentcoh import cli


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def run_json(command, *argv):
    code, text = run(command, *argv)
    assert code == 0, text
    payload = json.loads(text)
    jsonschema.validate(payload, cli.load_schema(command))
    return payload


def test_sector_example():
    d = run_json("sector", "--g", "sl2", "--p", "2", "--n", "0,0,1,1,0")
    assert d["dim_H"] == 1


def test_sector_all_word_lengths_validate_each():
    code, text = run("sector", "--g", "so5", "--n", "0,1,1,1,0")
    assert code == 0
    for row in json.loads(text):
        jsonschema.validate(row, cli.load_schema("sector"))


def test_word_length_bound():
    d = run_json("sector", "--g", "sl2", "--p", "9", "--n", "0,0,1,1,0")
    assert d["dim_H"] == 0 and d["backend"] == "bound"


@pytest.mark.parametrize(
    "argv",
    [
        ["sector", "--g", "sl2", "--p", "2", "--n", "0,0,1"],
        ["sector", "--g", "sl2", "--p", "2", "--n", "a,b,c,d,e"],
        ["sector", "--g", "e8", "--p", "2", "--n", "0,0,1,1,0"],
        ["sector", "--g", "sl2", "--p", "-1", "--n", "0,0,1,1,0"],
        ["table", "--g", "sl2"],
        ["verify", "NoSuchClass"],
        ["bogus"],
    ],
)
def test_bad_input_exits_one(argv, capsys):
    try:
        code = run(*argv)[0]
    except SystemExit as exc:  # argparse rejections
        code = exc.code
    assert code == 1


def test_arithmetic_disagreement_exits_two(monkeypatch):
    def boom(*a, **k):
        raise cli.exactla.ArithmeticDisagreement("forced")

    monkeypatch.setattr(cli.engine, "sector_reports", boom)
    code, _ = run("sector", "--g", "sl2", "--p", "2", "--n", "0,0,1,1,0")
    assert code == 2


def test_table_and_formats():
    run_json("table", "--g", "sl2", "--level", "6")
    code, text = run("table", "--g", "sl2", "--level", "6", "--format", "csv")
    assert code == 0 and text.splitlines()[0].startswith("algebra,p,n")
    code, text = run("table", "--g", "sl2", "--level", "6", "--format", "pretty")
    assert code == 0 and "dim_H" in text.splitlines()[0]


def test_compare_isomorphic_pair():
    d = run_json("compare", "--a", "so5", "--b", "sp4", "--lmax", "6")
    assert d["mismatches"] == []


def test_restriction():
    d = run_json("restriction", "--g", "sl2", "--n", "0,0,1,1,0")
    assert d["dim_kernel"] == 0


def test_fortuitous_small():
    d = run_json("fortuitous", "--g", "sl2", "--p", "4", "--n", "0,0,2,1,1")
    assert d["fortuitous_dim"] == 0


def test_verify_file(tmp_path):
    f = tmp_path / "w.txt"
    f.write_text("Tr(t1 t2)\n")
    d = run_json("verify", str(f), "--g", "sl2")
    assert d["closed"] and d["exact"] is False
    code, _ = run("verify", str(f))
    assert code == 1


def test_verify_builtin_cartan_branch():
    d = run_json("verify", "XiNC_so7", "--no-exact", "--no-fortuitous")
    assert d["closed"] and d["cartan_restriction_zero"] is True


def test_output_is_deterministic(tmp_path):
    argv = ["table", "--g", "so5", "--level", "6", "--seed", "3", "--cache-dir", str(tmp_path)]
    first = run(*argv)[1]
    second = run(*argv)[1]  # served from cache
    third = run(*argv[:-2])[1]  # no cache
    assert first == second == third


def test_seed_changes_primes_not_dimensions():
    a = run_json("sector", "--g", "sl2", "--p", "2", "--n", "0,0,1,1,0", "--seed", "1")
    b = run_json("sector", "--g", "sl2", "--p", "2", "--n", "0,0,1,1,0", "--seed", "2")
    assert a["primes"] != b["primes"] and a["dim_H"] == b["dim_H"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "currentcoh", "sector", "--g", "sl2", "--p", "2", "--n", "0,0,1,1,0"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["dim_H"] == 1
