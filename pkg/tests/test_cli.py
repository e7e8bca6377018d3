import json

import pytest

from isifree.cli import main
from isifree.codec import ModulationCode, validate_code


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def fail(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    err = capsys.readouterr().err.strip().splitlines()[-1]
    return exc.value.code, json.loads(err)


def test_capacity(capsys):
    code, out, _ = run(capsys, "capacity", "--k", "1", "--num-types", "2", "--paths", "3")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("lambda=2.41421")
    assert lines[2] == "m,N(m),log2N/m"
    assert lines[3].startswith("1,3,")


def test_synthesize_encode_decode(capsys, tmp_path):
    code_file = tmp_path / "code.json"
    code, out, _ = run(capsys, "synthesize", "--k", "1", "--num-types", "2", "--depth", "2", "--out", str(code_file))
    assert code == 0 and "rate=1.25" in out and "gap=0.0215" in out
    assert validate_code(ModulationCode.load(code_file)) == []
    bits = tmp_path / "bits.txt"
    bits.write_text("0110 1001\n1101 1\n")
    syms = tmp_path / "syms.txt"
    back = tmp_path / "back.txt"
    assert run(capsys, "encode", "--code", str(code_file), "--in", str(bits), "--out", str(syms))[0] == 0
    assert syms.read_text().startswith("n_bits=13\n")
    assert run(capsys, "decode", "--code", str(code_file), "--in", str(syms), "--out", str(back))[0] == 0
    assert back.read_text().strip() == "0110100111011"


def test_rate(capsys, tmp_path, depth2_code):
    path = tmp_path / "t3.json"
    depth2_code.save(path)
    code, out, _ = run(capsys, "rate", "--code", str(path), "--bits", "20000", "--seed", "5")
    report = json.loads(out)
    assert report["analytic_rate"] == pytest.approx(1.25)
    assert report["monte_carlo_rate"] == pytest.approx(1.25, rel=0.02)
    assert report["seed"] == 5


def test_sweep_cli(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k": [1], "N": [1, 2], "d": [1]}))
    out = tmp_path / "out.csv"
    assert run(capsys, "sweep", "--config", str(cfg), "--out", str(out))[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "k,N,d,rate,capacity,gap,error"
    assert lines[2].startswith("1,2,1,1.25,")


def test_errors_are_json(capsys, tmp_path):
    status, err = fail(capsys, "capacity", "--k", "0", "--num-types", "2")
    assert status != 0 and err["error"] == "ValueError"
    status, err = fail(capsys, "synthesize", "--k", "1")
    assert status == 2 and err["error"] == "UsageError"
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    status, err = fail(capsys, "rate", "--code", str(bad))
    assert status == 1 and err["error"] == "MalformedCodeError"
    status, err = fail(capsys, "decode", "--code", str(tmp_path / "missing.json"), "--in", "x", "--out", "y")
    assert status == 1 and err["error"] == "FileNotFoundError"
