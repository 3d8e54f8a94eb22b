import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from prolate.cli import main, parse_real


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [l.split(",") for l in lines[1:]]


def test_parse_real():
    assert parse_real("20pi") == 20 * math.pi
    assert parse_real("0.5*pi") == 0.5 * math.pi
    assert parse_real("pi") == math.pi
    assert parse_real("2.5") == 2.5


def test_spectrum(capsys, monkeypatch):
    monkeypatch.delenv("PROLATE_CACHE_DIR", raising=False)
    code, out, _ = run(capsys, "spectrum", "--c", "10", "--n-max", "40")
    assert code == 0
    assert out.startswith("# schema=1\n")
    header, data = rows(out)
    assert header == ["n", "chi", "lambda", "mu_abs", "beta_tail_mass", "loss_flag"]
    assert len(data) == 41
    lam = np.array([float(r[2]) for r in data])
    assert np.all(np.diff(lam) < 0)
    assert all(len(r[2].split("e")[0].replace("-", "").replace(".", "")) == 9 for r in data)


def test_spectrum_plunge(capsys):
    _, out, _ = run(capsys, "spectrum", "--c", "50", "--n-max", "60")
    _, data = rows(out)
    assert float(data[31][2]) == pytest.approx(0.61057024659459298028, rel=1e-8)
    assert "plunge_index=32" in out


def test_usage_errors(capsys):
    assert run(capsys, "spectrum", "--c", "-1", "--n-max", "5")[0] == 2
    code, _, err = run(capsys, "check")
    assert code == 2 and err
    assert run(capsys, "example1", "--lambda", "1", "--c", "1", "--N", "-3")[0] == 2


def test_check(capsys):
    code, out, _ = run(capsys, "check", "--c", "1,5,10")
    assert code == 0
    assert "violations=1" not in out and "status=violated" not in out


def test_example1_command(capsys):
    code, out, _ = run(capsys, "example1", "--lambda", "50", "--c", "50", "--N", "50")
    assert code == 0
    header, data = rows(out)
    rec = dict(zip(header, data[0]))
    assert float(rec["legendre_error"]) == pytest.approx(0.2710800416581246, rel=1e-8)
    assert float(rec["pswf_error"]) == pytest.approx(8.9029778609e-10, rel=1e-6)
    _, out, _ = run(capsys, "example1", "--lambda", "0", "--c", "5", "--N", "0")
    assert float(rows(out)[1][0][4]) == 0.0
    _, out, _ = run(capsys, "example1", "--lambda", "20pi", "--c", "20pi", "--N", "63")
    assert float(rows(out)[1][0][5]) < 1e-6


def test_example1_alternative_conventions(capsys):
    _, out, _ = run(capsys, "example1", "--lambda", "50", "--c", "50", "--N", "50",
                    "--tail-start", "50", "--real")
    rec = dict(zip(*[rows(out)[0], rows(out)[1][0]]))
    assert float(rec["legendre_error"]) == pytest.approx(0.3087858023061832, rel=1e-8)


def test_table1_command(capsys):
    code, out, _ = run(capsys, "table1")
    assert code == 0
    header, data = rows(out)
    assert header == ["N", "s=0.75", "s=1", "s=1.25", "s=1.5", "s=1.75", "s=2"]
    assert [r[0] for r in data] == [str(n) for n in range(20, 101, 10)]
    t = {int(r[0]): [float(v) for v in r[1:]] for r in data}
    assert t[20][0] == pytest.approx(4.57329e-1, rel=0.05)
    assert t[90][2] == pytest.approx(2.14661e-3, rel=0.05)
    assert t[100][5] == pytest.approx(4.19238e-5, rel=1.0)


def test_determinism_and_cache(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("PROLATE_CACHE_DIR", raising=False)
    a = run(capsys, "table1", "--N", "70,80", "--s", "1")[1]
    b = run(capsys, "table1", "--N", "70,80", "--s", "1")[1]
    assert a == b
    cold = run(capsys, "spectrum", "--c", "7", "--n-max", "20", "--cache-dir", str(tmp_path))[1]
    assert len(os.listdir(tmp_path)) == 1
    warm = run(capsys, "spectrum", "--c", "7", "--n-max", "20", "--cache-dir", str(tmp_path))[1]
    assert cold == warm
    env_dir = tmp_path / "env"
    monkeypatch.setenv("PROLATE_CACHE_DIR", str(env_dir))
    run(capsys, "spectrum", "--c", "7", "--n-max", "20", "--cache-dir", str(tmp_path / "ignored"))
    assert os.listdir(env_dir) and not (tmp_path / "ignored").exists()


def test_json_and_out(capsys, tmp_path):
    path = tmp_path / "o.json"
    code, out, _ = run(capsys, "spectrum", "--c", "3", "--n-max", "4", "--format", "json",
                       "--out", str(path))
    assert code == 0 and out == ""
    doc = json.loads(path.read_text())
    assert doc["schema"] == 1 and len(doc["rows"]) == 5


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", "--c", "10", "--n", "0,3", "--x", "0.3,2")
    assert code == 0
    header, data = rows(out)
    vals = {(r[0], r[1]): float(r[2]) for r in data}
    assert vals[("0", "3.00000000e-01")] == pytest.approx(0.86481496597090356074, rel=1e-8)
    assert vals[("3", "2.00000000e+00")] == pytest.approx(-0.017991027208424996947, rel=1e-8)


def test_approx_and_oracle_compare(capsys):
    code, out, _ = run(capsys, "approx", "--c", "20", "--kind", "weierstrass", "--s", "1.5",
                       "--N", "10,20,30")
    assert code == 0
    header, data = rows(out)
    assert header == "c,N,s,error_grid,error_quad,band_component,tail_component".split(",")
    assert len(data) == 3
    code, out, _ = run(capsys, "oracle-compare", "--c", "5", "--n-max", "15")
    assert code == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "prolate", "spectrum", "--c", "-1", "--n-max", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stderr
