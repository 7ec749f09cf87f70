import json

import pytest

from artifact.cli import main

PM3 = '{"builder": "interval", "a": -3, "b": 3, "n_points": 241}'
SMALL = '{"builder": "interval", "a": 0, "b": 1, "n_points": 21}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dist_opposite_atoms(capsys):
    code, out, _ = run(capsys, "dist", "--space", PM3, "--mu", '{"atoms": [[-2, 1]]}', "--nu", '{"atoms": [[2, 1]]}')
    assert code == 0
    d = json.loads(out)
    assert d["W0"] == pytest.approx(4.0, abs=1e-9)
    assert d["Wprime"] == pytest.approx(2.0, abs=1e-9)
    assert d["value"] == d["W0"]
    assert set(d["witness"]) == {"rho", "eta"}


def test_dist_identical_is_zero(capsys):
    m = '{"atoms": [[0.5, 0.4]]}'
    code, out, _ = run(capsys, "dist", "--space", SMALL, "--mu", m, "--nu", m, "--metric", "W,W0,Wprime,Wflat_upper")
    d = json.loads(out)
    assert code == 0
    for k in ("W", "W0", "Wprime", "Wflat_upper"):
        assert d[k] == pytest.approx(0.0, abs=1e-10)


def test_dist_zigzag(capsys, tmp_path):
    from artifact.cases import zigzag
    from artifact.io import measure_to_dict, space_to_dict

    mu, nu, _, _ = zigzag(1)
    (tmp_path / "s.json").write_text(json.dumps(space_to_dict(mu.space)))
    (tmp_path / "mu.json").write_text(json.dumps(measure_to_dict(mu)))
    (tmp_path / "nu.json").write_text(json.dumps(measure_to_dict(nu)))
    code, out, _ = run(capsys, "dist", "--space", str(tmp_path / "s.json"), "--mu", str(tmp_path / "mu.json"),
                       "--nu", str(tmp_path / "nu.json"), "--p", "2", "--out", str(tmp_path / "o.json"))
    assert code == 0 and out == ""
    d = json.loads((tmp_path / "o.json").read_text())
    assert d["W0"] <= 1 / 3 + 1e-9
    assert d["Wprime"] == pytest.approx(3 ** -0.5, abs=1e-4)


def test_dist_config_errors(capsys):
    assert run(capsys, "dist", "--space", SMALL, "--mu", '{"atoms": [[0.5, 1]]}', "--nu", '{"atoms": [[0.5, 1]]}', "--p", "0.5")[0] == 2
    assert run(capsys, "dist", "--mu", "missing.json", "--nu", "missing.json")[0] == 2
    assert run(capsys, "dist", "--space", SMALL, "--mu", '{"atoms": [[0.5, 1]]}', "--nu", '{"atoms": [[0.5, 1]]}', "--metric", "Wx")[0] == 2
    assert run(capsys, "dist", "--space", SMALL)[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_dist_is_byte_identical(capsys):
    args = ("dist", "--space", SMALL, "--mu", '{"atoms": [[0.3, 0.5]]}', "--nu", '{"atoms": [[0.8, 0.2]]}', "--p", "2")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_flow(capsys):
    code, out, _ = run(capsys, "flow", "--space", SMALL, "--mu", '{"atoms": [[0.5, 1]]}', "--t", "0,0.1", "--flavor", "dirichlet")
    d = json.loads(out)
    assert code == 0
    assert d["states"][0]["mass"] == pytest.approx(1.0)
    assert d["states"][1]["mass"] < 1.0


def test_contract(capsys):
    args = ("contract", "--space", SMALL, "--instances", "2", "--seed", "3", "--t", "0,0.05,0.1")
    code, out, _ = run(capsys, *args)
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "t,quantity,bound,violation,claim,instance"
    assert len(lines) == 7
    assert all(line.split(",")[4] == "w0-contraction-dirichlet" for line in lines[1:])
    assert run(capsys, *args)[1] == out
    # K only changes the bound column
    k_out = run(capsys, *args, "--K", "2")[1].splitlines()
    assert [line.split(",")[1] for line in k_out] == [line.split(",")[1] for line in lines]


def test_contract_config_and_empty_times(capsys, tmp_path):
    cfg = {"system": {"builder": "interval", "a": 0, "b": 1, "n_points": 11}, "p": 1, "times": [0, 0.1],
           "instances": [{"mu": [0, 0.2] + [0] * 9, "nu": [0] * 9 + [0.3, 0]}]}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "contract", "--config", str(tmp_path / "c.json"))
    assert code == 0 and len(out.splitlines()) == 3
    code, out, _ = run(capsys, "contract", "--space", SMALL, "--t", "")
    assert code == 0 and out == "t,quantity,bound,violation,claim,instance\n"
    assert run(capsys, "contract", "--space", SMALL, "--t", "0.1,0")[0] == 2


def test_bochner(capsys):
    space = '{"builder": "interval", "a": 0, "b": 3.141592653589793, "n_points": 101}'
    code, out, _ = run(capsys, "bochner", "--space", space, "--modes", "1,2")
    assert code == 0
    claims = {line.split(",")[4] for line in out.splitlines()[1:]}
    assert claims == {"gradient-estimate-mode-1", "gradient-estimate-mode-2", "bochner-mode-1", "bochner-mode-2"}


def test_evi(capsys):
    code, out, _ = run(capsys, "evi", "--space", SMALL, "--seed", "1", "--t", "0,0.001,0.002")
    assert code == 0
    assert len(out.splitlines()) == 3
    assert run(capsys, "evi", "--space", SMALL, "--seed", "1", "--t", "0,0.001,0.002", "--tolerance", "-1")[0] == 1


def test_heat_needs_interval(capsys):
    assert run(capsys, "flow", "--space", '{"builder": "cycle", "circumference": 1, "n_points": 5}', "--mu", '{"atoms": [[0, 1]]}')[0] == 2


def test_paper_examples(capsys):
    code, out, _ = run(capsys, "paper-examples", "--only", "w0-opposite-atoms-p1,eps-wprime-zero")
    assert code == 0
    assert out.splitlines()[-1] == "2/2 passed"
    assert run(capsys, "paper-examples", "--only", "no-such-case")[0] == 2
    code, out, _ = run(capsys, "paper-examples", "--only", "eps-ratio-sharpness", "--tolerance", "1e-12")
    assert code == 1 and "FAIL" in out


def test_validate(capsys):
    assert run(capsys, "validate", "--space", SMALL)[:2] == (0, "valid\n")
    bad = '{"dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]], "boundary": [0]}'
    code, out, _ = run(capsys, "validate", "--space", bad)
    assert code == 1 and "triangle" in out
    code, out, _ = run(capsys, "validate", "--space", SMALL, "--mu", '{"atoms": [[0, 0.3]]}')
    assert code == 1 and out.startswith("mu:")
    assert run(capsys, "validate")[0] == 2
