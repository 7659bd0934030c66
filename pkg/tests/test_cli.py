import json

import pytest

from packbound.cli import (
    EXIT_OK, EXIT_REFUTED, EXIT_USAGE, RunConfig, dispatch,
    sos_certificate_to_json,
)


def run(argv, capsys):
    code = dispatch(argv)
    out = capsys.readouterr().out
    return code, out


def test_unknown_command_usage_error(capsys):
    code, _ = run(["frobnicate"], capsys)
    assert code == EXIT_USAGE


def test_bad_config_rejected(capsys):
    code, _ = run(["--precision", "5", "code", "info", "--name", "hamming8"],
                  capsys)
    assert code == EXIT_USAGE


def test_code_info_json(capsys):
    code, out = run(["--format", "json", "code", "info", "--name", "golay24"],
                    capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["dimension"] == 12
    assert doc["weights"] == {"0": 1, "8": 759, "12": 2576, "16": 759,
                              "24": 1}
    assert doc["self_dual"] and doc["doubly_even"]
    assert doc["version"]
    assert doc["config"]["precision"] == 60


def test_lattice_info_e8(capsys):
    code, out = run(["lattice", "info", "--name", "e8", "--json"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["min_sq_norm"] == 2
    assert doc["kissing"] == 240
    assert doc["covolume"] == "1"
    assert doc["density"] == "pi^4/384"


def test_lattice_theta_csv(capsys):
    code, out = run(["lattice", "theta", "--name", "e8", "--max-norm", "6"],
                    capsys)
    assert code == EXIT_OK
    assert out.splitlines()[:4] == ["sq_norm,count", "0,1", "2,240", "4,2160"]


def test_qseries_show(capsys):
    code, out = run(["qseries", "show", "e4", "--terms", "4"], capsys)
    assert code == EXIT_OK
    assert out.strip() == "e4: 1, 240, 2160, 6720"


def test_qseries_csv(capsys):
    code, out = run(["qseries", "show", "theta10", "--csv"], capsys)
    assert code == EXIT_OK
    assert out.splitlines()[1] == "1,2,1"


def test_magic_eval(capsys, spec8):
    code, out = run(["magic", "eval", "--dim", "8", "--r", "1.7"], capsys)
    assert code == EXIT_OK
    assert "f(1.7)" in out
    assert "-0.000494" in out


def test_magic_table(tmp_path, capsys, spec8):
    target = tmp_path / "f.csv"
    code, _ = run(["magic", "table", "--dim", "8", "--rmax", "1",
                   "--step", "0.5", "--out", str(target)], capsys)
    assert code == EXIT_OK
    lines = target.read_text().splitlines()
    assert lines[0] == "r,f,f_err,fhat,fhat_err"
    assert len(lines) == 4  # r = 0, 0.5, 1.0


def test_deterministic_artifacts(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        code, _ = run(["--format", "json", "lattice", "info", "--name",
                       "leech", "--out", str(target)], capsys)
        assert code == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_verify_poisson(capsys):
    code, out = run(["verify", "poisson", "--name", "e8", "--sigma", "1",
                     "--cutoff", "25"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["passed"] is True


def test_verify_sos_roundtrip(tmp_path, capsys):
    from packbound.lpbound import build_toy_certificate
    cert = build_toy_certificate()
    path = tmp_path / "cert.json"
    path.write_text(sos_certificate_to_json(cert))
    code, out = run(["verify", "sos", "--cert", str(path)], capsys)
    assert code == EXIT_OK
    # tamper one entry and expect refutation
    doc = json.loads(sos_certificate_to_json(cert))
    doc["q1"][0][0] = str(doc["q1"][0][0]) + "1"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _ = run(["verify", "sos", "--cert", str(bad)], capsys)
    assert code == EXIT_REFUTED


def test_lpbound_run_small(capsys):
    code, out = run(["--format", "json", "lpbound", "run", "--dim", "1",
                     "--degree", "4", "--method", "sampled"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["bound"] >= 1
    assert doc["method"] == "sampled"


def test_lpbound_forced_small(capsys):
    code, out = run(["--format", "json", "lpbound", "run", "--dim", "8",
                     "--degree", "5", "--method", "forced"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["method"] == "forced"
    assert float(doc["residual"]) < 1e-20


def test_lpbound_export_sdp(tmp_path, capsys):
    target = tmp_path / "prob.dat-s"
    code, _ = run(["lpbound", "export-sdp", "--dim", "8", "--degree", "12",
                   "-o", str(target)], capsys)
    assert code == EXIT_OK
    lines = target.read_text().splitlines()
    assert lines[2] == "3 = nBLOCK"


def test_runconfig_validation():
    with pytest.raises(ValueError):
        RunConfig(precision=1000).validate()
    assert RunConfig().validate().fmt == "text"
