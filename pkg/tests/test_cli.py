import json

import pytest

from mu2lab.cli import main, parse_descriptor
from mu2lab.dvr import Dvr, DvrSpec


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_enumerate_json(capsys):
    code, out, _ = run(capsys, "enumerate", "--p", "2", "--mmax", "2", "--nmax", "1")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == "mu2lab/1" and data["command"] == "enumerate"
    assert data["seed"] == 0 and data["result"]["total"] >= 1


def test_enumerate_text(capsys):
    code, out, _ = run(capsys, "enumerate", "--p", "2", "--mmax", "1", "--nmax", "1", "--format", "text")
    assert code == 0 and out.startswith("  m   n count") and "total" in out


def test_out_file_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["enumerate", "--mixed", "--p", "3", "--e", "2", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_seed_recorded(capsys):
    _, out, _ = run(capsys, "enumerate", "--p", "2", "--mmax", "0", "--nmax", "0", "--seed", "7")
    assert json.loads(out)["seed"] == 7


def test_hopf_ok(capsys):
    code, out, _ = run(capsys, "hopf", "--p", "2", "m=2 n=1 a=[0]")
    assert code == 0 and json.loads(out)["result"]["ok"]


def test_hopf_rejects_non_model(capsys):
    code, _, err = run(capsys, "hopf", "--p", "2", "m=2 n=1 a=[1]")
    assert code == 2 and err.startswith("error:")


def test_precision_exit(capsys):
    code, _, err = run(capsys, "hopf", "--p", "3", "m=6 n=1")
    assert code == 3 and "precision" in err
    assert run(capsys, "hopf", "--p", "3", "--precision", "64", "m=6 n=1")[0] == 0


def test_iso(capsys):
    code, out, _ = run(capsys, "iso", "--p", "2", "--format", "text", "m=2 n=1", "m=2;n=1")
    assert code == 0 and out.strip() == "isomorphic"
    code, out, _ = run(capsys, "iso", "--p", "2", "--format", "text", "m=2 n=1", "m=3 n=1")
    assert out.strip() == "not isomorphic"


def test_fiber_check(capsys):
    code, out, _ = run(capsys, "fiber", "--p", "2", "--check", "m=2 n=1")
    res = json.loads(out)["result"]
    assert code == 0 and res["reduction"]["agree"]


def test_bk_and_crosscheck(capsys):
    code, out, _ = run(capsys, "bk", "--mixed", "--p", "3", "--e", "2")
    res = json.loads(out)["result"]
    assert code == 0 and res["total"] == 2 and len(res["modules"]) == 2
    code, out, _ = run(capsys, "crosscheck", "--mixed", "--p", "3", "--e", "2", "--format", "text")
    assert code == 0 and out.strip().endswith("counts agree")


def test_bk_p2_unsupported(capsys):
    assert run(capsys, "bk", "--mixed", "--p", "2", "--e", "2")[0] == 2


@pytest.mark.parametrize("argv", [
    ["enumerate", "--p", "2", "--char", "7"],
    ["enumerate", "--p", "2", "--char", "p", "--mixed"],
    ["enumerate", "--p", "2", "--mmax", "-1"],
    ["hopf", "--p", "2", "m=1 bogus"],
    ["hopf", "--p", "2", "m=1 z=3"],
    ["hopf", "--p", "2", "m=1"],
    ["hopf", "--p", "2", "missing.json"],
    ["enumerate", "--mixed", "--p", "3", "--eisenstein", "/nonexistent"],
])
def test_config_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_eisenstein_list_file(tmp_path, capsys):
    f = tmp_path / "zeta9.txt"
    f.write_text("# Phi_9(u+1)\n3 9 18 21 15 6 1\n")
    code, out, _ = run(capsys, "crosscheck", "--p", "3", "--eisenstein", str(f))
    assert code == 0 and json.loads(out)["result"]["agree"]


def test_eisenstein_config_file(tmp_path, capsys):
    f = tmp_path / "ring.cfg"
    f.write_text("p = 5\n")
    assert run(capsys, "enumerate", "--p", "3", "--eisenstein", str(f))[0] == 2


def test_descriptor_json_file(tmp_path):
    R = Dvr.of(DvrSpec.equal_char(2))
    f = tmp_path / "d.json"
    f.write_text(json.dumps({"m": 2, "n": 1, "a": [0]}))
    assert parse_descriptor(str(f), R) == parse_descriptor("m=2 n=1 a=[0]", R)


def test_zeta_preset(tmp_path, capsys):
    f = tmp_path / "zeta9.txt"
    f.write_text("3 9 18 21 15 6 1")
    code, out, _ = run(capsys, "hopf", "--p", "3", "--eisenstein", str(f), "preset=zeta")
    assert code == 0 and json.loads(out)["result"]["ok"]
    # no primitive 9th root of unity when E = u^6 - 3
    assert run(capsys, "hopf", "--p", "3", "--mixed", "--e", "6", "preset=zeta")[0] == 2
