import json
import subprocess
import sys

import pytest

from toricstab.cli import main
from toricstab.fixtures import FIXTURES, example_3_6, load_fixture
from toricstab.serialization import (
    Workspace,
    divisor_to_json,
    fan_to_json,
    sheaf_to_json,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out) if out.strip() else None


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures_round_trip_through_json(name):
    ws = load_fixture(name)
    back = Workspace.loads(ws.dumps())
    assert back.fan == ws.fan
    assert back.sheaf == ws.sheaf
    assert back.polarisation == ws.polarisation
    assert back.subspaces == ws.subspaces
    assert back.blowups == ws.blowups
    assert back.dumps() == ws.dumps()


def test_intersection_table(capsys):
    code, report = run_json(capsys, "intersect", "--fixture", "example-3-6")
    assert code == 0
    assert report["table"][2][3] == "1/2" and report["table"][3][3] == "1/2"


def test_stability_exit_codes(capsys):
    assert run(capsys, "stability", "--fixture", "p2")[0] == 0
    code, report = run_json(capsys, "stability", "--fixture", "example-3-6")
    assert code == 1 and report["kind"] == "StrictlySemistable"
    assert run(capsys, "stability", "--fixture", "picard2-r2", "--nu", "2/3")[0] == 2


def test_adiabatic_command(capsys):
    code, report = run_json(capsys, "adiabatic", "--fixture", "example-3-6", "--a", "1", "--b", "2",
                            "--subspace", "F2")
    assert code == 0 and report["kind"] == "Stable"
    assert report["named_gaps"]["F2"] == ["0", "1/2"]
    code, _ = run_json(capsys, "adiabatic", "--fixture", "picard2-r2-destabilising")
    assert code == 2


def test_pullback_command_reports_defects(capsys):
    code, report = run_json(capsys, "pullback", "--fixture", "example-4-4")
    assert code == 0
    entry = report["subspaces"]["F"][0]
    assert entry["total"] == 1 and entry["defects"] == {"4": 1} and not entry["saturated"]


def test_curve_criterion_command(capsys):
    code, report = run_json(capsys, "curve-criterion", "--fixture", "picard2-r3-stabilising")
    assert code == 0 and report["criterion"]["F"] == "1/3"


def test_files_instead_of_fixture(capsys, tmp_path):
    ws = example_3_6()
    (tmp_path / "fan.json").write_text(json.dumps(fan_to_json(ws.fan)))
    (tmp_path / "sheaf.json").write_text(json.dumps(sheaf_to_json(ws.sheaf)))
    (tmp_path / "pol.json").write_text(json.dumps(divisor_to_json(ws.polarisation)))
    (tmp_path / "extra.json").write_text(json.dumps([[[1, 3]]]))
    code, report = run_json(capsys, "stability", "--fan", str(tmp_path / "fan.json"),
                            "--sheaf", str(tmp_path / "sheaf.json"), "--pol", str(tmp_path / "pol.json"),
                            "--candidates", str(tmp_path / "extra.json"))
    assert code == 1 and report["kind"] == "StrictlySemistable"


def test_error_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "validate", "--fan", str(bad))[0] == 64
    assert run(capsys, "stability", "--fixture", "no-such-fixture")[0] == 64
    nonprimitive = tmp_path / "fan.json"
    nonprimitive.write_text(json.dumps({"rank": 2, "rays": [[2, 0], [0, 1]], "max_cones": [[0, 1]]}))
    code, _, err = run(capsys, "validate", "--fan", str(nonprimitive))
    assert code == 65 and "primitive" in err
    assert run(capsys, "stability", "--fixture", "p2", "--nu", "1")[0] == 64
    # a non-ample polarisation is a violated precondition
    assert run(capsys, "stability", "--fixture", "picard2-r2", "--nu", "0")[0] == 65
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "toricstab.cli", "ample", "--fixture", "example-3-6", "--json"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    # the fixture carries L' = D3 + 2 D4, and -K + eps L' stays ample for every eps > 0
    assert json.loads(out.stdout) == {"ample": True, "cartier": True, "threshold": None}
