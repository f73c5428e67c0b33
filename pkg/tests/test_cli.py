"""命令行入口与退出码"""

import json

import pytest

from equicat import __version__
from equicat.cli import main
from equicat.config_manager import config_manager

ARROW = {
    "objects": ["a", "b"],
    "morphisms": [{"id": "1a", "src": "a", "tgt": "a"},
                  {"id": "1b", "src": "b", "tgt": "b"},
                  {"id": "f", "src": "a", "tgt": "b"}],
    "identities": {"a": "1a", "b": "1b"},
}


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_group_lattice(capsys):
    code, data = run(capsys, "group", "lattice", "--group", "Z2")
    assert code == 0
    assert "lattice" in data


def test_check_exsharp_writes_report(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, data = run(capsys, "check", "exsharp", "--size", "1", "--out", str(out))
    assert code == 0
    assert data["verdict"] == "PASS"
    assert json.loads(out.read_text(encoding="utf-8")) == data
    assert "elapsed" not in data


def test_timing_flag(capsys):
    code, data = run(capsys, "--timing", "check", "exsharp", "--size", "1")
    assert code == 0
    assert "elapsed" in data


def test_cat_validate_and_homology(capsys, tmp_path):
    path = write(tmp_path, "arrow.json", ARROW)
    code, data = run(capsys, "cat", "validate", "--cat", path)
    assert code == 0
    assert data["loop_free"]
    assert data["nerve_dimension"] == 1
    code, data = run(capsys, "homology", "--cat", path)
    assert code == 0
    assert data["betti"] == [1, 0]
    code, data = run(capsys, "homology", "--cat", path, "--max-dim", "0")
    assert data["betti"] == [1]
    assert data["truncated"]


def test_cat_degree(capsys, tmp_path):
    path = write(tmp_path, "arrow.json", ARROW)
    code, data = run(capsys, "cat", "degree", "--cat", path)
    assert code == 0
    assert data["levels"] == {"0": ["b"], "1": ["a"]}


def test_orbit_category(capsys):
    code, data = run(capsys, "eq", "orbitcat", "--group", "Z2")
    assert code == 0
    assert len(data["objects"]) == 2


def test_input_errors_exit_with_two(capsys, tmp_path):
    assert main(["cat", "validate", "--cat", str(tmp_path / "missing.json")]) == 2
    bad = write(tmp_path, "bad.json", {**ARROW, "identities": {"a": "1a"}})
    assert main(["cat", "validate", "--cat", bad]) == 2
    assert main(["check", "exsharp", "--size", "0"]) == 2
    assert "错误" in capsys.readouterr().err


def test_missing_required_option_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["cat", "over"])
    assert info.value.code == 2


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert __version__ in capsys.readouterr().out


def test_config_set_and_reset(capsys):
    code, data = run(capsys, "config", "set", "caps.group_order", "12")
    assert code == 0
    assert data == {"caps.group_order": 12}
    assert config_manager.get('caps.group_order') == 12
    code, data = run(capsys, "config", "reset")
    assert code == 0
    assert data["caps"]["group_order"] == 24
