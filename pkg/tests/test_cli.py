import json
import os

import pytest

from oagfork.cli import main

SCENES = os.path.join(os.path.dirname(__file__), "..", "scenes")


def _scene(name):
    return os.path.join(SCENES, f"{name}.scene")


def test_decide_exit_codes(capsys):
    assert main(["decide", _scene("infinitesimal")]) == 0
    out = capsys.readouterr().out
    assert "independent" in out
    assert main(["decide", _scene("trapped_interval")]) == 1
    out = capsys.readouterr().out
    assert "dependent" in out and "trapping interval" in out


def test_decide_json_schema(capsys):
    assert main(["decide", _scene("trapped_interval"), "--json"]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["forking_independent"] is False
    assert payload["condition1"] is False
    witness = payload["interval_witness"]
    assert witness["lo"] == {"0": ["0/1", "1/1"]}
    assert witness["hi"] == {"0": ["0/1", "1/1"], "1": ["1/1"]}


def test_decide_discrete_not_invariant(capsys):
    assert main(["decide", _scene("discrete_parity"), "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["forking_independent"] is True
    assert payload["invariant"] is False
    assert payload["invariance_extra"][0]["holds"] is False


def test_blocks_command(capsys):
    assert main(["blocks", _scene("paired_radicals"), "--level", "2", "--base", "A"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["level"] == 2 and payload["base"] == "A"
    assert len(payload["blocks"]) >= 1
    for block in payload["blocks"]:
        assert set(block) == {"upper", "ramified", "new_class", "members"}


def test_witness_command(capsys):
    assert main(["witness", _scene("extension_count")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"c1", "c2"}
    assert payload["c1"]["over_B"]["ramified"] is True


def test_normalize_command(capsys):
    assert main(["normalize", _scene("paired_radicals")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["entries"]) == 2
    assert payload["diagnostics"] == []
    assert all(item["holds"] for item in payload["check"].values())
    assert payload["transform"]


def test_extensions_command(capsys):
    assert main(["extensions", _scene("extension_count")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["empty"] is False
    assert len(payload["factors"]) == 1
    assert main(["extensions", _scene("trapped_interval")]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["empty"] is True


def test_check_command(capsys):
    assert main(["check", _scene("infinitesimal")]) == 0
    assert "scene ok" in capsys.readouterr().out


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.scene"
    bad.write_text("[scene]\nversion = 99\n")
    assert main(["decide", str(bad)]) == 2
    assert "configuration error" in capsys.readouterr().err
    assert main(["decide", str(tmp_path / "missing.scene")]) == 2
