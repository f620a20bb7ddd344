from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from amtypec.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_roots(capsys):
    code, out = run(capsys, "roots", "--rank", "3")
    assert code == 0
    assert out["status"] == "pass"
    assert out["config"]["rank"] == 3


def test_levi_and_weyl(capsys):
    code, out = run(capsys, "levi", "--rank", "3", "--delta", "1,3")
    assert code == 0
    code, out = run(capsys, "weyl", "--rank", "3", "--delta", "2")
    assert code == 0


def test_chartable_named_groups(capsys):
    code, out = run(capsys, "chartable", "--group", "W", "--rank", "2")
    assert code == 0
    code, out = run(capsys, "chartable", "--group", "SL2", "--q", "3")
    assert code == 0


def test_blocks_cyclic(capsys):
    code, out = run(capsys, "blocks", "--group", "C10", "--ell", "5")
    assert code == 0


def test_refused_hypotheses_exit_code(capsys):
    code, out = run(capsys, "am-count", "--rank", "2", "--q", "3", "--ell", "5")
    assert code == 2
    assert out["status"] == "refused"


def test_invalid_argument_prints_usage(capsys):
    code = main(["roots", "--rank", "0"])
    err = capsys.readouterr().err
    assert code == 2
    assert "usage" in err


def test_resource_limit_exit_code(capsys):
    code, out = run(capsys, "chartable", "--group", "N", "--rank", "2", "--q", "3", "--budget", "10")
    assert code == 3
    assert out["checks"][0]["status"] == "skipped"
    assert "AMTYPEC_BUDGET" not in os.environ


def test_output_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["chartable", "--group", "N", "--rank", "2", "--q", "3", "-o", str(a)]) == 0
    assert main(["chartable", "--group", "N", "--rank", "2", "--q", "3", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_extensions_and_structure(capsys):
    code, out = run(capsys, "extensions", "--rank", "2", "--q", "3", "--delta", "1")
    assert code == 0
    code, out = run(capsys, "group", "verify-structure", "--rank", "2", "--q", "3", "--delta", "2")
    assert code == 0


def test_rank_one_checklist(capsys):
    code, out = run(capsys, "checklist", "--rank", "1", "--q", "11", "--ell", "5")
    assert code == 0
    assert all(c["status"] == "pass" for c in out["checks"])


@pytest.mark.parametrize("verb", ["r-lambda", "delta-check"])
def test_rank_one_reflection_verbs(capsys, verb):
    code, out = run(capsys, verb, "--rank", "1", "--q", "11")
    assert code == 0


def test_console_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "amtypec.cli", "--version"], capture_output=True, text=True, check=False
    )
    assert res.returncode == 0
    assert res.stdout.strip()
