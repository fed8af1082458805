import pathlib
import shutil
import subprocess
import sys

import pytest

DEMOS = pathlib.Path(__file__).resolve().parent.parent / "demos"


def test_python_walkthrough():
    proc = subprocess.run([sys.executable, str(DEMOS / "python_walkthrough.py"), "mock"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[-3:] == [
        "same presentation again -> replay", "renewed credential -> ok", "superseded credential -> revoked"]


@pytest.mark.skipif(shutil.which("vcred") is None or shutil.which("bash") is None,
                    reason="needs the installed vcred script and bash")
def test_cli_walkthrough(tmp_path):
    proc = subprocess.run(["bash", str(DEMOS / "cli_walkthrough.sh"), str(tmp_path), "mock"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "replay exit code: 15" in proc.stdout
