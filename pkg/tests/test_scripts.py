import os
import subprocess
import sys
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def run(script, *args):
    env = dict(os.environ)
    return subprocess.run(
        [sys.executable, str(SCRIPTS / script), *args],
        capture_output=True,
        text=True,
        timeout=240,
        env=env,
    )


def test_synthetic_demo_runs():
    proc = run("synthetic_demo.py", "--trials", "2")
    assert proc.returncode == 0, proc.stderr
    assert "planted phrase ranked first in 2/2 trials" in proc.stdout


def test_compression_demo_runs():
    proc = run("compression_demo.py", "--docs", "5", "--k-max", "3")
    assert proc.returncode == 0, proc.stderr
    assert "saving / entropy" in proc.stdout
    assert "k= 3" in proc.stdout
