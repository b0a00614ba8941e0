"""Run the acceptance suite and print only the per-criterion lines."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-s", str(ROOT / "tests" / "test_acceptance.py")],
        cwd=ROOT, capture_output=True, text=True)
    for line in proc.stdout.splitlines():
        if line.lstrip(". ").startswith(("[PASS]", "[FAIL]")):
            print(line.lstrip(". "))
    print(proc.stdout.strip().splitlines()[-1])
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
