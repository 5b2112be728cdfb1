"""Rewrite the stored outputs from the current implementation.

Only run this after checking the new outputs by hand; the tests compare
against whatever is stored here.
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from golden_cases import CASES, GOLDEN, run  # noqa: E402

if __name__ == "__main__":
    for name, (argv, _) in CASES.items():
        status, out, err = run(argv)
        (GOLDEN / f"{name}.out").write_text(out)
        if err:
            (GOLDEN / f"{name}.err").write_text(err)
        print(f"{name}: exit {status}")
