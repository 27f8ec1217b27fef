"""Run the default verification suite and write one JSON report per experiment.

Usage::

    python3 scripts/run_suite.py [output_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

from groupmomentum.cli import dumps, run_suite
from groupmomentum.experiments import DEFAULT_SUITE


def main(out_dir: str = "reports") -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    suite = run_suite(list(DEFAULT_SUITE))
    for rep in suite["experiments"]:
        (out / f"{rep['experiment']}.json").write_text(dumps(rep))
        print(f"{rep['status']:4s}  {rep['experiment']:26s} {rep['provenance']['wall_time']:7.2f} s")
    print(f"suite: {suite['status']} in {suite['provenance']['wall_time']:.1f} s")
    return 0 if suite["status"] == "PASS" else 1


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:2]))
