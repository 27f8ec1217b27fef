"""Export the Hopf-type velocity field and a vorticity slice for external viewers.

Writes ``hopf_velocity.csv`` (node-major 1-form), ``hopf_velocity.gmdf``
(binary block) and ``hopf_vorticity_z.csv`` (the ``dx^dy`` component of the
vorticity 2-form on the middle ``z`` plane).

Usage::

    python3 scripts/export_hopf_field.py [grid_size] [output_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

from groupmomentum.forms import calculus, fluid, io
from groupmomentum.forms.grid import Grid


def main(n: str = "32", out_dir: str = "exports") -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = Grid.cube(int(n))
    field = fluid.hopf_field(grid)
    v_flat = field.velocity().flat()
    io.write_csv(v_flat, out / "hopf_velocity.csv")
    io.write_binary(v_flat, out / "hopf_velocity.gmdf")
    vorticity = calculus.exterior_derivative(v_flat)
    io.write_slice(vorticity, out / "hopf_vorticity_z.csv", (0, 1), (0, 1), {2: grid.shape[2] // 2})
    print(f"helicity on {n}^3 nodes: {fluid.helicity_of_form(v_flat):.12f}")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:3]))
