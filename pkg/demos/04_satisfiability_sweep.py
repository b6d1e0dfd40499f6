"""
Where does the criterion switch on?  Sweep the bump width parameter kappa at
fixed amplitude, then the amplitude at fixed kappa.

The margin is homogeneous of degree one in the data (K scales with the
amplitude too), so amplitude never decides satisfiability: only the shape does.
"""

import tempfile

from coupled_ch.cli import cmd_sweep
from coupled_ch.config import parse_config

base = "n = 512\ninitial.kind = bump\ninitial.v_mode = equal\n"
with tempfile.TemporaryDirectory() as out:
    rows = cmd_sweep(parse_config(base + "sweep.min = 1\nsweep.max = 16\nsweep.count = 16\n"), out)
    print(" kappa   margin     satisfied   T*")
    for row in rows:
        value, margin, ok, tstar = row[0], row[1], row[2], row[6]
        print(f" {value:5.1f}  {margin:9.4f}   {str(ok):9s}  {'' if tstar is None else f'{tstar:.4f}'}")

    rows = cmd_sweep(
        parse_config(base + "sweep.parameter = initial.a\nsweep.min = 0.25\nsweep.max = 4\nsweep.count = 5\n"), out
    )
    print("\n  a      margin / a")
    for value, margin, *_ in rows:
        print(f" {value:5.2f}  {margin / value:.12f}")

    rows = cmd_sweep(
        parse_config(
            base + "t_end = 0.5\nslope_threshold = 60\nsweep.min = 6\nsweep.max = 14\nsweep.count = 5\nsweep.simulate = true\n"
        ),
        out,
    )
    print("\n kappa   T*        break time   ratio")
    for row in rows:
        print(f" {row[0]:5.1f}  {row[6]:.5f}   {row[9]:.5f}      {row[10]:.3f}")
