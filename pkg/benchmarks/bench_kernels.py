"""Compare the numba kernels with the pure-Python fallback.

Each backend runs in its own interpreter because TILT_DISABLE_NUMBA is read
at import time.  Usage: python3 benchmarks/bench_kernels.py [--sizes 100 300]
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from tiltassembly import _accel
from tiltassembly.engine import decide_simple
from tiltassembly.grid import Polyomino, is_simple

def rect(w):
    xs, ys = np.meshgrid(np.arange(w), np.arange(w), indexing="ij")
    return Polyomino.from_array(np.stack([xs.ravel(), ys.ravel()], axis=1), check=False)

decide_simple(rect(8)); is_simple(rect(9))
rows = []
for w in map(int, sys.argv[1:]):
    P = rect(w)
    t = time.perf_counter(); is_simple(P); t_simple = time.perf_counter() - t
    t = time.perf_counter(); r = decide_simple(P); t_decide = time.perf_counter() - t
    assert r.constructible
    rows.append([w * w, t_simple, t_decide])
print(json.dumps({"numba": _accel.NUMBA_ENABLED, "rows": rows}))
"""


def run(sizes, disable):
    env = dict(os.environ)
    env.pop("TILT_DISABLE_NUMBA", None)
    if disable:
        env["TILT_DISABLE_NUMBA"] = "1"
    p = subprocess.run([sys.executable, "-c", CHILD, *map(str, sizes)], env=env, capture_output=True, text=True,
                       check=True)
    return json.loads(p.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200],
                    help="side lengths of the solid square test shapes")
    args = ap.parse_args(argv)
    fast = run(args.sizes, False)
    pure = run(args.sizes, True)
    print(f"{'N':>8} {'simple(numba)':>14} {'simple(pure)':>13} {'decide(numba)':>14} {'decide(pure)':>13} {'speedup':>8}")
    for (n, s1, d1), (_, s2, d2) in zip(fast["rows"], pure["rows"]):
        print(f"{n:>8} {s1:>14.4f} {s2:>13.4f} {d1:>14.4f} {d2:>13.4f} {d2 / d1:>8.1f}x")
    if not fast["numba"]:
        print("note: numba unavailable, both columns ran the fallback")


if __name__ == "__main__":
    main()
