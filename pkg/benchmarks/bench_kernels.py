#!/usr/bin/env python3
"""Benchmark the numba and pure-numpy classification kernels.

The backend is chosen at import time from JULIABUBBLES_BACKEND, so each
backend runs in a fresh subprocess. Both must produce identical labels;
the benchmark reports throughput for a few budget/resolution settings.
"""

import hashlib
import json
import os
import subprocess
import sys
import time

_WORKER = """
import json, os, sys, time, hashlib
import numpy as np
from juliabubbles import families, dynamics, render, kernels

res = int(sys.argv[1]); budget = int(sys.argv[2])
inst = families.make("cubic_bubble")
att = dynamics.find_attractors(inst)
win = render.Window.square(0, 4.0, res)
render.render_grid(inst, win, att, budget=16)   # warm-up / JIT compile
t0 = time.perf_counter()
grid = render.render_grid(inst, win, att, budget=budget)
dt = time.perf_counter() - t0
digest = hashlib.sha256(
    grid.kind.tobytes() + grid.attr.tobytes() + grid.iters.tobytes()
).hexdigest()
print(json.dumps({"backend": kernels.BACKEND, "seconds": dt,
                  "pixels_per_s": res * res / dt, "sha256": digest}))
"""


def run_case(backend, res, budget):
    env = dict(os.environ, JULIABUBBLES_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", _WORKER, str(res), str(budget)],
                         capture_output=True, text=True, env=env, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    cases = [(512, 500), (1024, 500), (512, 10000)]
    print(f"{'case':>16} {'backend':>8} {'seconds':>9} {'Mpix/s':>8}")
    for res, budget in cases:
        digests = {}
        for backend in ("numba", "numpy"):
            try:
                r = run_case(backend, res, budget)
            except subprocess.CalledProcessError as exc:
                print(f"{res}x{res}/{budget:>6} {backend:>8}  failed: "
                      f"{exc.stderr.strip().splitlines()[-1]}")
                continue
            digests[r["backend"]] = r["sha256"]
            print(f"{res}x{res}/{budget:>6} {r['backend']:>8} "
                  f"{r['seconds']:>9.3f} {r['pixels_per_s'] / 1e6:>8.2f}")
        if len(digests) == 2 and len(set(digests.values())) != 1:
            print("  WARNING: backends disagree on grid labels!")
        elif len(digests) == 2:
            print("  grids byte-identical across backends")


if __name__ == "__main__":
    main()
