"""Compare the numba and numpy kernel paths.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times each kernel in-process (compiled loop vs numpy), then times one
end-to-end Pac-Man run and one driving run in subprocesses with and without
SAFE_ARBITRATION_DISABLE_NUMBA=1.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from safe_arbitration import _kernels as k


def kernel_inputs(rng):
    maze = rng.random((31, 28)) < 0.75
    sources = (rng.random(maze.shape) < 0.1) & maze
    n = 6
    v_max = rng.uniform(5, 25, n)
    occ = (rng.uniform(-60, 60, n), rng.uniform(0, 1, n) * v_max, rng.uniform(1, 5, n), v_max, np.full(n, 2.25))
    times = np.arange(81) * 0.1
    lo, hi = k._occupancy_bounds_numpy(*occ, times)
    lanes = rng.integers(0, 2, lo.shape).astype(np.int64)
    ego_lo = np.linspace(200, 260, 81)
    overlap = (ego_lo, ego_lo + 4.5, np.zeros(81, np.int64), lo, hi, lanes)
    return (maze, sources), occ + (times,), overlap


def per_call(fn, args, repeat):
    fn(*args)  # compile / warm
    return min(timeit.repeat(lambda: fn(*args), number=200, repeat=repeat)) / 200


def end_to_end(snippet, disable):
    env = dict(os.environ)
    if disable:
        env[k.ENV_FLAG] = "1"
    else:
        env.pop(k.ENV_FLAG, None)
    out = subprocess.run([sys.executable, "-c", snippet], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


PACMAN = """
import time
from safe_arbitration.cli import data_path
from safe_arbitration.faults import FaultSpec
from safe_arbitration.pacman.sim import simulate
from safe_arbitration import _kernels
_kernels.warmup()
maze = data_path("classic_maze.txt").read_text()
t = time.perf_counter()
simulate(maze, steps=500, seed=1, faults=[FaultSpec("EatClosestDot", "bad-command", 0.3)])
print(time.perf_counter() - t)
"""

DRIVING = """
import time
from safe_arbitration.cli import data_path
from safe_arbitration.driving.scenario import load_scenario
from safe_arbitration.driving.sim import simulate
from safe_arbitration import _kernels
_kernels.warmup()
sc = load_scenario(data_path("benchmark.yaml"))
t = time.perf_counter()
simulate(sc, verify=True)
print(time.perf_counter() - t)
"""


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not k.HAVE_NUMBA:
        sys.exit("numba is not importable; nothing to compare")

    bfs, occ, overlap = kernel_inputs(np.random.default_rng(0))
    rows = [
        ("bfs_field 31x28", k._bfs_field_loop, k._bfs_field_numpy, bfs),
        ("occupancy_bounds 6x81", k._occupancy_bounds_loop, k._occupancy_bounds_numpy, occ),
        ("first_overlap 6x81", k._first_overlap_loop, k._first_overlap_numpy, overlap),
    ]
    print(f"{'kernel':<24}{'numba us':>12}{'numpy us':>12}{'speedup':>10}")
    for name, fast, slow, a in rows:
        tf, ts = per_call(fast, a, args.repeat), per_call(slow, a, args.repeat)
        print(f"{name:<24}{tf * 1e6:>12.1f}{ts * 1e6:>12.1f}{ts / tf:>9.1f}x")

    print()
    print(f"{'end to end':<24}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, snippet in (("pacman 500 steps", PACMAN), ("driving benchmark", DRIVING)):
        tf, ts = end_to_end(snippet, False), end_to_end(snippet, True)
        print(f"{name:<24}{tf:>12.2f}{ts:>12.2f}{ts / tf:>9.1f}x")


if __name__ == "__main__":
    main()
