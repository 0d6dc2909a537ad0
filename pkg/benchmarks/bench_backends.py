"""Compare the compiled and pure-numpy kernel backends.

Times the five shared kernels on a representative problem and a short
end-to-end simulation under each backend (the latter in subprocesses, since
the backend is fixed at import time).  Run from the repository root:

    python3 benchmarks/bench_backends.py [--cells 256] [--repeats 20]
"""

import argparse
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from crnflow import parse_network
from crnflow._kernels import _numba, _numpy
from crnflow.crn import stoich_arrays

NETWORK = "A + B <-> C @ 1.0, 1.0\n"

CONFIG = """network = net.crn

[domain]
L = 1.0
N = {cells}

[time]
dt = 1e-3
T = 0.2

[diffusion]
a0 = 0.1 0.1 0.1
a = 1.0 0.5 0.5 0.5 1.0 0.5 0.5 0.5 1.0

[initial]
A = step 0.5 1.5 0.5
B = step 0.5 1.5 0.5
C = constant 1.0
"""

RUN_SNIPPET = """import sys, time
import crnflow as cf
from crnflow._kernels import BACKEND
config = cf.parse_config_file(sys.argv[1])
cf.simulate(config)  # warm compilation and caches
start = time.perf_counter()
cf.simulate(config)
print(BACKEND, time.perf_counter() - start)
"""


def kernel_inputs(cells):
    rng = np.random.default_rng(0)
    network = parse_network(NETWORK)
    y, yp, k = stoich_arrays(network)
    n = network.n_species
    u = rng.uniform(0.2, 2.0, (cells, n))
    w = np.log(u)
    a0 = np.full(n, 0.1)
    amat = np.full((n, n), 0.5) + 0.5 * np.eye(n)
    return w, u, 1e-3, 1.0 / cells, a0, amat, y, yp, k


def best_of(repeats, fn, *args):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(cells, repeats):
    w, u, dt, h, a0, amat, y, yp, k = kernel_inputs(cells)
    base = _numpy.residual(w, u, dt, h, a0, amat, y, yp, k)
    sub, diag, sup = _numpy.jacobian_blocks(w, u, dt, h, a0, amat, y, yp, k, base)
    diag = diag + 4.0 * np.eye(y.shape[1])
    cases = [
        ("rates", (u, y, yp, k)),
        ("face_fluxes", (u, h, a0, amat)),
        ("residual", (w, u, dt, h, a0, amat, y, yp, k)),
        ("jacobian_blocks", (w, u, dt, h, a0, amat, y, yp, k, base)),
        ("solve_block_tridiag", (sub, diag, sup, base)),
    ]
    rows = []
    for name, args in cases:
        getattr(_numba, name)(*args)  # compile before timing
        t_nb = best_of(repeats, getattr(_numba, name), *args)
        t_np = best_of(repeats, getattr(_numpy, name), *args)
        rows.append((name, t_np, t_nb))
    return rows


def bench_simulate(cells):
    rows = []
    with tempfile.TemporaryDirectory() as tmp:
        directory = Path(tmp)
        (directory / "net.crn").write_text(NETWORK)
        config = directory / "run.cfg"
        config.write_text(CONFIG.format(cells=cells))
        for flag in ("0", "1"):
            env = dict(os.environ, CRNFLOW_NUMBA=flag)
            out = subprocess.run(
                [sys.executable, "-c", RUN_SNIPPET, str(config)],
                env=env,
                capture_output=True,
                text=True,
                check=True,
            )
            backend, elapsed = out.stdout.split()
            rows.append((backend, float(elapsed)))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cells", type=int, default=256)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    print(f"kernels on {args.cells} cells, 3 species (best of {args.repeats})")
    print(f"{'kernel':<22}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for name, t_np, t_nb in bench_kernels(args.cells, args.repeats):
        print(f"{name:<22}{t_np * 1e6:>10.1f}us{t_nb * 1e6:>10.1f}us{t_np / t_nb:>9.1f}x")

    print(f"\nend-to-end simulate ({args.cells} cells, 200 steps, warm)")
    times = dict(bench_simulate(args.cells))
    for backend in ("numpy", "numba"):
        print(f"{backend:<22}{times[backend]:>10.3f}s")
    print(f"{'speedup':<22}{times['numpy'] / times['numba']:>9.1f}x")


if __name__ == "__main__":
    main()
