"""Benchmark the compiled stencil kernels against the numpy fallback.

Times the four hot kernels (B_u, residual, jet mins, dQ apply) on a
spread of grid sizes and prints the per-call timings and speedups.
Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from volgeo import _kernels_py

try:
    from volgeo import _kernels
except ImportError:
    _kernels = None


def _best_of(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _cases(nt, nx, dim, rng):
    if dim == 1:
        u = rng.standard_normal((nt, nx)) * 0.01 + np.linspace(0, 1, nt)[:, None] ** 2
        w = rng.standard_normal((nt, nx))
        a = np.ones(nx)
        tgt = np.zeros((nt - 2, nx))
        hx, ht = 1.0 / nx, 1.0 / (nt - 1)
        return {
            "bu": lambda k: k.bu_1d(u, a, 0.5, hx),
            "residual": lambda k: k.residual_1d(u, a, 0.5, tgt, hx, ht),
            "jet_mins": lambda k: k.jet_mins_1d(u, a, 0.5, hx, ht),
            "dq_apply": lambda k: k.dq_apply_1d(u, w, a, 0.5, hx, ht),
        }
    u = rng.standard_normal((nt, nx, nx)) * 0.01 + np.linspace(0, 1, nt)[:, None, None] ** 2
    w = rng.standard_normal((nt, nx, nx))
    a = np.ones((nx, nx))
    em2p = np.ones((nx, nx))
    tgt = np.zeros((nt - 2, nx, nx))
    hx, ht = 1.0 / nx, 1.0 / (nt - 1)
    return {
        "bu": lambda k: k.bu_2d(u, a, 0.5, em2p, hx),
        "residual": lambda k: k.residual_2d(u, a, 0.5, em2p, tgt, hx, ht),
        "jet_mins": lambda k: k.jet_mins_2d(u, a, 0.5, em2p, hx, ht),
        "dq_apply": lambda k: k.dq_apply_2d(u, w, a, 0.5, em2p, hx, ht),
    }


def main():
    if _kernels is None:
        print("compiled kernels not built; showing numpy timings only")
    rng = np.random.default_rng(0)
    sizes = [(1, 65, 128), (1, 129, 512), (2, 33, 64), (2, 33, 128)]
    header = f"{'grid':>18} {'kernel':>10} {'numpy [ms]':>12} {'compiled [ms]':>14} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for dim, nt, nx in sizes:
        cases = _cases(nt, nx, dim, rng)
        label = f"dim{dim} nt={nt} nx={nx}"
        for name, call in cases.items():
            t_py = _best_of(lambda: call(_kernels_py))
            if _kernels is not None:
                t_c = _best_of(lambda: call(_kernels))
                print(f"{label:>18} {name:>10} {t_py * 1e3:12.3f} {t_c * 1e3:14.3f} "
                      f"{t_py / t_c:8.1f}x")
            else:
                print(f"{label:>18} {name:>10} {t_py * 1e3:12.3f} {'-':>14} {'-':>9}")


if __name__ == "__main__":
    main()
