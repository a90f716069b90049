"""Timing comparison of the compiled kernel core against the numpy fallback,
plus an end-to-end trajectory benchmark.

Run:  python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import os
import sys
import timeit

import numpy as np


def _load_backends():
    from liemech._kernels import _numpy_core

    backends = {"numpy": _numpy_core}
    try:
        from liemech._kernels import _core

        backends["cython"] = _core
    except ImportError:
        print("compiled core not built; benchmarking the fallback only")
    return backends


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    c = rng.standard_normal((6, 6, 6))
    c = np.ascontiguousarray(c - np.swapaxes(c, 1, 2))
    x = rng.standard_normal(6)
    y = rng.standard_normal(6)
    mu = rng.standard_normal(6)
    w = np.array([0.3, -0.2, 0.5])
    from liemech._kernels import _numpy_core

    R = _numpy_core.so3_exp(w)
    W = np.ascontiguousarray(rng.standard_normal((1000, 3)) * 0.5)
    Rs = np.ascontiguousarray(_numpy_core.so3_exp_batch(W))

    cases = {
        "sc_bracket(d=6)": lambda m: m.sc_bracket(c, x, y),
        "sc_ad_star(d=6)": lambda m: m.sc_ad_star(c, x, mu),
        "so3_exp": lambda m: m.so3_exp(w),
        "so3_log": lambda m: m.so3_log(R),
        "so3_exp_batch(1000)": lambda m: m.so3_exp_batch(W),
        "so3_log_batch(1000)": lambda m: m.so3_log_batch(Rs),
    }
    backends = _load_backends()
    print(f"{'kernel':24s}" + "".join(f"{name:>14s}" for name in backends) + f"{'speedup':>10s}")
    for label, fn in cases.items():
        times = {}
        for name, mod in backends.items():
            n = 200 if "batch" in label else 20000
            times[name] = min(
                timeit.repeat(lambda: fn(mod), number=n, repeat=repeat)
            ) / n
        row = f"{label:24s}" + "".join(f"{times[n] * 1e6:13.2f}u" for n in backends)
        if len(times) == 2:
            row += f"{times['numpy'] / times['cython']:9.1f}x"
        print(row)


def bench_trajectory(repeat):
    """Rigid-body EP trajectory (T = 2, dt = 1e-3) under each backend."""
    import subprocess

    code = (
        "import numpy as np, time; import liemech as lm;"
        "from liemech import euler_poincare as ep;"
        "from liemech.solvers import IntegratorConfig;"
        "a = lm.so3(); mdl = lm.rigid_body(a, lm.Inertia.diagonal([1.,2.,3.]), lm.Chirality.LEFT);"
        "st = ep.ep_state_from_jet(mdl, np.array([[1.0,0.4,-0.3]]));"
        "t0 = time.perf_counter();"
        "ep.integrate_ep(mdl, st, 2.0, IntegratorConfig(dt=1e-3));"
        "print(time.perf_counter() - t0)"
    )
    print("\nend-to-end rigid-body trajectory (2000 RK4 steps + reconstruction):")
    for purity, label in (("", "cython"), ("1", "numpy")):
        env = dict(os.environ, LIEMECH_PURE_PYTHON=purity)
        vals = []
        for _ in range(repeat):
            out = subprocess.run(
                [sys.executable, "-c", code], env=env, capture_output=True, text=True
            )
            vals.append(float(out.stdout.strip()))
        print(f"  {label:8s} {min(vals):.3f}s")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    from liemech import kernel_backend

    print(f"active backend: {kernel_backend}\n")
    bench_kernels(args.repeat)
    bench_trajectory(min(args.repeat, 3))


if __name__ == "__main__":
    main()
