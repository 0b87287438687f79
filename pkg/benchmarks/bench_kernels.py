"""Time the compiled Stuart-Landau kernel against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--steps 70000] [--nodes 3] [--repeats 3]

The default problem is one training sample of the synthetic benchmark
(700 saved points at 100 solver steps each, three oscillators).
"""
import argparse
import json
import time

import numpy as np

from gokuui.sde import kernel


def problem(n, steps, seed=0):
    rng = np.random.default_rng(seed)
    c = rng.uniform(0, 0.2, (n, n))
    np.fill_diagonal(c, 0.0)
    return dict(
        z0=rng.uniform(-1, 1, 2 * n),
        a=rng.uniform(-0.2, 0.2, n),
        w=rng.uniform(0.1, 0.5, n),
        c=c,
        g=0.1,
        rate=20.0,
        sigma=0.4,
        noise=rng.standard_normal((steps, 2 * n)),
        dt=0.0005,
        stride=100,
    )


def best_of(fn, kwargs, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(**kwargs)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=70_000)
    p.add_argument("--nodes", type=int, default=3)
    p.add_argument("--repeats", type=int, default=3)
    args = p.parse_args()
    kw = problem(args.nodes, args.steps)
    t_py, out_py = best_of(kernel.sl_em_path_python, kw, args.repeats)
    result = {"steps": args.steps, "nodes": args.nodes, "python_s": t_py}
    if kernel.sl_em_path_compiled is None:
        result["compiled_s"] = None
        result["note"] = "compiled extension not built"
    else:
        t_c, out_c = best_of(kernel.sl_em_path_compiled, kw, args.repeats)
        result.update(compiled_s=t_c, speedup=t_py / t_c, bit_identical=bool(np.array_equal(out_py, out_c)))
    print(json.dumps(result, indent=2))


if __name__ == "__main__":
    main()
