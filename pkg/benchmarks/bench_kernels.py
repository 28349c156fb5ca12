"""Compare the numba and numpy kernels on batches of random classes in Lambda^4(Z^8).

    python benchmarks/bench_kernels.py [--batch 20000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from geography4 import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    coeffs = rng.integers(-1, 2, size=(args.batch, 70), dtype=np.int64)
    print(f"numba available: {kernels.HAVE_NUMBA}")

    if kernels.HAVE_NUMBA:
        # warm up the jit so compile time is not counted
        kernels.det_mod_p_batch(kernels.gram_batch(8, coeffs[:2], use_numba=True), use_numba=True)

    rows = []
    t_np, g_np = best_of(lambda: kernels.gram_batch(8, coeffs, use_numba=False), args.repeat)
    rows.append(("gram_batch", "numpy", t_np))
    t_dnp, d_np = best_of(lambda: kernels.det_mod_p_batch(g_np, use_numba=False), args.repeat)
    rows.append(("det_mod_p_batch", "numpy", t_dnp))
    if kernels.HAVE_NUMBA:
        t_nb, g_nb = best_of(lambda: kernels.gram_batch(8, coeffs, use_numba=True), args.repeat)
        t_dnb, d_nb = best_of(lambda: kernels.det_mod_p_batch(g_np, use_numba=True), args.repeat)
        assert np.array_equal(g_np, g_nb) and np.array_equal(d_np, d_nb), "backends disagree"
        rows += [("gram_batch", "numba", t_nb), ("det_mod_p_batch", "numba", t_dnb)]

    print(f"{'kernel':<18}{'backend':<8}{'seconds':>10}{'per item (us)':>16}")
    for name, backend, t in rows:
        print(f"{name:<18}{backend:<8}{t:>10.4f}{1e6 * t / args.batch:>16.2f}")
    if kernels.HAVE_NUMBA:
        print(f"speedup gram {t_np / t_nb:.1f}x, det {t_dnp / t_dnb:.1f}x")


if __name__ == "__main__":
    main()
