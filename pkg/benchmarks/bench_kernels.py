"""Time the numba and numpy law sweeps on chain categories of growing size.

    python benchmarks/bench_kernels.py [--sizes 10 20 30] [--repeat 3]

Both paths are called directly, so one run compares them regardless of
FRACLOCAL_DISABLE_NUMBA.  Without numba the "numba" column times the plain
Python loops.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fraclocal import _kernels as K


def chain(n: int):
    mors = [(i, j) for i in range(n) for j in range(i, n)]
    idx = {m: k for k, m in enumerate(mors)}
    src = np.array([i for i, _ in mors], dtype=np.int64)
    tgt = np.array([j for _, j in mors], dtype=np.int64)
    comp = np.full((len(mors), len(mors)), -1, dtype=np.int64)
    for g, (b, c) in enumerate(mors):
        for f, (a, b2) in enumerate(mors):
            if b == b2:
                comp[g, f] = idx[(a, c)]
    return comp, src, tgt


def best(fn, args, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 24, 32])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    K.warmup()
    print(f"backend at import: {K.BACKEND}")
    print(f"{'objects':>7} {'morphisms':>9} {'kernel':>12} {'numba s':>10} {'numpy s':>10} {'ratio':>7}")
    for n in args.sizes:
        comp, src, tgt = chain(n)
        # the same table doubles as a vertical composition over 2-cells
        cases = [
            ("assoc", K._cat_assoc_numba, K._cat_assoc_numpy, (comp, src, tgt)),
            ("vcomp-assoc", K._vcomp_assoc_numba, K._vcomp_assoc_numpy, (comp, src, tgt)),
        ]
        for name, jit_fn, np_fn, a in cases:
            if K.HAS_NUMBA:
                jit_fn(*a)
            t_jit, t_np = best(jit_fn, a, args.repeat), best(np_fn, a, args.repeat)
            ok = K._sorted_rows(jit_fn(*a)).tolist() == K._sorted_rows(np_fn(*a)).tolist()
            print(f"{n:>7} {comp.shape[0]:>9} {name:>12} {t_jit:>10.4f} {t_np:>10.4f} "
                  f"{t_np / max(t_jit, 1e-9):>7.1f}{'' if ok else '  MISMATCH'}")


if __name__ == "__main__":
    main()
