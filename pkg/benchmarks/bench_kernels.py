"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 8,12,16]

Prints one line per (kernel, size) with the best wall time of each backend
and the speedup. Without the compiled extension only the Python column runs.
"""

import argparse
import timeit

import numpy as np

from ata_heat import kernels


def cases(n: int, rng):
    size = 1 << n
    x = rng.standard_normal(size)
    masks = np.sort(rng.choice(size, size=min(64, size), replace=False)).astype(np.int64)
    coef = rng.standard_normal(masks.size)
    rhs = rng.standard_normal(size)
    return {
        "fwht": lambda be: kernels.fwht(x, backend=be),
        "walsh_signs": lambda be: kernels.walsh_signs(masks[:16], n, backend=be),
        "xor_accumulate": lambda be: kernels.xor_accumulate(masks, coef, masks, coef, size, backend=be),
        "thomas_cyclic": lambda be: kernels.thomas_cyclic(-2.1, 1.0, rhs, backend=be),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="8,12,16")
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'n':>4}" + "".join(f"{b + ' [ms]':>16}" for b in backends) + f"{'speedup':>10}")
    for n in (int(s) for s in args.sizes.split(",")):
        for name, fn in cases(n, rng).items():
            times = {}
            for be in backends:
                number = 3 if be == "python" and name == "thomas_cyclic" and n > 12 else 10
                t = min(timeit.repeat(lambda: fn(be), number=number, repeat=args.repeat)) / number
                times[be] = t * 1e3
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{name:<16}{n:>4}" + "".join(f"{times[b]:>16.4f}" for b in backends) + f"{speed:>10.1f}")


if __name__ == "__main__":
    main()
