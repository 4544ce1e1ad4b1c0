"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from lloydgreen import _pykernels

try:
    from lloydgreen import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases():
    s = np.linspace(-30.0, 30.0, 20001)
    x = np.linspace(0.05, 60.0, 20001)
    z = np.linspace(-40.0, 40.0, 20001)
    sb = np.linspace(-6.0, 4.0, 20001)
    return {
        "airy": lambda k: k.airy(s),
        "airy_scaled": lambda k: k.airy_scaled(s),
        "hankel01": lambda k: k.hankel01(x, 12.0),
        "hyp1f2": lambda k: k.hyp1f2(1 / 3, 2 / 3, 4 / 3, z, 1e-14, 500),
        "bracket0_closed": lambda k: k.bracket0_closed(sb, 1e-14, 500),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    if _ckernels is None:
        print("compiled kernels not available; timing the numpy fallback only")
    print(f"{'kernel':<16}" + "".join(f"{name:>12}" for name, _ in backends) + ("   speedup" if _ckernels else ""))
    for name, fn in cases().items():
        times = [min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) for _, k in backends]
        row = f"{name:<16}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
