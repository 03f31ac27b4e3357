"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from qmodelid import kernels, random_model
from qmodelid.core import random_unitary
from qmodelid.uniqueness import snd_approximant


def _table_case(d, n_states, n_maps, n_effects, max_len):
    rep = random_model(d, n_states, n_maps, n_effects, seed=0)
    args = (rep.state_vectors(), rep.map_stack(), rep.effect_rows(), max_len)
    return f"sequence_table d={d} maps={n_maps} N={max_len}", \
        lambda b: kernels.sequence_table(*args, backend=b)


def _snd_case(d):
    u = snd_approximant(random_unitary(d, np.random.default_rng(1)), 2)
    theta = np.mod(np.angle(np.linalg.eigvals(u)), 2 * np.pi)
    return f"snd_scan d={d}", lambda b: kernels.snd_scan(theta, 1e-9, backend=b)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    cases = [_table_case(2, 4, 3, 4, 5), _table_case(3, 9, 4, 9, 4), _table_case(4, 4, 2, 4, 6),
             _snd_case(4), _snd_case(5), _snd_case(8)]
    backends = kernels.available_backends()
    print(f"backends: {backends} (active: {kernels.BACKEND})")
    print(f"{'case':40s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in cases:
        times = {}
        for b in backends:
            number = 3
            times[b] = min(timeit.repeat(lambda: fn(b), number=number, repeat=args.repeat)) / number
        row = f"{name:40s}" + "".join(f"{times[b] * 1e3:10.3f}ms" for b in backends)
        if "cython" in times:
            row += f"  {times['python'] / times['cython']:8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
