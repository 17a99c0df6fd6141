"""Time the compiled and numpy statevector kernels on the same workloads.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best-of-``repeat`` time per call for every available
backend and the speedup of the compiled one.
"""
import argparse
import math
import timeit

import numpy as np

from qslearn.sim import kernels


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def workloads(rng):
    """(label, setup(mod) -> zero-arg callable) pairs."""
    out = []
    for n in (4, 10, 16):
        psi = random_state(rng, n)
        u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]

        def one_qubit(mod, psi=psi, u=u, n=n):
            buf = psi.copy()
            return lambda: mod.apply_1q(buf, u[0, 0], u[0, 1], u[1, 0], u[1, 1], n // 2, 0, 0)

        out.append((f"apply_1q n={n}", one_qubit))
    for n in (6, 12):
        psi = random_state(rng, n)
        u4 = np.ascontiguousarray(np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0])
        targets = np.array([0, n - 1], dtype=np.int64)

        def two_qubit(mod, psi=psi, u4=u4, targets=targets):
            buf = psi.copy()
            return lambda: mod.apply_matrix(buf, u4, targets, 0b10, 0b10)

        out.append((f"apply_matrix 2q+ctrl n={n}", two_qubit))
    for n, layers in ((2, 2), (4, 3), (8, 20)):
        psi0 = np.zeros(1 << n, dtype=np.complex128)
        psi0[0] = 1
        theta = rng.uniform(0, 2 * math.pi, 2 * n * layers)

        def ansatz(mod, psi0=psi0, theta=theta, n=n, layers=layers):
            def run():
                buf = psi0.copy()
                mod.ansatz_forward(buf, theta, n, layers)
                return mod.expectation_z(buf, 0)

            return run

        out.append((f"ansatz+<Z> n={n} L={layers}", ansatz))
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    backends = kernels.available_backends()
    names = sorted(backends)
    rng = np.random.default_rng(0)
    print(f"{'workload':<30}" + "".join(f"{n + ' (us)':>16}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, setup in workloads(rng):
        times = {}
        for name in names:
            fn = setup(backends[name])
            number = max(1, int(0.05 / max(1e-7, timeit.timeit(fn, number=1))))
            times[name] = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
        row = f"{label:<30}" + "".join(f"{times[n] * 1e6:>16.1f}" for n in names)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:>11.1f}x"
        print(row)
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
