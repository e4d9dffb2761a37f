"""Compare the numba kernels with their numpy counterparts.

Times each kernel on sector-sized inputs and one end-to-end fidelity
evaluation per path.  Run from the repository root:

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

import argparse
import json
import math
import time

import numpy as np

from ccaqst import _kernels
from ccaqst.fock import FockBasis, StateSpec, TransferSetup
from ccaqst.lattice import build_modulated


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def kernel_cases(rng):
    basis = FockBasis(8, 6)
    sec = basis.sector(5)  # 792 states
    couplings = rng.uniform(0.5, 1.5, 7)
    coeffs = rng.normal(size=(8, 6)) + 1j * rng.normal(size=(8, 6))
    block = rng.normal(size=(sec.dim, 64)) + 1j * rng.normal(size=(sec.dim, 64))
    env_index = (sec.codes % basis.env_size).astype(np.int64)
    _, env_index = np.unique(env_index, return_inverse=True)
    n_env = int(env_index.max()) + 1
    weight = rng.normal(size=sec.dim) + 1j * rng.normal(size=sec.dim)
    out = np.zeros((n_env, 64), complex)
    return {
        "hopping_entries": lambda k: k(sec.occupations, sec.codes, basis.place, couplings, basis.cutoff),
        "product_amplitudes": lambda k: k(sec.occupations, coeffs),
        "env_project": lambda k: k(block, env_index, weight, n_env, out),
    }


def build_setup():
    arr = build_modulated(8, 0, 1.0)
    rest = (StateSpec.thermal(0.3),) + (StateSpec.fock(0),) * 6
    return TransferSetup(arr, StateSpec.superposition([1, 1, 1]), rest, cutoff=5, tail_tol=1e-3)


TIMES = np.linspace(0, math.pi / 2, 200)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", help="write the timings here as JSON")
    args = parser.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    results = {}
    for name, call in kernel_cases(rng).items():
        jit = getattr(_kernels, f"{name}_jit")
        ref = getattr(_kernels, f"{name}_numpy")
        call(jit)  # compile outside the timing
        results[name] = {"jit": best_of(lambda: call(jit), args.repeat),
                         "numpy": best_of(lambda: call(ref), args.repeat)}

    previous = _kernels.JIT_ENABLED
    curves = {}
    for label, flag in (("jit", True), ("numpy", False)):
        _kernels.use_jit(flag)
        setup = build_setup()
        # setup time is dominated by the dense eigensolves, which neither path touches
        results.setdefault("setup", {})[label] = best_of(build_setup, max(1, args.repeat // 2))
        results.setdefault("fidelity_curve", {})[label] = best_of(lambda: setup.curve(TIMES), args.repeat)
        curves[label] = setup.curve(TIMES)
    _kernels.use_jit(previous)
    agree = float(np.max(np.abs(curves["jit"] - curves["numpy"])))

    print(f"{'kernel':<20} {'jit [ms]':>10} {'numpy [ms]':>11} {'speedup':>8}")
    for name, t in results.items():
        print(f"{name:<20} {1e3 * t['jit']:10.3f} {1e3 * t['numpy']:11.3f} {t['numpy'] / t['jit']:8.2f}")
    print(f"max |F_jit - F_numpy| on the end-to-end curve: {agree:.1e}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"timings_s": results, "curve_difference": agree}, fh, indent=2)


if __name__ == "__main__":
    main()
