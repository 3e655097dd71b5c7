"""Timing harness for the hot kernels: compiled backend against plain numpy.

Run as ``python -m vqlslab.benchmark``.  Each kernel is warmed up first so
compilation time never lands in a measurement, then timed over repeated
calls.  The two backends are also cross-checked on the same inputs, so a
speedup row is only printed for work that produces matching numbers.
"""

import argparse
import time

import numpy as np

from . import kernels
from .pauli import decompose
from .problem import gen_random_system


def _time_call(fn, repeats):
    fn()  # warmup: triggers compilation on the first numba call
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _cases(qubits, seed):
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * np.pi, (qubits, 3))
    amps = rng.standard_normal(1 << qubits) + 1j * rng.standard_normal(1 << qubits)
    # fixed fill count, not a fixed density: keeps the term count, and with
    # it the pauli_sum runtime, from exploding quadratically with size
    density = min(0.05, 32.0 / (1 << qubits) ** 2 + 1e-9)
    dec = decompose(gen_random_system(qubits, density, seed).matrix)
    coeffs, x_masks, zy_masks, phases_y = dec.packed()
    return {
        "ansatz": lambda: kernels.ansatz_amps(angles, qubits),
        "pauli_sum": lambda: kernels.pauli_sum_amps(
            coeffs, x_masks, zy_masks, phases_y, amps),
        "zero_bit_weights": lambda: kernels.zero_bit_weights(amps, qubits),
    }


def run_benchmark(qubits, repeats, seed=0):
    """Per-kernel timings for both backends; returns a list of result dicts."""
    rows = []
    for name, case in _cases(qubits, seed).items():
        timings = {}
        values = {}
        for backend in kernels.available_backends():
            previous = kernels.set_backend(backend)
            try:
                values[backend] = case()
                timings[backend] = _time_call(case, repeats)
            finally:
                kernels.set_backend(previous)
        backends = sorted(timings)
        agree = True
        for other in backends[1:]:
            agree = agree and np.allclose(
                values[backends[0]], values[other], rtol=1e-12, atol=1e-12)
        rows.append({"kernel": name, "qubits": qubits, "match": agree, **timings})
    return rows


def format_rows(rows):
    lines = ["kernel            qubits  numpy_us  numba_us  speedup  match"]
    for row in rows:
        numpy_us = row.get("numpy", float("nan")) * 1e6
        numba_us = row.get("numba", float("nan")) * 1e6
        speedup = numpy_us / numba_us if numba_us > 0 else float("nan")
        lines.append(
            f"{row['kernel']:<17} {row['qubits']:>6} {numpy_us:>9.1f}"
            f" {numba_us:>9.1f} {speedup:>8.2f}  {'yes' if row['match'] else 'NO'}"
        )
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m vqlslab.benchmark",
        description="time the hot kernels on every available backend",
    )
    parser.add_argument("--qubits", type=int, nargs="*", default=[4, 6, 8])
    parser.add_argument("--repeats", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    all_rows = []
    for q in args.qubits:
        all_rows.extend(run_benchmark(q, args.repeats, args.seed))
    print(format_rows(all_rows))
    if not all(row["match"] for row in all_rows):
        print("backend outputs disagree", flush=True)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
