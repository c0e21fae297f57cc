"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--gates 4000] [--lanes 256] [--repeat 5]

Reports the best wall time per backend for bitsliced evaluation, three-valued
evaluation and a full truth table, and checks that both backends agree.
"""

from __future__ import annotations

import argparse
import random
import timeit

import numpy as np

from bitbound import kernels
from bitbound.circuit import random_circuit, truth_table
from bitbound.kernels import _fallback


def _words(rng: random.Random, rows: int, lanes: int) -> np.ndarray:
    return np.array([[rng.getrandbits(64) for _ in range(lanes)] for _ in range(rows)],
                    dtype=np.uint64)


def bench(gates: int, lanes: int, repeat: int, width: int) -> list[tuple[str, str, float]]:
    rng = random.Random(0)
    c = random_circuit(rng, (width,), gates)
    op, a, b = (np.ascontiguousarray(arr) for arr in (c.op, c.a, c.b))
    inputs = _words(rng, width, lanes)
    known = _words(rng, width, lanes)
    in_one, in_zero = known & inputs, known & ~inputs
    backends = {"numpy": _fallback}
    if kernels.compiled is not None:
        backends["compiled"] = kernels.compiled
    rows = []
    results = {}
    for name, mod in backends.items():
        val = np.empty((c.size, lanes), dtype=np.uint64)
        one = np.empty_like(val)
        zero = np.empty_like(val)
        t_bits = min(timeit.repeat(lambda: mod.eval_bits(op, a, b, inputs, val),
                                   number=1, repeat=repeat))
        t_planes = min(timeit.repeat(
            lambda: mod.eval_planes(op, a, b, in_one, in_zero, one, zero),
            number=1, repeat=repeat))
        kernels.use(name)
        t_tt = min(timeit.repeat(lambda: truth_table(c), number=1, repeat=repeat))
        results[name] = (val.copy(), one.copy(), zero.copy(), truth_table(c))
        rows += [(name, "eval_bits", t_bits), (name, "eval_planes", t_planes),
                 (name, f"truth_table w={width}", t_tt)]
    if len(results) == 2:
        ref, other = results["numpy"], results["compiled"]
        same = all(np.array_equal(x, y) for x, y in zip(ref[:3], other[:3])) and ref[3] == other[3]
        if not same:
            raise SystemExit("backends disagree")
    kernels.use("compiled" if kernels.compiled is not None else "numpy")
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gates", type=int, default=4000)
    ap.add_argument("--lanes", type=int, default=256)
    ap.add_argument("--width", type=int, default=18)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = bench(args.gates, args.lanes, args.repeat, args.width)
    base = {kernel: t for backend, kernel, t in rows if backend == "numpy"}
    print(f"{'backend':10s} {'kernel':22s} {'seconds':>10s} {'speedup':>8s}")
    for backend, kernel, t in rows:
        print(f"{backend:10s} {kernel:22s} {t:10.5f} {base[kernel] / t:8.1f}x")


if __name__ == "__main__":
    main()
