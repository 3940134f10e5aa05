#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the pure-Python twin.

Times the raw kernel operations and a full protocol simulation on each
backend, and verifies both backends produce identical reports while at it.

Run: python benchmarks/bench_backends.py [--rounds N] [--kernel-calls N]
"""

import argparse
import time

import numpy as np

from qdkd import _backend, _kernels_py
from qdkd.adversary import ChannelLeg, EveBasisPolicy, InterceptResend
from qdkd.simulate import SimConfig, run_simulation, serialize_report

try:
    from qdkd import _kernels_c
except ImportError:
    _kernels_c = None


def _random_states(n, seed=7):
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(n):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        states.append(tuple(complex(x) for x in v))
    return states


def time_kernel_ops(kern, calls):
    states = _random_states(256)
    rs = np.random.default_rng(11).random(256)
    timings = {}

    def bench(name, fn):
        start = time.perf_counter()
        for i in range(calls):
            fn(states[i % 256], i)
        timings[name] = (time.perf_counter() - start) / calls * 1e9

    bench("apply_u", lambda s, i: kern.apply_u(s, 1, i & 3))
    bench("qubit_probs(Z)", lambda s, i: kern.qubit_probs(s, i & 1, 0))
    bench("qubit_probs(X)", lambda s, i: kern.qubit_probs(s, i & 1, 1))
    bench("measure_qubit", lambda s, i: kern.measure_qubit(s, i & 1, i >> 1 & 1, rs[i % 256]))
    bench("bell_probs", lambda s, i: kern.bell_probs(s))
    bench("measure_bell", lambda s, i: kern.measure_bell(s, rs[i % 256]))
    return timings


def time_simulation(backend_name, config):
    _backend.activate(backend_name)
    start = time.perf_counter()
    report = run_simulation(config)
    elapsed = time.perf_counter() - start
    return elapsed, serialize_report(report)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rounds", type=int, default=50_000, help="simulation rounds")
    parser.add_argument("--kernel-calls", type=int, default=200_000, help="calls per kernel op")
    args = parser.parse_args()

    if _kernels_c is None:
        print("compiled extension not available; nothing to compare")
        return

    print(f"kernel micro-benchmarks ({args.kernel_calls} calls each, ns/call):")
    py = time_kernel_ops(_kernels_py, args.kernel_calls)
    cc = time_kernel_ops(_kernels_c, args.kernel_calls)
    print(f"  {'op':>16}  {'python':>9}  {'compiled':>9}  {'speedup':>8}")
    for name in py:
        print(f"  {name:>16}  {py[name]:>8.0f}  {cc[name]:>8.0f}  {py[name] / cc[name]:>7.2f}x")

    config = SimConfig(
        rounds=args.rounds,
        seed=1234,
        check_fraction=0.1,
        attack=InterceptResend(ChannelLeg.BACKWARD, EveBasisPolicy.Z),
    )
    original = _backend.backend_name
    try:
        t_py, report_py = time_simulation("python", config)
        t_cc, report_cc = time_simulation("compiled", config)
    finally:
        _backend.activate(original)
    assert report_py == report_cc, "backends disagree on the simulated trajectory"
    print(f"\nfull simulation, {args.rounds} rounds (backward-Z attack):")
    print(f"  python   : {t_py:.3f}s")
    print(f"  compiled : {t_cc:.3f}s  ({t_py / t_cc:.2f}x)")
    print("  reports byte-identical across backends")


if __name__ == "__main__":
    main()
