"""Time the compiled and pure-Python propagation kernels on HCP groundings.

    python3 benchmarks/bench_kernels.py --persons 1,2,3 --repeat 3
"""
import argparse
import time

from aspcag.grounder import ground
from aspcag.hcp import InstanceSpec, gen_instance, load_encoding
from aspcag.kernels import COMPILED_AVAILABLE
from aspcag.solver import solve


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--persons", default="1,2")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not COMPILED_AVAILABLE:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")

    enc = load_encoding("hcp")
    print(f"{'persons':>7} {'rules':>7} {'python_s':>9} {'cython_s':>9} {'speedup':>8}")
    for n in [int(x) for x in args.persons.split(",")]:
        g = ground(enc.with_facts(gen_instance(InstanceSpec(n))))
        tp, mp = best_of(lambda: solve(g, backend="python"), args.repeat)
        tc, mc = best_of(lambda: solve(g, backend="cython"), args.repeat)
        assert mp == mc, "backends disagree"
        print(f"{n:>7} {len(g.rules):>7} {tp:>9.3f} {tc:>9.3f} {tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
