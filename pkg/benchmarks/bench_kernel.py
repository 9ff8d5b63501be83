"""Time the pair relation on the Python and compiled kernels.

For each random flat system the same batch of ground terms is interned into
one engine per backend, and every pair is decided from a cold memo.  The two
backends must agree on every answer.

    python3 benchmarks/bench_kernel.py --systems 20 --terms 120
"""

import argparse
import random
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from corpus import random_flat_trs, random_ground  # noqa: E402

from shallow_un.closure import closure_of  # noqa: E402
from shallow_un.equiv import EquivEngine  # noqa: E402
from shallow_un.kernel import available_backends  # noqa: E402


def run(args):
    backends = sorted(available_backends())
    if "compiled" not in backends:
        print("compiled kernel not built; only timing the Python kernel")
    rng = random.Random(args.seed)
    totals = {b: [] for b in backends}
    pairs = 0
    for _ in range(args.systems):
        trs, funs, consts = random_flat_trs(rng)
        eqs = closure_of(trs)
        terms = list({random_ground(rng, funs, consts, args.height) for _ in range(args.terms)})
        answers = {}
        for b in backends:
            engine = EquivEngine(trs, eqs=eqs, backend=b)
            ids = [engine.intern(t) for t in terms]
            t0 = time.perf_counter()
            answers[b] = [engine.kernel.related(i, j) for i in ids for j in ids]
            totals[b].append(time.perf_counter() - t0)
        first = answers[backends[0]]
        if any(answers[b] != first for b in backends):
            raise SystemExit("backends disagree")
        pairs += len(first)
    print(f"{args.systems} systems, {pairs} pair queries")
    for b in backends:
        ts = totals[b]
        print(f"  {b:9s} total {sum(ts):8.3f}s  median/system {statistics.median(ts) * 1e3:8.2f}ms")
    if len(backends) == 2:
        print(f"  speed-up  {sum(totals['python']) / sum(totals['compiled']):.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--systems", type=int, default=20)
    ap.add_argument("--terms", type=int, default=120)
    ap.add_argument("--height", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    run(ap.parse_args())


if __name__ == "__main__":
    main()
