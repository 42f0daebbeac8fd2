"""Compare the compiled DBM kernels with the pure-Python ones.

    python benchmarks/bench_kernels.py [--repeat N] [--dims 3,5,8]

Also times a full check with each backend (the pure run uses TBISIM_PURE=1
in a subprocess, since the backend is chosen at import).
"""

import argparse
import os
import random
import subprocess
import sys
import timeit
from array import array

from tbisim import _dbm_py, dbm

try:
    from tbisim import _dbm_core
except ImportError:  # pragma: no cover
    _dbm_core = None

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "tests", "fixtures")


def random_zone(rng, dim):
    d = dbm.universe(dim)
    for _ in range(2 * dim):
        c = rng.randint(1, dim)
        nxt = dbm.constrain(d, c, rng.choice(("<", "<=", ">=", ">")), rng.randint(0, 6))
        d = nxt or d
    for _ in range(dim):
        i, j = rng.sample(range(1, dim + 1), 2)
        nxt = dbm.tighten_raw(d, i, j, dbm.weak(rng.randint(-3, 3)))
        d = nxt or d
    return d


def raw_matrix(rng, dim):
    """A non-canonical but consistent matrix: a zone with some entries loosened."""
    d = random_zone(rng, dim)
    m = d.copy_data()
    for t in range(len(m)):
        if t % (dim + 2) and rng.random() < 0.3:
            m[t] = _dbm_py.INF
    return m


def bench(mod, dim, repeat, rng):
    size = dim + 1
    mats = [raw_matrix(rng, dim) for _ in range(50)]
    zones = [random_zone(rng, dim) for _ in range(50)]
    upper, lower = dbm.ceilings_raw([2] * dim)

    def close():
        for m in mats:
            mod.close(array("q", m), size)

    def tighten():
        for z in zones:
            mod.tighten(z.copy_data(), size, 1, 0, dbm.weak(1))

    def normalize():
        for z in zones:
            mod.normalize(z.copy_data(), size, upper, lower)

    def includes():
        for a, b in zip(zones, zones[1:]):
            mod.includes(a.data, b.data, size * size)

    out = {}
    for name, fn in (("close", close), ("tighten", tighten), ("normalize", normalize), ("includes", includes)):
        out[name] = min(timeit.repeat(fn, number=1, repeat=repeat)) / 50 * 1e6
    return out


def end_to_end(pure):
    env = dict(os.environ)
    if pure:
        env["TBISIM_PURE"] = "1"
    else:
        env.pop("TBISIM_PURE", None)
    code = (
        "import time\n"
        "from tbisim import _kernel\n"
        "from tbisim.parser import parse_file\n"
        "from tbisim.checker import check_bisimilar\n"
        "a = parse_file(%r); b = parse_file(%r)\n"
        "t = time.perf_counter()\n"
        "for _ in range(20): check_bisimilar(a, b)\n"
        "print(_kernel.BACKEND_NAME, (time.perf_counter() - t) / 20 * 1000)\n"
    ) % (os.path.join(FIXTURES, "a4.tck"), os.path.join(FIXTURES, "a5.tck"))
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, ms = out.stdout.split()
    return name, float(ms)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--dims", default="3,5,8")
    args = p.parse_args()
    if _dbm_core is None:
        sys.exit("compiled kernels not built; run pip install -e . first")

    print("%-10s %4s %12s %12s %8s" % ("kernel", "dim", "python us", "cython us", "speedup"))
    for dim in (int(x) for x in args.dims.split(",")):
        py = bench(_dbm_py, dim, args.repeat, random.Random(dim))
        cy = bench(_dbm_core, dim, args.repeat, random.Random(dim))
        for name in py:
            print("%-10s %4d %12.2f %12.2f %7.1fx" % (name, dim, py[name], cy[name], py[name] / cy[name]))

    print()
    for pure in (True, False):
        name, ms = end_to_end(pure)
        print("check a4 vs a5 with %-6s backend: %.2f ms" % (name, ms))


if __name__ == "__main__":
    main()
