"""Compare the compiled kernels with the NumPy fallback.

Usage::

    python benchmarks/bench_kernels.py [--batch 256] [--repeat 5]

Each kernel is first checked for identical output on both backends, then
timed with :mod:`timeit` (best of ``--repeat``). Times are per frame.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from polarssk import _kernels_py

try:
    from polarssk import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def cases(rng: np.random.Generator, batch: int):
    for N in (256, 1024):
        frozen = (rng.random(N) < 0.5).astype(np.uint8)
        fval = np.zeros(N, dtype=np.uint8)
        llr = np.clip(rng.normal(2.0, 3.0, size=(batch, N)), -40, 40)
        yield f"sc_decode N={N}", lambda k, a=llr, f=frozen, v=fval: k.sc_decode(a, f, v, False), batch
        yield f"sc_decode N={N} min-sum", lambda k, a=llr, f=frozen, v=fval: k.sc_decode(a, f, v, True), batch
    llr = np.clip(rng.normal(2.0, 3.0, size=(batch, 1024)), -40, 40)
    yield "genie_stats N=1024", lambda k, a=llr: k.genie_stats(a, False), batch
    u = rng.integers(0, 2, size=(batch, 1024), dtype=np.uint8)
    yield "polar_transform N=1024", lambda k, x=u: k.polar_transform(x), batch
    a = rng.normal(0, 8, size=batch * 1024)
    b = rng.normal(0, 8, size=batch * 1024)
    yield "boxplus (per 1024 pairs)", lambda k, x=a, y=b: k.boxplus(x, y), batch


def same(x, y) -> bool:
    if isinstance(x, tuple):
        return all(same(p, q) for p, q in zip(x, y))
    if x.dtype.kind == "f":
        return np.allclose(x, y, rtol=1e-10, atol=1e-12)
    return np.array_equal(x, y)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _compiled is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<26}{'cython us':>12}{'numpy us':>12}{'speedup':>10}  agree")
    for name, fn, frames in cases(rng, args.batch):
        agree = same(fn(_compiled), fn(_kernels_py))
        t_c = min(timeit.repeat(lambda: fn(_compiled), number=1, repeat=args.repeat)) / frames * 1e6
        t_p = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) / frames * 1e6
        print(f"{name:<26}{t_c:>12.1f}{t_p:>12.1f}{t_p / t_c:>9.2f}x  {'yes' if agree else 'NO'}")


if __name__ == "__main__":
    main()
