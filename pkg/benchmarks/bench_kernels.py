"""Compiled kernels against their pure-Python counterparts.

    python benchmarks/bench_kernels.py [--repeat N]

Each row times the same inputs through both implementations and checks
that the answers agree before reporting.
"""
import argparse
import random
import sys
import timeit
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from support import random_composable, random_tangle  # noqa: E402
from tanglekit import CompositionShadingError, Tangle, tl_basis  # noqa: E402
from tanglekit import _kernels_py  # noqa: E402
from tanglekit import tangle as tangle_mod  # noqa: E402

try:
    from tanglekit import _kernels as compiled
except ImportError:
    compiled = None
core = tangle_mod._core


def fresh(t):
    return Tangle(t.outer, t.inner, t.strands, t.nesting, t.loops, t.shading)


def partner(d, n):
    out = [0] * (2 * n)
    for a, b in d.pairs:
        out[a], out[b] = b, a
    return out


def best(fn, repeat, prep):
    times = []
    for _ in range(repeat):
        # fresh inputs every round: tangles cache their analysis
        data = prep()
        times.append(timeit.timeit(lambda: fn(data), number=1))
    return min(times)


def row(name, count, py_fn, c_fn, repeat, prep=lambda: None):
    tp = best(py_fn, repeat, prep)
    tc = best(c_fn, repeat, prep)
    print(f"{name:<22}{count:>8}{tp * 1e3:>12.1f}{tc * 1e3:>12.1f}{tp / tc:>9.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None or core is None:
        sys.exit("compiled extensions are not built; run: python setup.py build_ext --inplace")
    rng = random.Random(0)
    print(f"{'kernel':<22}{'calls':>8}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")

    n = 6
    basis = [partner(d, n) for d in tl_basis(n)]
    pairs = [(rng.choice(basis), rng.choice(basis)) for _ in range(5000)]
    assert all(_kernels_py.tl_stack(a, b, n) == compiled.tl_stack(a, b, n) for a, b in pairs[:200])
    row("tl_stack n=6", len(pairs), lambda _: [_kernels_py.tl_stack(a, b, n) for a, b in pairs],
        lambda _: [compiled.tl_stack(a, b, n) for a, b in pairs], args.repeat)

    terms = [(i, j, rng.uniform(-1, 1)) for i in range(8) for j in range(8) if i + j < 9]
    xs = [i / 50 for i in range(-50, 51)]
    ys = [i / 50 for i in range(1, 51)]
    row("eval_grid 101x50", 1, lambda _: _kernels_py.eval_grid(terms, xs, ys),
        lambda _: compiled.eval_grid(terms, xs, ys), args.repeat)

    tangles = [random_tangle(rng) for _ in range(2000)]
    copies = lambda: [fresh(t) for t in tangles]  # noqa: E731
    assert all(core.is_valid(t) for t in tangles)
    row("validate", len(tangles), lambda ts: [tangle_mod._violations(t) for t in ts],
        lambda ts: [core.is_valid(t) for t in ts], args.repeat, copies)

    assert all(core.canonicalize(t) == tangle_mod._Canonizer(fresh(t)).run()[0] for t in tangles[:200])
    row("canonicalize", len(tangles), lambda ts: [tangle_mod._Canonizer(t).run()[0] for t in ts],
        lambda ts: [core.canonicalize(t) for t in ts], args.repeat, copies)

    triples = []
    while len(triples) < 2000:
        t, j, s = random_composable(rng)
        try:
            tangle_mod.compose_detailed(t, j, s)
        except CompositionShadingError:
            continue
        triples.append((t, j, s))
    assert all(core.compose(t, j, s)[0] == tangle_mod.compose_detailed(t, j, s).tangle for t, j, s in triples[:200])
    copied = lambda: [(fresh(t), j, fresh(s)) for t, j, s in triples]  # noqa: E731
    row("compose", len(triples), lambda xs: [tangle_mod.compose_detailed(t, j, s) for t, j, s in xs],
        lambda xs: [core.compose(t, j, s) for t, j, s in xs], args.repeat, copied)


if __name__ == "__main__":
    main()
