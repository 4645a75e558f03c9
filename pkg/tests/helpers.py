"""Random generators shared by the test modules."""
import numpy as np
from gmpy2 import mpq

from ncsdiff.diffop import Derivation
from ncsdiff.series import SeriesVector, TruncSeries


def random_series(ctx, rng, max_terms=3, min_degree=0, max_degree=None, t_range=(0, 0)):
    max_degree = ctx.nz if max_degree is None else min(max_degree, ctx.nz)
    terms = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        d = int(rng.integers(min_degree, max_degree + 1))
        t = int(rng.integers(t_range[0], t_range[1] + 1))
        w = ctx.canonical(int(rng.integers(0, ctx.n)) for _ in range(d))
        terms[(t, w)] = terms.get((t, w), 0) + mpq(int(rng.integers(-3, 4)), int(rng.integers(1, 3)))
    return TruncSeries(ctx, terms)


def random_derivation(ctx, rng, alpha=1, max_degree=None, t_range=(0, 0)):
    comps = [random_series(ctx, rng, 2, alpha, max_degree or alpha + 1, t_range) for _ in range(ctx.n)]
    return Derivation(SeriesVector(comps, ctx))


def rng(seed):
    return np.random.default_rng(seed)
