"""Independent oracles used to pin expected values in the tests.

Everything here recomputes quantities from first principles (dense index
enumeration, finite differences, direct monomial evaluation) without going
through the library's sparse canonical paths, so the tests compare two
independent routes.
"""

from itertools import product

import numpy as np

from sostensor.tensor import SymmetricTensor


def dense_evaluate(A: SymmetricTensor, x) -> float:
    """Sum over every index tuple of entry * product, by brute force."""
    total = 0.0
    for idx in product(range(A.dim), repeat=A.order):
        v = A.entry(idx)
        if v:
            p = float(v)
            for i in idx:
                p *= float(x[i])
            total += p
    return total


def dense_apply(A: SymmetricTensor, x) -> np.ndarray:
    out = np.zeros(A.dim)
    for idx in product(range(A.dim), repeat=A.order):
        v = A.entry(idx)
        if v:
            p = float(v)
            for i in idx[1:]:
                p *= float(x[i])
            out[idx[0]] += p
    return out


def dense_inner(A: SymmetricTensor, B: SymmetricTensor) -> float:
    total = 0.0
    for idx in product(range(A.dim), repeat=A.order):
        total += float(A.entry(idx)) * float(B.entry(idx))
    return total


def central_difference_gradient(fn, x, h=1e-5) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fn(x + e) - fn(x - e)) / (2 * h)
    return g


def grid_min(fn, n, m, steps=9) -> float:
    """Coarse minimum of fn over the unit m-norm sphere via a dense grid."""
    best = np.inf
    axes = np.linspace(-1.0, 1.0, steps)
    for point in product(axes, repeat=n):
        v = np.array(point)
        norm = np.sum(np.abs(v) ** m) ** (1.0 / m)
        if norm == 0.0:
            continue
        best = min(best, fn(v / norm))
    return best


def random_symmetric_tensor(rng, order, dim, density=0.5, scale=1.0) -> SymmetricTensor:
    from itertools import combinations_with_replacement

    entries = {}
    for idx in combinations_with_replacement(range(dim), order):
        if rng.uniform() < density:
            entries[idx] = float(rng.uniform(-scale, scale))
    if not entries:
        entries[(0,) * order] = 1.0
    return SymmetricTensor(order, dim, entries)


def random_extended_z_tensor(rng, order, dim) -> SymmetricTensor:
    """Random tensor with extended-Z block structure (not necessarily PSD)."""
    from itertools import combinations_with_replacement

    cut = int(rng.integers(1, dim)) if dim > 1 else 1
    blocks = [list(range(cut)), list(range(cut, dim))]
    blocks = [b for b in blocks if b]
    entries = {(i,) * order: float(rng.uniform(0.3, 2.0)) for i in range(dim)}
    for block in blocks:
        if len(block) < 2:
            continue
        if rng.uniform() < 0.5:
            for _ in range(50):
                idx = tuple(
                    sorted(block[int(rng.integers(0, len(block)))] for _ in range(order))
                )
                if len(set(idx)) >= 2:
                    entries[idx] = float(rng.uniform(-1.5, 1.5))
                    break
        else:
            picks = set()
            for _ in range(3):
                idx = tuple(
                    sorted(block[int(rng.integers(0, len(block)))] for _ in range(order))
                )
                if len(set(idx)) >= 2:
                    picks.add(idx)
            for idx in picks:
                entries[idx] = -float(rng.uniform(0.0, 1.0))
    return SymmetricTensor(order, dim, entries)
