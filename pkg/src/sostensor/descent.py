"""Multistart projected descent on the unit m-norm sphere.

Minimizing a degree-m form over { ||x||_m = 1 } is the variational picture of
the smallest H-eigenvalue: stationary points of f(x)/||x||_m^m are exactly the
H-eigenpairs.  The descent is a projected gradient with per-start adaptive
steps, run for every start simultaneously (batched in numpy), seeded from a
sign-pattern grid plus random directions.  It serves both as an independent
minimization oracle and as a cheap source of negative-value witnesses and
zero-set samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .tensor import HomogeneousPolynomial


class FormEvaluator:
    """Vectorized evaluation and gradient of a homogeneous polynomial.

    Batched calls take an array of shape (S, n) and return S values or an
    (S, n) gradient block.
    """

    def __init__(self, f: HomogeneousPolynomial):
        self.dim = f.dim
        self.degree = f.degree
        terms = list(f.terms.items())
        self.E = np.array([alpha for alpha, _ in terms], dtype=np.int64).reshape(
            len(terms), f.dim
        )
        self.c = np.array([float(v) for _, v in terms])
        self.scale = 1.0 + (float(np.max(np.abs(self.c))) if terms else 0.0)
        self._grad_rows = []
        for j in range(f.dim):
            mask = self.E[:, j] > 0
            Emod = self.E[mask].copy()
            Emod[:, j] -= 1
            self._grad_rows.append((Emod, self.c[mask] * self.E[mask, j]))

    def value(self, x: np.ndarray) -> float:
        return float(self.value_batch(x.reshape(1, -1))[0])

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        if self.c.size == 0:
            return np.zeros(X.shape[0])
        powers = np.power(X[:, None, :], self.E[None, :, :])
        return np.prod(powers, axis=2) @ self.c

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.gradient_batch(x.reshape(1, -1))[0]

    def gradient_batch(self, X: np.ndarray) -> np.ndarray:
        G = np.zeros_like(X, dtype=float)
        for j, (Emod, coeff) in enumerate(self._grad_rows):
            if coeff.size:
                powers = np.power(X[:, None, :], Emod[None, :, :])
                G[:, j] = np.prod(powers, axis=2) @ coeff
        return G


@dataclass
class SphereMinimum:
    value: float
    point: np.ndarray
    gradient_norm: float
    near_zeros: List[np.ndarray]


def _sign_grid(n: int, cap: int) -> Optional[np.ndarray]:
    if 3 ** n > cap:
        return None
    from itertools import product

    rows = []
    for s in product((-1.0, 0.0, 1.0), repeat=n):
        v = np.array(s)
        nz = v[v != 0]
        if nz.size and nz[0] > 0:  # quotient out the global sign (even degree)
            rows.append(v)
    return np.array(rows)


def _normalize_rows(X: np.ndarray, m: int) -> np.ndarray:
    norms = np.power(np.sum(np.abs(X) ** m, axis=1), 1.0 / m)
    return X / norms[:, None]


def sphere_minimize(
    f: HomogeneousPolynomial,
    seed: int = 0,
    restarts: int = 50,
    iters: int = 300,
    grid_cap: int = 3 ** 8,
    stop_below: Optional[float] = None,
    collect_below: Optional[float] = None,
    grad_tol: float = 1e-12,
) -> SphereMinimum:
    """Best local minimum of f over the unit m-norm sphere across many starts.

    `stop_below` truncates the iteration budget once any value drops under
    it; `collect_below` gathers the converged points whose |value| falls
    under the threshold (used to sample the zero set of a nonnegative form).
    """
    ev = FormEvaluator(f)
    n, m = f.dim, f.degree
    rng = np.random.default_rng(seed)

    seeds: List[np.ndarray] = []
    grid = _sign_grid(n, grid_cap)
    grid_best: Optional[Tuple[float, np.ndarray]] = None
    if grid is not None and len(grid):
        Xg = _normalize_rows(grid, m)
        vals = ev.value_batch(Xg)
        order = np.argsort(vals)
        grid_best = (float(vals[order[0]]), Xg[order[0]].copy())
        seeds.append(Xg[order[: max(8, 5 * n)]])
    if restarts > 0:
        seeds.append(_normalize_rows(rng.standard_normal((restarts, n)), m))
    if not seeds:
        seeds.append(_normalize_rows(rng.standard_normal((1, n)), m))
    X = np.vstack(seeds)

    vals = ev.value_batch(X)
    steps = np.full(len(X), 0.5 / ev.scale)
    budget = iters
    for it in range(iters):
        G = ev.gradient_batch(X) - m * vals[:, None] * X ** (m - 1)
        Y = _normalize_rows(X - steps[:, None] * G, m)
        new_vals = ev.value_batch(Y)
        improved = new_vals < vals - 1e-18 * ev.scale
        X[improved] = Y[improved]
        vals[improved] = new_vals[improved]
        steps[improved] *= 1.3
        steps[~improved] *= 0.5
        if stop_below is not None and float(np.min(vals)) < stop_below:
            budget = it
            break
        if not np.any(improved) and float(np.max(steps)) < 1e-17 / ev.scale:
            budget = it
            break

    best_idx = int(np.argmin(vals))
    best_val = float(vals[best_idx])
    best_x = X[best_idx].copy()
    if grid_best is not None and grid_best[0] < best_val:
        best_val, best_x = grid_best
    g = ev.gradient(best_x) - m * best_val * best_x ** (m - 1)
    near_zeros: List[np.ndarray] = []
    if collect_below is not None:
        for i in np.nonzero(np.abs(vals) <= collect_below)[0]:
            near_zeros.append(X[i].copy())
    return SphereMinimum(best_val, best_x, float(np.max(np.abs(g))), near_zeros)
