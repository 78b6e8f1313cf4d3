"""Slow, simple reference solvers used to cross-check the Newton fitters.

These deliberately share no algorithmic machinery with the production
code: the likelihood is assembled with raw exponentials, coefficients are
found by derivative-free coordinate descent with golden-section line
searches, and local first-order conditions are solved by bisection.  If
the fast path and these agree, both are right for different reasons.
"""

from __future__ import annotations

import numpy as np

from .core import Dataset, nonreference_categories
from .exceptions import OracleFailureError, SeparationError
from .kernels import KernelConfig, kernel_weight

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, a: float, b: float, tol: float = 1e-12,
                   max_iter: int = 200) -> float:
    """Minimum of a unimodal function on [a, b] by golden-section search."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _bracket_minimum(f, x0: float, step: float = 1.0,
                     max_expansions: int = 200) -> tuple:
    """Interval [a, b] containing the minimiser of a convex f."""
    a, m, b = x0 - step, x0, x0 + step
    fa, fm, fb = f(a), f(m), f(b)
    for _ in range(max_expansions):
        if fm <= fa and fm <= fb:
            return a, b
        if fa < fm:
            a, m, b = a - 2.0 * (m - a), a, m
            fa, fm, fb = f(a), fa, fm
        else:
            a, m, b = m, b, b + 2.0 * (b - m)
            fa, fm, fb = fm, fb, f(b)
    raise OracleFailureError("could not bracket the coordinate minimum")


def oracle_mle(data: Dataset, *, reference: int | None = None,
               include_smooth: bool = True, coordinate_tol: float = 1e-7,
               max_sweeps: int = 400) -> np.ndarray:
    """Parametric-MNL maximum likelihood by derivative-free search.

    Cyclic coordinate descent on the negative log-likelihood, each
    coordinate minimised exactly (golden section on a convex slice).
    Intended for small instances (total free parameters <= 30); returns
    the (K-1, p') coefficient matrix in the same layout as the Newton
    fitter.

    The stopping tolerance sits above the ~1e-8 positional noise floor
    of derivative-free 1-D searches (objective changes near the minimum
    fall below machine epsilon), which still locates coefficients to a
    few 1e-8.
    """
    K = data.n_categories
    reference = K if reference is None else reference
    cats = nonreference_categories(K, reference)
    cols = [np.ones((data.n, 1)), data.x]
    if include_smooth and data.q:
        cols.append(data.t)
    Z = np.hstack(cols)
    pp = Z.shape[1]
    if (K - 1) * pp > 30:
        raise OracleFailureError("oracle_mle is for <= 30 free parameters")

    y_col = data.y - 1                       # 0-based category per row
    theta = np.zeros((K - 1, pp))
    eta = np.zeros((data.n, K))              # column cats-1 tracks Z @ theta

    def negll():
        denom = np.exp(eta).sum(axis=1)
        return -float(np.sum(eta[np.arange(data.n), y_col] - np.log(denom)))

    current = negll()
    for _ in range(max_sweeps):
        max_move = 0.0
        for r in range(K - 1):
            col = cats[r] - 1
            hit = y_col == col
            for c in range(pp):
                z = Z[:, c]
                base = eta[:, col] - theta[r, c] * z
                rest = np.exp(np.delete(eta, col, axis=1)).sum(axis=1)
                const = float(np.sum(base[hit]))
                s_hit = float(np.sum(z[hit]))

                def f(v):
                    # far-out bracket probes may overflow to +inf; that is
                    # a legitimate "worse" value for the minimisation
                    with np.errstate(over="ignore"):
                        return -(const + v * s_hit
                                 - np.log(rest + np.exp(base + v * z)).sum())

                a, b = _bracket_minimum(f, theta[r, c])
                v = golden_section(f, a, b, tol=1e-12)
                max_move = max(max_move, abs(v - theta[r, c]))
                theta[r, c] = v
                eta[:, col] = base + v * z
        new = negll()
        if max_move < coordinate_tol and current - new < 1e-12:
            return theta
        current = new
    raise OracleFailureError(f"no convergence in {max_sweeps} sweeps")


def oracle_local_solve(data: Dataset, k: int, t, state, kernel: KernelConfig,
                       bracket: float = 50.0, tol: float = 1e-12) -> float:
    """Root of the local first-order condition in m_k(t), by bisection.

    The kernel-weighted score is strictly decreasing in the candidate
    value (every l'' is negative), so the root inside [-bracket, bracket]
    is unique when the score changes sign there; a one-sided score means
    the local likelihood has no interior maximum.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    w = np.array([kernel_weight(kernel, t, ti) for ti in data.t])
    cats = nonreference_categories(state.n_categories, state.reference)
    row = int(np.flatnonzero(cats == k)[0])
    # fixed parts: every other category's predictor at the observation points
    A = data.x @ state.beta.T + state.m.T
    rest = np.exp(np.delete(A, row, axis=1)).sum(axis=1) + 1.0  # + reference
    ck = data.x @ state.beta[row]
    hit = (data.y == k).astype(np.float64)

    def score(mu):
        e = np.exp(ck + mu)
        return float(w @ (hit - e / (e + rest)))

    lo, hi = -bracket, bracket
    s_lo, s_hi = score(lo), score(hi)
    if not (s_lo > 0.0 > s_hi):
        raise SeparationError(
            f"local score is one-sided on [{-bracket}, {bracket}] "
            f"(score({lo})={s_lo:.3e}, score({hi})={s_hi:.3e})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if score(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def central_difference(f, x: float, h: float = 1e-6) -> float:
    """Two-sided first difference quotient."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def second_difference(f, x: float, h: float = 1e-4) -> float:
    """Central second difference quotient."""
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
