"""Hausman-McFadden and Small-Hsiao tests of the IIA assumption.

Both tests compare the parametric MNL fitted on all categories with a
refit on the subsample that excludes one category: under independence of
irrelevant alternatives the shared coefficients should not move.  The
Hausman-McFadden statistic may come out negative in finite samples (the
difference of covariance matrices need not be positive definite); it is
reported as computed, with a note, rather than clamped.

The chi-square upper tail is computed in-package from the regularized
incomplete gamma function (series for small arguments, Lentz continued
fraction otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Dataset, nonreference_categories
from .exceptions import ConfigError, InsufficientDataError
from .parametric import coefficient_log_likelihood, fit_parametric

_SQRT_HALF = 1.0 / math.sqrt(2.0)


# --------------------------------------------------------------------------
# chi-square tail via regularized incomplete gamma
# --------------------------------------------------------------------------

def _gamma_p_series(a: float, x: float, tol: float = 1e-16,
                    max_iter: int = 1000) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * tol:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_continued_fraction(a: float, x: float, tol: float = 1e-16,
                                max_iter: int = 1000) -> float:
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iter):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x), for a > 0, x >= 0."""
    if a <= 0:
        raise ConfigError(f"shape parameter must be positive, got {a}")
    if x < 0:
        raise ConfigError(f"argument must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - _gamma_q_continued_fraction(a, x)


def chi_square_upper_tail(statistic: float, df: int) -> float:
    """P(chi2_df > statistic); returns 1 for nonpositive statistics."""
    if df < 1:
        raise ConfigError(f"degrees of freedom must be >= 1, got {df}")
    if statistic <= 0.0:
        return 1.0
    a, x = 0.5 * df, 0.5 * statistic
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_continued_fraction(a, x)


# --------------------------------------------------------------------------
# the tests
# --------------------------------------------------------------------------

@dataclass
class IIATestResult:
    statistic: float
    df: int
    p_value: float
    dropped_category: int
    method: str
    note: str = ""


def _drop_category(data: Dataset, drop: int):
    """Subsample without category ``drop``, relabelled to 1..K-1."""
    keep_rows = data.y != drop
    kept = np.array([k for k in range(1, data.n_categories + 1) if k != drop])
    new_y = np.searchsorted(kept, data.y[keep_rows]) + 1
    labels = tuple(data.labels[k - 1] for k in kept) if data.labels else ()
    restricted = Dataset(y=new_y, x=data.x[keep_rows], t=data.t[keep_rows],
                         n_categories=data.n_categories - 1, labels=labels)
    return restricted, kept


def _shared_rows(full, drop):
    """Row indices of the full fit whose categories survive the drop."""
    return np.flatnonzero(full.categories != drop)


def _check_drop(data, drop, reference):
    if data.n_categories < 3:
        raise ConfigError("IIA tests need at least 3 categories")
    if drop == reference:
        raise ConfigError("cannot drop the reference category")
    if not 1 <= drop <= data.n_categories:
        raise ConfigError(f"drop category {drop} outside 1..{data.n_categories}")


def hausman_mcfadden(data: Dataset, drop: int, *,
                     reference: int | None = None,
                     include_smooth: bool = True, tol: float = 1e-8,
                     max_iter: int = 100) -> IIATestResult:
    """Hausman-McFadden IIA test dropping one non-reference category.

    statistic = d' (V_r - V_f)^{-1} d over the shared coefficients, where
    d is the restricted-minus-full coefficient difference.  When the
    covariance difference is not positive definite, a generalized inverse
    is used and the result carries a note.
    """
    reference = data.n_categories if reference is None else reference
    _check_drop(data, drop, reference)
    full = fit_parametric(data, reference=reference,
                          include_smooth=include_smooth, tol=tol,
                          max_iter=max_iter)
    restricted_data, kept = _drop_category(data, drop)
    new_ref = int(np.searchsorted(kept, reference) + 1)
    restricted = fit_parametric(restricted_data, reference=new_ref,
                                include_smooth=include_smooth, tol=tol,
                                max_iter=max_iter)

    rows = _shared_rows(full, drop)
    pp = full.coefficients.shape[1]
    flat = np.concatenate([np.arange(r * pp, (r + 1) * pp) for r in rows])
    d = restricted.coefficients.ravel() - full.coefficients[rows].ravel()
    V = restricted.vcov - full.vcov[np.ix_(flat, flat)]

    note = ""
    try:
        np.linalg.cholesky(V)
        statistic = float(d @ np.linalg.solve(V, d))
    except np.linalg.LinAlgError:
        statistic = float(d @ np.linalg.pinv(V) @ d)
        note = "covariance difference not positive definite; generalized inverse used"
    if statistic < 0:
        note = (note + "; " if note else "") + "negative statistic (finite-sample pathology)"
    df = d.size
    return IIATestResult(statistic=statistic, df=df,
                         p_value=chi_square_upper_tail(statistic, df),
                         dropped_category=drop, method="HausmanMcFadden",
                         note=note)


def small_hsiao(data: Dataset, drop: int, seed: int, *,
                reference: int | None = None, include_smooth: bool = True,
                tol: float = 1e-8, max_iter: int = 100) -> IIATestResult:
    """Small-Hsiao IIA test with a seeded random half-split.

    Full-model fits on both halves are blended as
    ``beta_AB = beta_A / sqrt(2) + (1 - 1/sqrt(2)) beta_B``; the statistic
    is the likelihood-ratio distance, on the restricted half-B sample,
    between that blend and the restricted refit.
    """
    reference = data.n_categories if reference is None else reference
    _check_drop(data, drop, reference)

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    perm = rng.permutation(data.n)
    half_a = data.subset(np.sort(perm[:data.n // 2]))
    half_b = data.subset(np.sort(perm[data.n // 2:]))
    for half, name in ((half_a, "A"), (half_b, "B")):
        if np.any(half.category_counts() == 0):
            raise InsufficientDataError(
                f"half-sample {name} lost a category; need more data")

    fit_a = fit_parametric(half_a, reference=reference,
                           include_smooth=include_smooth, tol=tol,
                           max_iter=max_iter)
    fit_b = fit_parametric(half_b, reference=reference,
                           include_smooth=include_smooth, tol=tol,
                           max_iter=max_iter)
    blend = _SQRT_HALF * fit_a.coefficients + (1.0 - _SQRT_HALF) * fit_b.coefficients

    restricted_b, kept = _drop_category(half_b, drop)
    new_ref = int(np.searchsorted(kept, reference) + 1)
    rows = _shared_rows(fit_b, drop)
    ll_blend = coefficient_log_likelihood(restricted_b, blend[rows], new_ref,
                                          include_smooth=include_smooth)
    refit = fit_parametric(restricted_b, reference=new_ref,
                           include_smooth=include_smooth, tol=tol,
                           max_iter=max_iter)
    statistic = float(-2.0 * (ll_blend - refit.loglik))
    df = refit.coefficients.size
    return IIATestResult(statistic=statistic, df=df,
                         p_value=chi_square_upper_tail(statistic, df),
                         dropped_category=drop, method="SmallHsiao")


def iia_all_permutations(data: Dataset, method: str, seed: int = 0, *,
                         reference: int | None = None,
                         include_smooth: bool = True) -> list:
    """Run one IIA test per eligible dropped category.

    Individual failures become entries with NaN statistics and the error
    message in the note; they do not abort the batch.
    """
    reference = data.n_categories if reference is None else reference
    if method not in ("HausmanMcFadden", "SmallHsiao"):
        raise ConfigError(f"unknown IIA test method {method!r}")
    results = []
    for drop in nonreference_categories(data.n_categories, reference):
        try:
            if method == "HausmanMcFadden":
                res = hausman_mcfadden(data, int(drop), reference=reference,
                                       include_smooth=include_smooth)
            else:
                res = small_hsiao(data, int(drop), seed, reference=reference,
                                  include_smooth=include_smooth)
        except Exception as err:  # per-entry failure, not fatal
            res = IIATestResult(statistic=float("nan"), df=0,
                                p_value=float("nan"), dropped_category=int(drop),
                                method=method, note=f"failed: {err}")
        results.append(res)
    return results
