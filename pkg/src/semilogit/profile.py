"""Semiparametric MNL estimation by kernel-smoothed profile likelihood.

The predictor of category k is ``x' beta_k + m_k(t)`` with unknown smooth
``m_k``.  For fixed coefficients, each ``m_k(t)`` solves a kernel-weighted
first-order condition (a local likelihood in one scalar); the coefficient
update is a Newton step on the profile score, which tracks the dependence
of the smooth part on the coefficients through the gradient of the least
favourable curve.  The fitter alternates:

  step 2   per category, one Newton step on beta using
           u_i = x_i + dm/dbeta(t_i),
           score  = sum_i l'_ik u_i,  curvature B = sum_i l''_ik u_i u_i'
  step 3   per category, one local Newton step of m at every observation
           point (all points from one frozen snapshot)

sweeping categories in index order with the freshest values (Gauss-Seidel
across categories).  The smooth values are solved to stationarity at the
starting coefficients before the first iteration, and the recorded trace
is the profile log-likelihood (the joint log-likelihood with m on the
least favourable curve of the current coefficients).  A step-halving
guard keeps that trace nondecreasing: when a proposed step would lower
it, the coefficient move is damped and m re-solved at the damped
coefficients.

Identifiability: the reference category's beta row and m row are
structurally zero and never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    Dataset,
    dataset_log_likelihood,
    linear_predictors,
    nonreference_categories,
    sigmoid,
)
from .exceptions import (
    ConfigError,
    NoLocalDataError,
    NonIdentifiedError,
    NumericalFailureError,
    ShapeError,
)
from .kernels import KernelConfig, kernel_weights
from .parametric import fit_parametric

# Local Newton steps are clipped to this magnitude: one-sided local
# likelihoods (separation under tiny effective weight) otherwise diverge.
STEP_CAP = 5.0

_BLOCK_DOUBLES = 4_000_000  # ~32 MB per temporary block
_CACHE_LIMIT = 6000         # cache the full weight matrix up to this n
_BURNIN_SWEEPS = 200        # cap on initial least-favourable-curve solves


@dataclass
class SmoothState:
    """Current (beta, m) iterate; rows ordered by non-reference category."""

    beta: np.ndarray         # (K-1, p)
    m: np.ndarray            # (K-1, n), values at the observation points
    reference: int
    m_grad: np.ndarray | None = None   # (K-1, n, p), dm/dbeta_k at t_i

    def __post_init__(self):
        self.beta = np.atleast_2d(np.asarray(self.beta, dtype=np.float64))
        self.m = np.atleast_2d(np.asarray(self.m, dtype=np.float64))
        if not (np.all(np.isfinite(self.beta)) and np.all(np.isfinite(self.m))):
            raise NumericalFailureError("state contains non-finite values")
        if self.beta.shape[0] != self.m.shape[0]:
            raise ShapeError("beta and m disagree on the number of categories")

    @property
    def n_categories(self) -> int:
        return self.beta.shape[0] + 1

    def categories(self) -> np.ndarray:
        return nonreference_categories(self.n_categories, self.reference)

    def row_of(self, k: int) -> int:
        cats = self.categories()
        idx = np.flatnonzero(cats == k)
        if idx.size == 0:
            raise ShapeError(f"category {k} is the reference or out of range")
        return int(idx[0])

    def copy(self) -> "SmoothState":
        return SmoothState(self.beta.copy(), self.m.copy(), self.reference)


@dataclass
class SemiparametricFitResult:
    beta: np.ndarray               # (K-1, p)
    beta_se: np.ndarray            # profile-information SEs, same layout
    smooth: SmoothState
    loglik: float                  # final profile log-likelihood
    loglik_trace: list             # profile log-likelihood per outer iteration
    converged: bool
    iterations: int
    kernel: KernelConfig
    reference: int
    categories: np.ndarray
    warnings: list = field(default_factory=list)
    options: dict = field(default_factory=dict)


class _WeightCache:
    """Kernel weights between observation points, cached when affordable."""

    def __init__(self, kernel: KernelConfig, T: np.ndarray):
        self.kernel = kernel
        self.T = T
        n = T.shape[0]
        self.block_rows = max(1, _BLOCK_DOUBLES // max(n, 1))
        self._full = None
        if n <= _CACHE_LIMIT:
            self._full = np.vstack([self._compute(i, min(i + self.block_rows, n))
                                    for i in range(0, n, self.block_rows)])

    def _compute(self, start, stop):
        z = (self.T[start:stop, None, :] - self.T[None, :, :]) / self.kernel.bandwidths
        norm = float(np.prod(1.0 / (np.sqrt(2.0 * np.pi) * self.kernel.bandwidths)))
        return norm * np.exp(-0.5 * np.sum(z * z, axis=2))

    def rows(self, start, stop):
        if self._full is not None:
            return self._full[start:stop]
        return self._compute(start, stop)


def _row_for(state: SmoothState, k: int) -> int:
    return state.row_of(k)


def _fixed_logit_parts(data: Dataset, state: SmoothState, row: int) -> np.ndarray:
    """Per-observation g such that p_ik(mu) = sigmoid(g_i + mu).

    g collapses the categories other than k (including the reference's
    zero predictor) into one observation-level offset; the candidate
    value of m_k at the query point enters only through mu.
    """
    A = data.x @ state.beta.T + state.m.T          # (n, K-1), at obs points
    c = A[:, row] - state.m[row]                    # x' beta_k alone
    other = np.delete(A, row, axis=1)
    if other.shape[1]:
        M = np.maximum(other.max(axis=1), 0.0)
        S = np.exp(-M) + np.exp(other - M[:, None]).sum(axis=1)
    else:
        M = np.zeros(data.n)
        S = np.ones(data.n)
    return c - M - np.log(S)


def local_smoothed_score(data: Dataset, k: int, t, m_value: float,
                         state: SmoothState, kernel: KernelConfig) -> tuple:
    """Kernel-weighted first-order condition pieces at a query point.

    Returns ``(sum_i w_i l'_ik, sum_i w_i l''_ik)`` where the predictor of
    observation i carries the candidate ``m_value`` in its category-k slot
    and the state's values (at the observation points) everywhere else.
    """
    row = _row_for(state, k)
    w = kernel_weights(kernel, t, data.t)
    if w.sum() == 0.0:
        raise NoLocalDataError("all kernel weights vanished at the query point")
    g = _fixed_logit_parts(data, state, row)
    p = sigmoid(g + m_value)
    yk = (data.y == k).astype(np.float64)
    score = float(w @ (yk - p))
    curvature = float(-(w @ (p * (1.0 - p))))
    return score, curvature


def local_m_update(data: Dataset, k: int, t, m_value: float,
                   state: SmoothState, kernel: KernelConfig,
                   step_cap: float = STEP_CAP) -> float:
    """One Newton step of the local likelihood in m_k(t)."""
    score, curvature = local_smoothed_score(data, k, t, m_value, state, kernel)
    if curvature >= 0.0:
        raise NumericalFailureError(
            f"nonnegative local curvature {curvature} at query point")
    step = -score / curvature
    return m_value + float(np.clip(step, -step_cap, step_cap))


def m_gradient(data: Dataset, k: int, t, m_value: float,
               state: SmoothState, kernel: KernelConfig) -> np.ndarray:
    """Gradient of the least favourable curve at t with respect to beta_k.

    The curvature-weighted average ``-(sum w l'' x) / (sum w l'')``; each
    component lies in the convex hull of the negated covariate values.
    """
    row = _row_for(state, k)
    w = kernel_weights(kernel, t, data.t)
    g = _fixed_logit_parts(data, state, row)
    p = sigmoid(g + m_value)
    lpp = -(p * (1.0 - p))
    den = w @ lpp
    if den == 0.0:
        raise NumericalFailureError("zero curvature sum in least-favourable gradient")
    num = (w * lpp) @ data.x
    return -num / den


def _m_gradients_all(data, state, row, wcache):
    """dm_k/dbeta_k at every observation point, shape (n, p)."""
    g = _fixed_logit_parts(data, state, row)
    mu = state.m[row]
    n = data.n
    num = np.empty((n, data.p))
    den = np.empty(n)
    for start in range(0, n, wcache.block_rows):
        stop = min(start + wcache.block_rows, n)
        W = wcache.rows(start, stop)
        P = sigmoid(g[None, :] + mu[start:stop, None])
        WL = W * (P * (1.0 - P))     # = -W * l''
        num[start:stop] = WL @ data.x
        den[start:stop] = WL.sum(axis=1)
    if np.any(den == 0.0):
        raise NumericalFailureError("zero curvature sum in least-favourable gradient")
    return -num / den[:, None]       # -(sum w l'' x)/(sum w l'')


def _joint_loglik(data, beta, m, reference):
    eta = linear_predictors(beta, m, data.x, reference)
    return dataset_log_likelihood(data, eta)


def _beta_direction(data, state, row, k, wcache) -> np.ndarray:
    """Raw Newton direction -B^{-1} s on the profile score of category k.

    ``s = sum_i l'_ik u_i`` and ``B = sum_i l''_ik u_i u_i'`` with
    ``u_i = x_i + dm/dbeta_k(t_i)``.  Components are clipped at 10 so a
    badly scaled early step cannot fling the iterate into saturation.
    """
    mgrad = _m_gradients_all(data, state, row, wcache)
    u = data.x + mgrad
    g = _fixed_logit_parts(data, state, row)
    p = sigmoid(g + state.m[row])
    yk = (data.y == k).astype(np.float64)
    lp = yk - p
    lpp = -(p * (1.0 - p))
    score = u.T @ lp
    B = (u * lpp[:, None]).T @ u
    try:
        direction = -np.linalg.solve(B, score)
    except np.linalg.LinAlgError:
        raise NonIdentifiedError(
            "singular profile curvature for category "
            f"{k} (cond={np.linalg.cond(B):.3e})") from None
    return np.clip(direction, -10.0, 10.0)


def _resolve_m_row(data, state, row, k, wcache, tol=1e-9, max_sweeps=60,
                   step_cap=STEP_CAP):
    """Iterate local Newton steps of m_k to (near) stationarity."""
    for _ in range(max_sweeps):
        mu, _ = _m_sweep(data, state, row, k, wcache, tol, 1, step_cap)
        delta = float(np.abs(mu - state.m[row]).max())
        state.m[row] = mu
        if delta < tol:
            break
    return state


def beta_update(data: Dataset, k: int, state: SmoothState,
                kernel: KernelConfig, max_halvings: int = 30,
                wcache: _WeightCache | None = None) -> np.ndarray:
    """One Newton step on the profile score for category k's coefficients.

    The step is halved while the profile log-likelihood of the trial
    coefficients decreases; since the smooth part re-adjusts to any
    coefficient move, each trial re-solves m_k on a scratch copy before
    comparing.  Checking the likelihood at frozen m instead would veto
    genuine profile-ascent steps.
    """
    row = _row_for(state, k)
    if wcache is None:
        wcache = _WeightCache(kernel, data.t)
    direction = _beta_direction(data, state, row, k, wcache)

    ll = _joint_loglik(data, state.beta, state.m, state.reference)
    step = 1.0
    for _ in range(max_halvings + 1):
        trial = state.copy()
        trial.beta[row] = state.beta[row] + step * direction
        _resolve_m_row(data, trial, row, k, wcache)
        if _joint_loglik(data, trial.beta, trial.m, state.reference) >= ll - 1e-12:
            return trial.beta[row]
        step *= 0.5
    return state.beta[row].copy()


def _m_sweep(data, state, row, k, wcache, inner_tol, inner_max_iter, step_cap):
    """Local Newton steps of m_k at all observation points (one snapshot).

    Returns the new m row and the number of cap-clipped updates.
    """
    g = _fixed_logit_parts(data, state, row)
    yk = (data.y == k).astype(np.float64)
    mu = state.m[row].copy()
    n = data.n
    cap_hits = 0
    for _ in range(inner_max_iter):
        delta = np.empty(n)
        for start in range(0, n, wcache.block_rows):
            stop = min(start + wcache.block_rows, n)
            W = wcache.rows(start, stop)
            P = sigmoid(g[None, :] + mu[start:stop, None])
            score = W @ yk - (W * P).sum(axis=1)
            curv = -(W * (P * (1.0 - P))).sum(axis=1)
            if np.any(curv >= 0.0):
                raise NumericalFailureError(
                    "nonnegative local curvature during m sweep")
            delta[start:stop] = -score / curv
        clipped = np.clip(delta, -step_cap, step_cap)
        cap_hits += int(np.count_nonzero(np.abs(delta) > step_cap))
        mu = mu + clipped
        if np.abs(clipped).max() < inner_tol:
            break
    return mu, cap_hits


def _resolve_all_m(data, state, cats, wcache, tol, step_cap,
                   max_sweeps=_BURNIN_SWEEPS):
    """Gauss-Seidel sweeps of all m rows until the curve is stationary.

    Returns the worst per-sweep fraction of cap-clipped local updates.
    """
    n_updates = data.n * len(cats)
    worst_cap = 0.0
    for _ in range(max_sweeps):
        delta = 0.0
        hits_total = 0
        for row, k in enumerate(cats):
            mu, hits = _m_sweep(data, state, row, int(k), wcache, tol, 1,
                                step_cap)
            delta = max(delta, float(np.abs(mu - state.m[row]).max()))
            hits_total += hits
            state.m[row] = mu
        worst_cap = max(worst_cap, hits_total / n_updates)
        if delta < tol:
            break
    return worst_cap


def starting_state(data: Dataset, reference: int) -> SmoothState:
    """Step-1 starting values from a parametric MNL with linear t terms.

    beta starts at the x-block slopes; m starts at the intercept plus the
    fitted linear t-part, so it has the right vertical location and a
    rough slope.
    """
    par = fit_parametric(data, reference=reference, include_smooth=True)
    p = data.p
    beta0 = par.coefficients[:, 1:1 + p].copy()
    t_slopes = par.coefficients[:, 1 + p:]
    m0 = par.coefficients[:, [0]] + t_slopes @ data.t.T
    return SmoothState(beta0, m0, reference)


def fit_semiparametric(data: Dataset, kernel: KernelConfig, *,
                       reference: int | None = None, tol: float = 1e-6,
                       max_iter: int = 200, inner_tol: float = 1e-10,
                       inner_max_iter: int = 1, step_cap: float = STEP_CAP,
                       start: SmoothState | None = None) -> SemiparametricFitResult:
    """Profile-likelihood Newton-Raphson fit of the semiparametric MNL.

    Alternates coefficient updates and local smooth updates until the
    max-norm change of (beta, m) falls below ``tol``.  The recorded
    ``loglik_trace`` is the profile log-likelihood and never decreases:
    a guard damps the coefficient move (re-solving the smooth part at
    the damped coefficients) whenever it would.  ``inner_max_iter`` > 1
    lets each m sweep iterate its local solves to ``inner_tol`` instead
    of taking a single step.

    The smoothed-score equations and the measured profile likelihood
    disagree by a small finite-sample gap (kernel-weighted conditions
    versus a plain-sum likelihood); if the guard caps convergence at
    that gap, the result carries a warning quoting the residual.
    """
    K = data.n_categories
    reference = K if reference is None else reference
    if data.q == 0:
        raise ConfigError("semiparametric fit needs at least one smooth covariate")
    if kernel.q != data.q:
        raise ShapeError(f"kernel has {kernel.q} bandwidths, data has q={data.q}")
    cats = nonreference_categories(K, reference)

    state = starting_state(data, reference) if start is None else start.copy()
    wcache = _WeightCache(kernel, data.t)
    warnings: list = []
    resolve_tol = min(tol, 1e-9)

    # Solve the local problems at the starting coefficients first, so the
    # recorded trace is a profile-likelihood trace: every entry has m on
    # (or near) the least favourable curve of the current coefficients.
    # Without this, starting values with a linear t-part would force the
    # joint likelihood downhill before the profile iteration can begin.
    # The burn-in uses the same curve precision as later trace points;
    # a sloppier start would register the remaining polish as a dip.
    worst_cap_fraction = _resolve_all_m(data, state, cats, wcache,
                                        resolve_tol, step_cap)

    ll = _joint_loglik(data, state.beta, state.m, reference)
    trace = [ll]
    converged = False
    iterations = 0
    damped_streak = 0
    for iterations in range(1, max_iter + 1):
        beta_prev = state.beta.copy()
        m_prev = state.m.copy()

        for row, k in enumerate(cats):
            state.beta[row] = state.beta[row] + _beta_direction(
                data, state, row, int(k), wcache)
        beta_prop = state.beta.copy()

        sweep_delta = 0.0
        cap_hits = 0
        for row, k in enumerate(cats):
            mu, hits = _m_sweep(data, state, row, int(k), wcache,
                                inner_tol, inner_max_iter, step_cap)
            sweep_delta = max(sweep_delta, float(np.abs(mu - state.m[row]).max()))
            state.m[row] = mu
            cap_hits += hits
        worst_cap_fraction = max(worst_cap_fraction,
                                 cap_hits / (data.n * (K - 1)))

        # The trace records the profile log-likelihood: the joint
        # log-likelihood with m on the least favourable curve of the
        # current coefficients.  The raw joint value at a lagging m is
        # not comparable across iterations (relaxing m onto the curve
        # legitimately lowers it), so when the m sweep has not yet
        # landed, evaluate on a scratch re-solve.
        if sweep_delta < 1e-8:
            ll_new = _joint_loglik(data, state.beta, state.m, reference)
        else:
            scratch = state.copy()
            cap = _resolve_all_m(data, scratch, cats, wcache, resolve_tol,
                                 step_cap)
            worst_cap_fraction = max(worst_cap_fraction, cap)
            ll_new = _joint_loglik(data, scratch.beta, scratch.m, reference)

        # Step-halving guard: if the profile likelihood would fall,
        # halve the coefficient move and re-solve the smooth part at the
        # damped coefficients until the trace is nondecreasing again.
        # The smoothed-score fixed point does not maximise the measured
        # profile likelihood exactly (the local conditions are kernel
        # weighted, the likelihood is a plain sum), so near convergence
        # the guard may cap the residual of the smoothed-score equations
        # at the size of that finite-sample gap; the two targets differ
        # by a statistically negligible amount.
        lam = 1.0
        guard_failed = False
        if ll_new < ll - 1e-9:
            for _ in range(60):
                lam *= 0.5
                state.beta = beta_prev + lam * (beta_prop - beta_prev)
                state.m = m_prev.copy()
                cap = _resolve_all_m(data, state, cats, wcache, resolve_tol,
                                     step_cap)
                worst_cap_fraction = max(worst_cap_fraction, cap)
                ll_new = _joint_loglik(data, state.beta, state.m, reference)
                if ll_new >= ll - 1e-9:
                    break
            else:
                guard_failed = True
        if guard_failed:
            state.beta, state.m = beta_prev, m_prev
            warnings.append(
                f"trace guard exhausted halvings at iteration {iterations}")
            break

        delta = max(float(np.abs(state.beta - beta_prev).max(initial=0.0)),
                    float(np.abs(state.m - m_prev).max()))
        ll = ll_new
        trace.append(ll)
        if delta < tol:
            converged = True
            if lam < 1.0:
                raw = float(np.abs(beta_prop - beta_prev).max(initial=0.0))
                warnings.append(
                    "converged under an active trace guard: the smoothed-score "
                    f"equations are satisfied to about {raw:.1e} instead of {tol:g}")
            break
        if lam < 1.0:
            damped_streak += 1
            if damped_streak >= 5:
                warnings.append(
                    "stopping: the monotone-trace guard keeps damping the "
                    "smoothed-score Newton steps (residual gap "
                    f"~{np.abs(beta_prop - beta_prev).max(initial=0.0):.1e})")
                break
        else:
            damped_streak = 0

    if not converged:
        warnings.append(f"no convergence after {iterations} iterations")
    if worst_cap_fraction > 0.10:
        warnings.append(
            "ill-conditioned local likelihoods: step cap hit at "
            f"{worst_cap_fraction:.1%} of points in some sweep")

    beta_se, m_grad = _profile_standard_errors(data, state, wcache, cats)
    state.m_grad = m_grad
    return SemiparametricFitResult(
        beta=state.beta.copy(), beta_se=beta_se, smooth=state, loglik=ll,
        loglik_trace=trace, converged=converged, iterations=iterations,
        kernel=kernel, reference=reference, categories=cats,
        warnings=warnings,
        options={"tol": tol, "max_iter": max_iter, "inner_tol": inner_tol,
                 "inner_max_iter": inner_max_iter, "step_cap": step_cap},
    )


def _profile_standard_errors(data, state, wcache, cats):
    """Profile-information SEs: sqrt(diag((-B)^{-1})) per category block."""
    Km1 = len(cats)
    se = np.full((Km1, data.p), np.nan)
    m_grad = np.empty((Km1, data.n, data.p))
    for row, k in enumerate(cats):
        mgrad = _m_gradients_all(data, state, row, wcache)
        m_grad[row] = mgrad
        u = data.x + mgrad
        g = _fixed_logit_parts(data, state, row)
        p = sigmoid(g + state.m[row])
        lpp = -(p * (1.0 - p))
        B = (u * lpp[:, None]).T @ u
        if data.p == 0:
            continue
        try:
            cov = np.linalg.inv(-B)
            se[row] = np.sqrt(np.clip(np.diagonal(cov), 0.0, None))
        except np.linalg.LinAlgError:
            pass
    return se, m_grad


def profile_scores(data: Dataset, state: SmoothState,
                   kernel: KernelConfig) -> np.ndarray:
    """Profile score sum_i l'_ik (x_i + dm/dbeta_k(t_i)) per category, (K-1, p)."""
    wcache = _WeightCache(kernel, data.t)
    cats = state.categories()
    out = np.empty((len(cats), data.p))
    for row, k in enumerate(cats):
        mgrad = _m_gradients_all(data, state, row, wcache)
        u = data.x + mgrad
        g = _fixed_logit_parts(data, state, row)
        p = sigmoid(g + state.m[row])
        yk = (data.y == int(k)).astype(np.float64)
        out[row] = u.T @ (yk - p)
    return out


def _solve_m_at_points(data, state, row, k, kernel, Tq,
                       inner_tol=1e-10, max_steps=200, step_cap=STEP_CAP):
    """Solve the local first-order condition at arbitrary points, (G,)."""
    Tq = np.atleast_2d(np.asarray(Tq, dtype=np.float64))
    if Tq.shape[1] != data.q:
        raise ShapeError(f"query points must have dimension {data.q}")
    g = _fixed_logit_parts(data, state, row)
    yk = (data.y == k).astype(np.float64)
    G = Tq.shape[0]
    mu = np.empty(G)
    block = max(1, _BLOCK_DOUBLES // max(data.n, 1))
    for start in range(0, G, block):
        stop = min(start + block, G)
        W = np.vstack([kernel_weights(kernel, tq, data.t) for tq in Tq[start:stop]])
        sums = W.sum(axis=1)
        if np.any(sums == 0.0):
            raise NoLocalDataError("all kernel weights vanished at a query point")
        # seed from the most-weighted (nearest) observation point
        mub = state.m[row][np.argmax(W, axis=1)].astype(np.float64)
        for _ in range(max_steps):
            P = sigmoid(g[None, :] + mub[:, None])
            score = W @ yk - (W * P).sum(axis=1)
            curv = -(W * (P * (1.0 - P))).sum(axis=1)
            if np.any(curv >= 0.0):
                raise NumericalFailureError(
                    "nonnegative local curvature at a query point")
            delta = np.clip(-score / curv, -step_cap, step_cap)
            mub = mub + delta
            if np.abs(delta).max() < inner_tol:
                break
        mu[start:stop] = mub
    return mu


def predict_probabilities(fit: SemiparametricFitResult, data: Dataset,
                          x_new, t_new) -> np.ndarray:
    """Category probabilities at a new covariate point.

    Each m_k(t_new) is re-solved from the fitted state (coefficients
    fixed), seeded at the nearest observation point's value; the
    probabilities then follow from the softmax of the new predictors.
    """
    x_new = np.atleast_1d(np.asarray(x_new, dtype=np.float64))
    t_new = np.atleast_1d(np.asarray(t_new, dtype=np.float64))
    if x_new.shape != (data.p,) or t_new.shape != (data.q,):
        raise ShapeError(f"expected x of length {data.p} and t of length {data.q}")
    probs = predict_surface(fit, data, t_new[None, :], x_new)
    return probs[0]


def predict_surface(fit: SemiparametricFitResult, data: Dataset,
                    T_new, x_fixed) -> np.ndarray:
    """Probabilities over many smooth-covariate points at fixed x, (G, K)."""
    T_new = np.atleast_2d(np.asarray(T_new, dtype=np.float64))
    x_fixed = np.atleast_1d(np.asarray(x_fixed, dtype=np.float64))
    state = fit.smooth
    K = data.n_categories
    inner_tol = fit.options.get("inner_tol", 1e-10)
    eta = np.zeros((T_new.shape[0], K))
    for row, k in enumerate(fit.categories):
        m_new = _solve_m_at_points(data, state, row, int(k), fit.kernel,
                                   T_new, inner_tol=inner_tol)
        eta[:, int(k) - 1] = x_fixed @ fit.beta[row] + m_new
    shifted = eta - eta.max(axis=1, keepdims=True)
    w = np.exp(shifted)
    return w / w.sum(axis=1, keepdims=True)
