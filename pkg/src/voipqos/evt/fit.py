"""Maximum-likelihood GEV fitting via safeguarded Newton-Raphson.

The likelihood is maximized over theta = (xi, sigma, mu) with gradient
and Hessian formed by central finite differences (relative step 1e-6).
Steps are damped by halving until the support constraint
``1 + xi (z_i - mu) / sigma > 0`` holds for every point and the
log-likelihood does not decrease, so the iterate sequence is monotone.
When the negated Hessian is not positive-definite the step falls back
to a ridge-shifted solve whose large-shift limit is steepest ascent,
with a doubling line search so off-scale starts can still travel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import (
    DegenerateData,
    DomainError,
    EmptyData,
    NotConverged,
    TooFewPoints,
)
from .gev import (
    FitRegime,
    GevParams,
    TailKind,
    _loglik_kernel,
    classify,
    gev_cdf,
)

#: Fitting refuses fewer points than this as statistically meaningless.
MIN_FIT_POINTS = 20

_FD_REL_STEP = 1e-6
_MAX_HALVINGS = 30
_EULER_GAMMA = 0.5772  # Gumbel moment initializer constant

# Standard Gumbel quantiles used by the robust fallback initializer.
_GUMBEL_IQR = 1.5725263099630333  # Q(0.75) - Q(0.25)
_GUMBEL_MEDIAN = 0.36651292058166435  # Q(0.5) = -ln ln 2


@dataclass(frozen=True)
class GevFit:
    """Result of a maximum-likelihood GEV fit."""

    params: GevParams
    loglik: float
    bic: float
    e_max: float
    tail: TailKind
    regime: FitRegime
    iterations: int
    converged: bool
    n: int

    def notes(self) -> list[str]:
        """Human-readable caveats about the fitted shape."""
        out = []
        if self.params.xi >= 1.0:
            out.append(
                "shape >= 1: fitted distribution has no finite mean "
                "(extremely heavy tail)"
            )
        if self.regime is FitRegime.ATTAINABLE:
            out.append("shape <= -0.5: standard asymptotic errors do not apply")
        elif self.regime is FitRegime.UNRELIABLE:
            out.append("shape <= -1: maximum-likelihood estimation unreliable")
        if not self.converged:
            out.append("iteration budget exhausted before the step tolerance")
        return out

    def to_json_dict(self) -> dict:
        return {
            "xi": self.params.xi,
            "sigma": self.params.sigma,
            "mu": self.params.mu,
            "e_max": self.e_max,
            "bic": self.bic,
            "tail": self.tail.value,
            "regime": self.regime.value,
            "loglik": self.loglik,
            "n": self.n,
            "iterations": self.iterations,
            "converged": self.converged,
            "notes": self.notes(),
        }


def ks_distance(data, cdf: Callable) -> float:
    """Kolmogorov-Smirnov distance between ``data`` and a model CDF.

    Evaluates the supremum gap at both sides of every empirical step:
    max over sorted z_i of max(|i/n - D(z_i)|, |(i-1)/n - D(z_i)|).
    """
    z = np.sort(np.asarray(data, dtype=float))
    n = z.size
    if n == 0:
        raise EmptyData("KS distance needs at least one data point")
    d = np.asarray(cdf(z), dtype=float)
    if d.shape != z.shape:  # scalar-only callable
        d = np.array([float(cdf(v)) for v in z])
    hi = np.arange(1, n + 1, dtype=float) / n
    lo = np.arange(0, n, dtype=float) / n
    return float(np.max(np.maximum(np.abs(hi - d), np.abs(lo - d))))


def _moment_init(z: np.ndarray) -> np.ndarray:
    s = float(np.std(z, ddof=1))
    sigma0 = s * math.sqrt(6.0) / math.pi
    return np.array([0.1, sigma0, float(np.mean(z)) - _EULER_GAMMA * sigma0])


def _quantile_init(z: np.ndarray) -> np.ndarray:
    # Gumbel quantile matching on median/IQR; immune to wild tail values.
    q25, med, q75 = np.quantile(z, [0.25, 0.5, 0.75])
    sigma0 = max((q75 - q25) / _GUMBEL_IQR, 1e-12)
    return np.array([0.1, sigma0, med - _GUMBEL_MEDIAN * sigma0])


def _fd_once(f: Callable, theta: np.ndarray, h: np.ndarray):
    g = np.empty(3)
    hess = np.empty((3, 3))
    f0 = f(theta)
    for i in range(3):
        tp = theta.copy()
        tp[i] += h[i]
        tm = theta.copy()
        tm[i] -= h[i]
        fp, fm = f(tp), f(tm)
        g[i] = (fp - fm) / (2.0 * h[i])
        hess[i, i] = (fp - 2.0 * f0 + fm) / h[i] ** 2
    for i in range(3):
        for j in range(i + 1, 3):
            tpp = theta.copy()
            tpp[i] += h[i]
            tpp[j] += h[j]
            tpm = theta.copy()
            tpm[i] += h[i]
            tpm[j] -= h[j]
            tmp = theta.copy()
            tmp[i] -= h[i]
            tmp[j] += h[j]
            tmm = theta.copy()
            tmm[i] -= h[i]
            tmm[j] -= h[j]
            hess[i, j] = hess[j, i] = (f(tpp) - f(tpm) - f(tmp) + f(tmm)) / (
                4.0 * h[i] * h[j]
            )
    return g, 0.5 * (hess + hess.T)


def _grad_hess(f: Callable, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference gradient and symmetrized Hessian of ``f``.

    Near the support boundary a probe point can fall off-support and turn
    a difference into inf-inf; the step is then halved until every probe
    evaluates, since the support set is open around any feasible theta.
    """
    h = _FD_REL_STEP * np.maximum(np.abs(theta), 1.0)
    with np.errstate(invalid="ignore", over="ignore"):
        for _ in range(45):
            g, hess = _fd_once(f, theta, h)
            if np.all(np.isfinite(g)) and np.all(np.isfinite(hess)):
                break
            h = h * 0.5
    return g, hess


def _is_positive_definite(a: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(a)
        return True
    except np.linalg.LinAlgError:
        return False


def _backtrack(f, theta, ll, direction):
    """Halve along ``direction`` until the log-likelihood does not decrease."""
    scale = 1.0
    for _ in range(_MAX_HALVINGS):
        cand = theta + scale * direction
        llc = f(cand)
        if math.isfinite(llc) and llc >= ll:
            return cand, llc, scale
        scale *= 0.5
    return None, ll, 0.0


def _expand(f, theta, direction, best, best_ll, limit):
    """Greedy doubling along ``direction`` past the unit step."""
    k = 2.0
    while k <= limit:
        cand = theta + k * direction
        llc = f(cand)
        if math.isfinite(llc) and llc > best_ll:
            best, best_ll = cand, llc
            k *= 2.0
        else:
            break
    return best, best_ll


def fit_gev_mle(data, tol: float = 1e-8, max_iter: int = 200) -> GevFit:
    """Fit a GEV by damped Newton-Raphson on the log-likelihood.

    Starts from Gumbel moment estimates (scale ``s sqrt(6)/pi``, location
    ``mean - 0.5772 scale``, shape 0.1); when the negated Hessian at that
    start is not positive-definite (the symptom of tail-dominated sample
    moments) the start is rebuilt from Gumbel quantile matching instead.
    Convergence is declared when every Newton step component is below
    ``tol`` relative to its parameter scale ``max(1, |theta_i|)``.

    Raises :class:`NotConverged` (carrying the best fit reached) when the
    iteration budget runs out; the carried fit has ``converged=False``.
    """
    z = np.asarray(data, dtype=float).ravel()
    if z.size < MIN_FIT_POINTS:
        raise TooFewPoints(
            f"GEV fit needs at least {MIN_FIT_POINTS} points, got {z.size}"
        )
    if not np.all(np.isfinite(z)):
        raise DomainError("data contain non-finite values")
    if float(np.ptp(z)) == 0.0:
        raise DegenerateData("all data points are identical; scale is not estimable")

    def f(theta: np.ndarray) -> float:
        xi, sigma, mu = theta
        if not (sigma > 0.0) or not np.all(np.isfinite(theta)):
            return -math.inf
        return _loglik_kernel(xi, sigma, mu, z)

    def widen(theta0: np.ndarray) -> np.ndarray:
        # A start whose support excludes some point has -inf likelihood
        # and no usable derivatives; growing sigma always covers the data
        # because the support half-width is sigma/|xi|.
        for _ in range(200):
            if math.isfinite(f(theta0)):
                break
            theta0 = theta0 * np.array([1.0, 2.0, 1.0])
        return theta0

    theta = widen(_moment_init(z))
    ll = f(theta)
    g, hess = _grad_hess(f, theta)
    if not _is_positive_definite(-hess):
        cand = widen(_quantile_init(z))
        llc = f(cand)
        if math.isfinite(llc):
            theta, ll = cand, llc
            g, hess = _grad_hess(f, theta)

    iterations = max_iter
    converged = False
    for it in range(1, max_iter + 1):
        g = np.where(np.isfinite(g), g, 0.0)
        usable_hess = bool(np.all(np.isfinite(hess)))
        neg_hess = -hess if usable_hess else np.eye(3)
        newton = usable_hess and _is_positive_definite(neg_hess)
        if newton:
            step = np.linalg.solve(neg_hess, g)
        else:
            # ridge shift keeps the solve ascent-directed; its large-shift
            # limit is plain steepest ascent
            try:
                ev = np.linalg.eigvalsh(neg_hess)
                lam = abs(ev[0]) * 1.5 + 1e-6 * max(1.0, abs(ev[-1]))
                step = np.linalg.solve(neg_hess + lam * np.eye(3), g)
            except np.linalg.LinAlgError:
                step = g
        if np.max(np.abs(step) / np.maximum(np.abs(theta), 1.0)) < tol:
            iterations, converged = it, True
            break
        cand, llc, scale = _backtrack(f, theta, ll, step)
        if cand is not None and not newton and scale == 1.0:
            cand, llc = _expand(f, theta, step, cand, llc, 2.0 ** 20)
        if cand is None:
            # Newton direction failed outright; try scaled ascent
            d = g * np.maximum(np.abs(theta), 1.0)
            norm = float(np.linalg.norm(d))
            if norm == 0.0:
                # exactly stationary gradient
                iterations, converged = it, True
                break
            d = d / norm * np.maximum(np.abs(theta), 1.0) * 1e-3
            cand, llc, scale = _backtrack(f, theta, ll, d)
            if cand is not None and scale == 1.0:
                cand, llc = _expand(f, theta, d, cand, llc, 2.0 ** 30)
            if cand is None:
                # No improving step exists along either direction at any
                # scale down to 2^-30: the likelihood is resolved to its
                # floating-point plateau, so the maximizer is reached even
                # though difference noise keeps the nominal step above tol.
                iterations, converged = it, True
                break
        theta, ll = cand, llc
        g, hess = _grad_hess(f, theta)

    params = GevParams(xi=float(theta[0]), sigma=float(theta[1]), mu=float(theta[2]))
    tail, regime = classify(params)
    fit = GevFit(
        params=params,
        loglik=ll,
        bic=3.0 * math.log(z.size) - 2.0 * ll,
        e_max=ks_distance(z, lambda x: gev_cdf(params, x)),
        tail=tail,
        regime=regime,
        iterations=iterations,
        converged=converged,
        n=int(z.size),
    )
    if not converged:
        raise NotConverged(
            f"no convergence within {max_iter} iterations (loglik {ll:.6g})",
            fit=fit,
        )
    return fit
