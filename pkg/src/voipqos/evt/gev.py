"""Generalized extreme value distribution: CDF, density, quantile, sampling.

The shape convention is the one in which ``xi > 0`` gives a heavy
(Frechet-type) upper tail, ``xi < 0`` a bounded (Weibull-type) upper
tail, and ``xi = 0`` the Gumbel limit.  Every evaluator accepts a scalar
or a numpy array for the data argument and returns a matching shape.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import DomainError, EmptyData

#: Shapes with |xi| below this evaluate on the Gumbel limit branch.
XI_EPS = 1e-6


@dataclass(frozen=True)
class GevParams:
    """Shape ``xi``, scale ``sigma`` (> 0), and location ``mu``."""

    xi: float
    sigma: float
    mu: float

    def __post_init__(self) -> None:
        if not (self.sigma > 0.0) or not math.isfinite(self.sigma):
            raise DomainError(
                f"sigma must be a positive finite real, got {self.sigma}"
            )
        if not math.isfinite(self.xi) or not math.isfinite(self.mu):
            raise DomainError("xi and mu must be finite reals")

    def support(self) -> tuple[float, float]:
        """Closed support interval; one side is always infinite."""
        if abs(self.xi) < XI_EPS:
            return (-math.inf, math.inf)
        endpoint = self.mu - self.sigma / self.xi
        if self.xi > 0:
            return (endpoint, math.inf)
        return (-math.inf, endpoint)


class TailKind(str, enum.Enum):
    WEIBULL = "weibull"
    GUMBEL = "gumbel"
    FRECHET = "frechet"


class FitRegime(str, enum.Enum):
    """Reliability band of maximum-likelihood asymptotics by shape.

    Estimation keeps its standard asymptotic properties for
    ``xi > -0.5``; below that maximization is still attainable down to
    ``xi > -1`` but the usual standard errors no longer apply; at
    ``xi <= -1`` likelihood maximization itself is unreliable.
    """

    STANDARD = "standard"
    ATTAINABLE = "attainable"
    UNRELIABLE = "unreliable"


class TailClass(NamedTuple):
    tail: TailKind
    regime: FitRegime


def classify(p: GevParams) -> TailClass:
    """Tail family by the sign of the shape, plus the estimation regime."""
    if abs(p.xi) < XI_EPS:
        tail = TailKind.GUMBEL
    elif p.xi > 0:
        tail = TailKind.FRECHET
    else:
        tail = TailKind.WEIBULL
    if p.xi > -0.5:
        regime = FitRegime.STANDARD
    elif p.xi > -1.0:
        regime = FitRegime.ATTAINABLE
    else:
        regime = FitRegime.UNRELIABLE
    return TailClass(tail, regime)


def _standardize(p: GevParams, x) -> np.ndarray:
    return (np.asarray(x, dtype=float) - p.mu) / p.sigma


def _scalar_or_array(x, out: np.ndarray):
    if np.ndim(x) == 0:
        return float(out)
    return out


def gev_cdf(p: GevParams, x):
    """Distribution function.

    Off-support points return the limit value for their side: 0 below a
    Frechet-type lower endpoint, 1 above a Weibull-type upper endpoint.
    """
    z = _standardize(p, x)
    with np.errstate(over="ignore", under="ignore"):
        if abs(p.xi) < XI_EPS:
            out = np.exp(-np.exp(-z))
        else:
            arg = 1.0 + p.xi * z
            on = arg > 0.0
            # t = arg**(-1/xi), evaluated in log space to avoid overflow
            t = np.exp(-np.log(np.where(on, arg, 1.0)) / p.xi)
            out = np.where(on, np.exp(-t), 1.0 if p.xi < 0 else 0.0)
    return _scalar_or_array(x, out)


def gev_pdf(p: GevParams, x):
    """Probability density; 0 at and beyond the finite support endpoint."""
    z = _standardize(p, x)
    with np.errstate(over="ignore", under="ignore"):
        if abs(p.xi) < XI_EPS:
            out = np.exp(-z - np.exp(-z)) / p.sigma
        else:
            arg = 1.0 + p.xi * z
            on = arg > 0.0
            la = np.log(np.where(on, arg, 1.0))
            t = np.exp(-la / p.xi)
            out = np.where(on, np.exp(-t - (1.0 / p.xi + 1.0) * la) / p.sigma, 0.0)
    return _scalar_or_array(x, out)


def gev_logpdf(p: GevParams, x):
    """Log density; -inf off support."""
    z = _standardize(p, x)
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        if abs(p.xi) < XI_EPS:
            out = -z - np.exp(-z) - math.log(p.sigma)
        else:
            arg = 1.0 + p.xi * z
            on = arg > 0.0
            la = np.log(np.where(on, arg, 1.0))
            t = np.exp(-la / p.xi)
            out = np.where(on, -t - (1.0 / p.xi + 1.0) * la - math.log(p.sigma), -np.inf)
    return _scalar_or_array(x, out)


def gev_quantile(p: GevParams, u):
    """Inverse of :func:`gev_cdf` for probabilities strictly inside (0, 1)."""
    ua = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(ua)) or np.any(ua <= 0.0) or np.any(ua >= 1.0):
        raise DomainError(f"quantile probability must lie strictly in (0, 1), got {u!r}")
    t = -np.log(ua)
    if abs(p.xi) < XI_EPS:
        out = p.mu - p.sigma * np.log(t)
    else:
        out = p.mu + p.sigma * (t ** (-p.xi) - 1.0) / p.xi
    return _scalar_or_array(u, out)


def gev_sample(p: GevParams, n: int, seed: int) -> np.ndarray:
    """``n`` inverse-transform draws; identical output for identical seed."""
    if n < 0:
        raise DomainError(f"sample size must be >= 0, got {n}")
    if n == 0:
        return np.empty(0, dtype=float)
    rng = np.random.default_rng(seed)
    # random() yields [0, 1); clip away an exact 0 so the quantile is finite
    u = np.clip(rng.random(n), 2.0 ** -53, None)
    return np.asarray(gev_quantile(p, u), dtype=float)


def _loglik_kernel(xi: float, sigma: float, mu: float, z: np.ndarray) -> float:
    """Log-likelihood on raw parameters; the hot path of the fitter."""
    w = (z - mu) / sigma
    if abs(xi) < XI_EPS:
        om = w
    else:
        arg = 1.0 + xi * w
        if np.any(arg <= 0.0):
            return -math.inf
        om = np.log(arg) / xi
    with np.errstate(over="ignore", under="ignore"):
        val = -z.size * math.log(sigma) - (1.0 + xi) * float(np.sum(om)) - float(
            np.sum(np.exp(-om))
        )
    return val if math.isfinite(val) else -math.inf


def gev_loglik(p: GevParams, data) -> float:
    """Log-likelihood of ``data``; -inf when any point is off support.

    Equals the sum of ``log pdf`` over the points, written in the
    standard form ``-n log(sigma) - (1 + xi) sum(w_i) - sum(exp(-w_i))``
    with ``w_i = log(1 + xi (z_i - mu) / sigma) / xi`` (the Gumbel branch
    uses ``w_i = (z_i - mu) / sigma``).
    """
    z = np.asarray(data, dtype=float)
    if z.size == 0:
        raise EmptyData("log-likelihood needs at least one data point")
    return _loglik_kernel(p.xi, p.sigma, p.mu, z)
