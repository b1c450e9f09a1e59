# optlink/pointing.py
"""Angular-error laws and antenna pointing-loss patterns.

Everything in here works in radians and linear gains; dB only shows up in
``attenuation_db`` and ``invert_attenuation``. Every other module composes
these functions.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import optimize, special, stats

from .errors import DomainError

log = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.188
# first positive zero of J1, i.e. the first null of the aperture pattern in sqrt(G)*theta
FIRST_NULL_U = float(special.jn_zeros(1, 1)[0])
DB_PER_NEPER = 10.0 / math.log(10.0)


# ------------------ Angular error models ------------------
@dataclass(frozen=True)
class Rayleigh:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma_theta must be > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class Rician:
    sigma: float
    eta: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma_theta must be > 0, got {self.sigma!r}")
        if not self.eta >= 0:
            raise DomainError(f"bias angle eta must be >= 0, got {self.eta!r}")


@dataclass(frozen=True)
class WorstCase:
    theta_max: float

    def __post_init__(self):
        if not self.theta_max >= 0:
            raise DomainError(f"theta_max must be >= 0, got {self.theta_max!r}")


AngularErrorModel = Union[Rayleigh, Rician, WorstCase]


# ------------------ Pointing loss models ------------------
@dataclass(frozen=True)
class GaussianBeam:
    pass


@dataclass(frozen=True)
class CircularAperture:
    pass


@dataclass(frozen=True)
class ExpApprox:
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha!r}")


PointingLossModel = Union[GaussianBeam, CircularAperture, ExpApprox]


def is_stochastic(model: AngularErrorModel) -> bool:
    return isinstance(model, (Rayleigh, Rician))


def effective_alpha(model: PointingLossModel) -> float:
    """Exponent scale of the pattern once written as exp(-alpha*G*theta^2).

    The circular aperture has no exact exponential form; it is routed through
    its small-angle approximation.
    """
    if isinstance(model, GaussianBeam):
        return 1.0
    if isinstance(model, ExpApprox):
        return model.alpha
    if isinstance(model, CircularAperture):
        return DEFAULT_ALPHA
    raise DomainError(f"unknown pointing loss model {model!r}")


def _check_theta(theta):
    if np.any(np.asarray(theta) < 0):
        raise DomainError("theta must be >= 0")


# ------------------ Densities ------------------
def error_pdf(model: AngularErrorModel, theta):
    """Density of the miss-pointing angle, 1/rad."""
    if isinstance(model, WorstCase):
        raise DomainError("no density defined for a worst-case angle")
    _check_theta(theta)
    th = np.asarray(theta, dtype=float)
    s2 = model.sigma * model.sigma
    eta = model.eta if isinstance(model, Rician) else 0.0
    # i0e keeps the Bessel factor finite for large theta*eta/sigma^2;
    # with eta = 0 this is the Rayleigh expression term for term
    out = th / s2 * np.exp(-((th - eta) ** 2) / (2.0 * s2)) * special.i0e(th * eta / s2)
    return float(out) if out.ndim == 0 else out


def error_cdf(model: AngularErrorModel, theta):
    _check_theta(theta)
    th = np.asarray(theta, dtype=float)
    if isinstance(model, WorstCase):
        out = (th >= model.theta_max).astype(float)
    elif isinstance(model, Rician) and model.eta > 0:
        out = stats.rice.cdf(th, model.eta / model.sigma, scale=model.sigma)
    else:
        out = -np.expm1(-(th * th) / (2.0 * model.sigma * model.sigma))
    return float(out) if np.ndim(out) == 0 else out


def error_sf(model: AngularErrorModel, theta):
    """P(angle > theta), computed directly to keep small tails accurate."""
    _check_theta(theta)
    th = np.asarray(theta, dtype=float)
    if isinstance(model, WorstCase):
        out = (th < model.theta_max).astype(float)
    elif isinstance(model, Rician) and model.eta > 0:
        out = stats.rice.sf(th, model.eta / model.sigma, scale=model.sigma)
    else:
        out = np.exp(-(th * th) / (2.0 * model.sigma * model.sigma))
    return float(out) if np.ndim(out) == 0 else out


# ------------------ Sampling ------------------
def rayleigh_from_uniform(sigma: float, u):
    """Inverse Rayleigh CDF applied to u in (0, 1]."""
    return sigma * np.sqrt(-2.0 * np.log(u))


def error_sample(model: AngularErrorModel, stream: np.random.Generator, size=None):
    """Draw miss-pointing angles from ``stream``.

    Rayleigh goes through the exact inverse CDF; Rician is the magnitude of a
    biased 2-D Gaussian. A worst-case angle is returned as is.
    """
    if isinstance(model, WorstCase):
        if size is None:
            return model.theta_max
        return np.full(size, model.theta_max, dtype=float)
    if isinstance(model, Rician) and model.eta > 0:
        x = model.eta + model.sigma * stream.standard_normal(size)
        y = model.sigma * stream.standard_normal(size)
        return np.hypot(x, y)
    # random() is in [0, 1); flip it so log never sees 0
    u = 1.0 - stream.random(size)
    return rayleigh_from_uniform(model.sigma, u)


# ------------------ Bessel J1 ------------------
# Asymptotic rational approximations for x > 8 (Cephes j1.c, x > 5 branch).
_PP1 = (
    7.62125616208173112003e-4, 7.31397056940917570436e-2, 1.12719608129684925192e0,
    5.11207951146807644818e0, 8.42404590141772420927e0, 5.21451598682361504063e0,
    1.00000000000000000254e0,
)
_PQ1 = (
    5.71323128072548699714e-4, 6.88455908754495404082e-2, 1.10514232634061696926e0,
    5.07386386128601488557e0, 8.39985554327604159757e0, 5.20982848682361821619e0,
    9.99999999999999997461e-1,
)
_QP1 = (
    5.10862594750176621635e-2, 4.98213872951233449420e0, 7.58238284132545283818e1,
    3.66779609360150777800e2, 7.10856304998926107277e2, 5.97489612400613639965e2,
    2.11688757100572135698e2, 2.52070205858023719784e1,
)
_QQ1 = (  # leading 1.0 implied
    7.42373277035675149943e1, 1.05644886038262816351e3, 4.98641058337653607651e3,
    9.56231892404756170795e3, 7.99704160447350683650e3, 2.82619278517639096600e3,
    3.36093607810698293419e2,
)
_SQ2OPI = 7.9788456080286535587989e-1  # sqrt(2/pi)
_THPIO4 = 2.35619449019234492885  # 3*pi/4
_SERIES_LIMIT = 8.0
_SERIES_TERMS = 40


def _polevl(x, coef):
    ans = np.full_like(x, coef[0])
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _p1evl(x, coef):
    ans = x + coef[0]
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _j1_series(x):
    h = x / 2.0
    h2 = h * h
    term = h.copy()
    total = h.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * (-h2) / (k * (k + 1))
        total = total + term
    return total


def _j1_asymptotic(x):
    w = 5.0 / x
    z = w * w
    p = _polevl(z, _PP1) / _polevl(z, _PQ1)
    q = _polevl(z, _QP1) / _p1evl(z, _QQ1)
    xn = x - _THPIO4
    return (p * np.cos(xn) - w * q * np.sin(xn)) * _SQ2OPI / np.sqrt(x)


def bessel_j1(x):
    """Bessel function of the first kind, order 1.

    Power series on |x| <= 8, rational asymptotic form beyond. J1 is odd.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    ax = np.abs(xa)
    out = np.empty_like(ax)
    small = ax <= _SERIES_LIMIT
    if np.any(small):
        out[small] = _j1_series(ax[small])
    if np.any(~small):
        out[~small] = _j1_asymptotic(ax[~small])
    out = np.where(xa < 0, -out, out)
    return float(out[0]) if np.ndim(x) == 0 else out


# ------------------ Pointing loss ------------------
def _aperture_pattern(u):
    u = np.asarray(u, dtype=float)
    safe = np.where(u == 0, 1.0, u)
    ratio = 2.0 * bessel_j1(safe) / safe
    # boresight limit is 1, not 0/0
    return np.where(u == 0, 1.0, ratio * ratio)


def loss_fraction(model: PointingLossModel, gain_linear: float, theta):
    """Fraction of peak gain realised at miss-pointing angle ``theta``."""
    if not gain_linear > 0:
        raise DomainError(f"gain must be > 0, got {gain_linear!r}")
    _check_theta(theta)
    th = np.asarray(theta, dtype=float)
    if isinstance(model, CircularAperture):
        out = _aperture_pattern(math.sqrt(gain_linear) * th)
    else:
        out = np.exp(-effective_alpha(model) * gain_linear * th * th)
    return float(out) if np.ndim(out) == 0 else out


def attenuation_db(model: PointingLossModel, gain_linear: float, theta):
    """Pointing attenuation in dB (>= 0); infinite on a pattern null."""
    if isinstance(model, CircularAperture):
        lp = np.asarray(loss_fraction(model, gain_linear, theta))
        with np.errstate(divide="ignore"):
            out = -DB_PER_NEPER * np.log(lp)
    else:
        _check_theta(theta)
        th = np.asarray(theta, dtype=float)
        # straight from the exponent, no exp/log round trip
        out = DB_PER_NEPER * effective_alpha(model) * gain_linear * th * th
    return float(out) if np.ndim(out) == 0 else out


def first_null(gain_linear: float) -> float:
    return FIRST_NULL_U / math.sqrt(gain_linear)


def beyond_first_null(model: PointingLossModel, gain_linear: float, theta: float) -> bool:
    return isinstance(model, CircularAperture) and theta >= first_null(gain_linear)


def invert_attenuation(model: PointingLossModel, gain_linear: float, a_db: float) -> float:
    """Main-lobe angle at which the pattern reaches ``a_db`` of attenuation."""
    if a_db <= 0:
        return 0.0
    if not isinstance(model, CircularAperture):
        return math.sqrt(a_db / (DB_PER_NEPER * effective_alpha(model) * gain_linear))
    target = 10.0 ** (-a_db / 10.0)
    if target <= float(_aperture_pattern(FIRST_NULL_U)):
        return first_null(gain_linear)
    u = optimize.brentq(
        lambda v: float(_aperture_pattern(v)) - target,
        0.0, FIRST_NULL_U, xtol=1e-15, rtol=4 * np.finfo(float).eps,
    )
    return u / math.sqrt(gain_linear)
