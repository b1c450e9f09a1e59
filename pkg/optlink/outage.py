# optlink/outage.py
"""Pointing margins for a two-ended link.

Two ways to size the margin A_p*: a deterministic worst-case angle on each
side, or an outage probability P(A_t + A_r > A_p*) under random angles.
The closed forms cover Rayleigh angles with exponential-type patterns; any
other combination goes through quadrature, and Monte Carlo checks both.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError
from .pointing import (
    DB_PER_NEPER,
    AngularErrorModel,
    CircularAperture,
    GaussianBeam,
    PointingLossModel,
    Rayleigh,
    Rician,
    WorstCase,
    attenuation_db,
    beyond_first_null,
    effective_alpha,
    error_pdf,
    error_sample,
    error_sf,
    invert_attenuation,
    loss_fraction,
)

log = logging.getLogger(__name__)

MC_CHUNK = int(os.getenv("OPTLINK_MC_CHUNK", "250000"))

# relative gap between the two exponential means below which the difference
# quotient is swapped for its equal-means (gamma) limit
DEGENERATE_TOL = 1e-6
MAX_DOUBLINGS = 1000
MAX_BISECTIONS = 400
SIDELOBE_PEAK_DB = 17.57
# absolute error allowed on a quadrature outage probability
QUAD_PROB_TOL = 1e-10


def db_to_nats(db: float) -> float:
    return math.log(10.0) / 10.0 * db


@dataclass(frozen=True)
class LinkEndPointing:
    """Gain, pattern and angular-error law of one link end.

    A gain of 0 or a missing error model marks an end whose pointing error is
    neglected; it contributes 0 dB.
    """

    gain_linear: float
    loss_model: PointingLossModel = GaussianBeam()
    error_model: AngularErrorModel | None = None

    def __post_init__(self):
        if not self.gain_linear >= 0:
            raise DomainError(f"gain must be >= 0, got {self.gain_linear!r}")

    @property
    def ideal(self) -> bool:
        return self.gain_linear == 0 or self.error_model is None


@dataclass(frozen=True)
class OutageSpec:
    p_out_target: float
    margin_db: float

    def __post_init__(self):
        if not 0.0 < self.p_out_target < 1.0:
            raise DomainError(f"outage target must be in (0, 1), got {self.p_out_target!r}")

    @property
    def k_nats(self) -> float:
        return db_to_nats(self.margin_db)


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    n_trials: int


# ------------------ Deterministic approach ------------------
def deterministic_margin(end: LinkEndPointing, quiet: bool = False) -> float:
    """Attenuation in dB at the worst-case angle of one end.

    ``quiet`` drops the sidelobe warning to DEBUG for callers that try many gains.
    """
    if end.ideal:
        return 0.0
    if not isinstance(end.error_model, WorstCase):
        raise DomainError("stochastic error model has no worst-case angle; use the outage path")
    theta = end.error_model.theta_max
    if beyond_first_null(end.loss_model, end.gain_linear, theta):
        log.log(
            logging.DEBUG if quiet else logging.WARNING,
            "⚠️ theta_max=%.4g rad lies beyond the first null of the aperture pattern",
            theta,
        )
    return attenuation_db(end.loss_model, end.gain_linear, theta)


def deterministic_margin_total(tx: LinkEndPointing, rx: LinkEndPointing, quiet: bool = False) -> float:
    return deterministic_margin(tx, quiet) + deterministic_margin(rx, quiet)


# ------------------ Closed form ------------------
def _exponential_mean(end: LinkEndPointing) -> float:
    """Mean of alpha*G*theta^2, which is exponential for a Rayleigh angle."""
    if end.ideal:
        return 0.0
    model = end.error_model
    if isinstance(model, Rician):
        raise DomainError("no closed form for a Rician angle; use outage_numeric")
    if not isinstance(model, Rayleigh):
        raise DomainError("worst-case angle has no outage probability; use deterministic_margin")
    return 2.0 * effective_alpha(end.loss_model) * end.gain_linear * model.sigma * model.sigma


def closed_form_applies(tx: LinkEndPointing, rx: LinkEndPointing) -> bool:
    for end in (tx, rx):
        if end.ideal:
            continue
        if not isinstance(end.error_model, Rayleigh):
            return False
    return True


def outage_closed_form(tx: LinkEndPointing, rx: LinkEndPointing, k_nats: float) -> float:
    """P(alpha_t G_t theta_t^2 + alpha_r G_r theta_r^2 > K) for Rayleigh angles."""
    if k_nats < 0:
        raise DomainError(f"K must be >= 0, got {k_nats!r}")
    # sorted so that swapping the ends gives the same bits
    m_hi, m_lo = sorted((_exponential_mean(tx), _exponential_mean(rx)), reverse=True)
    if m_hi == 0.0:
        return 0.0
    if k_nats == 0.0:
        return 1.0
    if m_lo == 0.0:
        return math.exp(-k_nats / m_hi)
    if (m_hi - m_lo) / m_hi < DEGENERATE_TOL:
        x = k_nats / (0.5 * (m_hi + m_lo))
        return (1.0 + x) * math.exp(-x)
    p = (m_hi * math.exp(-k_nats / m_hi) - m_lo * math.exp(-k_nats / m_lo)) / (m_hi - m_lo)
    return min(max(p, 0.0), 1.0)


# ------------------ Numeric ------------------
def _single_end_outage(end: LinkEndPointing, margin_db: float) -> float:
    if margin_db <= 0:
        return 1.0
    theta = invert_attenuation(end.loss_model, end.gain_linear, margin_db)
    return error_sf(end.error_model, theta)


def outage_numeric(tx: LinkEndPointing, rx: LinkEndPointing, margin_db: float) -> float:
    """Outage probability by quadrature, for any pattern/angle-law pair.

    Conditioned on the receive angle, the transmit side must stay below the
    remaining margin; integrating that over the receive density gives P_out.
    Sidelobes of the exact aperture pattern count as outage.
    """
    ends = [end for end in (tx, rx) if not end.ideal]
    # worst-case ends are a fixed attenuation taken off the margin
    for end in [e for e in ends if isinstance(e.error_model, WorstCase)]:
        margin_db -= deterministic_margin(end)
        ends.remove(end)
    if not ends:
        return 1.0 if margin_db < 0 else 0.0
    if margin_db <= 0:
        return 1.0
    for end in ends:
        if isinstance(end.loss_model, CircularAperture) and margin_db > SIDELOBE_PEAK_DB:
            log.warning("⚠️ margin %.2f dB reaches the aperture sidelobes; they are counted as outage", margin_db)
    if len(ends) == 1:
        return _single_end_outage(ends[0], margin_db)

    t_end, r_end = ends
    theta_r_max = invert_attenuation(r_end.loss_model, r_end.gain_linear, margin_db)

    # integrated over s = theta_r / theta_r_max, in units of probability
    def integrand(s: float) -> float:
        theta_r = s * theta_r_max
        remaining = margin_db - attenuation_db(r_end.loss_model, r_end.gain_linear, theta_r)
        return theta_r_max * error_pdf(r_end.error_model, theta_r) * _single_end_outage(t_end, remaining)

    points = None
    if isinstance(r_end.error_model, Rician) and 0 < r_end.error_model.eta < theta_r_max:
        points = [r_end.error_model.eta / theta_r_max]
    result = integrate.quad(
        integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-10, limit=200, points=points, full_output=1
    )
    # quad warns whenever it misses epsrel; only the achieved error decides
    if len(result) > 3:
        if not result[1] <= QUAD_PROB_TOL:
            raise ConvergenceError(
                f"outage quadrature did not converge (achieved abs error {result[1]:.3g}): {result[3]}"
            )
        log.debug("quad warning ignored, abs error %.3g: %s", result[1], result[3])
    p = error_sf(r_end.error_model, theta_r_max) + result[0]
    return min(max(p, 0.0), 1.0)


def outage_probability(tx: LinkEndPointing, rx: LinkEndPointing, margin_db: float) -> float:
    if closed_form_applies(tx, rx):
        return outage_closed_form(tx, rx, db_to_nats(max(margin_db, 0.0)))
    return outage_numeric(tx, rx, margin_db)


# ------------------ Margin inversion ------------------
def solve_margin(tx: LinkEndPointing, rx: LinkEndPointing, p_out_target: float) -> float:
    """Smallest margin A_p* in dB whose outage probability is ``p_out_target``.

    P_out falls strictly with K, so the root is bracketed by doubling and then
    bisected.
    """
    if not 0.0 < p_out_target < 1.0:
        raise DomainError(f"outage target must be in (0, 1), got {p_out_target!r}")
    if closed_form_applies(tx, rx):
        prob = lambda k: outage_closed_form(tx, rx, k)  # noqa: E731
        rel_tol = 1e-15
    else:
        prob = lambda k: outage_numeric(tx, rx, k * DB_PER_NEPER)  # noqa: E731
        rel_tol = 1e-11

    if prob(0.0) <= p_out_target:
        return 0.0
    hi = 1.0
    for _ in range(MAX_DOUBLINGS):
        if prob(hi) <= p_out_target:
            break
        hi *= 2.0
    else:
        raise ConvergenceError(
            f"could not bracket the margin for P_out={p_out_target} (tx={tx!r}, rx={rx!r})"
        )
    lo = 0.0
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if prob(mid) > p_out_target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * hi:
            break
    return 0.5 * (lo + hi) * DB_PER_NEPER


def outage_spec(tx: LinkEndPointing, rx: LinkEndPointing, p_out_target: float) -> OutageSpec:
    return OutageSpec(p_out_target, solve_margin(tx, rx, p_out_target))


# ------------------ Monte Carlo ------------------
def _attenuation_nats(end: LinkEndPointing, stream: np.random.Generator, n: int) -> np.ndarray:
    if end.ideal:
        return np.zeros(n)
    theta = error_sample(end.error_model, stream, n)
    if isinstance(end.loss_model, CircularAperture):
        with np.errstate(divide="ignore"):
            return -np.log(loss_fraction(end.loss_model, end.gain_linear, theta))
    return effective_alpha(end.loss_model) * end.gain_linear * theta * theta


def _count_exceedances(tx, rx, margin_db: float, n_trials: int, stream: np.random.Generator) -> int:
    # one child stream per end keeps the draws independent of the chunk size
    tx_stream, rx_stream = stream.spawn(2)
    exceed = 0
    remaining = n_trials
    while remaining > 0:
        n = min(MC_CHUNK, remaining)
        nats = _attenuation_nats(tx, tx_stream, n) + _attenuation_nats(rx, rx_stream, n)
        exceed += int(np.count_nonzero(nats * DB_PER_NEPER > margin_db))
        remaining -= n
    return exceed


def _estimate(exceed: int, n_trials: int) -> MonteCarloEstimate:
    p = exceed / n_trials
    return MonteCarloEstimate(p, math.sqrt(p * (1.0 - p) / n_trials), n_trials)


def outage_monte_carlo(
    tx: LinkEndPointing,
    rx: LinkEndPointing,
    margin_db: float,
    n_trials: int,
    stream: np.random.Generator,
) -> MonteCarloEstimate:
    """Fraction of random draws whose total attenuation exceeds ``margin_db``."""
    if n_trials < 1:
        raise DomainError(f"n_trials must be >= 1, got {n_trials!r}")
    return _estimate(_count_exceedances(tx, rx, margin_db, n_trials, stream), n_trials)


def outage_monte_carlo_partitioned(
    tx: LinkEndPointing,
    rx: LinkEndPointing,
    margin_db: float,
    n_trials: int,
    seed: int,
    partitions: int = 1,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Monte Carlo split over ``partitions`` independent streams.

    The result depends on (seed, partitions) only, never on ``workers``.
    """
    if n_trials < 1 or partitions < 1:
        raise DomainError("n_trials and partitions must be >= 1")
    partitions = min(partitions, n_trials)
    base, extra = divmod(n_trials, partitions)
    sizes = [base + (1 if i < extra else 0) for i in range(partitions)]
    seeds = np.random.SeedSequence(seed).spawn(partitions)

    def run(args):
        seq, size = args
        return _count_exceedances(tx, rx, margin_db, size, np.random.default_rng(seq))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        counts = list(pool.map(run, zip(seeds, sizes)))
    return _estimate(sum(counts), n_trials)
