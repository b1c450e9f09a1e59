# optlink/gainopt.py
"""Effective system gain and the antenna gain that maximises it.

A narrower beam buys gain but loses more of it to miss-pointing; the product
G_t*L_t*G_r*L_r therefore peaks at a finite gain.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .errors import DomainError
from .outage import LinkEndPointing, deterministic_margin_total, solve_margin
from .pointing import (
    AngularErrorModel,
    CircularAperture,
    GaussianBeam,
    PointingLossModel,
    Rayleigh,
    WorstCase,
    effective_alpha,
    is_stochastic,
)

log = logging.getLogger(__name__)

DEFAULT_BRACKET_DB = (60.0, 160.0)
GOLDEN_TOL_DB = 1e-6
INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


@dataclass(frozen=True)
class Deterministic:
    pass


@dataclass(frozen=True)
class Outage:
    p_out: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.p_out < 1.0:
            raise DomainError(f"outage target must be in (0, 1), got {self.p_out!r}")


Approach = Union[Deterministic, Outage]


@dataclass(frozen=True)
class GainOptProblem:
    """Symmetric design: both ends share gain, pattern and pointing accuracy."""

    approach: Approach
    loss_model: PointingLossModel
    accuracy: AngularErrorModel
    bracket_db: tuple[float, float] = DEFAULT_BRACKET_DB

    def __post_init__(self):
        if isinstance(self.approach, Deterministic) and not isinstance(self.accuracy, WorstCase):
            raise DomainError("deterministic approach needs a worst-case angle (theta_max)")
        if isinstance(self.approach, Outage) and not is_stochastic(self.accuracy):
            raise DomainError("outage approach needs a Rayleigh or Rician accuracy (sigma)")
        lo, hi = self.bracket_db
        if not lo < hi:
            raise DomainError(f"gain bracket must be ascending, got {self.bracket_db!r}")


@dataclass(frozen=True)
class GainOptimum:
    gain_linear: float
    g_eff_db: float
    attenuation_db: float

    @property
    def gain_db(self) -> float:
        return 10.0 * math.log10(self.gain_linear)


@dataclass(frozen=True)
class SweepRow:
    gain_db: float
    attenuation_db: float
    g_eff_db: float


def effective_gain_db(gain_db: float, total_pointing_attenuation_db: float) -> float:
    if total_pointing_attenuation_db < 0:
        raise DomainError("pointing attenuation must be >= 0 dB")
    return 2.0 * gain_db - total_pointing_attenuation_db


def gamma_root(p_out: float) -> float:
    """x > 0 with (1 + x) e^-x = p_out, the equal-ends outage root."""
    if not 0.0 < p_out < 1.0:
        raise DomainError(f"outage target must be in (0, 1), got {p_out!r}")
    return float(-1.0 - special.lambertw(-p_out / math.e, k=-1).real)


def total_attenuation_db(problem: GainOptProblem, gain_linear: float, quiet: bool = False) -> float:
    end = LinkEndPointing(gain_linear, problem.loss_model, problem.accuracy)
    if isinstance(problem.approach, Deterministic):
        return deterministic_margin_total(end, end, quiet)
    return solve_margin(end, end, problem.approach.p_out)


def _g_eff_at(problem: GainOptProblem, gain_db: float) -> float:
    gain = 10.0 ** (gain_db / 10.0)
    # search point; sidelobe warnings would fire for gains the search discards
    return effective_gain_db(gain_db, total_attenuation_db(problem, gain, quiet=True))


def closed_form_gain(problem: GainOptProblem) -> float | None:
    """Analytic optimum for exponential-type patterns, None where none exists."""
    model = problem.accuracy
    if isinstance(problem.approach, Deterministic):
        if isinstance(problem.loss_model, CircularAperture) or model.theta_max == 0:
            return None
        return 1.0 / (effective_alpha(problem.loss_model) * model.theta_max ** 2)
    if not isinstance(model, Rayleigh) or isinstance(problem.loss_model, CircularAperture):
        return None
    x_star = gamma_root(problem.approach.p_out)
    return 1.0 / (effective_alpha(problem.loss_model) * model.sigma ** 2 * x_star)


def _golden_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``f`` on [a, b]."""
    h = b - a
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)
    return (a, d) if yc > yd else (c, b)


def numeric_optimum(problem: GainOptProblem, tol_db: float = GOLDEN_TOL_DB) -> GainOptimum:
    lo, hi = problem.bracket_db
    a, b = _golden_max(lambda g: _g_eff_at(problem, g), lo, hi, tol_db)
    if a <= lo or b >= hi:
        raise DomainError(
            f"optimum sits on the bracket edge [{lo:g}, {hi:g}] dB; widen the gain bracket"
        )
    gain_db = 0.5 * (a + b)
    gain = 10.0 ** (gain_db / 10.0)
    att = total_attenuation_db(problem, gain)
    return GainOptimum(gain, effective_gain_db(gain_db, att), att)


def optimal_gain(problem: GainOptProblem) -> GainOptimum:
    """Antenna gain maximising the effective system gain.

    Gaussian beam under a worst-case angle has the exact answer 1/theta_max^2;
    every other pairing is searched numerically inside ``problem.bracket_db``.
    """
    if isinstance(problem.approach, Deterministic) and isinstance(problem.loss_model, GaussianBeam):
        theta = problem.accuracy.theta_max
        if theta == 0:
            raise DomainError("theta_max = 0 leaves the gain unbounded")
        gain = 1.0 / theta ** 2
        att = total_attenuation_db(problem, gain)
        return GainOptimum(gain, effective_gain_db(10.0 * math.log10(gain), att), att)
    return numeric_optimum(problem)


def sweep_effective_gain(problem: GainOptProblem, gain_grid_db) -> list[SweepRow]:
    grid = [float(g) for g in gain_grid_db]
    if not grid:
        raise DomainError("gain grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("gain grid must be strictly ascending")
    rows = []
    for g in grid:
        att = total_attenuation_db(problem, 10.0 ** (g / 10.0))
        rows.append(SweepRow(g, att, effective_gain_db(g, att)))
    return rows


def optimal_gain_asymmetric(
    approach: Approach,
    loss_model: PointingLossModel,
    tx_accuracy: AngularErrorModel,
    rx_accuracy: AngularErrorModel,
    bracket_db: tuple[float, float] = DEFAULT_BRACKET_DB,
    rounds: int = 6,
    points: int = 21,
) -> tuple[float, float, float]:
    """Experimental: separate tx/rx gains for unequal pointing accuracies.

    Grid search over (G_t, G_r) in dB, re-centred and shrunk each round.
    Returns (G_t linear, G_r linear, G_eff dB).
    """
    # validates each side against the approach
    GainOptProblem(approach, loss_model, tx_accuracy, bracket_db)
    GainOptProblem(approach, loss_model, rx_accuracy, bracket_db)

    def g_eff(gt_db: float, gr_db: float) -> float:
        tx = LinkEndPointing(10.0 ** (gt_db / 10.0), loss_model, tx_accuracy)
        rx = LinkEndPointing(10.0 ** (gr_db / 10.0), loss_model, rx_accuracy)
        if isinstance(approach, Deterministic):
            att = deterministic_margin_total(tx, rx)
        else:
            att = solve_margin(tx, rx, approach.p_out)
        return gt_db + gr_db - att

    lo, hi = bracket_db
    centre = np.array([0.5 * (lo + hi)] * 2)
    span = 0.5 * (hi - lo)
    best = -math.inf
    for _ in range(rounds):
        axis = np.linspace(-span, span, points)
        for dt in axis:
            for dr in axis:
                gt, gr = np.clip(centre + (dt, dr), lo, hi)
                val = g_eff(gt, gr)
                if val > best:
                    best, best_at = val, (gt, gr)
        centre = np.array(best_at)
        span = 2.0 * (axis[1] - axis[0])
    log.debug("asymmetric optimum at (%.4f, %.4f) dB", *best_at)
    return 10.0 ** (best_at[0] / 10.0), 10.0 ** (best_at[1] / 10.0), best
