# optlink/budget.py
"""Optical link equation, link budget and maximum-range solver."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

from .errors import DomainError
from .gainopt import Approach, Deterministic, GainOptProblem, Outage, optimal_gain
from .outage import LinkEndPointing, deterministic_margin_total, solve_margin
from .pointing import (
    AngularErrorModel,
    CircularAperture,
    ExpApprox,
    GaussianBeam,
    PointingLossModel,
    Rayleigh,
    Rician,
    WorstCase,
    is_stochastic,
)
from .signaling import (
    RequiredFluxRegistry,
    ScppmConfig,
    data_rate,
    noise_per_slot,
    peak_power,
    required_flux,
)

log = logging.getLogger(__name__)

AU = 149_597_871_000.0  # m
PLANCK = 6.62607015e-34  # J s
LIGHT_SPEED = 299_792_458.0  # m/s
PER_NS_DB = -90.0  # 10*log10(1e-9), photons/s -> photons/ns


def db(x: float) -> float:
    return 10.0 * math.log10(x)


def undb(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def photon_energy(wavelength: float) -> float:
    return PLANCK * LIGHT_SPEED / wavelength


@dataclass(frozen=True)
class AntennaSpec:
    """Gain, efficiency and pointing behaviour of one terminal.

    ``error_model=None`` leaves this end's miss-pointing out of the budget.
    """

    gain_linear: float
    efficiency: float = 1.0
    loss_model: PointingLossModel = GaussianBeam()
    error_model: AngularErrorModel | None = None

    def __post_init__(self):
        if not self.gain_linear > 0:
            raise DomainError(f"antenna gain must be > 0, got {self.gain_linear!r}")
        if not 0.0 < self.efficiency <= 1.0:
            raise DomainError(f"antenna efficiency must be in (0, 1], got {self.efficiency!r}")

    @property
    def gain_db(self) -> float:
        return db(self.gain_linear)

    def pointing(self) -> LinkEndPointing:
        return LinkEndPointing(self.gain_linear, self.loss_model, self.error_model)


@dataclass(frozen=True)
class LinkScenario:
    wavelength: float  # m
    range_m: float
    p_avg: float  # W
    tx: AntennaSpec
    rx: AntennaSpec
    signaling: ScppmConfig
    noise_flux: float  # photons / ns
    other_losses: float = 1.0  # linear
    p_out_target: float | None = None
    link_margin_db: float = 3.0  # required
    fer_target: float | None = None
    name: str = ""

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be > 0, got {self.wavelength!r}")
        if not self.range_m > 0:
            raise DomainError(f"range must be > 0, got {self.range_m!r}")
        if not self.p_avg > 0:
            raise DomainError(f"average power must be > 0, got {self.p_avg!r}")
        if not 0.0 < self.other_losses <= 1.0:
            raise DomainError(f"other losses must be in (0, 1] linear, got {self.other_losses!r}")
        if self.noise_flux < 0:
            raise DomainError(f"noise flux must be >= 0, got {self.noise_flux!r}")
        if self.p_out_target is not None and not 0.0 < self.p_out_target < 1.0:
            raise DomainError(f"outage target must be in (0, 1), got {self.p_out_target!r}")

    @property
    def range_au(self) -> float:
        return self.range_m / AU

    def with_range(self, range_m: float) -> "LinkScenario":
        return replace(self, range_m=range_m)

    def without_pointing(self) -> "LinkScenario":
        return replace(
            self,
            tx=replace(self.tx, error_model=None),
            rx=replace(self.rx, error_model=None),
        )


@dataclass(frozen=True)
class LineItem:
    section: str
    label: str
    db: float | None = None
    value: object = None
    units: str = ""


@dataclass
class BudgetReport:
    title: str
    items: list[LineItem] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, section: str, label: str, db_value=None, value=None, units: str = "") -> None:
        self.items.append(LineItem(section, label, db_value, value, units))

    def item(self, label: str) -> LineItem:
        for it in self.items:
            if it.label == label:
                return it
        raise KeyError(label)


# ------------------ Link equation ------------------
def space_loss_db(wavelength: float, range_m: float) -> float:
    if not wavelength > 0 or not range_m > 0:
        raise DomainError("wavelength and range must be > 0")
    return 20.0 * math.log10(wavelength / (4.0 * math.pi * range_m))


def photon_term_db(wavelength: float) -> float:
    """dB conversion from received watts to photons/ns."""
    return -db(photon_energy(wavelength)) + PER_NS_DB


def pointing_approach(scenario: LinkScenario) -> str:
    models = [a.error_model for a in (scenario.tx, scenario.rx) if a.error_model is not None]
    if not models:
        return "none"
    if any(is_stochastic(m) for m in models):
        return "outage"
    return "deterministic"


def pointing_attenuation_db(scenario: LinkScenario) -> float:
    """Total pointing margin of both ends, dB >= 0."""
    tx, rx = scenario.tx.pointing(), scenario.rx.pointing()
    approach = pointing_approach(scenario)
    if approach == "none":
        return 0.0
    if approach == "deterministic":
        return deterministic_margin_total(tx, rx)
    if scenario.p_out_target is None:
        raise DomainError("random pointing errors need an outage target (p_out)")
    return solve_margin(tx, rx, scenario.p_out_target)


def _gain_terms_db(scenario: LinkScenario, pointing_db: float) -> float:
    return (
        scenario.tx.gain_db
        + db(scenario.tx.efficiency)
        + scenario.rx.gain_db
        + db(scenario.rx.efficiency)
        + db(scenario.other_losses)
        - pointing_db
    )


def received_power_w(scenario: LinkScenario) -> float:
    return undb(
        db(scenario.p_avg)
        + space_loss_db(scenario.wavelength, scenario.range_m)
        + _gain_terms_db(scenario, pointing_attenuation_db(scenario))
    )


def received_flux(scenario: LinkScenario) -> float:
    """Average received signal photons per ns."""
    return received_power_w(scenario) / photon_energy(scenario.wavelength) * 1e-9


def required_flux_db(scenario: LinkScenario, registry: RequiredFluxRegistry) -> float:
    sig = scenario.signaling
    return required_flux(registry, sig.ppm_order, sig.code_rate, sig.slot_time, scenario.noise_flux)


def link_margin(scenario: LinkScenario, registry: RequiredFluxRegistry) -> float:
    return db(received_flux(scenario)) - required_flux_db(scenario, registry)


def max_range(
    scenario: LinkScenario,
    registry: RequiredFluxRegistry,
    link_margin_db: float | None = None,
) -> float:
    """Largest range in AU that still closes with the required margin.

    Every input except the range of ``scenario`` is used; its gains should
    already be the optimal ones (see ``design_optimal``).
    """
    lm = scenario.link_margin_db if link_margin_db is None else link_margin_db
    n_req_db = required_flux_db(scenario, registry) + lm
    # n_s[dB] = P + terms + space + photon term; solve the space term for r
    space_db = n_req_db - (
        db(scenario.p_avg)
        + _gain_terms_db(scenario, pointing_attenuation_db(scenario))
        + photon_term_db(scenario.wavelength)
    )
    r = scenario.wavelength / (4.0 * math.pi) * 10.0 ** (-space_db / 20.0)
    return r / AU


def range_without_pointing(
    scenario: LinkScenario,
    registry: RequiredFluxRegistry,
    link_margin_db: float | None = None,
) -> float:
    """Max range with the same gains but pointing loss left out of the budget."""
    return max_range(scenario.without_pointing(), registry, link_margin_db)


# ------------------ Design ------------------
def design_approach(scenario: LinkScenario) -> Approach:
    approach = pointing_approach(scenario)
    if approach == "none":
        raise DomainError("no pointing error model given; the optimal gain is unbounded")
    if approach == "deterministic":
        return Deterministic()
    if scenario.p_out_target is None:
        raise DomainError("random pointing errors need an outage target (p_out)")
    return Outage(scenario.p_out_target)


def design_optimal(scenario: LinkScenario, bracket_db: tuple[float, float] | None = None) -> LinkScenario:
    """Both gains set to the optimum of the symmetric gain problem."""
    tx, rx = scenario.tx, scenario.rx
    if tx.loss_model != rx.loss_model or tx.error_model != rx.error_model:
        raise DomainError("gain design needs identical pointing models at both ends")
    kwargs = {} if bracket_db is None else {"bracket_db": bracket_db}
    problem = GainOptProblem(design_approach(scenario), tx.loss_model, tx.error_model, **kwargs)
    gain = optimal_gain(problem).gain_linear
    log.debug("designed gain %.4f dB for %s", db(gain), scenario.name or "scenario")
    return replace(scenario, tx=replace(tx, gain_linear=gain), rx=replace(rx, gain_linear=gain))


@dataclass(frozen=True)
class RangeRow:
    accuracy: float  # rad
    ppm_order: int
    peak_power_w: float
    data_rate_bps: float
    range_au: float


def with_accuracy(model: AngularErrorModel, value: float) -> AngularErrorModel:
    if isinstance(model, WorstCase):
        return WorstCase(value)
    if isinstance(model, Rician):
        return Rician(value, model.eta)
    return Rayleigh(value)


def range_table(
    base: LinkScenario,
    accuracies,
    orders,
    registry: RequiredFluxRegistry,
) -> list[RangeRow]:
    """Max range for every (pointing accuracy, PPM order) pair.

    The kind of accuracy (theta_max or sigma) follows ``base``; gains are
    re-optimised for each accuracy.
    """
    model = base.tx.error_model
    if model is None:
        raise DomainError("range table needs a pointing error model on the base scenario")
    rows = []
    for acc in accuracies:
        acc_model = with_accuracy(model, acc)
        scenario = replace(
            base,
            tx=replace(base.tx, error_model=acc_model),
            rx=replace(base.rx, error_model=acc_model),
        )
        scenario = design_optimal(scenario)
        for m in orders:
            sig = replace(scenario.signaling, ppm_order=int(m))
            at_m = replace(scenario, signaling=sig)
            rows.append(
                RangeRow(acc, sig.ppm_order, peak_power(at_m.p_avg, sig), data_rate(sig), max_range(at_m, registry))
            )
    return rows


# ------------------ Report ------------------
_PATTERN_NAMES = {GaussianBeam: "Gaussian Beam", CircularAperture: "Circular Aperture", ExpApprox: "Exp. Approx."}


def _accuracy_line(antenna: AntennaSpec) -> tuple[str, float] | None:
    model = antenna.error_model
    pattern = _PATTERN_NAMES[type(antenna.loss_model)]
    if model is None:
        return None
    if isinstance(model, WorstCase):
        return f"theta_max, {pattern}", model.theta_max * 1e6
    if isinstance(model, Rician) and model.eta > 0:
        return f"sigma_theta (bias {model.eta * 1e6:g} urad), {pattern}", model.sigma * 1e6
    return f"sigma_theta, {pattern}", model.sigma * 1e6


def budget_report(scenario: LinkScenario, registry: RequiredFluxRegistry) -> BudgetReport:
    """Itemised link budget; the dB column adds up to the received flux."""
    sig = scenario.signaling
    report = BudgetReport(scenario.name or "Optical link budget")
    sec = "Signaling and Fixed Parameter"
    report.add(sec, "PPM Order", value=sig.ppm_order)
    report.add(sec, "Convolutional Code Rate", value=str(sig.code_rate))
    report.add(sec, "Slot Time", value=sig.slot_time * 1e9, units="ns")
    report.add(sec, "Guard Time", value=sig.guard_fraction * 100.0, units="%")
    report.add(sec, "Mean Noise Flux", db(scenario.noise_flux) if scenario.noise_flux > 0 else None,
               scenario.noise_flux, "phe/ns")
    report.add(sec, "Mean Noise Flux per slot", value=noise_per_slot(scenario.noise_flux, sig.slot_time),
               units="phe/slot")
    tx_line, rx_line = _accuracy_line(scenario.tx), _accuracy_line(scenario.rx)
    if tx_line == rx_line and tx_line is not None:
        report.add(sec, tx_line[0], value=tx_line[1], units="urad")
    else:
        for end, line in (("Tx", tx_line), ("Rx", rx_line)):
            if line is not None:
                report.add(sec, f"{end} {line[0]}", value=line[1], units="urad")
    if pointing_approach(scenario) == "outage":
        report.add(sec, "Outage Probability", value=scenario.p_out_target * 100.0, units="%")

    sec = "Laser Transmitter"
    report.add(sec, "Average Laser Power", db(scenario.p_avg), scenario.p_avg, "W")
    p_peak = peak_power(scenario.p_avg, sig)
    report.add(sec, "Peak Laser Power", db(p_peak), p_peak, "W")
    report.add(sec, "Wavelength", value=scenario.wavelength * 1e9, units="nm")

    report.add("Deep Space Orbiter", "Far-Field Antenna Gain", scenario.tx.gain_db)
    report.add("Deep Space Orbiter", "Transmitter Efficiency", db(scenario.tx.efficiency))

    space_db = space_loss_db(scenario.wavelength, scenario.range_m)
    report.add("Range", "Space Loss", space_db, scenario.range_au, "AU")

    report.add("Near Earth Orbiter", "Receiver Gain", scenario.rx.gain_db)
    report.add("Near Earth Orbiter", "Receiver Efficiency", db(scenario.rx.efficiency))

    pointing_db = pointing_attenuation_db(scenario)
    sec = "Other"
    report.add(sec, "Detection/Implementation Losses", db(scenario.other_losses))
    # relay above the atmosphere; kept as a line so ground terminals can fill it in
    report.add(sec, "Atmospheric Loss", 0.0)
    report.add(sec, "Pointing Loss", 0.0 - pointing_db)

    rx_power_db = db(scenario.p_avg) + space_db + _gain_terms_db(scenario, pointing_db)
    flux_db = rx_power_db + photon_term_db(scenario.wavelength)
    n_min_db = required_flux_db(scenario, registry)
    sec = "Link Performance"
    report.add(sec, "Average Received Power", rx_power_db, units="dBW")
    report.add(sec, "Average Received Photon Flux", flux_db, undb(flux_db), "phe/ns")
    report.add(sec, "Minimum Average Received Power", n_min_db - photon_term_db(scenario.wavelength), units="dBW")
    report.add(sec, "Minimum Average Received Photon Flux", n_min_db, undb(n_min_db), "phe/ns")
    report.add(sec, "Link Margin", flux_db - n_min_db)
    if scenario.fer_target is not None:
        report.add(sec, "FER target", value=scenario.fer_target)
    report.add(sec, "Information Data Rate", value=data_rate(sig) / 1e6, units="Mbps")

    key = (sig.ppm_order, sig.code_rate, sig.slot_time * 1e9, scenario.noise_flux)
    if registry.source(key) == "stated-margin":
        report.notes.append(
            f"n_s_min for M={sig.ppm_order}, R={sig.code_rate}, T_s={sig.slot_time * 1e9:g} ns was backed "
            "out of a quoted link margin; this margin reproduces that quote rather than checking it"
        )
    if pointing_approach(scenario) == "none":
        report.notes.append("pointing loss is not budgeted; the real margin will be lower")
    margin = flux_db - n_min_db
    if margin < scenario.link_margin_db:
        log.warning("⚠️ link margin %.2f dB is below the required %.2f dB", margin, scenario.link_margin_db)
        report.notes.append(f"margin below the required {scenario.link_margin_db:g} dB")
    return report
