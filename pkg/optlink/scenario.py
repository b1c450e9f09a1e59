# optlink/scenario.py
"""YAML scenario files.

Every dimensional value carries its unit as text (``0.35 urad``, ``256 ns``,
``-5 dB``) and is converted to SI on load. Unknown keys are rejected.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import yaml

from .budget import AU, AntennaSpec, LinkScenario, design_optimal, undb
from .errors import LinkError, ScenarioError
from .pointing import CircularAperture, ExpApprox, GaussianBeam, Rayleigh, Rician, WorstCase
from .report import FORMATS, PRECISIONS
from .signaling import ScppmConfig

log = logging.getLogger(__name__)

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


@dataclass
class OutputOptions:
    format: str = "text"
    precision: str = "paper"


@dataclass
class ScenarioFile:
    """A parsed scenario: the link, the registry to use and output options."""

    scenario: LinkScenario
    registry_path: Path | None = None
    output: OutputOptions = field(default_factory=OutputOptions)
    optimal_gain: bool = False

    # unit -> (kind, factor to SI)
    UNIT_ALIASES = {
        "rad": ("angle", 1.0),
        "mrad": ("angle", 1e-3),
        "urad": ("angle", 1e-6),
        "µrad": ("angle", 1e-6),
        "μrad": ("angle", 1e-6),
        "microrad": ("angle", 1e-6),
        "nrad": ("angle", 1e-9),
        "s": ("time", 1.0),
        "ms": ("time", 1e-3),
        "us": ("time", 1e-6),
        "µs": ("time", 1e-6),
        "μs": ("time", 1e-6),
        "ns": ("time", 1e-9),
        "ps": ("time", 1e-12),
        "w": ("power", 1.0),
        "mw": ("power", 1e-3),
        "kw": ("power", 1e3),
        "m": ("length", 1.0),
        "km": ("length", 1e3),
        "au": ("length", AU),
        "um": ("length", 1e-6),
        "µm": ("length", 1e-6),
        "μm": ("length", 1e-6),
        "nm": ("length", 1e-9),
        "phe/ns": ("flux", 1.0),
        "phe/us": ("flux", 1e-3),
        "phe/s": ("flux", 1e-9),
        "%": ("fraction", 1e-2),
        "": ("number", 1.0),
    }

    PATTERN_ALIASES = {
        "gaussian": GaussianBeam,
        "gaussian_beam": GaussianBeam,
        "gauss": GaussianBeam,
        "circular": CircularAperture,
        "circular_aperture": CircularAperture,
        "airy": CircularAperture,
        "exp": ExpApprox,
        "exp_approx": ExpApprox,
        "exponential": ExpApprox,
    }

    SECTIONS = {
        "name": None,
        "link": {"wavelength", "range", "average_power", "other_losses", "required_margin"},
        "transmitter": {"gain", "efficiency", "pattern", "alpha", "theta_max", "sigma", "bias"},
        "receiver": {"gain", "efficiency", "pattern", "alpha", "theta_max", "sigma", "bias"},
        "pointing": {"p_out"},
        "signaling": {"ppm_order", "code_rate", "slot_time", "guard_time", "noise_flux", "fer_target"},
        "registry": None,
        "output": {"format", "precision"},
    }
    REQUIRED = {
        "link": {"wavelength", "range", "average_power"},
        "transmitter": {"gain"},
        "receiver": {"gain"},
        "signaling": {"ppm_order", "code_rate", "slot_time", "noise_flux"},
    }

    # ------------------ Value parsing ------------------
    @staticmethod
    def _parse_quantity(raw, kind: str, field_name: str) -> float:
        """Convert ``"<number> <unit>"`` to SI for a field of the given kind.

        ``kind="ratio"`` accepts dB, % or a bare linear number; ``dBW`` is
        accepted for power.
        """
        if isinstance(raw, bool):
            raise ScenarioError(f"{field_name}: expected a quantity, got {raw!r}")
        if isinstance(raw, (int, float)):
            raw = str(raw)
        if not isinstance(raw, str):
            raise ScenarioError(f"{field_name}: expected a quantity, got {raw!r}")
        match = _QUANTITY.match(raw)
        if not match:
            raise ScenarioError(f"{field_name}: cannot read quantity {raw!r}")
        number = float(match.group(1))
        unit = match.group(2).lower()
        if kind == "ratio":
            if unit in ("db", "dbi"):
                return undb(number)
            if unit == "%":
                return number * 1e-2
            if unit == "":
                return number
            raise ScenarioError(f"{field_name}: unit {match.group(2)!r} is not a ratio (use dB, % or a plain number)")
        if kind == "power" and unit == "dbw":
            return undb(number)
        if kind == "decibel":
            if unit != "db":
                raise ScenarioError(f"{field_name}: expected a value in dB, got {raw!r}")
            return number
        if unit not in ScenarioFile.UNIT_ALIASES:
            raise ScenarioError(f"{field_name}: unknown unit {match.group(2)!r}")
        unit_kind, factor = ScenarioFile.UNIT_ALIASES[unit]
        if unit_kind == "number" and kind != "number":
            raise ScenarioError(f"{field_name}: a unit is required (e.g. {_EXAMPLE_UNITS[kind]})")
        if unit_kind != kind:
            raise ScenarioError(f"{field_name}: {match.group(2)!r} is not a unit of {kind}")
        return number * factor

    @staticmethod
    def _parse_code_rate(raw) -> Fraction:
        try:
            rate = Fraction(str(raw).replace(" ", ""))
        except (ValueError, ZeroDivisionError):
            raise ScenarioError(f"code_rate: cannot read {raw!r}; write it as a fraction like 1/3") from None
        if isinstance(raw, float):
            rate = rate.limit_denominator(1000)
        return rate

    @staticmethod
    def _check_keys(section: str, data, allowed: set[str]) -> dict:
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ScenarioError(f"section '{section}' must be a mapping")
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ScenarioError(f"unknown key(s) in '{section}': {', '.join(map(str, unknown))}")
        missing = sorted(ScenarioFile.REQUIRED.get(section, set()) - set(data))
        if missing:
            raise ScenarioError(f"missing key(s) in '{section}': {', '.join(missing)}")
        return data

    @classmethod
    def _parse_antenna(cls, section: str, data: dict) -> tuple[AntennaSpec, bool]:
        pattern_name = str(data.get("pattern", "gaussian")).strip().lower()
        if pattern_name not in cls.PATTERN_ALIASES:
            raise ScenarioError(
                f"{section}.pattern: unknown pattern {pattern_name!r} (gaussian, circular or exp)"
            )
        pattern_cls = cls.PATTERN_ALIASES[pattern_name]
        if "alpha" in data and pattern_cls is not ExpApprox:
            raise ScenarioError(f"{section}.alpha only applies to the exp pattern")
        loss_model = pattern_cls(float(data["alpha"])) if "alpha" in data else pattern_cls()

        if "theta_max" in data and "sigma" in data:
            raise ScenarioError(f"{section}: give either theta_max or sigma, not both")
        if "bias" in data and "sigma" not in data:
            raise ScenarioError(f"{section}.bias needs sigma")
        error_model = None
        if "theta_max" in data:
            error_model = WorstCase(cls._parse_quantity(data["theta_max"], "angle", f"{section}.theta_max"))
        elif "sigma" in data:
            sigma = cls._parse_quantity(data["sigma"], "angle", f"{section}.sigma")
            if "bias" in data:
                error_model = Rician(sigma, cls._parse_quantity(data["bias"], "angle", f"{section}.bias"))
            else:
                error_model = Rayleigh(sigma)

        optimal = str(data["gain"]).strip().lower() == "optimal"
        gain = 1.0 if optimal else cls._parse_quantity(data["gain"], "ratio", f"{section}.gain")
        efficiency = cls._parse_quantity(data.get("efficiency", "0 dB"), "ratio", f"{section}.efficiency")
        return AntennaSpec(gain, efficiency, loss_model, error_model), optimal

    # ------------------ Loading ------------------
    @classmethod
    def from_mapping(cls, data, base_dir: Path | None = None) -> "ScenarioFile":
        if not isinstance(data, dict):
            raise ScenarioError("scenario file must be a mapping at the top level")
        unknown = sorted(set(map(str, data)) - set(cls.SECTIONS))
        if unknown:
            raise ScenarioError(f"unknown section(s): {', '.join(unknown)}")
        sections = {
            name: cls._check_keys(name, data.get(name), allowed)
            for name, allowed in cls.SECTIONS.items()
            if allowed is not None
        }
        link, sig, pointing = sections["link"], sections["signaling"], sections["pointing"]

        try:
            tx, tx_opt = cls._parse_antenna("transmitter", sections["transmitter"])
            rx, rx_opt = cls._parse_antenna("receiver", sections["receiver"])
            if tx_opt != rx_opt:
                raise ScenarioError("gain: optimal must be set on both transmitter and receiver")

            p_out = None
            if "p_out" in pointing:
                p_out = cls._parse_quantity(pointing["p_out"], "ratio", "pointing.p_out")
            try:
                ppm_order = int(sig["ppm_order"])
            except (TypeError, ValueError):
                raise ScenarioError(f"signaling.ppm_order: expected an integer, got {sig['ppm_order']!r}") from None
            signaling = ScppmConfig(
                ppm_order,
                cls._parse_code_rate(sig["code_rate"]),
                cls._parse_quantity(sig["slot_time"], "time", "signaling.slot_time"),
                cls._parse_quantity(sig.get("guard_time", "25 %"), "ratio", "signaling.guard_time"),
            )
            fer = sig.get("fer_target")
            scenario = LinkScenario(
                wavelength=cls._parse_quantity(link["wavelength"], "length", "link.wavelength"),
                range_m=cls._parse_quantity(link["range"], "length", "link.range"),
                p_avg=cls._parse_quantity(link["average_power"], "power", "link.average_power"),
                tx=tx,
                rx=rx,
                signaling=signaling,
                noise_flux=cls._parse_quantity(sig["noise_flux"], "flux", "signaling.noise_flux"),
                other_losses=cls._parse_quantity(link.get("other_losses", "0 dB"), "ratio", "link.other_losses"),
                p_out_target=p_out,
                link_margin_db=cls._parse_quantity(
                    link.get("required_margin", "3 dB"), "decibel", "link.required_margin"
                ),
                fer_target=None if fer is None else float(fer),
                name=str(data.get("name") or ""),
            )
        except ScenarioError:
            raise
        except (LinkError, TypeError, ValueError) as e:
            # model constructors raise DomainError; in a file that is bad input
            raise ScenarioError(str(e)) from e

        if tx_opt:
            scenario = design_optimal(scenario)

        registry_path = None
        if data.get("registry") is not None:
            registry_path = Path(str(data["registry"]))
            if not registry_path.is_absolute() and base_dir is not None:
                registry_path = base_dir / registry_path

        output = OutputOptions(**{k: str(v) for k, v in sections["output"].items()})
        if output.format not in FORMATS:
            raise ScenarioError(f"output.format must be one of {', '.join(FORMATS)}")
        if output.precision not in PRECISIONS:
            raise ScenarioError(f"output.precision must be one of {', '.join(PRECISIONS)}")
        return cls(scenario, registry_path, output, tx_opt)

    @classmethod
    def load(cls, path: Path | str) -> "ScenarioFile":
        path = Path(path)
        try:
            with path.open("r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except FileNotFoundError:
            raise ScenarioError(f"scenario file not found: {path}") from None
        except yaml.YAMLError as e:
            raise ScenarioError(f"{path}: invalid YAML: {e}") from e
        sf = cls.from_mapping(data, path.parent)
        log.debug("loaded scenario %s from %s", sf.scenario.name, path)
        return sf

    def with_scenario(self, scenario: LinkScenario) -> "ScenarioFile":
        return replace(self, scenario=scenario)


_EXAMPLE_UNITS = {
    "angle": "urad",
    "time": "ns",
    "power": "W",
    "length": "AU",
    "flux": "phe/ns",
    "fraction": "%",
    "number": "",
}
