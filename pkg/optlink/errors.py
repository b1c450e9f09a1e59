# optlink/errors.py
from __future__ import annotations


class LinkError(Exception):
    """Base class for everything optlink raises on purpose."""

    exit_code = 1


class ScenarioError(LinkError, ValueError):
    """Scenario file or command-line input could not be parsed."""

    exit_code = 2


class DomainError(LinkError, ValueError):
    """Inputs are well-formed but violate a precondition of the operation."""

    exit_code = 3


class MissingFluxError(DomainError, KeyError):
    """No required-flux entry for a signaling configuration."""

    def __init__(self, key: tuple):
        self.key = key
        m, r, ts_ns, nb = key
        super().__init__(
            f"no FER data for configuration (M={m}, R={r}, T_s={ts_ns:g} ns, n_b={nb:g} phe/ns)"
        )

    def __str__(self) -> str:
        # KeyError would otherwise repr() the message
        return self.args[0]


class ConvergenceError(LinkError, RuntimeError):
    """A numerical procedure did not reach its tolerance."""

    exit_code = 4
