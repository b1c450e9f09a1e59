# optlink/commands/_common.py
"""Argument helpers shared by the command groups."""
from __future__ import annotations

import argparse

from ..budget import db, undb
from ..errors import DomainError
from ..gainopt import Deterministic, GainOptProblem, Outage, optimal_gain
from ..outage import LinkEndPointing
from ..pointing import DEFAULT_ALPHA, CircularAperture, ExpApprox, GaussianBeam, Rayleigh, Rician, WorstCase

URAD = 1e-6
MODELS = ("gaussian", "circular", "exp")


def gain_value(text: str):
    """``--gain-db`` accepts a number or the word ``optimal``."""
    if text.strip().lower() == "optimal":
        return "optimal"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected dB or 'optimal', got {text!r}") from None


def add_pattern_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=MODELS, default="gaussian", help="pointing loss pattern")
    parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="exponent scale of the exp pattern")


def loss_model_from(args):
    if args.model == "circular":
        return CircularAperture()
    if args.model == "exp":
        return ExpApprox(args.alpha)
    return GaussianBeam()


def add_end_arguments(parser: argparse.ArgumentParser) -> None:
    """Per-end options; the plain form sets both ends, tx-/rx- override one."""
    for prefix, who in (("", "both ends"), ("tx-", "transmitter"), ("rx-", "receiver")):
        parser.add_argument(f"--{prefix}gain-db", type=gain_value, default=None, help=f"antenna gain of {who}")
        parser.add_argument(f"--{prefix}sigma-urad", type=float, default=None,
                            help=f"Rayleigh pointing accuracy of {who}")
        parser.add_argument(f"--{prefix}theta-urad", type=float, default=None,
                            help=f"worst-case miss-pointing of {who}")
    parser.add_argument("--bias-urad", type=float, default=0.0, help="static bias angle (Rician), both ends")


def _pick(args, name: str, side: str):
    value = getattr(args, f"{side}_{name}")
    return getattr(args, name) if value is None else value


def error_model_from(sigma_urad, theta_urad, bias_urad: float = 0.0):
    if sigma_urad is not None and theta_urad is not None:
        raise DomainError("give either a sigma or a theta_max for an end, not both")
    if theta_urad is not None:
        return WorstCase(theta_urad * URAD)
    if sigma_urad is None:
        return None
    if bias_urad:
        return Rician(sigma_urad * URAD, bias_urad * URAD)
    return Rayleigh(sigma_urad * URAD)


def build_ends(args, p_out: float | None = None) -> tuple[LinkEndPointing, LinkEndPointing]:
    loss_model = loss_model_from(args)
    specs = {}
    for side in ("tx", "rx"):
        model = error_model_from(_pick(args, "sigma_urad", side), _pick(args, "theta_urad", side), args.bias_urad)
        specs[side] = (_pick(args, "gain_db", side), model)

    gains = {}
    for side, (gain_db, model) in specs.items():
        if gain_db is None:
            raise DomainError(f"no gain given for the {'transmitter' if side == 'tx' else 'receiver'}")
        if gain_db == "optimal":
            if specs["tx"][1] != specs["rx"][1]:
                raise DomainError("an optimal gain needs the same pointing accuracy at both ends")
            gains[side] = optimal_gain(design_problem(loss_model, model, p_out)).gain_linear
        else:
            gains[side] = undb(gain_db)
    return (
        LinkEndPointing(gains["tx"], loss_model, specs["tx"][1]),
        LinkEndPointing(gains["rx"], loss_model, specs["rx"][1]),
    )


def design_problem(loss_model, accuracy, p_out: float | None, bracket_db=None) -> GainOptProblem:
    if accuracy is None:
        raise DomainError("an optimal gain needs a sigma or theta_max")
    kwargs = {} if bracket_db is None else {"bracket_db": tuple(bracket_db)}
    if isinstance(accuracy, WorstCase):
        return GainOptProblem(Deterministic(), loss_model, accuracy, **kwargs)
    if p_out is None:
        raise DomainError("an optimal gain under random pointing needs --pout")
    return GainOptProblem(Outage(p_out), loss_model, accuracy, **kwargs)


def gain_db_of(end: LinkEndPointing) -> float:
    return db(end.gain_linear) if end.gain_linear > 0 else float("-inf")
