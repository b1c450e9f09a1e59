# optlink/commands/optimize.py
from __future__ import annotations

import numpy as np

from ..budget import db
from ..errors import DomainError
from ..gainopt import closed_form_gain, optimal_gain, sweep_effective_gain
from ..report import render_rows, sweep_csv
from ._common import add_pattern_arguments, design_problem, error_model_from, loss_model_from


class OptimizeCommands:
    """Antenna gain maximising the effective system gain, and gain sweeps for plotting."""

    def __init__(self, cli):
        self.cli = cli
        p = cli.add_command("optimize", self.optimize, help="optimal antenna gain of a symmetric link")
        add_pattern_arguments(p)
        accuracy = p.add_mutually_exclusive_group(required=True)
        accuracy.add_argument("--theta-urad", type=float, help="worst-case miss-pointing (deterministic design)")
        accuracy.add_argument("--sigma-urad", type=float, help="Rayleigh pointing accuracy (outage design)")
        p.add_argument("--bias-urad", type=float, default=0.0, help="static bias angle (Rician)")
        p.add_argument("--pout", type=float, default=0.05, help="outage target of the outage design")
        p.add_argument("--bracket-db", type=float, nargs=2, metavar=("LO", "HI"), default=None,
                       help="gain search bracket, dB (default 60 160)")
        p.add_argument("--sweep", type=float, nargs=3, metavar=("START", "STOP", "STEP"), default=None,
                       help="emit gain_db,attenuation_db,geff_db CSV over a dB grid instead")

    @staticmethod
    def sweep_grid(start: float, stop: float, step: float) -> np.ndarray:
        if step <= 0 or stop < start:
            raise DomainError("sweep needs START <= STOP and STEP > 0")
        n = int(round((stop - start) / step)) + 1
        return start + step * np.arange(n)

    def optimize(self, args) -> str:
        accuracy = error_model_from(args.sigma_urad, args.theta_urad, args.bias_urad)
        problem = design_problem(loss_model_from(args), accuracy, args.pout, args.bracket_db)
        if args.sweep is not None:
            return sweep_csv(sweep_effective_gain(problem, self.sweep_grid(*args.sweep)))
        best = optimal_gain(problem)
        closed = closed_form_gain(problem)
        row = {
            "gain_db": best.gain_db,
            "gain_linear": best.gain_linear,
            "attenuation_db": best.attenuation_db,
            "geff_db": best.g_eff_db,
            "closed_form_gain_db": None if closed is None else db(closed),
        }
        fmt, precision = self.cli.output_options(args)
        return render_rows([row], fmt, precision)


def setup(cli) -> None:
    cli.add_group(OptimizeCommands(cli))
