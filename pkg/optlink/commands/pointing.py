# optlink/commands/pointing.py
from __future__ import annotations

from ..budget import undb
from ..pointing import attenuation_db, beyond_first_null, loss_fraction
from ..report import render_rows
from ._common import URAD, add_pattern_arguments, loss_model_from


class PointingCommands:
    """Loss of a single antenna at a given miss-pointing angle."""

    def __init__(self, cli):
        self.cli = cli
        p = cli.add_command("pointing", self.pointing, help="pointing loss of one antenna")
        add_pattern_arguments(p)
        p.add_argument("--gain-db", type=float, required=True, help="far-field antenna gain, dB")
        p.add_argument("--theta-urad", type=float, required=True, help="miss-pointing angle, urad")

    def pointing(self, args) -> str:
        model = loss_model_from(args)
        gain = undb(args.gain_db)
        theta = args.theta_urad * URAD
        row = {
            "model": args.model,
            "gain_db": args.gain_db,
            "theta_urad": args.theta_urad,
            "loss_fraction": loss_fraction(model, gain, theta),
            "loss_db": 0.0 - attenuation_db(model, gain, theta),
        }
        if beyond_first_null(model, gain, theta):
            row["note"] = "beyond first null"
        fmt, precision = self.cli.output_options(args)
        return render_rows([row], fmt, precision)


def setup(cli) -> None:
    cli.add_group(PointingCommands(cli))
