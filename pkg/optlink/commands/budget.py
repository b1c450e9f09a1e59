# optlink/commands/budget.py
from __future__ import annotations

from dataclasses import replace

from ..budget import (
    budget_report,
    data_rate,
    max_range,
    pointing_attenuation_db,
    range_table,
    range_without_pointing,
)
from ..pointing import Rayleigh, WorstCase
from ..report import range_table_rows, range_table_text, render_budget, render_rows
from ..scenario import ScenarioFile
from ..signaling import PPM_ORDERS
from ._common import URAD

DETERMINISTIC_ACCURACIES_URAD = (1.00, 0.50, 0.35, 0.20, 0.15, 0.10)
OUTAGE_ACCURACIES_URAD = (1.00, 0.50, 0.35, 0.20, 0.15, 0.10, 0.05)


class BudgetCommands:
    """Link budgets and maximum ranges from a scenario file."""

    def __init__(self, cli):
        self.cli = cli
        b = cli.add_command("budget", self.budget, help="itemised link budget of a scenario")
        b.add_argument("scenario", help="scenario YAML file")

        r = cli.add_command("range", self.ranges, help="maximum range of a scenario, or a range table")
        r.add_argument("scenario", help="scenario YAML file")
        r.add_argument("--table", choices=("deterministic", "outage"), default=None,
                       help="range table over pointing accuracies and PPM orders")
        r.add_argument("--accuracies-urad", type=float, nargs="+", default=None,
                       help="theta_max or sigma values for --table")
        r.add_argument("--orders", type=int, nargs="+", default=None, help="PPM orders for --table")
        r.add_argument("--pout", type=float, default=None, help="outage target for --table outage")

    def budget(self, args) -> str:
        sf = ScenarioFile.load(args.scenario)
        report = budget_report(sf.scenario, self.cli.registry(args, sf))
        fmt, precision = self.cli.output_options(args, sf)
        return render_budget(report, fmt, precision)

    def ranges(self, args) -> str:
        sf = ScenarioFile.load(args.scenario)
        registry = self.cli.registry(args, sf)
        fmt, precision = self.cli.output_options(args, sf)
        scenario = sf.scenario
        if args.table is None:
            row = {
                "gain_db": scenario.tx.gain_db,
                "pointing_loss_db": 0.0 - pointing_attenuation_db(scenario),
                "data_rate_kbps": data_rate(scenario.signaling) / 1e3,
                "range_au": max_range(scenario, registry),
                "range_without_pointing_au": range_without_pointing(scenario, registry),
            }
            return render_rows([row], fmt, precision)

        if args.table == "deterministic":
            accuracies = args.accuracies_urad or DETERMINISTIC_ACCURACIES_URAD
            placeholder = WorstCase(accuracies[0] * URAD)
            label = "theta_max"
        else:
            accuracies = args.accuracies_urad or OUTAGE_ACCURACIES_URAD
            placeholder = Rayleigh(accuracies[0] * URAD)
            label = "sigma_theta"
            p_out = args.pout or scenario.p_out_target or 0.05
            scenario = replace(scenario, p_out_target=p_out)
        scenario = replace(
            scenario,
            tx=replace(scenario.tx, error_model=placeholder),
            rx=replace(scenario.rx, error_model=placeholder),
        )
        orders = args.orders or sorted(PPM_ORDERS, reverse=True)
        rows = range_table(scenario, [a * URAD for a in accuracies], orders, registry)
        if fmt == "text":
            return range_table_text(rows, label, precision)
        return render_rows(range_table_rows(rows), fmt, "full" if fmt == "csv" else precision)


def setup(cli) -> None:
    cli.add_group(BudgetCommands(cli))
