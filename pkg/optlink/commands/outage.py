# optlink/commands/outage.py
from __future__ import annotations

from ..errors import DomainError
from ..outage import closed_form_applies, outage_monte_carlo_partitioned, outage_probability, solve_margin
from ..report import render_rows
from ._common import add_end_arguments, add_pattern_arguments, build_ends, gain_db_of


class OutageCommands:
    """Outage probability for a given margin, and the margin for a given outage."""

    def __init__(self, cli):
        self.cli = cli
        p = cli.add_command("outage", self.outage, help="outage probability at a pointing margin")
        add_pattern_arguments(p)
        add_end_arguments(p)
        p.add_argument("--margin-db", type=float, required=True, help="pointing margin A_p*, dB")
        p.add_argument("--pout", type=float, default=None, help="outage target used to size --gain-db optimal")
        p.add_argument("--trials", type=int, default=0, help="also run a Monte Carlo check with this many draws")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--partitions", type=int, default=1, help="independent Monte Carlo streams")
        p.add_argument("--workers", type=int, default=1, help="threads running the partitions")

        m = cli.add_command("margin", self.margin, help="pointing margin meeting an outage target")
        add_pattern_arguments(m)
        add_end_arguments(m)
        m.add_argument("--pout", type=float, required=True, help="outage probability target, e.g. 0.05")

    def outage(self, args) -> str:
        tx, rx = build_ends(args, args.pout)
        row = {
            "tx_gain_db": gain_db_of(tx),
            "rx_gain_db": gain_db_of(rx),
            "margin_db": args.margin_db,
            "p_out": outage_probability(tx, rx, args.margin_db),
            "method": "closed-form" if closed_form_applies(tx, rx) else "numeric",
        }
        if args.trials < 0:
            raise DomainError("--trials must be >= 0")
        if args.trials:
            mc = outage_monte_carlo_partitioned(
                tx, rx, args.margin_db, args.trials, args.seed, args.partitions, args.workers
            )
            row.update(mc_estimate=mc.estimate, mc_std_error=mc.std_error, mc_trials=mc.n_trials)
        fmt, precision = self.cli.output_options(args)
        return render_rows([row], fmt, precision)

    def margin(self, args) -> str:
        tx, rx = build_ends(args, args.pout)
        row = {
            "tx_gain_db": gain_db_of(tx),
            "rx_gain_db": gain_db_of(rx),
            "p_out": args.pout,
            "margin_db": solve_margin(tx, rx, args.pout),
        }
        fmt, precision = self.cli.output_options(args)
        return render_rows([row], fmt, precision)


def setup(cli) -> None:
    cli.add_group(OutageCommands(cli))
