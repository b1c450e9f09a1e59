import math
import pathlib
import sys
import unittest
from dataclasses import replace
from fractions import Fraction

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))

from optlink.budget import (
    AU,
    AntennaSpec,
    LinkScenario,
    budget_report,
    design_optimal,
    link_margin,
    max_range,
    photon_term_db,
    pointing_approach,
    pointing_attenuation_db,
    range_table,
    range_without_pointing,
    received_flux,
    space_loss_db,
    undb,
)
from optlink.errors import DomainError, MissingFluxError
from optlink.pointing import GaussianBeam, Rayleigh, WorstCase
from optlink.signaling import PPM_ORDERS, ScppmConfig, load_registry

URAD = 1e-6
NS = 1e-9
ORDERS = sorted(PPM_ORDERS, reverse=True)  # 256 .. 4

# max range in AU at R=1/3, T_s=256 ns, 3 dB margin, optimal gains; columns follow ORDERS
DETERMINISTIC_RANGES = {
    1.00: (0.539, 0.399, 0.295, 0.219, 0.162, 0.120, 0.089),
    0.50: (2.155, 1.596, 1.182, 0.875, 0.647, 0.480, 0.355),
    0.35: (4.397, 3.256, 2.411, 1.785, 1.320, 0.979, 0.725),
    0.20: (13.470, 9.974, 7.385, 5.468, 4.044, 2.998, 2.220),
    0.15: (23.807, 17.628, 13.053, 9.665, 7.148, 5.299, 3.924),
    0.10: (53.880, 39.896, 29.541, 21.874, 16.178, 11.993, 8.880),
}
OUTAGE_RANGES = {
    1.00: (0.113, 0.084, 0.062, 0.046, 0.034, 0.025, 0.019),
    0.50: (0.453, 0.336, 0.249, 0.184, 0.136, 0.101, 0.075),
    0.35: (0.924, 0.684, 0.507, 0.375, 0.277, 0.206, 0.152),
    0.20: (2.836, 2.100, 1.555, 1.151, 0.851, 0.631, 0.467),
    0.15: (5.037, 3.730, 2.762, 2.045, 1.512, 1.121, 0.830),
    0.10: (11.342, 8.398, 6.218, 4.605, 3.406, 2.525, 1.869),
    0.05: (45.350, 33.580, 24.864, 18.411, 13.617, 10.094, 7.474),
}


def antenna(error_model=WorstCase(0.35 * URAD), gain_db=129.0):
    return AntennaSpec(undb(gain_db), undb(-5.0), GaussianBeam(), error_model)


def mars(**overrides):
    kwargs = dict(
        wavelength=1064 * NS,
        range_m=2.68 * AU,
        p_avg=5.0,
        tx=antenna(),
        rx=antenna(),
        signaling=ScppmConfig(64, Fraction(1, 3), 256 * NS),
        noise_flux=1.21e-2,
        other_losses=undb(-4.0),
        name="Mars",
    )
    kwargs.update(overrides)
    return LinkScenario(**kwargs)


class LinkEquationTest(unittest.TestCase):
    def test_space_loss(self):
        self.assertAlmostEqual(space_loss_db(1064 * NS, 2.68 * AU), -373.506569, places=5)
        self.assertAlmostEqual(space_loss_db(1064 * NS, 1.74 * AU), -369.754858, places=5)

    def test_space_loss_inputs(self):
        with self.assertRaises(DomainError):
            space_loss_db(0.0, AU)

    def test_photon_term(self):
        self.assertAlmostEqual(photon_term_db(1064 * NS), 97.2885, places=3)

    def test_inverse_square(self):
        s = mars()
        self.assertAlmostEqual(received_flux(s.with_range(s.range_m / 10)) / received_flux(s), 100.0, places=9)

    def test_range_au(self):
        self.assertAlmostEqual(mars().range_au, 2.68, places=12)


class ScenarioValidationTest(unittest.TestCase):
    def test_rejects_bad_values(self):
        for overrides in (
            {"wavelength": 0.0},
            {"range_m": -1.0},
            {"p_avg": 0.0},
            {"other_losses": 1.5},
            {"noise_flux": -0.1},
            {"p_out_target": 1.0},
        ):
            with self.subTest(**overrides):
                with self.assertRaises(DomainError):
                    mars(**overrides)

    def test_antenna_checks(self):
        with self.assertRaises(DomainError):
            AntennaSpec(0.0)
        with self.assertRaises(DomainError):
            AntennaSpec(1e12, efficiency=0.0)

    def test_outage_needs_target(self):
        s = mars(tx=antenna(Rayleigh(URAD)), rx=antenna(Rayleigh(URAD)))
        self.assertEqual(pointing_approach(s), "outage")
        with self.assertRaises(DomainError):
            pointing_attenuation_db(s)


class MarsBudgetTest(unittest.TestCase):
    registry = load_registry()

    def setUp(self):
        self.report = budget_report(mars(), self.registry)

    def db_of(self, label):
        return self.report.item(label).db

    def test_table_rows(self):
        expected = {
            "Average Laser Power": 6.99,
            "Peak Laser Power": 26.02,
            "Far-Field Antenna Gain": 129.00,
            "Space Loss": -373.51,
            "Pointing Loss": -8.45,
            "Average Received Power": -130.97,
            "Average Received Photon Flux": -33.68,
            "Minimum Average Received Power": -133.05,
            "Minimum Average Received Photon Flux": -35.76,
            "Link Margin": 2.08,
        }
        for label, value in expected.items():
            with self.subTest(label=label):
                self.assertAlmostEqual(self.db_of(label), value, delta=0.05)

    def test_exact_values(self):
        self.assertAlmostEqual(self.db_of("Average Received Photon Flux"), -33.680043, places=4)
        self.assertAlmostEqual(self.db_of("Link Margin"), 2.079957, places=4)
        self.assertAlmostEqual(link_margin(mars(), self.registry), 2.079957, places=4)

    def test_signaling_rows(self):
        self.assertEqual(self.report.item("PPM Order").value, 64)
        self.assertEqual(self.report.item("Convolutional Code Rate").value, "1/3")
        self.assertAlmostEqual(self.report.item("Mean Noise Flux per slot").value, 3.0976, places=10)
        self.assertAlmostEqual(self.report.item("theta_max, Gaussian Beam").value, 0.35, places=12)
        self.assertAlmostEqual(self.report.item("Information Data Rate").value, 0.097, delta=0.0005)

    def test_power_rows_are_in_dbw(self):
        for label in ("Average Received Power", "Minimum Average Received Power"):
            with self.subTest(label=label):
                self.assertEqual(self.report.item(label).units, "dBW")
                self.assertIsNone(self.report.item(label).value)

    def test_column_adds_up(self):
        terms = [
            "Average Laser Power",
            "Far-Field Antenna Gain",
            "Transmitter Efficiency",
            "Space Loss",
            "Receiver Gain",
            "Receiver Efficiency",
            "Detection/Implementation Losses",
            "Atmospheric Loss",
            "Pointing Loss",
        ]
        total = sum(self.db_of(label) for label in terms)
        self.assertAlmostEqual(total, self.db_of("Average Received Power"), delta=1e-9)
        self.assertAlmostEqual(
            total + photon_term_db(1064 * NS), self.db_of("Average Received Photon Flux"), delta=1e-9
        )
        self.assertAlmostEqual(
            self.db_of("Average Received Photon Flux") - self.db_of("Minimum Average Received Photon Flux"),
            self.db_of("Link Margin"),
            delta=1e-9,
        )

    def test_short_margin_noted(self):
        with self.assertLogs("optlink.budget", level="WARNING"):
            report = budget_report(mars(), self.registry)
        self.assertTrue(any("below the required 3 dB" in note for note in report.notes))

    def test_missing_item(self):
        with self.assertRaises(KeyError):
            self.report.item("Nope")


class OtherBudgetsTest(unittest.TestCase):
    registry = load_registry()

    def test_venus(self):
        venus = mars(range_m=1.74 * AU, signaling=ScppmConfig(64, Fraction(1, 3), 64 * NS), name="Venus")
        report = budget_report(venus, self.registry)
        self.assertAlmostEqual(report.item("Link Margin").db, 2.17, delta=0.01)
        self.assertAlmostEqual(report.item("Space Loss").db, -369.754858, places=5)
        self.assertTrue(any("backed out of a quoted link margin" in note for note in report.notes))

    def test_leaving_out_pointing(self):
        sig = ScppmConfig(64, Fraction(1, 3), 16 * NS)
        without = mars(tx=antenna(None), rx=antenna(None), signaling=sig)
        report = budget_report(without, self.registry)
        self.assertAlmostEqual(report.item("Link Margin").db, 3.07, delta=0.1)
        self.assertEqual(report.item("Pointing Loss").db, 0.0)
        self.assertTrue(any("not budgeted" in note for note in report.notes))
        # the same link once pointing is counted
        self.assertAlmostEqual(link_margin(mars(signaling=sig), self.registry), -5.38, delta=0.1)

    def test_outage_budget(self):
        s = mars(tx=antenna(Rayleigh(URAD)), rx=antenna(Rayleigh(URAD)), p_out_target=0.05)
        report = budget_report(s, self.registry)
        self.assertAlmostEqual(report.item("Outage Probability").value, 5.0, places=12)
        self.assertAlmostEqual(report.item("Pointing Loss").db, -pointing_attenuation_db(s), places=12)
        self.assertIn("sigma_theta, Gaussian Beam", [it.label for it in report.items])

    def test_unlisted_configuration(self):
        s = mars(signaling=ScppmConfig(64, Fraction(1, 2), 256 * NS))
        with self.assertRaises(MissingFluxError):
            budget_report(s, self.registry)


class MaxRangeTest(unittest.TestCase):
    registry = load_registry()

    def test_optimal_gain_range(self):
        designed = design_optimal(mars())
        self.assertAlmostEqual(designed.tx.gain_db, 129.1186, places=4)
        self.assertAlmostEqual(max_range(designed, self.registry), 2.411, delta=0.01 * 2.411)

    def test_margin_at_max_range(self):
        designed = design_optimal(mars())
        r = max_range(designed, self.registry)
        self.assertAlmostEqual(link_margin(designed.with_range(r * AU), self.registry), 3.0, places=6)

    def test_halving_theta_quadruples_range(self):
        a = max_range(design_optimal(mars()), self.registry)
        half = WorstCase(0.175 * URAD)
        b = max_range(design_optimal(mars(tx=antenna(half), rx=antenna(half))), self.registry)
        self.assertAlmostEqual(b / a, 4.0, delta=0.001)

    def test_extra_margin_shortens_range(self):
        s = design_optimal(mars())
        self.assertAlmostEqual(
            max_range(s, self.registry, link_margin_db=9.0) / max_range(s, self.registry), 10 ** (-6 / 20), places=9
        )

    def test_without_pointing(self):
        s = mars(signaling=ScppmConfig(256, Fraction(1, 3), 256 * NS))
        self.assertAlmostEqual(range_without_pointing(s, self.registry), 11.63, delta=0.01)
        self.assertGreater(range_without_pointing(s, self.registry), max_range(s, self.registry))

    def test_falls_with_order(self):
        s = design_optimal(mars())
        ranges = [max_range(replace(s, signaling=replace(s.signaling, ppm_order=m)), self.registry) for m in ORDERS]
        self.assertEqual(ranges, sorted(ranges, reverse=True))


class DesignTest(unittest.TestCase):
    def test_needs_identical_ends(self):
        s = mars(rx=antenna(WorstCase(0.5 * URAD)))
        with self.assertRaises(DomainError):
            design_optimal(s)

    def test_needs_an_error_model(self):
        with self.assertRaises(DomainError):
            design_optimal(mars(tx=antenna(None), rx=antenna(None)))

    def test_outage_design(self):
        s = mars(tx=antenna(Rayleigh(URAD)), rx=antenna(Rayleigh(URAD)), p_out_target=0.05)
        designed = design_optimal(s)
        self.assertAlmostEqual(designed.rx.gain_db, 113.24, delta=0.01)
        self.assertAlmostEqual(pointing_attenuation_db(designed), 20 / math.log(10), delta=0.01)


class RangeTableTest(unittest.TestCase):
    registry = load_registry()

    def check_table(self, base, expected):
        """Each cell within 1 %, or half a unit of the last printed digit.

        The smallest cells are printed with three decimals, so 0.019 stands for
        anything in [0.0185, 0.0195); 1 % of it is finer than the rounding.
        """
        rows = range_table(base, [a * URAD for a in expected], ORDERS, self.registry)
        self.assertEqual(len(rows), len(expected) * len(ORDERS))
        got = {(round(r.accuracy / URAD, 2), r.ppm_order): r.range_au for r in rows}
        for acc, ranges in expected.items():
            for m, value in zip(ORDERS, ranges):
                with self.subTest(accuracy=acc, M=m):
                    self.assertAlmostEqual(got[(acc, m)], value, delta=max(0.01 * value, 0.0005))

    def test_deterministic_table(self):
        self.check_table(mars(), DETERMINISTIC_RANGES)

    def test_outage_table(self):
        sigma = Rayleigh(URAD)
        self.check_table(mars(tx=antenna(sigma), rx=antenna(sigma), p_out_target=0.05), OUTAGE_RANGES)

    def test_row_contents(self):
        rows = range_table(mars(), [0.35 * URAD], [64], self.registry)
        self.assertEqual(rows[0].ppm_order, 64)
        self.assertAlmostEqual(rows[0].peak_power_w, 400.0, places=9)
        self.assertAlmostEqual(rows[0].data_rate_bps / 1e3, 97.00, delta=0.005)

    def test_needs_error_model(self):
        with self.assertRaises(DomainError):
            range_table(mars(tx=antenna(None), rx=antenna(None)), [URAD], [64], self.registry)


if __name__ == "__main__":
    unittest.main()
