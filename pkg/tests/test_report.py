import csv
import io
import pathlib
import sys
import tempfile
import unittest
from fractions import Fraction

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))

from optlink.budget import BudgetReport, RangeRow
from optlink.errors import ScenarioError
from optlink.gainopt import SweepRow
from optlink.report import (
    budget_csv,
    budget_records,
    budget_text,
    fmt_db,
    fmt_value,
    range_table_rows,
    range_table_text,
    read_sweep_csv,
    render_budget,
    render_rows,
    sweep_csv,
)


def small_report():
    report = BudgetReport("Test link")
    report.add("Signaling", "PPM Order", value=64)
    report.add("Signaling", "Convolutional Code Rate", value="1/3")
    report.add("Range", "Space Loss", -373.506569, 2.68, "AU")
    report.add("Other", "Pointing Loss", -8.451823)
    report.notes.append("margin below the required 3 dB")
    return report


class FormatTest(unittest.TestCase):
    def test_fmt_value(self):
        self.assertEqual(fmt_value(None), "")
        self.assertEqual(fmt_value(64), "64")
        self.assertEqual(fmt_value(Fraction(1, 3)), "1/3")
        self.assertEqual(fmt_value(400.0), "400")
        self.assertEqual(fmt_value(2.68), "2.68")
        self.assertEqual(fmt_value(9.0e-05), "9.00e-05")
        self.assertEqual(fmt_value(0.0121), "1.21e-02")
        self.assertEqual(fmt_value(2.108e11), "2.11e+11")
        self.assertEqual(fmt_value(0.0), "0")

    def test_fmt_value_full(self):
        self.assertEqual(fmt_value(2.68, "full"), "2.68")
        self.assertEqual(fmt_value(1 / 3, "full"), repr(1 / 3))

    def test_fmt_db(self):
        self.assertEqual(fmt_db(-8.451823), "-8.45")
        self.assertEqual(fmt_db(-0.001), "0.00")
        self.assertEqual(fmt_db(0.0), "0.00")
        self.assertEqual(fmt_db(-4.225912, "full"), "-4.225912")
        self.assertEqual(fmt_db(None), "")


class BudgetRenderTest(unittest.TestCase):
    def test_text(self):
        out = budget_text(small_report())
        lines = out.splitlines()
        self.assertEqual(lines[0], "Test link")
        self.assertIn("[Range]", out)
        self.assertRegex(out, r"Space Loss\s+-373\.51\s+2\.68\s+AU")
        self.assertTrue(lines[-1].startswith("note: margin below"))

    def test_csv_is_full_precision(self):
        rows = list(csv.DictReader(io.StringIO(budget_csv(small_report()))))
        self.assertEqual(len(rows), 4)
        space = rows[2]
        self.assertEqual(space["label"], "Space Loss")
        self.assertEqual(float(space["db"]), -373.506569)
        self.assertEqual(space["units"], "AU")
        self.assertEqual(rows[0]["db"], "")

    def test_records(self):
        out = budget_records(small_report())
        self.assertIn("ppm_order.value=64\n", out)
        self.assertIn("space_loss.db=-373.51\n", out)
        self.assertIn("pointing_loss.db=-8.45\n", out)
        self.assertIn("note.0=margin below the required 3 dB", out)
        self.assertNotIn("pointing_loss.value", out)

    def test_dispatch(self):
        report = small_report()
        self.assertEqual(render_budget(report, "csv"), budget_csv(report))
        self.assertEqual(render_budget(report, "records", "full"), budget_records(report, "full"))
        self.assertEqual(render_budget(report), budget_text(report))


class RenderRowsTest(unittest.TestCase):
    rows = [{"gain_db": 129.11864, "model": "gaussian"}, {"gain_db": 113.2390, "model": "exp"}]

    def test_text_aligned(self):
        lines = render_rows(self.rows).splitlines()
        self.assertEqual(len(lines), 3)
        self.assertEqual(len({len(line) for line in lines}), 1)
        self.assertIn("129.12", lines[1])

    def test_csv_full_precision(self):
        out = render_rows(self.rows, "csv", "paper")
        self.assertEqual(out.splitlines()[0], "gain_db,model")
        self.assertIn("129.11864,gaussian", out)

    def test_records_single_and_many(self):
        self.assertEqual(render_rows(self.rows[:1], "records"), "gain_db=129.12\nmodel=gaussian\n")
        self.assertIn("1.model=exp", render_rows(self.rows, "records"))

    def test_empty(self):
        self.assertEqual(render_rows([]), "")


class SweepCsvTest(unittest.TestCase):
    def test_header_and_values(self):
        rows = [SweepRow(120.0, 0.5, 239.5), SweepRow(120.5, 0.6123456789, 240.3876543211)]
        text = sweep_csv(rows)
        self.assertEqual(text.splitlines()[0], "gain_db,attenuation_db,geff_db")
        self.assertEqual(read_sweep_csv(io.StringIO(text)), rows)

    def test_read_from_path(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = pathlib.Path(tmp) / "sweep.csv"
            path.write_text(sweep_csv([SweepRow(100.0, 0.1, 199.9)]), encoding="utf-8")
            self.assertEqual(read_sweep_csv(path), [SweepRow(100.0, 0.1, 199.9)])

    def test_bad_header(self):
        with self.assertRaises(ScenarioError):
            read_sweep_csv(io.StringIO("gain,att,geff\n1,2,3\n"))

    def test_bad_value(self):
        with self.assertRaises(ScenarioError):
            read_sweep_csv(io.StringIO("gain_db,attenuation_db,geff_db\n1,x,3\n"))


class RangeTableRenderTest(unittest.TestCase):
    rows = [
        RangeRow(0.35e-6, 256, 1600.0, 32332.5, 4.397),
        RangeRow(0.35e-6, 64, 400.0, 96997.6, 2.411),
        RangeRow(0.10e-6, 256, 1600.0, 32332.5, 53.88),
        RangeRow(0.10e-6, 64, 400.0, 96997.6, 29.541),
    ]

    def test_text_layout(self):
        lines = range_table_text(self.rows, "theta_max").splitlines()
        self.assertIn("theta_max [urad]", lines[0])
        self.assertIn("256 / 1600 W", lines[0])
        self.assertIn("64 / 400 W", lines[0])
        self.assertRegex(lines[2], r"^0\.35\s+4\.397\s+2\.411$")
        self.assertRegex(lines[-1], r"^Data Rate \[kbps\]\s+32\.33\s+97\.00$")

    def test_rows(self):
        flat = range_table_rows(self.rows)
        self.assertEqual(len(flat), 4)
        self.assertAlmostEqual(flat[1]["accuracy_urad"], 0.35, places=12)
        self.assertAlmostEqual(flat[1]["data_rate_kbps"], 96.9976, places=9)
        self.assertEqual(flat[3]["range_au"], 29.541)


if __name__ == "__main__":
    unittest.main()
