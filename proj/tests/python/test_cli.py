"""End-to-end CLI checks: values, formats, exit codes, and config replay.
The binary path comes from the SOFICLAB_CLI environment variable."""

import json
import math
import os
import subprocess
import tempfile
import unittest

CLI = os.environ["SOFICLAB_CLI"]


def run(*args, expect=0):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    if expect is not None and proc.returncode != expect:
        raise AssertionError(
            f"exit {proc.returncode} != {expect}: {' '.join(args)}\n{proc.stderr}")
    return proc


class EntropyCommand(unittest.TestCase):
    def test_ising_report(self):
        proc = run("entropy", "--ising", "0.4", "--r", "2")
        doc = json.loads(proc.stdout)
        self.assertAlmostEqual(doc["f"], 0.5285814235498417, places=11)
        self.assertFalse(doc["ks_violated"])
        self.assertAlmostEqual(doc["typical_entropy"]["value"], doc["f"], places=11)

    def test_ising_atypical(self):
        doc = json.loads(run("entropy", "--ising", "0.6", "--r", "2").stdout)
        self.assertTrue(doc["ks_violated"])
        self.assertFalse(doc["typical_entropy"]["finite"])

    def test_zero_theta(self):
        doc = json.loads(run("entropy", "--ising", "0.0", "--r", "2").stdout)
        self.assertAlmostEqual(doc["f"], math.log(2.0), places=12)

    def test_chain_file_and_validation_exit(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "chain.json")
            with open(path, "w") as f:
                json.dump({"q": 2, "r": 2, "p1": [0.5, 0.5],
                           "M": [[0.7, 0.3], [0.3, 0.7]]}, f)
            doc = json.loads(run("entropy", "--chain", path, "--r", "2").stdout)
            self.assertAlmostEqual(doc["f"], 0.5285814235498417, places=11)

            with open(path, "w") as f:
                json.dump({"q": 2, "r": 2, "p1": [0.9, 0.1],
                           "M": [[0.5, 0.5], [0.5, 0.5]]}, f)
            run("entropy", "--chain", path, expect=3)

    def test_flag_conflicts(self):
        run("entropy", "--ising", "0.2", "--hardcore", "0.3", expect=3)
        run("entropy", expect=3)


class Fig1Command(unittest.TestCase):
    def test_curve(self):
        proc = run("fig1", "--r", "2", "--grid", "21")
        lines = [l for l in proc.stdout.splitlines() if l and not l.startswith("#")]
        self.assertEqual(lines[0], "theta,value,kind")
        data = [l.split(",") for l in lines[1:] if l.endswith(",data")]
        self.assertEqual(len(data), 21)
        # symmetric row-for-row
        for row, mirror in zip(data, reversed(data)):
            self.assertEqual(row[1], mirror[1])
        center = data[10]
        self.assertAlmostEqual(float(center[1]), math.log(2.0), places=12)
        thresholds = [l for l in lines[1:] if l.endswith(",threshold")]
        self.assertEqual(len(thresholds), 2)

    def test_out_of_range_grid(self):
        run("fig1", "--theta-max", "0.6", expect=3)


class PhaseCommand(unittest.TestCase):
    def test_regime_flip(self):
        proc = run("phase", "--q", "3", "--r", "2", "--j-min", "0.2", "--j-max", "0.7",
                   "--steps", "26")
        rows = [l.split(",") for l in proc.stdout.splitlines()
                if l and not l.startswith("#") and not l.startswith("q,")]
        regimes = {}
        for row in rows:
            if row[7] == "":
                regimes[float(row[2])] = row[6]
        flips = [j for j in sorted(regimes) if regimes[j] == "ORDERED_MIXTURE"]
        self.assertTrue(flips)
        self.assertAlmostEqual(min(flips), 0.4406867935097714, delta=0.021)
        notes = {row[7] for row in rows}
        self.assertIn("J_p", notes)
        self.assertIn("tail_bound", notes)

    def test_ising_phase_has_j_u(self):
        proc = run("phase", "--q", "2", "--r", "2", "--j-min", "0.1", "--j-max", "0.6",
                   "--steps", "6")
        notes = {l.split(",")[7] for l in proc.stdout.splitlines()
                 if l and not l.startswith("#") and not l.startswith("q,")}
        self.assertIn("J_u", notes)
        self.assertNotIn("J_p", notes)


class SimulateCommand(unittest.TestCase):
    def test_disordered_run_and_rerun_identity(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = os.path.join(tmp, "report.json")
            run("simulate", "--q", "3", "--r", "2", "--J", "0.22", "--n", "1000",
                "--sweeps", "300", "--burn-in", "100", "--replicas", "2", "--thin", "10",
                "--seed", "9", "--out", out)
            doc = json.load(open(out))
            self.assertEqual(doc["verdict"]["status"], "PASS")
            self.assertEqual(doc["prediction"]["regime"], "DISORDERED")

            replay = os.path.join(tmp, "replay.json")
            run("rerun", "--from", out, "--out", replay)
            self.assertEqual(open(out, "rb").read(), open(replay, "rb").read())

    def test_verdict_fail_exit_code(self):
        proc = run("simulate", "--q", "3", "--r", "2", "--J", "0.22", "--n", "200",
                   "--sweeps", "60", "--burn-in", "20", "--replicas", "1", "--thin", "10",
                   "--tol", "0.000001", "--seed", "5", expect=2)
        doc = json.loads(proc.stdout)
        self.assertEqual(doc["verdict"]["status"], "FAIL")

    def test_critical_skip(self):
        jp = "0.4406867935097714"
        proc = run("simulate", "--q", "3", "--r", "2", "--J", jp, "--n", "60",
                   "--sweeps", "30", "--burn-in", "10", "--replicas", "1", "--thin", "5",
                   "--seed", "3")
        doc = json.loads(proc.stdout)
        self.assertEqual(doc["verdict"]["status"], "SKIPPED")

    def test_sample_dump(self):
        with tempfile.TemporaryDirectory() as tmp:
            dump = os.path.join(tmp, "samples.bin")
            # the verdict on such a short run is noise; only the dump matters
            run("simulate", "--q", "2", "--r", "2", "--J", "0.1", "--n", "50",
                "--sweeps", "20", "--burn-in", "10", "--replicas", "1", "--thin", "2",
                "--seed", "2", "--out", os.path.join(tmp, "r.json"),
                "--dump-samples", dump, expect=None)
            blob = open(dump, "rb").read()
            self.assertEqual(blob[:4], b"SFLB")
            n = int.from_bytes(blob[4:8], "little")
            count = int.from_bytes(blob[12:16], "little")
            self.assertEqual(n, 50)
            self.assertEqual(len(blob), 16 + n * count)


class EnumerateCommand(unittest.TestCase):
    def test_budget_refusal(self):
        proc = run("enumerate", "--theta", "0.2", "--r", "2", "--n-list", "40",
                   "--graphs", "1", expect=4)
        self.assertIn("budget", proc.stderr)

    def test_rates_and_rerun(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = os.path.join(tmp, "growth.csv")
            run("enumerate", "--theta", "0.2", "--r", "2", "--R", "1", "--eps", "1.3",
                "--n-list", "6,8", "--graphs", "10", "--seed", "4", "--out", out)
            rows = [l.split(",") for l in open(out)
                    if l.strip() and not l.startswith("#") and not l.startswith("n,")]
            self.assertEqual(len(rows), 2)
            self.assertAlmostEqual(float(rows[0][3]), 0.6528761534585681, places=10)

            replay = os.path.join(tmp, "replay.csv")
            run("rerun", "--from", out, "--out", replay)
            self.assertEqual(open(out, "rb").read(), open(replay, "rb").read())


class SpectralCommand(unittest.TestCase):
    def test_median_rows(self):
        proc = run("spectral", "--n", "400", "--r", "2", "--m-list", "1", "--graphs", "3",
                   "--seed", "5")
        rows = [l.split(",") for l in proc.stdout.splitlines()
                if l and not l.startswith("#") and not l.startswith("m,")]
        medians = [r for r in rows if r[1] == "-1"]
        self.assertEqual(len(medians), 1)
        self.assertAlmostEqual(float(medians[0][3]), 1.5 / math.sqrt(3.0), places=12)
        self.assertLess(abs(float(medians[0][2]) - 1.5 / math.sqrt(3.0)), 0.08)


if __name__ == "__main__":
    unittest.main()
