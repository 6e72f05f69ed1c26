import json
import math

import numpy as np
import pytest

from gpbacklund.cli import main, read_solution_csv, write_solution_csv
from gpbacklund.gp import GPParams, gp_rhs
from gpbacklund.ode import SolutionGrid, residual_max

CLOSED_FORM_CFG = """
params.n = 1
params.eta = 0.0
params.b = -1.0
params.c = 1.0
params.v = 1.0
grid.x_min = 1.0
grid.x_max = 3.0
grid.points = 201
seed.kind = closed_form
k_schedule = 2.0
"""

INTEGRATE_CFG = """
params.n = 1
params.eta = 1.0
params.b = -1.0
params.c = 1.0
grid.x_min = 1.0
grid.x_max = 2.3
grid.points = 4001
seed.kind = integrate
seed.x0 = 1.0
seed.r0 = 0.664
seed.rp0 = -0.2214
k_schedule = 0.5
tolerances.residual_pass = 1e-5
"""


def write_cfg(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestSolve:
    def test_closed_form_constant(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, CLOSED_FORM_CFG)
        assert main(["solve", "--config", cfg, "--out-dir", str(tmp_path)]) == 0
        grid = read_solution_csv(tmp_path / "solution.csv")
        assert np.allclose(grid.rs, 1.0, rtol=0, atol=1e-15)
        assert "residual max" in capsys.readouterr().out

    def test_integrated_matches_closed_form(self, tmp_path):
        # start exactly on the closed form: integration must stay on it
        text = INTEGRATE_CFG.replace("seed.r0 = 0.664",
                                     f"seed.r0 = {1 / math.sqrt(3.0)!r}")
        text = text.replace("seed.rp0 = -0.2214",
                            f"seed.rp0 = {-3.0 ** -1.5!r}")
        cfg = write_cfg(tmp_path, text)
        assert main(["solve", "--config", cfg, "--out-dir", str(tmp_path)]) == 0
        grid = read_solution_csv(tmp_path / "solution.csv")
        expected = 1.0 / np.sqrt(1.0 + 2.0 * grid.xs)
        assert np.max(np.abs(grid.rs - expected)) < 1e-6

    def test_grid_too_small_exit_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, CLOSED_FORM_CFG.replace(
            "grid.points = 201", "grid.points = 3"))
        assert main(["solve", "--config", cfg, "--out-dir", str(tmp_path)]) == 2
        assert "grid too small" in capsys.readouterr().err

    def test_missing_config_exit_2(self, tmp_path):
        assert main(["solve", "--config", str(tmp_path / "nope.cfg")]) == 2


class TestTransform:
    def test_fixed_point_seed(self, tmp_path):
        cfg = write_cfg(tmp_path, CLOSED_FORM_CFG)
        assert main(["transform", "--config", cfg,
                     "--out-dir", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        (element,) = report["elements"]
        assert element["fixed_point"] is True
        assert element["fixed_point_deviation"] < 1e-10
        assert (tmp_path / "solution_k1.csv").is_file()

    def test_empty_schedule_exit_2(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path,
                        CLOSED_FORM_CFG.replace("k_schedule = 2.0",
                                                "k_schedule ="))
        assert main(["transform", "--config", cfg,
                     "--out-dir", str(tmp_path)]) == 2
        assert "k_schedule" in capsys.readouterr().err

    def test_generic_seed_residual_passes(self, tmp_path):
        cfg = write_cfg(tmp_path, INTEGRATE_CFG)
        assert main(["transform", "--config", cfg,
                     "--out-dir", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        (element,) = report["elements"]
        assert element["residual_max"] < 1e-5
        assert element["residual_pass"] is True
        assert element["fixed_point"] is False


class TestVerify:
    def test_all_checks_pass(self, tmp_path):
        cfg = write_cfg(tmp_path, CLOSED_FORM_CFG)
        assert main(["verify", "--config", cfg,
                     "--out-dir", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["complete"] is True
        assert all(c["pass"] for c in report["checks"])
        names = {c["name"] for c in report["checks"]}
        assert {"mobius_schwarzian_kernel", "schwarzian_composition",
                "translation_property", "q_identity", "linear_coefficient",
                "constraint_activity"} <= names
        for c in report["checks"]:
            assert set(c) == {"name", "deviation", "tolerance", "pass"}

    def test_invalid_schedule_exit_3(self, tmp_path, capsys):
        # a strongly negative K empties the valid domain: the pointwise
        # solver reports no real positive root
        cfg = write_cfg(tmp_path,
                        CLOSED_FORM_CFG.replace("params.eta = 0.0",
                                                "params.eta = 2.0")
                        .replace("k_schedule = 2.0", "k_schedule = -30.0"))
        assert main(["verify", "--config", cfg,
                     "--out-dir", str(tmp_path)]) == 3
        err = capsys.readouterr().err
        assert "NoRealRoot" in err
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["complete"] is False


class TestWavefunction:
    def test_static_imaginary_part_vanishes(self, tmp_path):
        cfg = write_cfg(tmp_path, CLOSED_FORM_CFG
                        .replace("params.c = 1.0", "params.c = 0.0")
                        .replace("params.b = -1.0", "params.b = 0.0"))
        assert main(["wavefunction", "--config", cfg, "--out-dir",
                     str(tmp_path), "--t-samples", "0"]) == 0
        rows = (tmp_path / "wave.csv").read_text().strip().splitlines()[1:]
        data = np.array([[float(v) for v in r.split(",")] for r in rows])
        assert np.allclose(data[:, 3], 0.0)
        assert np.allclose(data[:, 2], 1.0)

    def test_phase_rotation_by_pi(self, tmp_path):
        cfg = write_cfg(tmp_path, CLOSED_FORM_CFG
                        .replace("params.c = 1.0", "params.c = 0.0")
                        .replace("params.b = -1.0", "params.b = 0.0")
                        + "params.mu = 1.0\n")
        assert main(["wavefunction", "--config", cfg, "--out-dir",
                     str(tmp_path), "--t-samples",
                     f"0,{math.pi!r}"]) == 0
        rows = (tmp_path / "wave.csv").read_text().strip().splitlines()[1:]
        data = np.array([[float(v) for v in r.split(",")] for r in rows])
        re0 = data[data[:, 1] == 0.0, 2]
        re_pi = data[data[:, 1] != 0.0, 2]
        assert np.allclose(re_pi, -re0, atol=1e-12)

    def test_modulus_matches_closed_form(self, tmp_path):
        cfg = write_cfg(tmp_path, CLOSED_FORM_CFG
                        .replace("params.eta = 0.0", "params.eta = 1.0"))
        assert main(["wavefunction", "--config", cfg, "--out-dir",
                     str(tmp_path), "--t-samples", "0"]) == 0
        rows = (tmp_path / "wave.csv").read_text().strip().splitlines()[1:]
        data = np.array([[float(v) for v in r.split(",")] for r in rows])
        expected = 1.0 / np.sqrt(1.0 + 2.0 * data[:, 0])  # n = 1 shape
        assert np.allclose(data[:, 4], expected, rtol=1e-12)

    def test_bad_t_samples_exit_2(self, tmp_path):
        cfg = write_cfg(tmp_path, CLOSED_FORM_CFG)
        assert main(["wavefunction", "--config", cfg, "--out-dir",
                     str(tmp_path), "--t-samples", "a,b"]) == 2


class TestDeterminismAndRoundTrip:
    def test_byte_identical_outputs(self, tmp_path):
        cfg = write_cfg(tmp_path, CLOSED_FORM_CFG)
        d1, d2 = tmp_path / "a", tmp_path / "b"
        for d in (d1, d2):
            assert main(["solve", "--config", cfg, "--out-dir", str(d)]) == 0
            assert main(["verify", "--config", cfg, "--out-dir", str(d)]) == 0
        assert (d1 / "solution.csv").read_bytes() == \
               (d2 / "solution.csv").read_bytes()
        assert (d1 / "report.json").read_bytes() == \
               (d2 / "report.json").read_bytes()

    def test_csv_round_trip_preserves_residual(self, tmp_path):
        cfg = write_cfg(tmp_path, INTEGRATE_CFG)
        assert main(["solve", "--config", cfg, "--out-dir", str(tmp_path)]) == 0
        grid = read_solution_csv(tmp_path / "solution.csv")
        p = GPParams(n=1, eta=1.0, b=-1.0, c=1.0)
        res1 = residual_max(gp_rhs(p), grid)
        write_solution_csv(tmp_path / "copy.csv", grid)
        grid2 = read_solution_csv(tmp_path / "copy.csv")
        res2 = residual_max(gp_rhs(p), grid2)
        assert res1 == pytest.approx(res2, abs=1e-12)
        assert np.array_equal(grid.xs, grid2.xs)
        assert np.array_equal(grid.rs, grid2.rs)

    def test_rejects_non_solution_csv(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        from gpbacklund.errors import ConfigError
        with pytest.raises(ConfigError):
            read_solution_csv(bad)
