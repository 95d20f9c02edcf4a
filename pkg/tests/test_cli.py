import json

import numpy as np
import pytest

from cli import build_parser, main, overrides
from xbouss.output import read_csv
from xbouss.refwaves import sech2

SMALL_CORRECTOR = ["corrector", "--grid-n", "64", "--grid-half-width", "20", "--t", "0.5"]


def test_flags_map_to_config_keys():
    args = build_parser().parse_args(["residuals", "--eps", "1e-1,1e-2", "--grid-n", "128"])
    assert overrides(args) == {
        "eps_list": [0.1, 0.01], "alpha": None, "t": None, "grid_n": 128,
        "grid_half_width": None, "dt": None, "tol": None, "closure": None,
    }


def test_wave_speed_must_exceed_one(tmp_path):
    assert main(["solitary", "--c", "1.0", "--out", str(tmp_path / "s.csv")]) == 2
    assert not (tmp_path / "s.csv").exists()


@pytest.mark.parametrize("argv", [
    ["residuals", "--eps", ""],
    ["residuals", "--eps", "0.1,abc"],
    ["corrector", "--closure", "exact"],
    ["nonsense"],
])
def test_usage_errors(argv):
    assert main(argv) == 2


def test_missing_config_file(tmp_path):
    assert main(SMALL_CORRECTOR + ["--config", str(tmp_path / "absent.yml"), "--out", str(tmp_path / "c.csv")]) == 2


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.yml"
    cfg.write_text("dx: 0.1\n")
    assert main(SMALL_CORRECTOR + ["--config", str(cfg), "--out", str(tmp_path / "c.csv")]) == 2


def test_corrector_csv(tmp_path):
    out = tmp_path / "corrector.csv"
    assert main(SMALL_CORRECTOR + ["--out", str(out)]) == 0
    assert out.read_text().startswith('# study: "corrector"\n')
    meta, df = read_csv(out)
    assert meta["config"]["t"] == 0.5
    assert meta["config"]["grid_n"] == 64
    assert len(df) == 64
    assert (tmp_path / "corrector_summary.json").exists()


def test_repeated_runs_are_byte_identical(tmp_path):
    assert main(SMALL_CORRECTOR + ["--out", str(tmp_path / "a.csv")]) == 0
    assert main(SMALL_CORRECTOR + ["--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_config_file_then_flags(tmp_path):
    cfg = tmp_path / "run.yml"
    cfg.write_text("t: 0.25\nclosure: compensated\n")
    out = tmp_path / "c.json"
    assert main(SMALL_CORRECTOR + ["--config", str(cfg), "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["metadata"]["config"]["t"] == 0.5
    assert doc["metadata"]["config"]["closure"] == "compensated"
    assert len(doc["tables"]["fields"]) == 64


@pytest.mark.slow
def test_gn_mode_solitary(tmp_path):
    out = tmp_path / "gn.csv"
    assert main(["solitary", "--c", "1.01", "--gn-mode", "--out", str(out)]) == 0
    meta, df = read_csv(out)
    assert meta["config"]["gn_mode"] is True
    assert df["zeta"].max() == pytest.approx(1.01 ** 2 - 1.0, rel=1e-9)


@pytest.mark.slow
def test_solitary_peak_row_matches_golden(tmp_path, golden_solitary):
    out = tmp_path / "solitary.csv"
    assert main(["solitary", "--c", "1.025", "--out", str(out)]) == 0
    _, df = read_csv(out)
    peak = df.loc[df["zeta"].idxmax()]
    assert peak["xi"] == 0.0
    assert peak["zeta"] == pytest.approx(golden_solitary["amplitude"], rel=golden_solitary["rtol"])


@pytest.mark.slow
def test_compare_curves(tmp_path):
    out = tmp_path / "compare.csv"
    assert main(["compare", "--c", "1.025,1.01", "--out", str(out)]) == 0
    _, df = read_csv(out)
    assert set(df["model"]) == {"xB", "GN", "KdV"}
    kdv = {c: rows.sort_values("X") for c, rows in df[df["model"] == "KdV"].groupby("c")}
    assert sorted(kdv) == [1.01, 1.025]
    # the KdV/Boussinesq curve is the same sech^2 for every speed
    np.testing.assert_allclose(kdv[1.025]["Z"].to_numpy(), kdv[1.01]["Z"].to_numpy(), atol=1e-12)
    np.testing.assert_allclose(kdv[1.01]["Z"].to_numpy(), sech2(kdv[1.01]["X"].to_numpy()), atol=1e-12)

    summary = json.loads((tmp_path / "compare_summary.json").read_text())
    per_c = {row["c"]: row for row in summary["per_c"]}
    for c in (1.025, 1.01):
        assert 1.0 < per_c[c]["Z0"] < 1.0 + 0.075 * (c ** 2 - 1.0)
        assert per_c[c]["max_distance_to_sech2"] < 0.01
    assert per_c[1.01]["Z0"] < per_c[1.025]["Z0"]


@pytest.fixture(scope="module")
def residuals_doc(tmp_path_factory):
    out = tmp_path_factory.mktemp("residuals") / "residuals.json"
    assert main(["residuals", "--eps", "1e-1,1e-2,1e-3,1e-4", "--format", "json", "--out", str(out)]) == 0
    return json.loads(out.read_text())


@pytest.mark.slow
def test_residuals_meet_slope_and_reference_checks(residuals_doc):
    checks = residuals_doc["summary"]["checks"]
    assert checks["slopes_in_band"] is True
    assert checks["accepted"] is True
    for eps in ("0.1", "0.01", "0.001", "0.0001"):
        for key in ("r1_inf", "r2_l2"):
            entry = checks["reference_factors"][f"{key}@{eps}"]
            assert entry["ok"], (key, eps, entry["factor"])
    for key, slope in residuals_doc["summary"]["slopes"].items():
        assert 2.9 <= slope <= 3.1, key


@pytest.mark.slow
def test_residuals_plot_table(residuals_doc):
    plot = residuals_doc["tables"]["plot"]
    sweep = residuals_doc["tables"]["sweep"]
    assert [round(row["log10_epsilon"]) for row in plot] == [-1, -2, -3, -4]
    for row, swept in zip(plot, sweep):
        assert row["log10_eps3_guide"] == pytest.approx(3.0 * row["log10_epsilon"], abs=1e-12)
        for key in ("r1_l2", "r2_l2", "r1_inf", "r2_inf"):
            assert row[f"log10_{key}"] == pytest.approx(np.log10(swept[key]), abs=1e-12)
