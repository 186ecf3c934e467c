import math
import os
import subprocess

import numpy as np
import pytest

import keystep


def test_formulas():
    assert keystep.structural_cost(1.0) == pytest.approx(0.92414181997875644881, abs=1e-12)
    assert keystep.statistical_cost(0.2, 0.7) == pytest.approx(1 - math.tanh(0.5), abs=1e-12)
    assert keystep.distance_cost(0, 10, 100, 10) == pytest.approx(0.77152175321327053356, abs=1e-12)


def test_dp_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(30):
        t = int(rng.integers(2, 12))
        k = int(rng.integers(2, min(t, 5) + 1))
        m = rng.random((t, t))
        m = (m + m.T) / 2
        assert keystep.select_salient(m, k) == keystep.brute_force_select(m, k)


def test_pins_and_excludes():
    m = np.ones((10, 10))
    steps, cost = keystep.select_salient(m, 4, pinned={3}, excluded={5})
    assert 3 in steps and 5 not in steps
    assert cost == pytest.approx(3.0)
    with pytest.raises(keystep.ConstraintError):
        keystep.select_salient(m, 2, pinned={3})


def test_dataset_select_and_reconstruct():
    d = keystep.synthesize("burst", 40, 24, 24, bursts=[20])
    assert len(d) == 40
    r = keystep.select(d, 5)
    assert r["steps"][0] == 0 and r["steps"][-1] == 39
    assert 20 in r["steps"]
    rec = keystep.reconstruct(d, r["steps"])
    assert rec.shape == (40, 24, 24)
    np.testing.assert_array_equal(rec[20], d.frames()[20])
    with pytest.raises(keystep.ConstraintError):
        keystep.select(d, 5, alpha=0.6, beta=0.5)


def test_ramp_evaluation_is_exact():
    d = keystep.synthesize("ramp", 21, 8, 8)
    report = keystep.evaluate(d, ks=[3, 5])
    assert report["rows"]
    for row in report["rows"]:
        assert row["rmse"] <= 1e-9
        assert row["psnr_db"] == "inf" or row["psnr_db"] > 150


def test_round_trip(tmp_path):
    frames = np.random.default_rng(1).random((4, 5, 6)).astype(np.float32).astype(np.float64)
    frames[1, 2, 3] = np.nan
    d = keystep.from_array("arr", "v", frames)
    keystep.export_stack(d, tmp_path / "stack")
    back = keystep.ingest_stack(tmp_path / "stack")
    assert back == d
    np.testing.assert_array_equal(back.frames(), frames)

    codes = keystep.codes(d)
    assert codes.shape == (4, 512)
    codes32 = (codes + 0.5).astype(np.float32).astype(np.float64)
    keystep.save_latent_codes(codes32, tmp_path / "c.bin")
    np.testing.assert_array_equal(keystep.load_latent_codes(tmp_path / "c.bin"), codes32)


def test_projection():
    pts = keystep.project_2d(np.array([[0, 0, 5], [3, 0, 5], [0, 4, 5.0]]))
    assert pts.shape == (3, 2)
    assert np.abs(pts).max() <= 1 + 1e-12


@pytest.mark.skipif("KEYSTEP_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_matches_module(tmp_path):
    cli = os.environ["KEYSTEP_CLI"]
    out = tmp_path / "blob"
    subprocess.run([cli, "synth", "--family", "blob", "--t", "30", "--size", "16x16", "--out", str(out)], check=True,
                   capture_output=True)
    res = subprocess.run([cli, "select", "--dataset", str(out), "--k", "6", "--beta", "0.5"], capture_output=True,
                         text=True, check=True)
    import json
    want = keystep.select(keystep.ingest_stack(out), 6, beta=0.5)
    assert json.loads(res.stdout) == want
    bad = subprocess.run([cli, "select", "--dataset", str(out), "--k", "6", "--alpha", "0.6", "--beta", "0.5"],
                         capture_output=True, text=True)
    assert bad.returncode == 2
