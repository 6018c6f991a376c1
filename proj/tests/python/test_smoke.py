import math

import numpy as np
import pytest

import rodhom

SMALL = {
    "geometry": {"cross_section": {"rectangle": {"aspect": 1.0, "nx": 4, "ny": 4}}, "n_y": 4},
    "loads": 2,
}


def test_default_config_round_trip():
    cfg = rodhom.default_config()
    assert cfg["L"] == 4.0
    assert rodhom.normalise_config(cfg) == cfg


def test_invalid_config_raises():
    with pytest.raises(ValueError):
        rodhom.normalise_config({"gamma": -3.0})
    with pytest.raises(ValueError):
        rodhom.normalise_config({"no_such_key": 1})


def test_classical_limits():
    a = rodhom.isotropic_rod_tensor(1.0, 1.0, nx=12, ny=12)
    assert a.shape == (4, 4)
    assert np.allclose(a, a.T, atol=1e-12)
    assert a[3, 3] == pytest.approx(2.5, rel=1e-10)
    assert a[0, 0] == pytest.approx(2.5 / 12.0, rel=0.02)
    assert a[2, 2] == pytest.approx(rodhom.saint_venant_torsion(1.0), rel=0.05)
    assert rodhom.saint_venant_torsion(1.0) == pytest.approx(0.1406, abs=1e-4)


def test_homogenize_keys_and_sanity():
    out = rodhom.homogenize(SMALL)
    for key in ("A_rod", "A_bend", "A_stretch", "eta", "c1", "c2"):
        assert key in out
    assert out["eta"] > 0.0
    assert out["sanity"]["pass"]
    assert out["provenance"]["mesh_hash"]


def test_stretch_rates():
    cfg = dict(SMALL, regimes=["stretch"])
    rep = rodhom.rates(cfg, order=0)["report"]
    assert rep["all_pass"]
    for entry in rep["entries"]:
        assert entry["slope_fit"] >= entry["threshold"]
        assert all(math.isfinite(e) for e in entry["err"])


def test_identities():
    out = rodhom.identities(SMALL, N=8)
    assert out["identities"]["pass"]
    assert out["consistency"]["pass"]
