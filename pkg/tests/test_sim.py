from dataclasses import replace

import numpy as np
import pytest

from leoirs import geo
from leoirs.arrays import upa_response
from leoirs.beamform import BeamformingSolution
from leoirs.estimator import make_method
from leoirs.sim import (
    ALWAYS_DIRECT,
    ELEVATION_MASK,
    NEVER_DIRECT,
    BlockageModel,
    Scene,
    SimulationConfig,
    classify_scenario,
    evaluate_snr,
    improvement_stats,
    run_lv_sweep,
    run_m_sweep,
    run_time_sweep,
    square_panel,
    sweep_times,
)

CFG = SimulationConfig()


@pytest.fixture(scope="module")
def time_records():
    return run_time_sweep(CFG)


class TestClassification:
    def test_fixed_modes(self, rng):
        for _ in range(5):
            s, g = rng.normal(size=3), rng.normal(size=3)
            assert classify_scenario(s, g, BlockageModel(ALWAYS_DIRECT)) == "II"
            assert classify_scenario(s, g, BlockageModel(NEVER_DIRECT)) == "I"

    def test_plane_sign_oracle(self, rng):
        normal = np.array([0.0, 0.6, 0.8])
        model = BlockageModel(plane_point=(1.0, 2.0, 3.0), plane_normal=tuple(normal))
        gu = np.array([1.0, 2.0, 3.0]) + 5 * normal
        for _ in range(50):
            sat = rng.normal(size=3) * 10
            side = normal @ (sat - np.array([1.0, 2.0, 3.0]))
            expected = "II" if side > 0 else "I"
            assert classify_scenario(sat, gu, model) == expected

    def test_default_plane_is_the_irs(self):
        scene = Scene(CFG)
        irs = scene.irs_frame
        front = irs.origin + 1e5 * irs.z_axis + 1e5 * irs.y_axis
        behind = irs.origin - 1e5 * irs.z_axis + 1e5 * irs.y_axis
        gu = scene.gu_frame.origin
        assert classify_scenario(front, gu, BlockageModel(), irs) == "II"
        assert classify_scenario(behind, gu, BlockageModel(), irs) == "I"
        with pytest.raises(ValueError):
            classify_scenario(front, gu, BlockageModel())

    def test_elevation_mask(self):
        gu = np.array([geo.EARTH_RADIUS, 0.0, 0.0])
        model = BlockageModel(ELEVATION_MASK, mask_angle=np.deg2rad(10))
        overhead = gu + np.array([7e5, 0, 0])
        horizon = gu + np.array([0, 7e5, 1e3])
        assert classify_scenario(overhead, gu, model) == "II"
        assert classify_scenario(horizon, gu, model) == "I"

    def test_invalid_models(self):
        with pytest.raises(ValueError):
            BlockageModel("fog")
        with pytest.raises(ValueError):
            BlockageModel(plane_normal=(0.0, 0.0, 2.0))


class TestEvaluateSnr:
    def test_unit_gain(self):
        sol = BeamformingSolution(np.array([1.0]), np.array([1.0]), None, 0.0, 0.0)
        assert evaluate_snr(np.array([[1.0]]), sol, 10 ** 1.5, 1e-12) == pytest.approx(135.0)

    def test_scaling_by_ten_adds_20db(self, rng):
        h = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        sol = BeamformingSolution(np.ones(2) / np.sqrt(2), np.ones(3) / np.sqrt(3), None, 0.0, 0.0)
        assert evaluate_snr(10 * h, sol, 1.0, 1.0) - evaluate_snr(h, sol, 1.0, 1.0) == pytest.approx(20.0)


class TestTimeSweep:
    def test_times(self, time_records):
        t = [r.x for r in time_records]
        np.testing.assert_allclose(t, np.arange(len(t)) * CFG.time_step)
        assert len(t) == int(np.ceil(CFG.orbit.duration()))

    def test_dominance(self, time_records):
        for r in time_records:
            s = r.snr_db
            assert s["proposed"] >= s["2d-tilt"] - 1e-9
            assert s["2d-tilt"] >= s["no-tilt"] - 1e-9

    def test_no_irs_is_silent_without_direct_path(self, time_records):
        scen1 = [r for r in time_records if r.scenario == "I"]
        assert scen1
        assert all(r.snr_db["no-irs"] == -np.inf for r in scen1)

    def test_both_scenarios_visited(self, time_records):
        assert {r.scenario for r in time_records} == {"I", "II"}

    def test_improvement_stats(self, time_records):
        st = improvement_stats(time_records, "proposed", "2d-tilt")
        assert st["count"] == len(time_records)
        assert st["peak_db"] >= st["mean_db"] >= 0
        assert improvement_stats([], "proposed", "2d-tilt")["count"] == 0

    def test_explicit_duration(self):
        assert len(sweep_times(replace(CFG, duration=10.0))) == 10
        assert len(sweep_times(replace(CFG, duration=2.5, time_step=0.5))) == 5


class TestLvSweep:
    @pytest.mark.parametrize("sat", ["low", "high"])
    def test_peak_at_zero(self, sat):
        recs = run_lv_sweep(CFG, sat, methods=("proposed",))
        best = max(recs, key=lambda r: r.snr_db["proposed"])
        assert best.x == 0.0
        assert all(r.scenario == "I" for r in recs)

    def test_low_elevation_gap_grows_with_offset(self):
        lv = [0.0, 250.0, 500.0, 750.0, 1000.0]
        recs = run_lv_sweep(CFG, "low", lv_values=lv, methods=("proposed", "2d-tilt"))
        gaps = [r.snr_db["proposed"] - r.snr_db["2d-tilt"] for r in recs]
        assert all(b > a for a, b in zip(gaps, gaps[1:]))

    def test_mirror_symmetry_in_the_irs_plane(self):
        # satellite straight up the IRS y-z plane: same longitude, further south
        cfg = replace(CFG, sat_high=(45.0, 0.0))
        lv = np.arange(100.0, 1001.0, 100.0)
        plus = run_lv_sweep(cfg, "high", lv_values=lv, methods=("proposed", "2d-tilt"))
        minus = run_lv_sweep(cfg, "high", lv_values=-lv, methods=("proposed", "2d-tilt"))
        for p, m in zip(plus, minus):
            for k in p.snr_db:
                assert p.snr_db[k] == pytest.approx(m.snr_db[k], abs=1e-6)

    def test_no_irs_dropped_in_blocked_experiment(self):
        recs = run_lv_sweep(CFG, "high", lv_values=[0.0])
        assert "no-irs" not in recs[0].snr_db


class TestMSweep:
    def test_square_law_and_constant_gaps(self):
        recs = run_m_sweep(CFG, methods=("proposed", "2d-tilt", "no-tilt"))
        m = np.array([r.x for r in recs])
        snr = np.array([r.snr_db["proposed"] for r in recs])
        slope = np.polyfit(np.log10(m), snr / 10, 1)[0]
        assert slope == pytest.approx(2.0, abs=1e-6)
        for base in ("2d-tilt", "no-tilt"):
            gaps = [r.snr_db["proposed"] - r.snr_db[base] for r in recs]
            assert np.ptp(gaps) < 1e-9

    def test_explicit_panel_shapes(self):
        recs = run_m_sweep(CFG, m_values=[(10, 40), (20, 20)], methods=("proposed",))
        assert [r.x for r in recs] == [400, 400]

    def test_square_panel(self):
        assert square_panel(144) == (12, 12)
        with pytest.raises(ValueError):
            square_panel(150)

    def test_isotropic_gap_matches_array_factors(self):
        rec = run_m_sweep(CFG, m_values=[400], methods=("proposed", "isotropic"))[0]
        scene = Scene(CFG)
        geom = scene.geometry(scene.satellite_frame("high"), scenario="I")
        k = CFG.system.wavenumber
        a_g = upa_response(geom.gu_from_irs, CFG.system.gu_array, k)
        a_s = upa_response(geom.sat_to_irs, CFG.system.sat_array, k)
        n_g, n_s = a_g.size, a_s.size
        expected = (10 * np.log10(n_g / (abs(a_g.sum()) ** 2 / n_g))
                    + 10 * np.log10(n_s / (abs(a_s.sum()) ** 2 / n_s)))
        assert rec.snr_db["proposed"] - rec.snr_db["isotropic"] == pytest.approx(expected, abs=1e-6)


def test_scene_layout_matches_configured_offsets():
    x, _, z = Scene(CFG).layout_offsets()
    assert abs(x) == pytest.approx(CFG.l_v, abs=1.0)
    assert abs(z) == pytest.approx(CFG.l_h, abs=1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        SimulationConfig(methods=("magic",))
    with pytest.raises(ValueError):
        SimulationConfig(methods=())


def test_reflected_path_is_continuous_across_the_scenario_boundary():
    scene = Scene(CFG)
    orbit = CFG.orbit

    def geometry_at(t):
        pos = geo.propagate_orbit(orbit, t)
        return scene.geometry(geo.frame_from_velocity(pos, geo.orbit_velocity(orbit, t)))

    lo, hi = 0.0, orbit.duration()
    assert geometry_at(lo).direct and not geometry_at(hi).direct
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if geometry_at(mid).direct else (lo, mid)
    before = make_method("proposed").fit(geometry_at(lo - 1e-3))
    after = make_method("proposed").fit(geometry_at(hi + 1e-3))
    assert before.scenario_ == "II" and after.scenario_ == "I"
    assert before.closed_form_snr_db() == pytest.approx(after.closed_form_snr_db(), abs=1e-3)
