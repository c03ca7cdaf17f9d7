"""Terrain profiles, speed mapping, and synthesized runs."""

import numpy as np
import pytest

from whisksim import (
    Excitation,
    PhysicsError,
    RobotRun,
    SpectralComponent,
    SpectralProfile,
    SpringSpec,
    TerrainClass,
    default_profiles,
    displacement_series,
    profiles_from_json,
    profiles_to_json,
    smoke_profiles,
    spring_to_beam,
    steady_state_offset,
    strip_randomness,
    synthesize_run,
    temporal_components,
)
from whisksim.pipeline import Spectrum, build_dataset, dominant_frequency


@pytest.fixture(scope="module")
def beam():
    return spring_to_beam(SpringSpec())


class TestTerrainClass:
    def test_ids_and_labels(self):
        assert [int(t) for t in TerrainClass] == [1, 2, 3, 4, 5, 6, 7]
        assert TerrainClass.FLAT.label == "flat"
        assert TerrainClass.SOFT_GRASS.label == "soft-grass"
        assert TerrainClass.SOFT_SOIL.label == "soft-soil"

    def test_label_roundtrip(self):
        for t in TerrainClass:
            assert TerrainClass.from_label(t.label) is t
        with pytest.raises(PhysicsError):
            TerrainClass.from_label("asphalt")


class TestDefaultProfiles:
    def test_identical_across_calls(self):
        assert default_profiles() == default_profiles()
        assert smoke_profiles() == smoke_profiles()

    def test_covers_all_terrains(self):
        assert set(default_profiles()) == set(TerrainClass)
        assert set(smoke_profiles()) == set(TerrainClass)

    def test_flat_noise_below_brick_noise(self):
        table = default_profiles()
        assert (table[TerrainClass.FLAT].noise_floor_m
                < table[TerrainClass.BRICK].noise_floor_m)

    def test_dominant_frequencies_separated(self):
        # at 0.2 m/s with 1 s / 200 Hz windows (1 Hz bins) every pair of
        # dominant frequencies must be at least 2 bins apart
        table = default_profiles()
        doms = sorted(p.dominant_frequency_at(0.2) for p in table.values())
        assert doms == pytest.approx([5.0, 12.0, 20.0, 28.0, 36.0, 44.0, 52.0])
        gaps = np.diff(doms)
        assert np.all(gaps >= 2.0)

    def test_dominant_component_wins_by_response_weight(self):
        # response scales with h/lambda^2; the documented dominant must lead
        # every sibling by a clear factor so noise cannot flip the ranking
        for profile in default_profiles().values():
            weights = sorted((c.height_m / c.wavelength_m ** 2
                              for c in profile.components), reverse=True)
            if len(weights) > 1:
                assert weights[0] > 2.0 * weights[1]

    def test_components_stay_below_nyquist_at_top_speed(self):
        for profile in default_profiles().values():
            temporal_components(profile, 0.3, sample_rate_hz=200.0)
        for profile in smoke_profiles().values():
            temporal_components(profile, 0.3, sample_rate_hz=200.0)


class TestSpectralTypes:
    def test_component_validation(self):
        with pytest.raises(PhysicsError):
            SpectralComponent(0.0, 1e-5)
        with pytest.raises(PhysicsError):
            SpectralComponent(0.01, -1e-5)

    def test_profile_needs_components(self):
        with pytest.raises(PhysicsError):
            SpectralProfile(components=())

    def test_robot_run_validation(self):
        with pytest.raises(PhysicsError):
            RobotRun(0.0, 10.0)
        with pytest.raises(PhysicsError):
            RobotRun(0.2, -1.0)
        assert RobotRun(0.2, 10.0).sample_rate_hz == 200.0


class TestTemporalComponents:
    def test_wavelength_to_frequency(self):
        profile = SpectralProfile((SpectralComponent(0.05, 1e-5),))
        (exc,) = temporal_components(profile, 0.2)
        assert exc.frequency_hz == pytest.approx(4.0)
        assert exc.amplitude_m == 1e-5

    def test_doubling_speed_doubles_frequency(self):
        profile = default_profiles()[TerrainClass.SAND]
        slow = temporal_components(profile, 0.15)
        fast = temporal_components(profile, 0.30)
        for a, b in zip(slow, fast):
            assert b.frequency_hz == pytest.approx(2.0 * a.frequency_hz)
            assert b.amplitude_m == a.amplitude_m

    def test_ordering_preserved(self):
        profile = default_profiles()[TerrainClass.SAND]
        excs = temporal_components(profile, 0.2)
        expected = [0.2 / c.wavelength_m for c in profile.components]
        assert [e.frequency_hz for e in excs] == pytest.approx(expected)

    def test_rejects_nyquist_violation(self):
        profile = SpectralProfile((SpectralComponent(0.001, 1e-5),))  # 200 Hz at 0.2
        with pytest.raises(PhysicsError):
            temporal_components(profile, 0.2, sample_rate_hz=200.0)

    def test_brick_shift_with_speed_is_closed_form(self):
        profile = default_profiles()[TerrainClass.BRICK]
        lam = profile.dominant_component().wavelength_m
        f_slow = profile.dominant_frequency_at(0.2)
        f_fast = profile.dominant_frequency_at(0.25)
        assert f_fast - f_slow == pytest.approx(0.05 / lam)
        assert f_fast - f_slow == pytest.approx(5.0)


class TestSynthesizeRun:
    def test_seeded_determinism(self, beam):
        run = RobotRun(0.2, 5.0, 200.0, seed=123)
        a = synthesize_run(TerrainClass.SAND, run, beam, 0.005)
        b = synthesize_run(TerrainClass.SAND, run, beam, 0.005)
        assert a.samples.tobytes() == b.samples.tobytes()
        assert a.start_time_s == b.start_time_s

    def test_different_seeds_differ(self, beam):
        a = synthesize_run(TerrainClass.SAND, RobotRun(0.2, 5.0, seed=1), beam, 0.005)
        b = synthesize_run(TerrainClass.SAND, RobotRun(0.2, 5.0, seed=2), beam, 0.005)
        assert not np.array_equal(a.samples, b.samples)

    def test_single_component_no_noise_equals_beam_series(self, beam):
        profile = SpectralProfile((SpectralComponent(0.01, 3e-5, 0.0),), 0.0)
        run = RobotRun(0.2, 2.0, 200.0, seed=7)
        got = synthesize_run(TerrainClass.BRICK, run, beam, 0.005, profile=profile)
        want = displacement_series(beam, Excitation(3e-5, 20.0), 0.005, 200.0,
                                   2.0, t0_s=steady_state_offset(beam))
        assert np.array_equal(got.samples, want.samples)

    def test_sample_count_five_minutes(self, beam):
        run = RobotRun(0.2, 300.0, 200.0, seed=0)
        series = synthesize_run(TerrainClass.FLAT, run, beam, 0.005)
        assert len(series) == 60000
        ds = build_dataset([(series, TerrainClass.FLAT)], 1.0)
        assert len(ds) == 300

    def test_superposition_consistency(self, beam):
        comps = (SpectralComponent(0.01, 3e-5, 0.0),
                 SpectralComponent(0.02, 1e-5, 0.0),
                 SpectralComponent(0.004, 2e-6, 0.0))
        run = RobotRun(0.2, 2.0, 200.0, seed=99)
        full = synthesize_run(TerrainClass.SAND, run, beam, 0.005,
                              profile=SpectralProfile(comps, 0.0))
        parts = [synthesize_run(TerrainClass.SAND, run, beam, 0.005,
                                profile=SpectralProfile((c,), 0.0)).samples
                 for c in comps]
        assert np.array_equal(full.samples, parts[0] + parts[1] + parts[2])

    def test_speed_scales_dominant_frequency(self, beam):
        profile = SpectralProfile((SpectralComponent(0.01, 3e-5, 0.0),), 0.0)
        for v, expected in ((0.1, 10.0), (0.2, 20.0), (0.3, 30.0)):
            run = RobotRun(v, 1.0, 200.0, seed=0)
            series = synthesize_run(TerrainClass.BRICK, run, beam, 0.005,
                                    profile=profile)
            spec = Spectrum(np.abs(np.fft.fft(series.samples)), 1.0)
            assert dominant_frequency(spec) == pytest.approx(expected)

    def test_strip_randomness(self):
        table = default_profiles()
        clean = strip_randomness(table[TerrainClass.SAND])
        assert clean.noise_floor_m == 0.0
        assert all(c.phase_jitter_rad == 0.0 for c in clean.components)
        assert [c.wavelength_m for c in clean.components] == [
            c.wavelength_m for c in table[TerrainClass.SAND].components]


class TestProfileJson:
    def test_roundtrip(self):
        table = default_profiles()
        again = profiles_from_json(profiles_to_json(table))
        assert again == table

    def test_schema_keys(self):
        import json
        doc = json.loads(profiles_to_json(default_profiles()))
        assert len(doc) == 7
        entry = doc[0]
        assert set(entry) == {"terrain", "components", "noise_floor_m"}
        assert set(entry["components"][0]) == {"lambda_m", "h_m", "jitter_rad"}

    def test_rejects_garbage(self):
        with pytest.raises(PhysicsError):
            profiles_from_json("not json at all {")
        with pytest.raises(PhysicsError):
            profiles_from_json("[]")

    def test_file_roundtrip(self, tmp_path):
        from whisksim import load_profiles, save_profiles
        path = tmp_path / "profiles.json"
        save_profiles(smoke_profiles(), path)
        assert load_profiles(path) == smoke_profiles()
