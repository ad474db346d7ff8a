import json
import math

import numpy as np
import pytest

from binauralkit import wavio
from binauralkit.hrir import (
    HrirEntry,
    HrirPack,
    great_circle,
    load_pack,
    nearest,
    save_pack,
    synth_pack,
)
from binauralkit.spherical import Direction


def entry_at(az_deg, el_deg, tap=1.0, sr=16000):
    taps = np.array([tap, 0.0])
    return HrirEntry(Direction.from_degrees(az_deg, el_deg), taps, taps.copy(), sr)


class TestPackValidation:
    def test_needs_entries(self):
        with pytest.raises(ValueError):
            HrirPack((), 16000)

    def test_rejects_mixed_rates(self):
        with pytest.raises(ValueError):
            HrirPack((entry_at(0, 0, sr=16000), entry_at(10, 0, sr=44100)), 16000)

    def test_rejects_duplicate_directions(self):
        with pytest.raises(ValueError):
            HrirPack((entry_at(0, 0), entry_at(0, 0)), 16000)

    def test_rejects_empty_filter(self):
        with pytest.raises(ValueError):
            HrirEntry(Direction(0, 0), np.array([]), np.array([1.0]), 16000)


class TestGreatCircle:
    def test_zero_on_self(self):
        d = Direction(0.7, -0.3)
        assert great_circle(d, d) == pytest.approx(0.0, abs=1e-7)

    def test_symmetric(self):
        a, b = Direction(0.2, 0.5), Direction(-1.0, -0.1)
        assert great_circle(a, b) == pytest.approx(great_circle(b, a))

    def test_right_angle(self):
        assert great_circle(Direction(0, 0), Direction(math.pi / 2, 0)) == pytest.approx(
            math.pi / 2
        )


class TestNearest:
    def test_exact_hit_idempotent(self):
        pack = HrirPack(tuple(entry_at(a, 0) for a in (0, 45, 90, 135)), 16000)
        for e in pack.entries:
            assert nearest(pack, e.direction) is e

    def test_metric_comparison(self):
        pack = HrirPack((entry_at(0, 0), entry_at(90, 0)), 16000)
        hit = nearest(pack, Direction.from_degrees(40, 0))
        assert hit.direction.azimuth == pytest.approx(0.0)

    def test_tie_breaks_to_smaller_azimuth(self):
        pack = HrirPack((entry_at(90, 0), entry_at(0, 0)), 16000)
        hit = nearest(pack, Direction.from_degrees(45, 0))
        assert hit.direction.azimuth == pytest.approx(0.0)

    def test_matches_linear_scan_oracle(self):
        pack = synth_pack(n_azimuths=36)
        rng = np.random.default_rng(21)
        for _ in range(100):
            q = Direction(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi / 2, np.pi / 2))
            best = None
            for e in pack.entries:
                d = great_circle(e.direction, q)
                if best is None or d < best[0]:
                    best = (d, e)
            assert nearest(pack, q) is best[1]

    def test_grid_pack_lookup(self):
        # 72 azimuths x 3 elevations, built programmatically
        entries = tuple(
            entry_at(az, el)
            for el in (-30, 0, 30)
            for az in np.arange(0, 360, 5)
        )
        pack = HrirPack(entries, 16000)
        assert len(pack.entries) == 216
        hit = nearest(pack, Direction.from_degrees(52, 17))
        assert math.degrees(hit.direction.azimuth) == pytest.approx(50)
        assert math.degrees(hit.direction.elevation) == pytest.approx(30)


class TestSynthPack:
    def test_front_is_symmetric(self):
        pack = synth_pack(n_azimuths=8)
        front = nearest(pack, Direction(0.0, 0.0))
        np.testing.assert_array_equal(front.left_fir, front.right_fir)

    def test_hard_left_delay_and_gain(self):
        pack = synth_pack(n_azimuths=8, ild_db=6.0)
        e = nearest(pack, Direction(math.pi / 2, 0.0))
        left_onset = np.argmax(np.abs(e.left_fir) > 0)
        right_onset = np.argmax(np.abs(e.right_fir) > 0)
        assert left_onset < right_onset
        assert e.left_fir.max() > e.right_fir.max()

    def test_ild_readback(self):
        # filter-tap sums carry the level split exactly (unit-DC low-pass)
        pack = synth_pack(n_azimuths=8, ild_db=6.0)
        e = nearest(pack, Direction(math.pi / 2, 0.0))
        ratio_db = 20 * np.log10(e.left_fir.sum() / e.right_fir.sum())
        assert ratio_db == pytest.approx(6.0, abs=1e-9)

    def test_deterministic(self):
        a = synth_pack(n_azimuths=12, ild_db=4.5)
        b = synth_pack(n_azimuths=12, ild_db=4.5)
        for ea, eb in zip(a.entries, b.entries):
            np.testing.assert_array_equal(ea.left_fir, eb.left_fir)
            np.testing.assert_array_equal(ea.right_fir, eb.right_fir)

    def test_woodworth_itd_scale(self):
        # broadside arrival-time gap ~ (a/c)(1 + pi/2), split across both ears
        sr = 16000
        pack = synth_pack(n_azimuths=4, head_radius=0.0875, sample_rate=sr)
        e = nearest(pack, Direction(math.pi / 2, 0.0))
        gap = np.argmax(e.right_fir > 0) - np.argmax(e.left_fir > 0)
        expected = 0.0875 / 343.0 * (1 + math.pi / 2) * sr
        assert gap == pytest.approx(expected, abs=1.0)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            synth_pack(n_azimuths=1)
        with pytest.raises(ValueError):
            synth_pack(head_radius=0.0)
        with pytest.raises(ValueError):
            synth_pack(ild_db=-1.0)

    def test_no_lowpass_keeps_single_tap(self):
        pack = synth_pack(n_azimuths=8, contra_lowpass_hz=None)
        e = nearest(pack, Direction(math.pi / 2, 0.0))
        assert np.count_nonzero(e.right_fir) == 1


class TestPackIO:
    def test_round_trip_at_storage_precision(self, tmp_path):
        pack = synth_pack(n_azimuths=6)
        save_pack(pack, tmp_path / "pack")
        back = load_pack(tmp_path / "pack")
        assert back.name == pack.name
        assert back.sample_rate == pack.sample_rate
        assert len(back.entries) == len(pack.entries)
        for ea, eb in zip(pack.entries, back.entries):
            assert ea.direction.azimuth == pytest.approx(eb.direction.azimuth, abs=1e-12)
            np.testing.assert_array_equal(ea.left_fir.astype(np.float32), eb.left_fir.astype(np.float32))

    def test_single_entry_pack(self, tmp_path):
        pack = HrirPack((entry_at(0, 0),), 16000, name="one")
        save_pack(pack, tmp_path / "one")
        back = load_pack(tmp_path / "one")
        assert len(back.entries) == 1
        assert back.entries[0].direction == Direction(0.0, 0.0)

    def test_missing_index(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_pack(tmp_path)

    def test_malformed_json(self, tmp_path):
        (tmp_path / "index.json").write_text("{not json")
        with pytest.raises(ValueError):
            load_pack(tmp_path)

    def test_missing_keys(self, tmp_path):
        (tmp_path / "index.json").write_text(json.dumps({"name": "x"}))
        with pytest.raises(ValueError):
            load_pack(tmp_path)

    def test_wav_rate_mismatch(self, tmp_path):
        wavio.write_wav(tmp_path / "l.wav", 44100, np.array([1.0]))
        wavio.write_wav(tmp_path / "r.wav", 44100, np.array([1.0]))
        index = {
            "name": "bad",
            "sample_rate": 16000,
            "entries": [
                {"azimuth_deg": 0, "elevation_deg": 0, "left": "l.wav", "right": "r.wav"}
            ],
        }
        (tmp_path / "index.json").write_text(json.dumps(index))
        with pytest.raises(ValueError, match="sample rate"):
            load_pack(tmp_path)

    def test_duplicate_directions_rejected_on_load(self, tmp_path):
        wavio.write_wav(tmp_path / "l.wav", 16000, np.array([1.0]))
        wavio.write_wav(tmp_path / "r.wav", 16000, np.array([1.0]))
        e = {"azimuth_deg": 0, "elevation_deg": 0, "left": "l.wav", "right": "r.wav"}
        index = {"name": "dup", "sample_rate": 16000, "entries": [e, dict(e)]}
        (tmp_path / "index.json").write_text(json.dumps(index))
        with pytest.raises(ValueError, match="duplicate"):
            load_pack(tmp_path)
