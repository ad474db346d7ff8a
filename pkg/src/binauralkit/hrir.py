"""HRIR packs: on-disk format, synthetic generation, nearest-direction lookup.

A pack is a directory holding ``index.json`` plus one mono WAV per ear
per direction::

    {"name": ..., "sample_rate": ...,
     "entries": [{"azimuth_deg": ..., "elevation_deg": ...,
                  "left": "d000_L.wav", "right": "d000_R.wav"}, ...]}

Synthetic packs model a spherical head: Woodworth arrival-time offsets,
a configurable broadside level difference, and a one-pole low-pass that
shadows the far ear.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import wavio
from .spherical import Direction

SPEED_OF_SOUND = 343.0  # m/s


@dataclass(frozen=True, eq=False)
class HrirEntry:
    """Left/right impulse-response pair measured (or synthesized) at one direction."""

    direction: Direction
    left_fir: np.ndarray
    right_fir: np.ndarray
    sample_rate: int

    def __post_init__(self):
        for name in ("left_fir", "right_fir"):
            taps = np.asarray(getattr(self, name), dtype=np.float64)
            if taps.ndim != 1 or len(taps) == 0:
                raise ValueError(f"{name} must be a non-empty 1-D filter")
            if not np.all(np.isfinite(taps)):
                raise ValueError(f"{name} contains non-finite taps")
            object.__setattr__(self, name, taps)
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")


@dataclass(frozen=True, eq=False)
class HrirPack:
    entries: tuple[HrirEntry, ...]
    sample_rate: int
    name: str = "unnamed"

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self.entries) == 0:
            raise ValueError("an HRIR pack needs at least one entry")
        rates = {e.sample_rate for e in self.entries} | {self.sample_rate}
        if len(rates) != 1:
            raise ValueError(f"sample rates differ within the pack: {sorted(rates)}")
        seen = set()
        for e in self.entries:
            key = (e.direction.azimuth, e.direction.elevation)
            if key in seen:
                raise ValueError(f"duplicate direction in pack: {key}")
            seen.add(key)


def great_circle(a: Direction, b: Direction) -> float:
    """Great-circle angle between two directions, in radians."""
    c = math.sin(a.elevation) * math.sin(b.elevation) + math.cos(a.elevation) * math.cos(
        b.elevation
    ) * math.cos(a.azimuth - b.azimuth)
    return math.acos(min(1.0, max(-1.0, c)))


def nearest(pack: HrirPack, direction: Direction) -> HrirEntry:
    """Entry with smallest great-circle distance; ties go to the smaller
    azimuth, then the smaller elevation."""
    return min(
        pack.entries,
        key=lambda e: (
            great_circle(e.direction, direction),
            e.direction.azimuth,
            e.direction.elevation,
        ),
    )


def synth_pack(
    n_azimuths: int = 24,
    head_radius: float = 0.0875,
    ild_db: float = 6.0,
    sample_rate: int = 16000,
    contra_lowpass_hz: float | None = 6000.0,
    name: str = "synthetic",
) -> HrirPack:
    """Generate a deterministic horizontal-ring pack of simplified HRIRs.

    Each filter is a delayed, scaled impulse. Arrival-time offsets follow
    the Woodworth spherical-head model; the level split reaches ild_db at
    full broadside and the far ear is optionally smoothed by a one-pole
    low-pass (unit DC gain, so filter-tap sums read back the level split
    exactly).
    """
    if n_azimuths < 2:
        raise ValueError(f"n_azimuths must be at least 2, got {n_azimuths}")
    if head_radius <= 0:
        raise ValueError(f"head_radius must be positive, got {head_radius}")
    if ild_db < 0:
        raise ValueError(f"ild_db must be non-negative, got {ild_db}")
    if sample_rate <= 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")
    if contra_lowpass_hz is not None and not 0 < contra_lowpass_hz < sample_rate / 2:
        raise ValueError("contra_lowpass_hz must lie inside (0, Nyquist)")

    itd_max = head_radius / SPEED_OF_SOUND * (math.pi / 2 + 1.0)
    base = int(math.ceil(itd_max * sample_rate / 2)) + 1
    if contra_lowpass_hz is not None:
        pole = math.exp(-2 * math.pi * contra_lowpass_hz / sample_rate)
        n_tail = max(1, int(math.ceil(math.log(1e-12) / math.log(pole))))
        lowpass = (1 - pole) * pole ** np.arange(n_tail)
        lowpass /= lowpass.sum()
    else:
        n_tail = 1
        lowpass = np.ones(1)
    n_taps = 2 * base + n_tail + 2

    entries = []
    for k in range(n_azimuths):
        az = 2 * math.pi * k / n_azimuths
        direction = Direction(az, 0.0)
        # lateral angle toward the left ear; symmetric front/back
        lam = math.asin(math.sin(direction.azimuth))
        itd = head_radius / SPEED_OF_SOUND * (abs(lam) + math.sin(abs(lam)))
        half = int(round(itd * sample_rate / 2))
        gain_near = 10.0 ** (ild_db * abs(math.sin(lam)) / 40.0)
        gain_far = 10.0 ** (-ild_db * abs(math.sin(lam)) / 40.0)
        left = np.zeros(n_taps)
        right = np.zeros(n_taps)
        if lam > 0:
            left[base - half] = gain_near
            right[base + half : base + half + n_tail] = gain_far * lowpass
        elif lam < 0:
            right[base - half] = gain_near
            left[base + half : base + half + n_tail] = gain_far * lowpass
        else:
            left[base] = 1.0
            right[base] = 1.0
        entries.append(HrirEntry(direction, left, right, sample_rate))
    return HrirPack(tuple(entries), sample_rate, name=name)


def save_pack(pack: HrirPack, path) -> None:
    """Write a pack directory: index.json plus float32 mono WAVs per ear."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    index_entries = []
    for i, e in enumerate(pack.entries):
        left_name = f"d{i:03d}_L.wav"
        right_name = f"d{i:03d}_R.wav"
        wavio.write_wav(root / left_name, pack.sample_rate, e.left_fir)
        wavio.write_wav(root / right_name, pack.sample_rate, e.right_fir)
        index_entries.append(
            {
                "azimuth_deg": math.degrees(e.direction.azimuth),
                "elevation_deg": math.degrees(e.direction.elevation),
                "left": left_name,
                "right": right_name,
            }
        )
    index = {"name": pack.name, "sample_rate": pack.sample_rate, "entries": index_entries}
    (root / "index.json").write_text(json.dumps(index, indent=2, sort_keys=True))


def load_pack(path) -> HrirPack:
    """Load and validate a pack directory written in the index.json format."""
    root = Path(path)
    index_path = root / "index.json"
    if not index_path.is_file():
        raise FileNotFoundError(f"no index.json under {root}")
    try:
        index = json.loads(index_path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed index.json under {root}: {exc}") from exc
    try:
        name = index["name"]
        sample_rate = int(index["sample_rate"])
        raw_entries = index["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"index.json under {root} is missing required keys") from exc

    entries = []
    for raw in raw_entries:
        direction = Direction.from_degrees(raw["azimuth_deg"], raw["elevation_deg"])
        firs = []
        for ear in ("left", "right"):
            rate, taps = wavio.read_wav(root / raw[ear])
            if taps.ndim != 1:
                raise ValueError(f"{raw[ear]} is not mono")
            if rate != sample_rate:
                raise ValueError(
                    f"{raw[ear]} has sample rate {rate}, pack declares {sample_rate}"
                )
            firs.append(taps)
        entries.append(HrirEntry(direction, firs[0], firs[1], sample_rate))
    return HrirPack(tuple(entries), sample_rate, name=name)
