"""Binaural decoders: W+/-Y, direct HRIR, and virtual-speaker ambisonic rendering.

The virtual-speaker renderer projects the B-format field onto a fixed
speaker array by the minimum-norm least-squares solution (Moore-Penrose
pseudoinverse of the 4 x M harmonic matrix), then convolves each virtual
feed with the HRIR pair nearest its speaker direction and sums per ear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import wavio
from ._kernels import sum_contributions
from .ambisonic import BFormat, MonoSignal
from .hrir import HrirPack, nearest
from .spherical import Direction, harmonic_vector

PINV_IDENTITY_TOL = 1e-9

# Default virtual array: 8 speakers uniformly spanning the frontal 180 degree
# arc. Elevations alternate +/-22.5 degrees in a left-right mirror-symmetric
# pattern; a flat (all zero elevation) ring would zero the Z row of the
# harmonic matrix and leave it rank 3.
_DEFAULT_AZIMUTHS = tuple(-math.pi / 2 + (m - 0.5) * math.pi / 8 for m in range(1, 9))
_DEFAULT_ELEVATIONS = tuple(s * math.pi / 8 for s in (1, -1, 1, -1, -1, 1, -1, 1))


@dataclass(frozen=True, eq=False)
class BinauralSignal:
    """Two-channel signal; channel 0 is the left ear."""

    left: np.ndarray
    right: np.ndarray
    sample_rate: int

    def __post_init__(self):
        for name in ("left", "right"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 1:
                raise ValueError(f"{name} channel must be 1-D")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} channel contains non-finite samples")
            object.__setattr__(self, name, arr)
        if len(self.left) != len(self.right):
            raise ValueError(
                f"channel lengths differ: {len(self.left)} vs {len(self.right)}"
            )
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")

    @property
    def n_samples(self) -> int:
        return len(self.left)


@dataclass(frozen=True, eq=False)
class SpeakerArray:
    """Virtual speaker directions with the harmonic matrix and its pseudoinverse."""

    directions: tuple[Direction, ...]
    d_matrix: np.ndarray  # (4, M)
    d_pinv: np.ndarray  # (M, 4)


def make_speaker_array(directions: Sequence[Direction]) -> SpeakerArray:
    """Build the 4 x M harmonic matrix and its Moore-Penrose pseudoinverse.

    Raises if fewer than four speakers are given or the matrix is not of
    full row rank (the SVD-based pseudoinverse is rank-revealing).
    """
    directions = tuple(directions)
    if len(directions) < 4:
        raise ValueError(f"need at least 4 speakers, got {len(directions)}")
    d_matrix = np.stack([harmonic_vector(d) for d in directions], axis=1)
    if np.linalg.matrix_rank(d_matrix) < 4:
        raise ValueError("speaker layout is rank-deficient; spread the directions out")
    d_pinv = np.linalg.pinv(d_matrix)
    err = np.abs(d_matrix @ d_pinv - np.eye(4)).max()
    if err > PINV_IDENTITY_TOL:
        raise ValueError(f"pseudoinverse residual {err:.2e} exceeds {PINV_IDENTITY_TOL}")
    return SpeakerArray(directions, d_matrix, d_pinv)


def default_speaker_array() -> SpeakerArray:
    return make_speaker_array(
        [Direction(az, el) for az, el in zip(_DEFAULT_AZIMUTHS, _DEFAULT_ELEVATIONS)]
    )


def decode_wy(b: BFormat) -> BinauralSignal:
    """left = W + Y, right = W - Y."""
    return BinauralSignal(b.w + b.y, b.w - b.y, b.sample_rate)


def fft_convolve(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Linear convolution via real FFT, trimmed to the first len(x) samples."""
    n_full = len(x) + len(taps) - 1
    n_fft = 1 << (n_full - 1).bit_length()
    y = np.fft.irfft(np.fft.rfft(x, n_fft) * np.fft.rfft(taps, n_fft), n_fft)
    return y[: len(x)]


def render_direct_hrir(source: MonoSignal, direction: Direction, pack: HrirPack) -> BinauralSignal:
    """Convolve the source with the HRIR pair nearest the given direction."""
    if source.sample_rate != pack.sample_rate:
        raise ValueError(
            f"source rate {source.sample_rate} != pack rate {pack.sample_rate}"
        )
    entry = nearest(pack, direction)
    return BinauralSignal(
        fft_convolve(source.samples, entry.left_fir),
        fft_convolve(source.samples, entry.right_fir),
        source.sample_rate,
    )


def project_to_speakers(b: BFormat, arr: SpeakerArray) -> list[MonoSignal]:
    """Virtual speaker feeds: the minimum-norm solution of D s' = Psi per sample."""
    feeds = arr.d_pinv @ b.channels()
    return [MonoSignal(feeds[m], b.sample_rate) for m in range(feeds.shape[0])]


def render_ambisonic_hrir(b: BFormat, arr: SpeakerArray, pack: HrirPack) -> BinauralSignal:
    """Project onto the virtual array, convolve each feed with its nearest
    HRIR pair, and sum per ear (compensated, order-independent)."""
    if b.sample_rate != pack.sample_rate:
        raise ValueError(f"b-format rate {b.sample_rate} != pack rate {pack.sample_rate}")
    feeds = arr.d_pinv @ b.channels()
    n = b.n_samples
    left_parts = np.empty((len(arr.directions), n))
    right_parts = np.empty((len(arr.directions), n))
    for m, direction in enumerate(arr.directions):
        entry = nearest(pack, direction)
        left_parts[m] = fft_convolve(feeds[m], entry.left_fir)
        right_parts[m] = fft_convolve(feeds[m], entry.right_fir)
    return BinauralSignal(
        sum_contributions(left_parts), sum_contributions(right_parts), b.sample_rate
    )


def write_binaural_wav(path, sig: BinauralSignal, fmt: str = "float32") -> None:
    """Export as a stereo WAV, left ear in channel 0."""
    wavio.write_wav(path, sig.sample_rate, np.stack([sig.left, sig.right], axis=1), fmt=fmt)


def read_binaural_wav(path) -> BinauralSignal:
    sample_rate, data = wavio.read_wav(path)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"expected a stereo WAV, got shape {data.shape}")
    return BinauralSignal(data[:, 0], data[:, 1], sample_rate)
