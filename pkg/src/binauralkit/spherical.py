"""Real spherical harmonics (SN3D) and the direction convention shared by the toolkit.

Azimuth is measured counterclockwise from straight ahead when seen from
above, so positive azimuth is the listener's left. Elevation is positive
up from the horizon. Harmonics follow ambisonic practice: real-valued,
Schmidt semi-normalized (SN3D), and without the Condon-Shortley phase.
Oracles built on math libraries that include the phase (e.g.
``scipy.special.lpmv``) must apply a ``(-1)**m`` correction before
comparing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import legendre_values

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class Direction:
    """A source direction on the listening sphere, in radians.

    Any azimuth is accepted and wrapped into [-pi, pi]; elevation must
    already lie in [-pi/2, pi/2].
    """

    azimuth: float
    elevation: float

    def __post_init__(self):
        az = float(self.azimuth)
        el = float(self.elevation)
        if not math.isfinite(az) or not math.isfinite(el):
            raise ValueError("direction angles must be finite")
        if not -HALF_PI <= el <= HALF_PI:
            raise ValueError(f"elevation {el} outside [-pi/2, pi/2]")
        object.__setattr__(self, "azimuth", math.remainder(az, math.tau))
        object.__setattr__(self, "elevation", el)

    @classmethod
    def from_degrees(cls, azimuth_deg: float, elevation_deg: float) -> "Direction":
        return cls(math.radians(azimuth_deg), math.radians(elevation_deg))

    @classmethod
    def from_zenith(cls, azimuth: float, zenith: float) -> "Direction":
        """Build from a zenith angle (0 = straight up, pi/2 = horizon)."""
        return cls(azimuth, HALF_PI - zenith)


def assoc_legendre(l: int, m: int, x):
    """Associated Legendre P^|m|_l(x) without the Condon-Shortley phase.

    Accepts a scalar or an ndarray for ``x``; |x| must not exceed 1.
    """
    if l < 0:
        raise ValueError(f"order l must be non-negative, got {l}")
    m = abs(int(m))
    if m > l:
        raise ValueError(f"|m| = {m} exceeds l = {l}")
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) > 1.0):
        raise ValueError("argument x must lie in [-1, 1]")
    values = legendre_values(int(l), m, np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(values[0])
    return values.reshape(arr.shape)


def sn3d_norm(l: int, m: int) -> float:
    """Schmidt semi-normalization weight N^|m|_l."""
    if l < 0:
        raise ValueError(f"order l must be non-negative, got {l}")
    m = abs(int(m))
    if m > l:
        raise ValueError(f"|m| = {m} exceeds l = {l}")
    delta = 1.0 if m == 0 else 0.0
    return math.sqrt((2.0 - delta) * math.factorial(l - m) / math.factorial(l + m))


def real_sph_harmonic(l: int, m: int, direction: Direction) -> float:
    """Real SN3D spherical harmonic Y^m_l at a direction.

    cos(m*azimuth) flavors for m >= 0, sin(|m|*azimuth) for m < 0; the
    polar argument is sin(elevation).
    """
    if abs(m) > l:
        raise ValueError(f"|m| = {abs(m)} exceeds l = {l}")
    p = assoc_legendre(l, m, math.sin(direction.elevation))
    if m >= 0:
        trig = math.cos(m * direction.azimuth)
    else:
        trig = math.sin(abs(m) * direction.azimuth)
    return sn3d_norm(l, m) * p * trig


def harmonic_vector(direction: Direction) -> np.ndarray:
    """First-order harmonics [Y^0_0, Y^1_1, Y^-1_1, Y^0_1], the W/X/Y/Z gains."""
    cos_el = math.cos(direction.elevation)
    return np.array(
        [
            1.0,
            cos_el * math.cos(direction.azimuth),
            cos_el * math.sin(direction.azimuth),
            math.sin(direction.elevation),
        ]
    )
