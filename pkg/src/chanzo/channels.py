"""Ground-truth propagation state and end-to-end channel evaluation.

Two scenarios are modelled. A reflecting-surface link is summarized by the
element-wise cascaded gains (Tx->element->Rx products) plus an optional
direct Tx->Rx gain; the tunable variable is one phase per element. A
movable-antenna link is a sum of plane-wave paths over a 2-D region; the
tunable variable is the antenna position. Everything downstream interacts
with these only through the measurement front-end in `chanzo.oracle`.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass
class CascadedChannel:
    """Cascaded per-element complex gains plus a direct-link scalar."""

    coeffs: np.ndarray
    direct: complex = 0j

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.ndim != 1 or self.coeffs.size < 1:
            raise ValueError("coeffs must be a nonempty 1-D complex vector")
        if not np.all(np.isfinite(self.coeffs.view(np.float64))):
            raise ValueError("coeffs entries must be finite")
        self.direct = complex(self.direct)
        if not (np.isfinite(self.direct.real) and np.isfinite(self.direct.imag)):
            raise ValueError("direct gain must be finite")

    @property
    def m(self):
        return self.coeffs.size


@dataclass
class RisPhases:
    """Per-element reflection phases in radians. The induced reflection
    coefficient exp(j*phase) has unit modulus by construction."""

    phases: np.ndarray

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=np.float64)
        if self.phases.ndim != 1 or self.phases.size < 1:
            raise ValueError("phases must be a nonempty 1-D real vector")
        if not np.all(np.isfinite(self.phases)):
            raise ValueError("phases must be finite")

    @property
    def m(self):
        return self.phases.size


@dataclass
class PathSet:
    """Plane-wave path parameters for the movable-antenna scenario.

    Narrowband model: per-path delay is folded into the complex gain phase,
    so a path is (complex gain, elevation, azimuth). The induced 2-D
    direction vector is (sin(el)*cos(az), cos(el)), which has norm <= 1.
    K = 0 is permitted so estimators can return "no detectable paths".
    """

    gains: np.ndarray
    elevations: np.ndarray
    azimuths: np.ndarray
    wavelength: float = 1.0

    def __post_init__(self):
        self.gains = np.atleast_1d(np.asarray(self.gains, dtype=np.complex128))
        self.elevations = np.atleast_1d(np.asarray(self.elevations, dtype=np.float64))
        self.azimuths = np.atleast_1d(np.asarray(self.azimuths, dtype=np.float64))
        if not (self.gains.size == self.elevations.size == self.azimuths.size):
            raise ValueError("gains, elevations and azimuths must have equal length")
        if not np.all(np.isfinite(self.gains.view(np.float64))):
            raise ValueError("path gains must be finite")
        if self.gains.size and (
            np.any(np.abs(self.elevations) > np.pi / 2 + 1e-12)
            or np.any(np.abs(self.azimuths) > np.pi + 1e-12)
        ):
            raise ValueError("elevation must lie in [-pi/2, pi/2], azimuth in [-pi, pi]")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")

    @property
    def k(self):
        return self.gains.size

    @property
    def directions(self):
        """K x 2 matrix of per-path direction vectors."""
        return np.stack(
            [np.sin(self.elevations) * np.cos(self.azimuths), np.cos(self.elevations)],
            axis=1,
        ) if self.k else np.zeros((0, 2))


@dataclass
class Position:
    """A 2-D antenna position in meters."""

    xy: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        self.xy = np.asarray(self.xy, dtype=np.float64).reshape(2)
        if not np.all(np.isfinite(self.xy)):
            raise ValueError("position must be finite")


def gen_cascaded_channel(m, seed, fading=1.0, include_direct=False, direct_fading=None):
    """Draw an i.i.d. Rayleigh-fading cascaded channel.

    Entries are circularly-symmetric complex Gaussian with per-entry variance
    `fading`. The direct link is 0 unless include_direct is set, in which
    case it is drawn with variance `direct_fading` (defaults to `fading`).
    Deterministic given the seed.
    """
    if m < 1:
        raise ValueError("element count must be >= 1")
    if not fading > 0:
        raise ValueError("fading variance must be positive")
    rng = np.random.default_rng(seed)
    scale = np.sqrt(fading / 2.0)
    coeffs = scale * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    direct = 0j
    if include_direct:
        dvar = fading if direct_fading is None else float(direct_fading)
        dscale = np.sqrt(dvar / 2.0)
        direct = complex(dscale * (rng.standard_normal() + 1j * rng.standard_normal()))
    return CascadedChannel(coeffs=coeffs, direct=direct)


def gen_path_set(k, seed, wavelength=1.0):
    """Draw K paths with uniform angles and total gain variance 1 (1/K per
    path). Deterministic given the seed."""
    if k < 1:
        raise ValueError("path count must be >= 1")
    rng = np.random.default_rng(seed)
    elevations = rng.uniform(-np.pi / 2, np.pi / 2, k)
    azimuths = rng.uniform(-np.pi, np.pi, k)
    scale = np.sqrt(1.0 / (2.0 * k))
    gains = scale * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
    return PathSet(gains=gains, elevations=elevations, azimuths=azimuths, wavelength=wavelength)


def ris_end_to_end(chan, phases):
    """Exact end-to-end complex gain: direct + sum_m coeffs[m]*exp(j*phi_m)."""
    if phases.m != chan.m:
        raise ValueError(f"phase vector length {phases.m} != element count {chan.m}")
    return kernels.ris_response(chan.coeffs, phases.phases, chan.direct)


def ma_channel(paths, pos):
    """Field-response gain at a position (defined on all of R^2; region
    clamping happens in the optimizer, not here)."""
    if paths.k == 0:
        return 0j
    return kernels.ma_response(paths.gains, paths.directions, paths.wavelength, pos.xy)
