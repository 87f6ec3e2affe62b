"""Geometry, antenna pattern, and noise model for an overloaded feed array.

The reception scene is ``r = A s + n``: ``N`` co-channel satellite signals
reaching ``M < N`` receiver chains (dish feeds / LNBs), so the linear system
is overloaded by construction.  ``A`` is synthesised from a circular-aperture
power pattern (Airy disc) steered at each feed's boresight, with a geometric
phase ramp across the feed offsets; ``n`` is zero-mean circular Gaussian
noise, spatially correlated across chains by a unit-diagonal matrix ``K``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j1

from .linalg import chol
from .validation import check_hermitian

__all__ = [
    "C_LIGHT",
    "Scenario",
    "NoiseModel",
    "default_noise_correlation",
    "default_scenario",
    "beamwidth_3db",
    "aperture_gain",
    "build_channel",
    "sigma2_for_snr",
    "draw_noise",
    "write_channel_csv",
    "read_channel_csv",
]

C_LIGHT = 299_792_458.0  # m/s

# Measured inter-chain noise correlation for the default 3-feed receiver.
_DEFAULT_K3 = (
    (1.0, 0.1, 0.05),
    (0.1, 1.0, 0.1),
    (0.05, 0.1, 1.0),
)


def default_noise_correlation(num_chains: int) -> np.ndarray:
    """Default unit-diagonal chain correlation: the measured 3-chain matrix
    for ``num_chains == 3``, identity otherwise."""
    if num_chains == 3:
        return np.array(_DEFAULT_K3, dtype=np.float64).astype(np.complex128)
    return np.eye(num_chains, dtype=np.complex128)


@dataclass(eq=False)
class Scenario:
    """Receiver/constellation-of-satellites geometry.

    Angles are degrees of orbital-arc separation as seen from the dish;
    feed offsets are lateral positions in carrier wavelengths.
    """

    satellite_angles: np.ndarray  # (N,) deg
    lnb_boresights: np.ndarray  # (M,) deg
    lnb_offsets: np.ndarray  # (M,) wavelengths
    dish_diameter: float = 0.35  # m
    carrier_frequency: float = 11.7e9  # Hz
    noise_correlation: np.ndarray | None = None  # (M, M), unit diagonal

    def __post_init__(self):
        self.satellite_angles = np.atleast_1d(
            np.asarray(self.satellite_angles, dtype=np.float64)
        )
        self.lnb_boresights = np.atleast_1d(
            np.asarray(self.lnb_boresights, dtype=np.float64)
        )
        self.lnb_offsets = np.atleast_1d(np.asarray(self.lnb_offsets, dtype=np.float64))
        for name in ("satellite_angles", "lnb_boresights", "lnb_offsets"):
            arr = getattr(self, name)
            if arr.ndim != 1 or not np.isfinite(arr).all():
                raise ValueError(f"{name} must be a finite 1-D sequence")
        if self.lnb_boresights.shape != self.lnb_offsets.shape:
            raise ValueError("lnb_boresights and lnb_offsets must have equal length")
        n, m = self.num_satellites, self.num_lnbs
        if m < 1:
            raise ValueError("at least one receiver chain is required")
        if n <= m:
            raise ValueError(
                f"the scene must be overloaded: need more satellites than "
                f"chains, got N={n}, M={m}"
            )
        if not (self.dish_diameter > 0 and np.isfinite(self.dish_diameter)):
            raise ValueError("dish_diameter must be positive")
        if not (self.carrier_frequency > 0 and np.isfinite(self.carrier_frequency)):
            raise ValueError("carrier_frequency must be positive")
        if self.noise_correlation is None:
            self.noise_correlation = default_noise_correlation(m)
        else:
            k = check_hermitian(self.noise_correlation, name="noise_correlation")
            if k.shape[0] != m:
                raise ValueError(
                    f"noise_correlation must be {m}x{m}, got {k.shape}"
                )
            if not np.allclose(np.diag(k).real, 1.0, atol=1e-10):
                raise ValueError("noise_correlation must have a unit diagonal")
            if np.linalg.eigvalsh(k)[0] <= 0:
                raise ValueError("noise_correlation must be positive definite")
            self.noise_correlation = k

    @property
    def num_satellites(self) -> int:
        return self.satellite_angles.shape[0]

    @property
    def num_lnbs(self) -> int:
        return self.lnb_boresights.shape[0]

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.carrier_frequency


def default_scenario() -> Scenario:
    """Ku-band 35 cm dish with 3 feeds watching 5 closely spaced satellites.

    The central satellite (index 0) is the desired one; its neighbours sit
    2.7-3 degrees away, i.e. inside the ~5.1 degree 3-dB beamwidth, which is
    what makes the scene overloaded and interference-limited.
    """
    return Scenario(
        satellite_angles=np.array([0.0, -5.9, -2.8, 3.0, 5.7]),
        lnb_boresights=np.array([-3.0, 0.0, 3.0]),
        lnb_offsets=np.array([-1.5, 0.0, 1.5]),
    )


def beamwidth_3db(scenario: Scenario) -> float:
    """Approximate 3-dB beamwidth of the dish in degrees: 70 * lambda / D."""
    return 70.0 * scenario.wavelength / scenario.dish_diameter


def aperture_gain(theta_deg, diameter: float, wavelength: float) -> np.ndarray:
    """Normalized circular-aperture power pattern (Airy disc), g(0) = 1.

    ``g(theta) = [2 J1(u) / u]^2`` with ``u = (pi D / lambda) sin(theta)``.
    """
    theta = np.asarray(theta_deg, dtype=np.float64)
    u = (np.pi * diameter / wavelength) * np.sin(np.radians(theta))
    amp = np.ones_like(u)
    nz = np.abs(u) > 1e-12
    amp[nz] = 2.0 * j1(u[nz]) / u[nz]
    return amp**2


def build_channel(scenario: Scenario) -> np.ndarray:
    """Synthesize the (M, N) channel matrix for a scenario.

    Entry (i, j) couples satellite j into chain i::

        A[i, j] = sqrt(g(theta_j - phi_i)) * exp(1j * 2 pi d_i sin(theta_j))

    with ``g`` the aperture power pattern, ``phi_i`` the chain boresight and
    ``d_i`` the feed offset in wavelengths.
    """
    theta = scenario.satellite_angles[np.newaxis, :]  # (1, N)
    phi = scenario.lnb_boresights[:, np.newaxis]  # (M, 1)
    d = scenario.lnb_offsets[:, np.newaxis]  # (M, 1)
    amp = np.sqrt(aperture_gain(theta - phi, scenario.dish_diameter, scenario.wavelength))
    phase = 2.0 * np.pi * d * np.sin(np.radians(theta))
    return (amp * np.exp(1j * phase)).astype(np.complex128)


def sigma2_for_snr(a: np.ndarray, snr_db: float) -> float:
    """Per-chain noise power giving the requested mean SNR.

    The SNR convention is ``‖A‖_F² / (σ² M N)``, so
    ``σ² = ‖A‖_F² / (10^(snr/10) · M · N)``.
    """
    a = np.asarray(a)
    m, n = a.shape
    return float(np.linalg.norm(a) ** 2 / (10.0 ** (snr_db / 10.0) * m * n))


@dataclass(eq=False)
class NoiseModel:
    """Zero-mean circular Gaussian chain noise with covariance σ²·K."""

    sigma2: float
    correlation: np.ndarray  # (M, M) unit-diagonal Hermitian PD
    coloring_: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (self.sigma2 >= 0 and np.isfinite(self.sigma2)):
            raise ValueError("sigma2 must be finite and non-negative")
        k = check_hermitian(self.correlation, name="correlation")
        self.correlation = k
        self.coloring_ = chol(k, name="correlation")


def draw_noise(model: NoiseModel, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` correlated noise vectors, shape (count, M).

    Each vector is ``sqrt(sigma2) * C v`` with ``C`` the Cholesky factor of
    ``K`` and ``v`` i.i.d. unit-variance circular complex Gaussians, so
    ``E[n nᴴ] = sigma2 * K``.
    """
    m = model.correlation.shape[0]
    v = rng.standard_normal((count, m)) + 1j * rng.standard_normal((count, m))
    v *= np.sqrt(model.sigma2 / 2.0)
    return v @ model.coloring_.T


def write_channel_csv(a: np.ndarray, path_or_file) -> None:
    """Write a channel matrix as CSV: M rows, each cell a "re,im" pair."""
    a = np.asarray(a, dtype=np.complex128)

    def _dump(fh):
        writer = csv.writer(fh)
        for row in a:
            writer.writerow([f"{float(z.real)!r},{float(z.imag)!r}"
                             for z in row])

    if hasattr(path_or_file, "write"):
        _dump(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _dump(fh)


def channel_csv_text(a: np.ndarray) -> str:
    """Channel matrix rendered as CSV text (see :func:`write_channel_csv`)."""
    buf = io.StringIO()
    write_channel_csv(a, buf)
    return buf.getvalue()


def read_channel_csv(path_or_file) -> np.ndarray:
    """Read a channel matrix written by :func:`write_channel_csv`.

    Also the injection point for externally computed channel matrices: any
    CSV whose cells are "re,im" pairs with one row per receiver chain loads.
    """

    def _load(fh):
        rows = []
        for line_no, cells in enumerate(csv.reader(fh), start=1):
            if not cells:
                continue
            row = []
            for cell in cells:
                parts = cell.split(",")
                if len(parts) != 2:
                    raise ValueError(
                        f"channel CSV line {line_no}: cell {cell!r} is not a "
                        f"'re,im' pair"
                    )
                row.append(complex(float(parts[0]), float(parts[1])))
            rows.append(row)
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("channel CSV must be a non-empty rectangular grid")
        return np.asarray(rows, dtype=np.complex128)

    if hasattr(path_or_file, "read"):
        return _load(path_or_file)
    with open(path_or_file, newline="") as fh:
        return _load(fh)
