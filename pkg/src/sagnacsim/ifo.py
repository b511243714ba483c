"""Quantum-noise spectra for Sagnac and Michelson interferometers.

Two-photon-formalism treatment with arm cavities, squeezed-light injection
through a lossy path, and balanced homodyne readout at a fixed quadrature
angle. The measured quadrature at readout angle phi is

    o(phi) = b2 cos(phi) + b1 sin(phi),    b1 = a1,  b2 = a2 - K(Omega) a1

so the noise projects onto the input covariance with the coefficient
vector (c1, c2) = (sin(phi) - K cos(phi), cos(phi)). The coupling constant
K(Omega) mixes amplitude fluctuations into the signal quadrature via
radiation pressure:

    Sagnac (speed meter):        K = 4 J gamma / (gamma^2 + Omega^2)^2
    Michelson (position meter):  K = 2 J gamma / (Omega^2 (gamma^2 + Omega^2))

with gamma the arm half-bandwidth in rad/s and J the normalized
circulating intensity. The Sagnac K is flat below gamma, so back-action
cancels at the single fixed angle tan(phi) = K(0); the Michelson K
diverges toward DC and admits no such angle.

Strain spectra are referenced to the free-mass standard quantum limit
h_SQL(Omega) = sqrt(8 hbar / (m Omega^2 L^2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import PhysicsError
from .quadrature import (
    CovarianceMatrix2,
    FrequencyGrid,
    apply_loss,
    squeeze_parameter_from_db,
    squeezed_covariance,
)

SPEED_OF_LIGHT = 299792458.0
HBAR = 1.054571817e-34

SAGNAC = "sagnac"
MICHELSON = "michelson"


@dataclass(frozen=True)
class IfoParams:
    """Interferometer topology and optical/mechanical operating point.

    ``linewidth_hz`` is the arm-cavity linewidth; by default it is read as
    the FWHM, so the half-bandwidth is gamma = pi * linewidth. Setting
    ``linewidth_is_half_width`` treats the quoted number as the half-width
    instead (gamma = 2 pi * linewidth).

    ``kappa_dc_override`` pins K(Omega -> 0) directly by rescaling J; only
    meaningful for the Sagnac, whose K is finite at DC.
    """

    topology: str
    mass_kg: float
    arm_length_m: float
    circulating_power_w: float
    linewidth_hz: float
    wavelength_m: float = 1.064e-6
    linewidth_is_half_width: bool = False
    kappa_calibration: Optional[float] = None
    kappa_dc_override: Optional[float] = None

    def __post_init__(self):
        if self.topology not in (SAGNAC, MICHELSON):
            raise PhysicsError(f"unknown topology {self.topology!r}")
        for name in ("mass_kg", "arm_length_m", "circulating_power_w",
                     "linewidth_hz", "wavelength_m"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise PhysicsError(f"{name} must be positive, got {value!r}")
        if self.kappa_calibration is not None and self.kappa_calibration <= 0:
            raise PhysicsError(
                f"kappa_calibration must be positive, got {self.kappa_calibration!r}"
            )
        if self.kappa_dc_override is not None:
            if self.topology != SAGNAC:
                raise PhysicsError(
                    "kappa_dc_override is only meaningful for the Sagnac; "
                    "the Michelson coupling diverges toward DC"
                )
            if self.kappa_dc_override <= 0:
                raise PhysicsError(
                    f"kappa_dc_override must be positive, got {self.kappa_dc_override!r}"
                )

    @property
    def calibration(self) -> float:
        if self.kappa_calibration is not None:
            return self.kappa_calibration
        # Both counter-propagating Sagnac beams sense each arm.
        return 2.0 if self.topology == SAGNAC else 1.0

    @property
    def gamma(self) -> float:
        """Arm half-bandwidth in rad/s."""
        scale = 2.0 * math.pi if self.linewidth_is_half_width else math.pi
        return scale * self.linewidth_hz

    @property
    def carrier_angular_frequency(self) -> float:
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.wavelength_m


@dataclass(frozen=True)
class InjectionParams:
    """Squeezed-light injection and homodyne readout settings.

    ``eta_pre`` is the path efficiency from the squeezer to the
    interferometer dark port and degrades only the injected state;
    ``eta_post`` is the readout-path efficiency from the interferometer to
    the photocurrent and attenuates the signal as well. Angles are
    radians; the readout angle is measured from the signal-carrying
    quadrature.
    """

    squeeze_db: float
    squeeze_angle: float = 0.5 * math.pi
    eta_pre: float = 1.0
    eta_post: float = 1.0
    readout_angle: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.squeeze_db) and self.squeeze_db >= 0):
            raise PhysicsError(f"squeeze level must be >= 0 dB, got {self.squeeze_db!r}")
        for name in ("eta_pre", "eta_post"):
            value = getattr(self, name)
            if not (math.isfinite(value) and 0.0 < value <= 1.0):
                raise PhysicsError(f"{name} must lie in (0, 1], got {value!r}")
        for name in ("squeeze_angle", "readout_angle"):
            if not math.isfinite(getattr(self, name)):
                raise PhysicsError(f"{name} must be finite")

    def input_covariance(self) -> CovarianceMatrix2:
        """Injected state at the dark port: pure squeezing through eta_pre."""
        r = squeeze_parameter_from_db(self.squeeze_db)
        return apply_loss(squeezed_covariance(r, self.squeeze_angle), self.eta_pre)


@dataclass(frozen=True)
class NoiseSpectrum:
    """Amplitude spectral densities on a frequency grid.

    ``sqrt_sx`` is displacement-equivalent (m/rtHz), ``sqrt_sh`` strain
    (1/rtHz), with sqrt_sx = arm_length * sqrt_sh point-wise.
    ``sqrt_s_sql`` is the free-mass SQL strain reference.
    """

    grid: FrequencyGrid
    sqrt_sx: np.ndarray
    sqrt_sh: np.ndarray
    sqrt_s_sql: np.ndarray

    def __post_init__(self):
        for name in ("sqrt_sx", "sqrt_sh", "sqrt_s_sql"):
            arr = getattr(self, name)
            if len(arr) != self.grid.points:
                raise PhysicsError(f"{name} length does not match the grid")
            if not np.all(np.isfinite(arr) & (arr > 0)):
                raise PhysicsError(f"{name} must be positive and finite")

    def ratio_to_sql_db(self) -> np.ndarray:
        """Power ratio S_h / S_SQL in dB; negative where the SQL is beaten."""
        return 20.0 * np.log10(self.sqrt_sh / self.sqrt_s_sql)


def normalized_intensity(p: IfoParams) -> float:
    """Normalized circulating intensity J in 1/s^3.

    J = calibration * 4 omega_0 P / (m c L), linear in the circulating
    power, inverse in mass and arm length.
    """
    return (
        p.calibration
        * 4.0
        * p.carrier_angular_frequency
        * p.circulating_power_w
        / (p.mass_kg * SPEED_OF_LIGHT * p.arm_length_m)
    )


def _effective_j(p: IfoParams) -> float:
    if p.kappa_dc_override is not None:
        # Rescale J so the DC coupling lands exactly on the override.
        return p.kappa_dc_override * p.gamma**3 / 4.0
    return normalized_intensity(p)


def coupling_constant(omega, p: IfoParams):
    """Radiation-pressure coupling K at angular frequency omega (rad/s).

    Vectorized over omega. The Michelson form diverges at omega = 0, which
    is rejected; the Sagnac form is finite there.
    """
    omega = np.asarray(omega, dtype=float)
    gamma = p.gamma
    j = _effective_j(p)
    if p.topology == SAGNAC:
        if np.any(omega < 0):
            raise PhysicsError("omega must be >= 0")
        out = 4.0 * j * gamma / (gamma**2 + omega**2) ** 2
    else:
        if np.any(omega <= 0):
            raise PhysicsError("the Michelson coupling requires omega > 0")
        out = 2.0 * j * gamma / (omega**2 * (gamma**2 + omega**2))
    return out if out.ndim else float(out)


def h_sql(omega, p: IfoParams):
    """Free-mass SQL strain amplitude sqrt(8 hbar / (m Omega^2 L^2))."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise PhysicsError("h_sql requires omega > 0")
    out = np.sqrt(8.0 * HBAR / (p.mass_kg * omega**2 * p.arm_length_m**2))
    return out if out.ndim else float(out)


def noise_vector(phi: float, k_cc):
    """Projection coefficients (c1, c2) of the measured quadrature.

    c1 multiplies the amplitude quadrature (back-action channel) and
    vanishes at the cancellation condition tan(phi) = K; c2 multiplies the
    phase quadrature (shot-noise channel).
    """
    k_cc = np.asarray(k_cc, dtype=float)
    c1 = math.sin(phi) - k_cc * math.cos(phi)
    c2 = math.cos(phi)
    if c1.ndim:
        return c1, np.full_like(c1, c2)
    return float(c1), c2


def optimal_readout_angle(p: IfoParams) -> float:
    """Fixed homodyne angle cancelling back-action below the arm bandwidth.

    Only the Sagnac has one: its coupling is flat at DC, so
    phi = arctan(K(0)) removes the amplitude-quadrature projection across
    the whole band below gamma. The Michelson coupling diverges toward DC
    and would need frequency-dependent (filter-cavity) rotation instead.
    """
    if p.topology != SAGNAC:
        raise PhysicsError(
            "no frequency-independent cancellation angle exists for the "
            "Michelson topology; its coupling diverges toward DC"
        )
    return math.atan(coupling_constant(0.0, p))


def quantum_noise_spectrum(
    p: IfoParams, inj: InjectionParams, grid: FrequencyGrid
) -> NoiseSpectrum:
    """Total quantum noise of the homodyne readout over a frequency grid.

    Per frequency: project the injected covariance onto the measured
    quadrature, admix detection-path vacuum, and normalize by the signal
    transfer. The signal is generated inside the interferometer, so only
    ``eta_post`` attenuates it:

        S_h = h_SQL^2 * (eta_post * v^T V_in v + 1 - eta_post)
              / (2 K cos^2(phi) * eta_post)

    Vacuum injection reduces to S_h = h_SQL^2 ((tan(phi) - K)^2 + 1)/(2 K)
    when both efficiencies are 1.
    """
    phi = inj.readout_angle
    if abs(math.cos(phi)) < 1e-12:
        raise PhysicsError("readout angle pi/2 carries no signal")
    v_in = inj.input_covariance()

    omega = grid.angular()
    k_cc = coupling_constant(omega, p)
    c1, c2 = noise_vector(phi, k_cc)
    projected = c1 * c1 * v_in.v11 + 2.0 * c1 * c2 * v_in.v12 + c2 * c2 * v_in.v22
    detected = inj.eta_post * projected + (1.0 - inj.eta_post)

    sql = h_sql(omega, p)
    s_h = sql**2 * detected / (2.0 * k_cc * math.cos(phi) ** 2 * inj.eta_post)
    sqrt_sh = np.sqrt(s_h)
    return NoiseSpectrum(
        grid=grid,
        sqrt_sx=p.arm_length_m * sqrt_sh,
        sqrt_sh=sqrt_sh,
        sqrt_s_sql=sql,
    )


def sql_beating_band(spectrum: NoiseSpectrum) -> list[tuple[float, float]]:
    """Maximal contiguous grid intervals where the noise is below the SQL."""
    f = spectrum.grid.frequencies()
    below = spectrum.sqrt_sh < spectrum.sqrt_s_sql
    bands: list[tuple[float, float]] = []
    start = None
    for i, flag in enumerate(below):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            bands.append((float(f[start]), float(f[i - 1])))
            start = None
    if start is not None:
        bands.append((float(f[start]), float(f[-1])))
    return bands


def angle_sweep(
    p: IfoParams,
    inj: InjectionParams,
    grid: FrequencyGrid,
    angles: Sequence[float],
) -> list[NoiseSpectrum]:
    """One spectrum per readout angle (radians), on a shared grid."""
    return [
        quantum_noise_spectrum(p, replace(inj, readout_angle=float(a)), grid)
        for a in angles
    ]
