"""Quadrature-space primitives.

Everything downstream works with 2x2 covariance matrices of the amplitude
and phase field quadratures (a1, a2), normalized so that vacuum is the
identity. This module holds the decibel conversions, the squeezed-state
constructor, rotation and passive-loss maps, loss-chain bookkeeping, and
the log-spaced frequency grid used by the spectrum code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PhysicsError

# Absolute tolerance on determinant checks; covers double-precision
# round-off from rotations of strongly squeezed states.
DET_TOL = 1e-9


def db_to_variance(db: float) -> float:
    """Convert a power ratio in dB to a vacuum-normalized variance.

    Signed convention: 0 dB is vacuum, negative dB is below vacuum. A
    squeezing level quoted as "X dB of squeezing" is a variance of
    ``db_to_variance(-X)``.
    """
    if not math.isfinite(db):
        raise PhysicsError(f"dB value must be finite, got {db!r}")
    return 10.0 ** (db / 10.0)


def variance_to_db(variance: float) -> float:
    """Inverse of :func:`db_to_variance`."""
    if not (math.isfinite(variance) and variance > 0):
        raise PhysicsError(f"variance must be finite and positive, got {variance!r}")
    return 10.0 * math.log10(variance)


def squeeze_parameter_from_db(squeeze_db: float) -> float:
    """Squeeze parameter r for a pure state with the given squeezing level.

    The squeezed variance of a pure state is e^(-2r) = 10^(-squeeze_db/10).
    """
    if not (math.isfinite(squeeze_db) and squeeze_db >= 0):
        raise PhysicsError(f"squeeze level in dB must be >= 0, got {squeeze_db!r}")
    return squeeze_db * math.log(10.0) / 20.0


@dataclass(frozen=True)
class CovarianceMatrix2:
    """Symmetric 2x2 quadrature covariance matrix, vacuum = identity.

    Validated on construction: positive definite and obeying the
    vacuum-normalized Heisenberg bound det(V) >= 1 (up to ``DET_TOL``).
    """

    v11: float
    v22: float
    v12: float = 0.0

    def __post_init__(self):
        for name in ("v11", "v22", "v12"):
            if not math.isfinite(getattr(self, name)):
                raise PhysicsError(f"covariance entry {name} must be finite")
        if self.v11 <= 0 or self.v22 <= 0:
            raise PhysicsError(
                f"diagonal variances must be positive, got ({self.v11}, {self.v22})"
            )
        det = self.determinant()
        if det <= 0:
            raise PhysicsError(f"covariance must be positive definite, det = {det}")
        if det < 1.0 - DET_TOL:
            raise PhysicsError(
                f"unphysical covariance: det = {det} violates the Heisenberg bound"
            )

    def determinant(self) -> float:
        return self.v11 * self.v22 - self.v12 * self.v12

    def trace(self) -> float:
        return self.v11 + self.v22

    def eigenvalues(self) -> tuple[float, float]:
        """Principal variances, smallest first."""
        lo, hi = np.linalg.eigvalsh(self.as_array())
        return float(lo), float(hi)

    def as_array(self) -> np.ndarray:
        return np.array([[self.v11, self.v12], [self.v12, self.v22]])

    @classmethod
    def identity(cls) -> "CovarianceMatrix2":
        return cls(1.0, 1.0, 0.0)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "CovarianceMatrix2":
        return cls(float(a[0, 0]), float(a[1, 1]), float(0.5 * (a[0, 1] + a[1, 0])))


def squeezed_covariance(r: float, angle: float = 0.0) -> CovarianceMatrix2:
    """Pure squeezed-state covariance with squeeze parameter r.

    The minor axis (variance e^(-2r)) lies along the quadrature at ``angle``
    radians from a1; ``angle = pi/2`` squeezes the phase quadrature a2.
    """
    if not (math.isfinite(r) and r >= 0):
        raise PhysicsError(f"squeeze parameter must be >= 0, got {r!r}")
    base = CovarianceMatrix2(math.exp(-2.0 * r), math.exp(2.0 * r), 0.0)
    if angle == 0.0:
        return base
    return rotate_covariance(base, angle)


def rotate_covariance(v: CovarianceMatrix2, theta: float) -> CovarianceMatrix2:
    """Rotate the quadrature basis: R(theta) V R(theta)^T, counterclockwise."""
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return CovarianceMatrix2.from_array(rot @ v.as_array() @ rot.T)


def apply_loss(v: CovarianceMatrix2, eta: float) -> CovarianceMatrix2:
    """Passive loss as a beamsplitter admixture of vacuum: eta*V + (1-eta)*I."""
    if not (math.isfinite(eta) and 0.0 < eta <= 1.0):
        raise PhysicsError(f"efficiency must lie in (0, 1], got {eta!r}")
    return CovarianceMatrix2(
        eta * v.v11 + (1.0 - eta),
        eta * v.v22 + (1.0 - eta),
        eta * v.v12,
    )


@dataclass(frozen=True)
class LossElement:
    """One named fractional power loss in an optical path."""

    name: str
    loss: float

    def __post_init__(self):
        if not (math.isfinite(self.loss) and 0.0 <= self.loss < 1.0):
            raise PhysicsError(
                f"loss fraction for {self.name!r} must lie in [0, 1), got {self.loss!r}"
            )


@dataclass(frozen=True)
class EfficiencyChain:
    """Ordered sequence of loss elements traversed by a beam."""

    elements: tuple[LossElement, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    @classmethod
    def from_pairs(cls, pairs) -> "EfficiencyChain":
        return cls(tuple(LossElement(str(n), float(l)) for n, l in pairs))

    def efficiency(self) -> float:
        """Composed power transmission, product of (1 - loss_i)."""
        out = 1.0
        for el in self.elements:
            out *= 1.0 - el.loss
        return out

    def loss_total(self) -> float:
        """Total loss from the multiplicative composition, 1 - efficiency."""
        return 1.0 - self.efficiency()

    def loss_sum(self) -> float:
        """Linearly summed losses; quoted budgets often round this way."""
        return sum(el.loss for el in self.elements)


def compose_efficiency(chain: EfficiencyChain) -> float:
    """Composed efficiency of a loss chain (empty chain passes everything)."""
    return chain.efficiency()


@dataclass(frozen=True)
class FrequencyGrid:
    """Logarithmically spaced frequency grid in Hz."""

    f_min: float
    f_max: float
    points: int

    def __post_init__(self):
        if not (math.isfinite(self.f_min) and self.f_min > 0):
            raise PhysicsError(f"f_min must be > 0, got {self.f_min!r}")
        if not (math.isfinite(self.f_max) and self.f_max > self.f_min):
            raise PhysicsError(
                f"f_max must exceed f_min, got ({self.f_min!r}, {self.f_max!r})"
            )
        if self.points < 2:
            raise PhysicsError(f"grid needs at least 2 points, got {self.points!r}")

    def frequencies(self) -> np.ndarray:
        return np.geomspace(self.f_min, self.f_max, self.points)

    def angular(self) -> np.ndarray:
        return 2.0 * np.pi * self.frequencies()
