"""Below-threshold squeezed-light source: forward model and parameter fit.

The output variances of the squeezer cavity follow the standard
below-threshold parametric model. With pump ratio x = P_pump/P_threshold,
total efficiency eta (detection times cavity escape) and sideband ratio
K(f) = 2*pi*f/kappa:

    V_s,as = 1 -/+ eta * 4*sqrt(x) / ((1 +/- sqrt(x))^2 + 4 K(f)^2)

where kappa = (T + L) c / (n l) is the cavity decay rate set by the output
coupler transmission T, the intracavity round-trip loss L, the crystal
refractive index n and the optical round-trip length l.

The fit inverts measured squeezing/antisqueezing levels for the pump
ratio, the intracavity loss and per-setting efficiencies. Pairs of
squeezing and antisqueezing at one frequency pin that setting's total
efficiency through the structural identity 1/F_s - 1/F_as = 1 of the
model; the intracavity loss is identifiable either from the frequency
dependence of K or, much more strongly, from a setting whose external
(post-cavity) efficiency is known, since eta = eta_ext * T/(T+L).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import NonIdentifiableError, PhysicsError

SPEED_OF_LIGHT = 299792458.0

# Deterministic multi-start layout for the fit: coarse grid, refine the
# best starts with Nelder-Mead, first grid index wins ties.
_GRID_PUMP = np.linspace(0.05, 0.95, 7)
_GRID_LOSS = np.linspace(0.0, 0.02, 5)
_GRID_ETA = np.linspace(0.5, 1.0, 6)
_REFINE_STARTS = 12
_BOUNDS_PUMP = (0.0, 0.97)
_BOUNDS_LOSS = (0.0, 0.02)
_BOUNDS_ETA = (0.4, 1.0)


@dataclass(frozen=True)
class OpoParams:
    """Squeezer cavity and pump operating point."""

    output_coupler_t: float
    intracavity_loss: float
    refractive_index: float
    round_trip_length: float
    pump_ratio: float
    eta_total: float

    def __post_init__(self):
        if not 0.0 < self.output_coupler_t <= 1.0:
            raise PhysicsError(
                f"output coupler transmission must be in (0, 1], got {self.output_coupler_t!r}"
            )
        if not 0.0 <= self.intracavity_loss < 1.0:
            raise PhysicsError(
                f"intracavity loss must be in [0, 1), got {self.intracavity_loss!r}"
            )
        if self.output_coupler_t + self.intracavity_loss > 1.0:
            raise PhysicsError("T + L cannot exceed 1")
        if self.refractive_index < 1.0:
            raise PhysicsError(f"refractive index must be >= 1, got {self.refractive_index!r}")
        if self.round_trip_length <= 0.0:
            raise PhysicsError(f"round-trip length must be > 0, got {self.round_trip_length!r}")
        if not 0.0 <= self.pump_ratio < 1.0:
            raise PhysicsError(
                f"pump ratio must be in [0, 1) below threshold, got {self.pump_ratio!r}"
            )
        if not 0.0 < self.eta_total <= 1.0:
            raise PhysicsError(f"total efficiency must be in (0, 1], got {self.eta_total!r}")

    def escape_efficiency(self) -> float:
        """Fraction of the intracavity field leaving through the coupler, T/(T+L)."""
        return self.output_coupler_t / (self.output_coupler_t + self.intracavity_loss)


@dataclass(frozen=True)
class SqueezingObservation:
    """A measured squeezing level, optionally paired with antisqueezing.

    Both levels are quoted as positive dB relative to vacuum.
    ``eta_label`` groups observations taken with the same detection path;
    each label gets one fitted total efficiency. ``known_external_eta``
    declares that the path efficiency outside the cavity is known, which
    ties the group's total efficiency to the fitted intracavity loss via
    the escape efficiency.
    """

    frequency_hz: float
    squeeze_db: float
    antisqueeze_db: Optional[float] = None
    eta_label: str = "default"
    known_external_eta: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.frequency_hz) and self.frequency_hz > 0):
            raise PhysicsError(f"observation frequency must be > 0, got {self.frequency_hz!r}")
        if not (math.isfinite(self.squeeze_db) and self.squeeze_db >= 0):
            raise PhysicsError(f"squeezing level must be >= 0 dB, got {self.squeeze_db!r}")
        if self.antisqueeze_db is not None and not (
            math.isfinite(self.antisqueeze_db) and self.antisqueeze_db >= 0
        ):
            raise PhysicsError(
                f"antisqueezing level must be >= 0 dB, got {self.antisqueeze_db!r}"
            )
        if self.known_external_eta is not None and not (
            0.0 < self.known_external_eta <= 1.0
        ):
            raise PhysicsError(
                f"known external efficiency must be in (0, 1], got {self.known_external_eta!r}"
            )


def cavity_decay_rate(p: OpoParams) -> float:
    """Cavity field decay rate kappa = (T + L) c / (n l) in 1/s."""
    return (
        (p.output_coupler_t + p.intracavity_loss)
        * SPEED_OF_LIGHT
        / (p.refractive_index * p.round_trip_length)
    )


def sideband_ratio(f, p: OpoParams):
    """Dimensionless sideband ratio K(f) = 2*pi*f / kappa. Accepts arrays."""
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise PhysicsError("sideband frequency must be >= 0")
    out = 2.0 * np.pi * f / cavity_decay_rate(p)
    return out if out.ndim else float(out)


def opo_variances(f, p: OpoParams):
    """Squeezed and antisqueezed output variances (V_s, V_as) at frequency f.

    Vectorized over f. Returns floats for scalar input.
    """
    k2 = np.asarray(sideband_ratio(f, p))
    k2 = 4.0 * k2 * k2
    s = math.sqrt(p.pump_ratio)
    v_s = 1.0 - p.eta_total * 4.0 * s / ((1.0 + s) ** 2 + k2)
    v_as = 1.0 + p.eta_total * 4.0 * s / ((1.0 - s) ** 2 + k2)
    if np.ndim(v_s) == 0:
        return float(v_s), float(v_as)
    return v_s, v_as


def synthesize_observations(
    p: OpoParams, frequencies: Sequence[float], eta_label: str = "default"
) -> list[SqueezingObservation]:
    """Noiseless squeezing/antisqueezing observations predicted by ``p``."""
    obs = []
    for f in frequencies:
        v_s, v_as = opo_variances(float(f), p)
        obs.append(
            SqueezingObservation(
                frequency_hz=float(f),
                squeeze_db=-10.0 * math.log10(v_s),
                antisqueeze_db=10.0 * math.log10(v_as),
                eta_label=eta_label,
            )
        )
    return obs


@dataclass(frozen=True)
class OpoFitResult:
    pump_ratio: float
    intracavity_loss: float
    eta_by_label: dict[str, float]
    residual_db_sq: float
    n_observations: int

    def params_for(self, label: str, fixed: "FixedCavity") -> OpoParams:
        return OpoParams(
            output_coupler_t=fixed.output_coupler_t,
            intracavity_loss=self.intracavity_loss,
            refractive_index=fixed.refractive_index,
            round_trip_length=fixed.round_trip_length,
            pump_ratio=self.pump_ratio,
            eta_total=self.eta_by_label[label],
        )


@dataclass(frozen=True)
class FixedCavity:
    """Cavity geometry held fixed during the fit."""

    output_coupler_t: float
    refractive_index: float
    round_trip_length: float


def _model_levels_db(f_hz, pump_ratio, eta, loss, fixed: FixedCavity):
    kappa = (
        (fixed.output_coupler_t + loss)
        * SPEED_OF_LIGHT
        / (fixed.refractive_index * fixed.round_trip_length)
    )
    k2 = 4.0 * (2.0 * np.pi * f_hz / kappa) ** 2
    s = math.sqrt(pump_ratio)
    v_s = 1.0 - eta * 4.0 * s / ((1.0 + s) ** 2 + k2)
    v_as = 1.0 + eta * 4.0 * s / ((1.0 - s) ** 2 + k2)
    if v_s <= 0.0:
        return None
    return -10.0 * math.log10(v_s), 10.0 * math.log10(v_as)


def fit_opo_params(
    observations: Sequence[SqueezingObservation], fixed: FixedCavity
) -> OpoFitResult:
    """Fit pump ratio, intracavity loss and per-label efficiencies.

    Minimizes the sum of squared dB residuals between the model and the
    observed squeezing (and, where present, antisqueezing) levels. Labels
    carrying ``known_external_eta`` contribute no free efficiency: their
    total efficiency is eta_ext * T/(T + L_fit).

    The optimization is deterministic: a fixed coarse grid of starting
    points, Nelder-Mead refinement of the most promising starts, ties
    broken by the first grid index.

    Raises :class:`NonIdentifiableError` when the data cannot pin down the
    unknowns (fewer measured levels than free parameters, or all
    observations at the vacuum level).
    """
    obs = list(observations)
    if not obs:
        raise NonIdentifiableError("no observations supplied")

    anchored: dict[str, float] = {}
    free_labels: list[str] = []
    for o in obs:
        if o.known_external_eta is not None:
            if anchored.get(o.eta_label, o.known_external_eta) != o.known_external_eta:
                raise PhysicsError(
                    f"conflicting known external efficiencies for label {o.eta_label!r}"
                )
            anchored[o.eta_label] = o.known_external_eta
        elif o.eta_label not in free_labels:
            free_labels.append(o.eta_label)
    for label in free_labels:
        if label in anchored:
            raise PhysicsError(
                f"label {label!r} mixes anchored and unanchored observations"
            )

    n_equations = sum(1 + (o.antisqueeze_db is not None) for o in obs)
    n_unknowns = 2 + len(free_labels)
    if n_equations < n_unknowns:
        raise NonIdentifiableError(
            f"{n_equations} measured levels cannot determine {n_unknowns} parameters"
        )
    if all(o.squeeze_db == 0.0 and not o.antisqueeze_db for o in obs):
        raise NonIdentifiableError("all observations are at the vacuum level")

    t_coupler = fixed.output_coupler_t

    def objective(theta) -> float:
        pump, loss = theta[0], theta[1]
        if not (_BOUNDS_PUMP[0] <= pump <= _BOUNDS_PUMP[1]):
            return 1e9
        if not (_BOUNDS_LOSS[0] <= loss <= _BOUNDS_LOSS[1]):
            return 1e9
        etas = dict(zip(free_labels, theta[2:]))
        if any(not (_BOUNDS_ETA[0] <= e <= _BOUNDS_ETA[1]) for e in etas.values()):
            return 1e9
        escape = t_coupler / (t_coupler + loss)
        sse = 0.0
        for o in obs:
            if o.eta_label in anchored:
                eta = anchored[o.eta_label] * escape
            else:
                eta = etas[o.eta_label]
            levels = _model_levels_db(o.frequency_hz, pump, eta, loss, fixed)
            if levels is None:
                return 1e9
            sq_db, as_db = levels
            sse += (sq_db - o.squeeze_db) ** 2
            if o.antisqueeze_db is not None:
                sse += (as_db - o.antisqueeze_db) ** 2
        return sse

    starts = [
        [pump, loss] + [eta] * len(free_labels)
        for pump in _GRID_PUMP
        for loss in _GRID_LOSS
        for eta in (_GRID_ETA if free_labels else _GRID_ETA[:1])
    ]
    ranked = sorted(
        ((objective(s0), i) for i, s0 in enumerate(starts)), key=lambda t: (t[0], t[1])
    )

    best_val, best_x = math.inf, None
    for _, i in ranked[:_REFINE_STARTS]:
        x0 = starts[i]
        r1 = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options=dict(xatol=1e-11, fatol=1e-22, maxiter=4000, maxfev=8000),
        )
        # Second pass from the converged point guards against simplex collapse.
        r2 = minimize(
            objective,
            r1.x,
            method="Nelder-Mead",
            options=dict(xatol=1e-12, fatol=1e-24, maxiter=4000, maxfev=8000),
        )
        if r2.fun < best_val - 1e-18:
            best_val, best_x = r2.fun, r2.x

    pump, loss = float(best_x[0]), float(best_x[1])
    escape = t_coupler / (t_coupler + loss)
    eta_by_label = {lbl: float(e) for lbl, e in zip(free_labels, best_x[2:])}
    for lbl, eta_ext in anchored.items():
        eta_by_label[lbl] = eta_ext * escape
    return OpoFitResult(
        pump_ratio=pump,
        intracavity_loss=loss,
        eta_by_label=eta_by_label,
        residual_db_sq=float(best_val),
        n_observations=len(obs),
    )
