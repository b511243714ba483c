"""CSV tables and SVG figures for the command-line workflows.

CSV values are written in scientific notation with 9 significant digits
and LF line endings so identical runs produce byte-identical files.
Figures are rendered with matplotlib into static 800x600 SVG documents;
both file kinds are written atomically (temp file, then rename).
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .ifo import NoiseSpectrum
from .opo import FixedCavity, OpoFitResult, SqueezingObservation, opo_variances
from .quadrature import EfficiencyChain

# 800x600 SVG user units at matplotlib's 72 pt/inch.
_FIGSIZE = (800.0 / 72.0, 600.0 / 72.0)
_SVG_META = {"Date": None}

plt.rcParams["svg.hashsalt"] = "sagnacsim"


def _format(value: float) -> str:
    return f"{value:.8e}"


def _cell(value) -> str:
    if not isinstance(value, str):
        return _format(value)
    if any(ch in value for ch in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(cell) for cell in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def _save_figure(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    os.close(fd)
    try:
        fig.savefig(tmp, format="svg", metadata=_SVG_META)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def spectrum_rows(spectrum: NoiseSpectrum) -> list[list[float]]:
    f = spectrum.grid.frequencies()
    ratio = spectrum.ratio_to_sql_db()
    return [
        [f[i], spectrum.sqrt_sx[i], spectrum.sqrt_sh[i], spectrum.sqrt_s_sql[i], ratio[i]]
        for i in range(spectrum.grid.points)
    ]


SPECTRUM_HEADER = [
    "frequency_hz",
    "sqrt_Sx_m_per_rtHz",
    "sqrt_Sh_per_rtHz",
    "sqrt_Ssql_per_rtHz",
    "ratio_to_sql_db",
]


def write_spectrum_csv(path: Path, spectrum: NoiseSpectrum) -> None:
    write_csv(path, SPECTRUM_HEADER, spectrum_rows(spectrum))


def write_angle_sweep_csv(
    path: Path, angles_deg: Sequence[float], spectra: Sequence[NoiseSpectrum]
) -> None:
    rows = []
    for angle, spec in zip(angles_deg, spectra):
        for row in spectrum_rows(spec):
            rows.append([angle] + row)
    write_csv(path, ["angle_deg"] + SPECTRUM_HEADER, rows)


def write_opo_curve_csv(path: Path, frequencies, squeeze_db, antisqueeze_db) -> None:
    rows = [
        [frequencies[i], squeeze_db[i], antisqueeze_db[i]]
        for i in range(len(frequencies))
    ]
    write_csv(path, ["frequency_hz", "squeezed_db", "antisqueezed_db"], rows)


def write_fit_csv(path: Path, result: OpoFitResult) -> None:
    rows: list[list] = [
        ["pump_ratio", result.pump_ratio],
        ["intracavity_loss", result.intracavity_loss],
    ]
    for label in sorted(result.eta_by_label):
        rows.append([f"eta_total[{label}]", result.eta_by_label[label]])
    rows.append(["residual_db_sq", result.residual_db_sq])
    rows.append(["n_observations", float(result.n_observations)])
    write_csv(path, ["parameter", "value"], rows)


def write_loss_budget_csv(path: Path, chain: EfficiencyChain) -> None:
    rows: list[list] = []
    cumulative = 1.0
    for el in chain.elements:
        cumulative *= 1.0 - el.loss
        rows.append([el.name, el.loss, cumulative])
    rows.append(["total (product)", chain.loss_total(), chain.efficiency()])
    rows.append(["total (linear sum)", chain.loss_sum(), 1.0 - chain.loss_sum()])
    write_csv(path, ["element", "loss_fraction", "cumulative_efficiency"], rows)


def plot_spectrum(path: Path, spectrum: NoiseSpectrum, label: str = "quantum noise") -> None:
    f = spectrum.grid.frequencies()
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.loglog(f, spectrum.sqrt_sh, label=label)
    ax.loglog(f, spectrum.sqrt_s_sql, "k--", label="SQL")
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel(r"strain noise [$1/\sqrt{\mathrm{Hz}}$]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    _save_figure(fig, path)


def plot_angle_sweep(
    path: Path, angles_deg: Sequence[float], spectra: Sequence[NoiseSpectrum]
) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for angle, spec in zip(angles_deg, spectra):
        ax.loglog(spec.grid.frequencies(), spec.sqrt_sh, label=f"{angle:g} deg")
    if spectra:
        ax.loglog(spectra[0].grid.frequencies(), spectra[0].sqrt_s_sql, "k--", label="SQL")
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel(r"strain noise [$1/\sqrt{\mathrm{Hz}}$]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(title="readout angle")
    _save_figure(fig, path)


def plot_opo_curve(path: Path, frequencies, squeeze_db, antisqueeze_db) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.semilogx(frequencies, squeeze_db, label="squeezing")
    ax.semilogx(frequencies, antisqueeze_db, label="antisqueezing")
    ax.axhline(0.0, color="k", linestyle="--", linewidth=0.8, label="vacuum")
    ax.set_xlabel("sideband frequency [Hz]")
    ax.set_ylabel("noise relative to vacuum [dB]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    _save_figure(fig, path)


def plot_fit(
    path: Path,
    result: OpoFitResult,
    fixed: FixedCavity,
    observations: Sequence[SqueezingObservation],
) -> None:
    f_lo = min(o.frequency_hz for o in observations) / 2.0
    f_hi = max(o.frequency_hz for o in observations) * 2.0
    f = np.geomspace(f_lo, f_hi, 200)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for i, label in enumerate(sorted(result.eta_by_label)):
        params = result.params_for(label, fixed)
        v_s, v_as = opo_variances(f, params)
        color = f"C{i}"
        ax.semilogx(f, -10.0 * np.log10(v_s), color=color, label=f"{label}: model")
        ax.semilogx(f, 10.0 * np.log10(v_as), color=color, linestyle=":")
        for o in observations:
            if o.eta_label != label:
                continue
            ax.plot(o.frequency_hz, o.squeeze_db, "o", color=color)
            if o.antisqueeze_db is not None:
                ax.plot(o.frequency_hz, o.antisqueeze_db, "s", color=color)
    ax.axhline(0.0, color="k", linestyle="--", linewidth=0.8)
    ax.set_xlabel("sideband frequency [Hz]")
    ax.set_ylabel("level relative to vacuum [dB]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    _save_figure(fig, path)


def plot_loss_budget(path: Path, chain: EfficiencyChain) -> None:
    names = [el.name for el in chain.elements]
    losses = [100.0 * el.loss for el in chain.elements]
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    y = np.arange(len(names))
    ax.barh(y, losses)
    ax.set_yticks(y, names)
    ax.invert_yaxis()
    ax.set_xlabel("loss [%]")
    total = 100.0 * chain.loss_total()
    ax.set_title(f"composed loss {total:.2f}% (linear sum {100.0 * chain.loss_sum():.2f}%)")
    fig.tight_layout()
    _save_figure(fig, path)
