"""Design sweeps: error maps over heating power and pulse duration.

Each grid cell runs the full chain — simulate the two-pulse protocol,
fit both phases, evaluate the estimators, propagate the error budget —
for one (P_h, t_qub) pair against a reference H.  Cells are independent
pure computations, so they may be evaluated concurrently; results are
assembled in grid order, which keeps the exported CSV byte-identical
whatever the thread count (``QUBDOE_THREADS`` caps it, 0 = automatic).
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from math import nan
from collections.abc import Sequence

import numpy as np

from .error_budget import (ErrorPolicy, MeasurementErrors, assemble_budget,
                           measurement_error, partials)
from .exceptions import ModelError, NumericalError, QubdoeError
from .modal import EigenBasis, eigendecompose
from .network import StateSpaceModel
from .qub import QubProtocol, estimate_C, estimate_H, fit_slope, simulate_qub

__all__ = [
    "DoeCell",
    "DoeGrid",
    "DesignConstraints",
    "sweep",
    "select_optimum",
    "grid_to_csv",
    "export_grid",
    "default_axes",
    "GRID_HEADER",
]

GRID_HEADER = "ph_W,t_qub_s,H_qub_W_per_K,eps_qub_pct,eps_Hm_W_per_K,eps_H_pct,theta_max_C,valid"


@dataclass(frozen=True)
class DoeCell:
    """Outcome of one candidate design.

    Error fields are ``nan`` when the cell is degenerate (``valid`` is
    False); the peak indoor temperature is kept whenever the simulation
    itself succeeded.
    """

    ph: float
    t_qub: float
    H_qub: float
    eps_qub_pct: float
    eps_Hm: float
    eps_H_pct: float
    theta_max: float
    valid: bool


@dataclass(frozen=True)
class DoeGrid:
    """Full sweep result; ``cells[i][j]`` pairs ``t_values[i]`` with
    ``ph_values[j]`` (duration-major, matching the export order)."""

    ph_values: np.ndarray
    t_values: np.ndarray
    cells: tuple[tuple[DoeCell, ...], ...]


@dataclass(frozen=True)
class DesignConstraints:
    """Admissibility limits for selecting a design.

    ``max_total_duration`` bounds the whole experiment (both pulses,
    i.e. 2·t_qub); ``max_indoor_temperature`` bounds the peak of the
    simulated indoor temperature (°C); ``max_power`` the heater (W).
    """

    max_power: float
    max_indoor_temperature: float
    max_total_duration: float

    def __post_init__(self) -> None:
        if not (self.max_power > 0.0 and self.max_total_duration > 0.0):
            raise ModelError("constraints must be positive")


def _thread_count(threads: int | None, n_cells: int) -> int:
    if threads is None:
        raw = os.environ.get("QUBDOE_THREADS", "0")
        try:
            threads = int(raw)
        except ValueError:
            raise ModelError(
                f"QUBDOE_THREADS must be an integer, got {raw!r}"
            ) from None
    if threads < 0:
        raise ModelError(f"thread count must be >= 0, got {threads}")
    if threads == 0:
        threads = os.cpu_count() or 1
    return max(1, min(threads, n_cells))


def _evaluate_cell(model: StateSpaceModel, basis: EigenBasis,
                   template: QubProtocol, ph: float, t_qub: float,
                   H_ref: float, errors: ErrorPolicy | MeasurementErrors,
                   temp_weights, power_weights) -> DoeCell:
    theta_max = nan
    try:
        sample_dt = template.sample_dt
        if sample_dt is not None and sample_dt > t_qub / 20.0:
            sample_dt = None
        protocol = replace(template, P_h=ph, t_qub=t_qub, sample_dt=sample_dt)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # sub-maintenance cells are expected
            trace = simulate_qub(model, protocol, temp_weights=temp_weights,
                                 power_weights=power_weights, basis=basis)
        theta_max = protocol.T_o + float(trace.delta_T.max())
        window = protocol.slope_window_fraction
        fit_h = fit_slope(trace, "heating", window)
        fit_c = fit_slope(trace, "cooling", window)
        P_h = float(trace.power[trace.heating].mean())
        P_c = float(trace.power[trace.cooling].mean())
        H_qub = estimate_H(fit_h.alpha, fit_c.alpha, fit_h.dT0, fit_c.dT0, P_h, P_c)
        # capacity quotient is evaluated for its degeneracy signal even
        # though the budget below only concerns H
        estimate_C(fit_h.alpha, fit_c.alpha, fit_h.dT0, fit_c.dT0, P_h, P_c)
        sens = partials(fit_h.alpha, fit_c.alpha, P_h, P_c, fit_h.dT0, fit_c.dT0)
        if isinstance(errors, MeasurementErrors):
            resolved = errors
        else:
            resolved = errors.resolve(P_h, fit_h, fit_c)
        eps_Hm = measurement_error(sens, resolved)
        budget = assemble_budget(H_qub, H_ref, eps_Hm)
        return DoeCell(ph=ph, t_qub=t_qub, H_qub=H_qub,
                       eps_qub_pct=budget.eps_qub_pct, eps_Hm=budget.eps_Hm,
                       eps_H_pct=budget.eps_H_pct, theta_max=theta_max, valid=True)
    except QubdoeError:
        return DoeCell(ph=ph, t_qub=t_qub, H_qub=nan, eps_qub_pct=nan,
                       eps_Hm=nan, eps_H_pct=nan, theta_max=theta_max, valid=False)


def sweep(model: StateSpaceModel, protocol_template: QubProtocol,
          ph_values: Sequence[float], t_values: Sequence[float],
          errors: ErrorPolicy | MeasurementErrors, H_ref: float,
          temp_weights=None, power_weights=None,
          threads: int | None = None) -> DoeGrid:
    """Evaluate the error budget over a (P_h × t_qub) grid.

    Parameters
    ----------
    model, protocol_template
        The template's P_h and t_qub are overridden per cell; its
        sampling step is dropped for cells it would undersample.
    ph_values, t_values
        Grid axes (W, s); kept in the given order.
    errors
        Fixed :class:`MeasurementErrors`, or an :class:`ErrorPolicy`
        resolved per cell (power-relative eps_P, slope error from the
        fit's own r²).
    H_ref : float
        Reference coefficient the intrinsic error is measured against.
    threads : int, optional
        Concurrency cap; ``None`` reads ``QUBDOE_THREADS`` (0 = one
        worker per CPU).  The result does not depend on it.

    Returns
    -------
    DoeGrid
        Degenerate cells are flagged invalid, never fatal.
    """
    if not H_ref > 0.0:
        raise ModelError(f"H_ref must be positive, got {H_ref}")
    ph_values = np.asarray(ph_values, dtype=float)
    t_values = np.asarray(t_values, dtype=float)
    if ph_values.ndim != 1 or t_values.ndim != 1 or not ph_values.size or not t_values.size:
        raise ModelError("ph_values and t_values must be non-empty 1-d sequences")
    basis = eigendecompose(model)
    jobs = [(t, ph) for t in t_values for ph in ph_values]

    def run(job: tuple[float, float]) -> DoeCell:
        t_qub, ph = job
        return _evaluate_cell(model, basis, protocol_template, ph, t_qub,
                              H_ref, errors, temp_weights, power_weights)

    n_workers = _thread_count(threads, len(jobs))
    if n_workers == 1:
        flat = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            flat = list(pool.map(run, jobs))

    n_ph = ph_values.size
    rows = tuple(tuple(flat[i * n_ph:(i + 1) * n_ph]) for i in range(t_values.size))
    return DoeGrid(ph_values=ph_values, t_values=t_values, cells=rows)


def select_optimum(grid: DoeGrid, constraints: DesignConstraints) -> DoeCell:
    """Pick the admissible cell with the smallest |total error|.

    Ties break toward the shorter experiment, then the lower power.

    Raises
    ------
    NumericalError
        When no cell is admissible; the message counts how many cells
        each constraint rejected, so the binding one is obvious.
    """
    best: DoeCell | None = None
    best_key: tuple[float, float, float] | None = None
    n_invalid = n_power = n_temp = n_duration = 0
    for row in grid.cells:
        for cell in row:
            if not cell.valid:
                n_invalid += 1
                continue
            if cell.ph > constraints.max_power:
                n_power += 1
                continue
            if cell.theta_max > constraints.max_indoor_temperature:
                n_temp += 1
                continue
            if 2.0 * cell.t_qub > constraints.max_total_duration:
                n_duration += 1
                continue
            key = (abs(cell.eps_H_pct), cell.t_qub, cell.ph)
            if best_key is None or key < best_key:
                best, best_key = cell, key
    if best is None:
        total = sum(len(row) for row in grid.cells)
        raise NumericalError(
            f"no admissible design among {total} cells: {n_invalid} degenerate, "
            f"{n_power} above max_power, {n_temp} above max_indoor_temperature, "
            f"{n_duration} above max_total_duration"
        )
    return best


def default_axes(H_ref: float, maintenance_power: float,
                 n_ph: int = 40, n_t: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Default grid: powers log-spaced from the maintenance power to
    four times it, durations linear from 1 h to 12 h.

    When the maintenance power is not positive (experiment starting at
    the outdoor temperature), the power axis spans the power holding a
    1 K to 4 K steady rise instead.
    """
    if not H_ref > 0.0:
        raise ModelError(f"H_ref must be positive, got {H_ref}")
    base = maintenance_power if maintenance_power > 0.0 else H_ref
    ph_values = np.geomspace(base, 4.0 * base, n_ph)
    t_values = np.linspace(3600.0, 12.0 * 3600.0, n_t)
    return ph_values, t_values


def _fmt(x: float) -> str:
    return repr(float(x))


def grid_to_csv(grid: DoeGrid) -> str:
    """Render the grid in duration-major order with a fixed header;
    floats use shortest round-trip form, so output is byte-stable."""
    lines = [GRID_HEADER]
    for i, t in enumerate(grid.t_values):
        for j, ph in enumerate(grid.ph_values):
            cell = grid.cells[i][j]
            lines.append(",".join((
                _fmt(ph), _fmt(t), _fmt(cell.H_qub), _fmt(cell.eps_qub_pct),
                _fmt(cell.eps_Hm), _fmt(cell.eps_H_pct), _fmt(cell.theta_max),
                "1" if cell.valid else "0",
            )))
    return "\n".join(lines) + "\n"


def export_grid(grid: DoeGrid, path) -> None:
    """Write the grid CSV; the file appears only after the full render
    succeeds, never truncated."""
    text = grid_to_csv(grid)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
