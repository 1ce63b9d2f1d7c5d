"""Two-pulse heat-loss experiments: simulation and estimation.

The experiment holds a building at rest, injects a constant heating
power P_h for a time t_qub, then a lower power P_c for the same time.
A straight line is fitted to the late part of each phase; with slopes
α_h, α_c and temperature rises ΔT_h, ΔT_c the heat transfer coefficient
and the effective heat capacity follow from the first-order balance
C·dΔT/dt = P − H·ΔT evaluated in both phases:

    H = (P_h α_c − P_c α_h) / (ΔT_h α_c − ΔT_c α_h)
    C = (P_h ΔT_c − P_c ΔT_h) / (α_h ΔT_c − α_c ΔT_h)

Both quotients are exact on a genuine first-order building for any
consistent choice of fitting window — the window shape cancels between
the two phases — which is what makes the short-duration protocol work.
On a multi-exponential building the same quotients acquire a bias that
shrinks as t_qub grows past the significant medium time constants; that
bias is the object of the error budget and the design sweep.
"""
from __future__ import annotations

import math
import warnings
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ModelError, NumericalError, SchemaError
from .modal import EigenBasis, eigendecompose, initial_state, state_at, step_response
from .network import StateSpaceModel

__all__ = [
    "QubProtocol",
    "QubTrace",
    "SlopeFit",
    "QubEstimate",
    "simulate_qub",
    "fit_slope",
    "estimate_H",
    "estimate_C",
    "recover_C",
    "estimate_from_trace",
    "first_order_response",
    "analytic_slopes",
    "trace_to_csv",
    "trace_from_csv",
]

_HEATING = "heating"
_COOLING = "cooling"

#: relative magnitude below which the estimator denominators count as zero
_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class QubProtocol:
    """Parameters of one two-pulse run.

    ``T_o`` is the (constant) outdoor temperature applied to every
    temperature source not listed in ``boundary_temperatures``; ``P0``
    is the pre-experiment power defining the initial steady state; the
    pulses ``P_h`` then ``P_c`` each last ``t_qub`` seconds.  Sampling
    uses ``sample_dt`` (snapped to an integer divisor of ``t_qub`` so
    the phase switch lands exactly on a sample); the slope fits use the
    trailing ``slope_window_fraction`` of each phase.
    """

    T_o: float
    P0: float
    P_h: float
    P_c: float
    t_qub: float
    slope_window_fraction: float = 1.0 / 3.0
    sample_dt: float | None = None
    boundary_temperatures: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.t_qub > 0.0:
            raise SchemaError(f"t_qub must be positive, got {self.t_qub}")
        if self.P_c < 0.0:
            raise SchemaError(f"P_c must be >= 0, got {self.P_c}")
        if not self.P_h > self.P_c:
            raise SchemaError(
                f"P_h must exceed P_c, got P_h={self.P_h}, P_c={self.P_c}"
            )
        if self.P0 < 0.0:
            raise SchemaError(f"P0 must be >= 0, got {self.P0}")
        if not 0.0 < self.slope_window_fraction <= 1.0:
            raise SchemaError("slope_window_fraction must lie in (0, 1]")
        if self.sample_dt is not None and not (
            0.0 < self.sample_dt <= self.t_qub / 20.0
        ):
            raise SchemaError(
                "sample_dt must lie in (0, t_qub/20] so each phase has at "
                f"least 20 samples, got {self.sample_dt}"
            )

    @property
    def effective_sample_dt(self) -> float:
        """Requested sampling step before snapping (defaults to t_qub/120)."""
        return self.sample_dt if self.sample_dt is not None else self.t_qub / 120.0


@dataclass(frozen=True)
class QubTrace:
    """Sampled experiment record.

    ``delta_T`` is the (mass-weighted mean) indoor temperature minus
    T_o; ``power`` the total injected power; ``phase`` flips from
    ``heating`` to ``cooling`` exactly once, right after t_qub (the
    heating phase owns its endpoint).
    """

    times: np.ndarray
    delta_T: np.ndarray
    power: np.ndarray
    phase: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        delta_T = np.asarray(self.delta_T, dtype=float)
        power = np.asarray(self.power, dtype=float)
        phase = np.asarray(self.phase)
        if not (times.shape == delta_T.shape == power.shape == phase.shape):
            raise SchemaError("trace columns must have identical length")
        if times.ndim != 1 or times.size < 4:
            raise SchemaError("trace must hold at least four samples")
        if np.any(np.diff(times) <= 0.0):
            raise SchemaError("trace times must be strictly increasing")
        labels = set(np.unique(phase).tolist())
        if not labels <= {_HEATING, _COOLING}:
            raise SchemaError(f"unknown phase label(s): {sorted(labels - {_HEATING, _COOLING})}")
        is_heating = phase == _HEATING
        if not is_heating[0] or is_heating[-1]:
            raise SchemaError("trace must start with heating and end with cooling")
        if np.count_nonzero(np.diff(is_heating.astype(int))) != 1:
            raise SchemaError("phase must switch exactly once")
        for name, arr in (("times", times), ("delta_T", delta_T), ("power", power)):
            if not np.all(np.isfinite(arr)):
                raise SchemaError(f"trace {name} contain non-finite values")
            arr.setflags(write=False)
        phase.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "delta_T", delta_T)
        object.__setattr__(self, "power", power)
        object.__setattr__(self, "phase", phase)

    @property
    def heating(self) -> np.ndarray:
        return self.phase == _HEATING

    @property
    def cooling(self) -> np.ndarray:
        return self.phase == _COOLING

    @property
    def t_qub(self) -> float:
        """Phase-switch time = last heating sample."""
        return float(self.times[self.heating][-1])


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line over the trailing window of one phase.

    ``t0`` is the window start measured from the phase start; ``dT0``
    the fitted line's value there; ``alpha`` its slope; ``r2`` the
    coefficient of determination over the window.
    """

    alpha: float
    dT0: float
    t0: float
    r2: float
    n_samples: int


@dataclass(frozen=True)
class QubEstimate:
    """Everything one two-pulse record yields."""

    H_qub: float
    C_star: float
    C: float
    alpha_h: float
    alpha_c: float
    dT0_h: float
    dT0_c: float
    t0_h: float
    t0_c: float
    r2_h: float
    r2_c: float

    @property
    def tau(self) -> float:
        """Apparent whole-building time constant C / H_qub (s)."""
        return self.C / self.H_qub


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

def _normalized_weights(weights, count: int, what: str) -> np.ndarray:
    if weights is None:
        return np.full(count, 1.0 / count)
    w = np.asarray(weights, dtype=float)
    if w.shape != (count,):
        raise ModelError(f"{what}: expected {count} weights, got shape {w.shape}")
    if np.any(w < 0.0) or w.sum() <= 0.0:
        raise ModelError(f"{what}: weights must be non-negative with positive sum")
    return w / w.sum()


def _protocol_inputs(model: StateSpaceModel, protocol: QubProtocol,
                     power_weights: np.ndarray) -> tuple[np.ndarray, ...]:
    extra = dict(protocol.boundary_temperatures)
    unknown = set(extra) - set(model.temperature_inputs)
    if unknown:
        raise ModelError(
            "boundary_temperatures: not temperature inputs of the model: "
            + ", ".join(sorted(unknown))
        )
    temps = np.array([float(extra.get(name, protocol.T_o))
                      for name in model.temperature_inputs])

    def stacked(total_power: float) -> np.ndarray:
        return np.concatenate([temps, total_power * power_weights])

    return stacked(protocol.P0), stacked(protocol.P_h), stacked(protocol.P_c)


def simulate_qub(model: StateSpaceModel, protocol: QubProtocol,
                 temp_weights=None, power_weights=None,
                 basis: EigenBasis | None = None) -> QubTrace:
    """Run the two-pulse protocol on a model, exactly.

    Parameters
    ----------
    model : StateSpaceModel
        Outputs must be the indoor (zone air) temperatures.
    protocol : QubProtocol
    temp_weights : array-like, optional
        Averaging weights over the outputs for the equivalent indoor
        temperature (zone air masses for a multizone building);
        defaults to uniform.
    power_weights : array-like, optional
        Split of the total power across the model's flow inputs
        (defaults to uniform).
    basis : EigenBasis, optional
        Reused eigendecomposition for sweep loops.

    Returns
    -------
    QubTrace
        Sampled on a grid with the phase switch exactly at t_qub; both
        phases expose identical relative sample times, which keeps the
        two-phase estimator exact on first-order buildings.

    Warns
    -----
    UserWarning
        When P_h does not raise the indoor temperature (at or below the
        maintenance power), in which case the record is degenerate for
        estimation but still returned.
    """
    n_flow = len(model.flow_inputs)
    if n_flow == 0:
        raise ModelError("model has no heat-flow input to pulse")
    w_temp = _normalized_weights(temp_weights, len(model.output_names), "temp_weights")
    w_power = _normalized_weights(power_weights, n_flow, "power_weights")
    u_pre, u_heat, u_cool = _protocol_inputs(model, protocol, w_power)

    if basis is None:
        basis = eigendecompose(model)
    n = max(20, round(protocol.t_qub / protocol.effective_sample_dt))
    dt = protocol.t_qub / n
    rel = dt * np.arange(n + 1)

    x0 = initial_state(model, u_pre)
    y_heat = step_response(model, u_heat, x0, rel, basis=basis)
    x_switch = state_at(model, u_heat, x0, protocol.t_qub, basis=basis)
    y_cool = step_response(model, u_cool, x_switch, rel[1:], basis=basis)

    dT_heat = y_heat @ w_temp - protocol.T_o
    dT_cool = y_cool @ w_temp - protocol.T_o
    if dT_heat[-1] <= dT_heat[0] + 1e-12 * max(1.0, abs(dT_heat[0])):
        warnings.warn(
            "heating power is at or below the maintenance power: the indoor "
            "temperature does not rise during the heating pulse",
            stacklevel=2,
        )
    times = np.concatenate([rel, protocol.t_qub + rel[1:]])
    delta_T = np.concatenate([dT_heat, dT_cool])
    power = np.concatenate([np.full(n + 1, protocol.P_h), np.full(n, protocol.P_c)])
    phase = np.array([_HEATING] * (n + 1) + [_COOLING] * n)
    return QubTrace(times=times, delta_T=delta_T, power=power, phase=phase)


# ---------------------------------------------------------------------------
# slope fitting and estimation
# ---------------------------------------------------------------------------

def fit_slope(trace: QubTrace, phase: str,
              window_fraction: float = 1.0 / 3.0) -> SlopeFit:
    """Ordinary least-squares line over the trailing part of one phase.

    Parameters
    ----------
    trace : QubTrace
    phase : {"heating", "cooling"}
    window_fraction : float
        Trailing fraction of the phase used for the fit, in (0, 1].

    Returns
    -------
    SlopeFit

    Raises
    ------
    ModelError
        On an unknown phase label, a window with fewer than three
        samples, or a degenerate (zero-time-variance) window.
    """
    if phase not in (_HEATING, _COOLING):
        raise ModelError(f"phase must be '{_HEATING}' or '{_COOLING}', got {phase!r}")
    if not 0.0 < window_fraction <= 1.0:
        raise ModelError("window_fraction must lie in (0, 1]")
    mask = trace.heating if phase == _HEATING else trace.cooling
    start = 0.0 if phase == _HEATING else trace.t_qub
    t_rel = trace.times[mask] - start
    values = trace.delta_T[mask]
    span = t_rel[-1]
    # same selection rule in both phases => identical window geometry
    selected = t_rel >= (1.0 - window_fraction) * span - 1e-9 * span
    t_win = t_rel[selected]
    y_win = values[selected]
    if t_win.size < 3:
        raise ModelError(
            f"{phase} window holds only {t_win.size} samples; need at least 3"
        )
    t_mean = t_win.mean()
    y_mean = y_win.mean()
    t_var = float((t_win - t_mean) @ (t_win - t_mean))
    if t_var == 0.0:
        raise ModelError(f"{phase} window has zero time variance")
    alpha = float((t_win - t_mean) @ (y_win - y_mean)) / t_var
    t0 = float(t_win[0])
    dT0 = y_mean + alpha * (t0 - t_mean)
    residual = y_win - (y_mean + alpha * (t_win - t_mean))
    total = float((y_win - y_mean) @ (y_win - y_mean))
    r2 = 1.0 if total == 0.0 else 1.0 - float(residual @ residual) / total
    return SlopeFit(alpha=alpha, dT0=float(dT0), t0=t0, r2=float(r2),
                    n_samples=int(t_win.size))


def estimate_H(alpha_h: float, alpha_c: float, dT0_h: float, dT0_c: float,
               P_h: float, P_c: float) -> float:
    """Two-phase heat transfer coefficient (W/K).

    H = (P_h α_c − P_c α_h) / (ΔT_h α_c − ΔT_c α_h).  Exact on a
    first-order building for slopes and temperatures read at consistent
    points of the two phases, whatever those points are.
    """
    denom = dT0_h * alpha_c - dT0_c * alpha_h
    scale = max(abs(dT0_h * alpha_c), abs(dT0_c * alpha_h))
    if abs(denom) <= _DEGENERACY_TOL * scale or scale == 0.0:
        raise NumericalError(
            "degenerate experiment: ΔT_h·α_c and ΔT_c·α_h cancel; "
            "the two phases carry no independent information"
        )
    return (P_h * alpha_c - P_c * alpha_h) / denom


def estimate_C(alpha_h: float, alpha_c: float, dT0_h: float, dT0_c: float,
               P_h: float, P_c: float) -> float:
    """Apparent heat capacity (J/K).

    C* = (P_h ΔT_c − P_c ΔT_h) / (α_h ΔT_c − α_c ΔT_h).  Equals the
    true capacity of a first-order building only when each phase's
    slope and temperature are read at the same instant (e.g. tangents
    at the phase origins); other conventions scale it by an exponential
    factor of the read-out delay, see :func:`recover_C`.
    """
    denom = alpha_h * dT0_c - alpha_c * dT0_h
    scale = max(abs(alpha_h * dT0_c), abs(alpha_c * dT0_h))
    if abs(denom) <= _DEGENERACY_TOL * scale or scale == 0.0:
        raise NumericalError(
            "degenerate experiment: α_h·ΔT_c and α_c·ΔT_h cancel; "
            "capacity is unidentifiable"
        )
    return (P_h * dT0_c - P_c * dT0_h) / denom


def recover_C(C_star: float, H: float, t0: float) -> float:
    """Invert the delayed-readout capacity model C* = C·e^(−t0·H/C).

    Solves the transcendental equation for C by a safeguarded Newton
    iteration on g(C) = C·e^(−t0·H/C) − C*.  g is strictly increasing,
    g(C*) ≤ 0, and e^x ≥ 1+x gives the overshoot-free upper bracket
    C* + t0·H, so the bracket always contains the unique root.

    Residual tolerance: |g(C)| ≤ 1e-9·C*.
    """
    if not C_star > 0.0:
        raise ModelError(f"C_star must be positive, got {C_star}")
    if not H > 0.0:
        raise ModelError(f"H must be positive, got {H}")
    if t0 < 0.0:
        raise ModelError(f"t0 must be >= 0, got {t0}")
    if t0 == 0.0:
        return C_star
    x = t0 * H

    def g(c: float) -> float:
        return c * math.exp(-x / c) - C_star

    lo, hi = C_star, C_star + x
    c = 0.5 * (lo + hi)
    for _ in range(200):
        val = g(c)
        if abs(val) <= 1e-9 * C_star:
            return c
        if val < 0.0:
            lo = c
        else:
            hi = c
        slope = math.exp(-x / c) * (1.0 + x / c)
        step = c - val / slope
        c_next = step if lo < step < hi else 0.5 * (lo + hi)
        if c_next == c:
            return c
        c = c_next
    raise NumericalError(
        f"capacity recovery did not converge (C*={C_star:.6g}, H={H:.6g}, t0={t0:.6g})"
    )


def estimate_from_trace(trace: QubTrace,
                        window_fraction: float = 1.0 / 3.0) -> QubEstimate:
    """Fit both phases of a record and evaluate the two-phase estimators.

    The powers are read from the record (mean over each phase).  The
    reported ``C`` applies :func:`recover_C` at the mean window-start
    offset of the two fits; ``C_star`` is the raw quotient.
    """
    fit_h = fit_slope(trace, _HEATING, window_fraction)
    fit_c = fit_slope(trace, _COOLING, window_fraction)
    P_h = float(trace.power[trace.heating].mean())
    P_c = float(trace.power[trace.cooling].mean())
    H = estimate_H(fit_h.alpha, fit_c.alpha, fit_h.dT0, fit_c.dT0, P_h, P_c)
    C_star = estimate_C(fit_h.alpha, fit_c.alpha, fit_h.dT0, fit_c.dT0, P_h, P_c)
    t0 = 0.5 * (fit_h.t0 + fit_c.t0)
    C = recover_C(C_star, H, t0) if (H > 0.0 and C_star > 0.0) else C_star
    return QubEstimate(
        H_qub=H, C_star=C_star, C=C,
        alpha_h=fit_h.alpha, alpha_c=fit_c.alpha,
        dT0_h=fit_h.dT0, dT0_c=fit_c.dT0,
        t0_h=fit_h.t0, t0_c=fit_c.t0,
        r2_h=fit_h.r2, r2_c=fit_c.r2,
    )


# ---------------------------------------------------------------------------
# first-order closed forms
# ---------------------------------------------------------------------------

def first_order_response(G: float, C: float, dT0: float, P: float,
                         times) -> np.ndarray:
    """ΔT(t) of the one-node building: ΔT0·e^(−t/τ) + (P/G)(1 − e^(−t/τ))."""
    if not (G > 0.0 and C > 0.0):
        raise ModelError("G and C must be positive")
    t = np.asarray(times, dtype=float)
    decay = np.exp(-t * (G / C))
    return dT0 * decay + (P / G) * -np.expm1(-t * (G / C))


def analytic_slopes(G: float, C: float, P_h: float, P_c: float,
                    dT0_h: float, dT0_c: float, t0: float) -> tuple[float, float]:
    """Tangent slopes of the one-node building at time t0 of each phase.

    α_h = e^(−t0·G/C)·(P_h − ΔT0_h·G)/C and likewise for cooling with
    (P_c, ΔT0_c); ΔT0 are the phase-start temperature differences.
    """
    if not (G > 0.0 and C > 0.0):
        raise ModelError("G and C must be positive")
    if t0 < 0.0:
        raise ModelError(f"t0 must be >= 0, got {t0}")
    decay = math.exp(-t0 * G / C)
    alpha_h = decay * (P_h - dT0_h * G) / C
    alpha_c = decay * (P_c - dT0_c * G) / C
    return alpha_h, alpha_c


# ---------------------------------------------------------------------------
# trace (de)serialization
# ---------------------------------------------------------------------------

_TRACE_HEADER = "t_s,dT_K,power_W,phase"


def trace_to_csv(trace: QubTrace) -> str:
    """Render a trace as CSV (header ``t_s,dT_K,power_W,phase``).

    Floats use the shortest round-trip representation, so writing and
    re-reading a trace is lossless and byte-deterministic.
    """
    lines = [_TRACE_HEADER]
    for t, dT, p, ph in zip(trace.times, trace.delta_T, trace.power, trace.phase):
        lines.append(f"{float(t)!r},{float(dT)!r},{float(p)!r},{ph}")
    return "\n".join(lines) + "\n"


def trace_from_csv(text: str) -> QubTrace:
    """Parse a trace CSV produced by :func:`trace_to_csv`."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0].strip() != _TRACE_HEADER:
        raise SchemaError(f"trace: first line must be '{_TRACE_HEADER}'")
    times, delta_T, power, phase = [], [], [], []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 4:
            raise SchemaError(f"trace line {i}: expected 4 fields, got {len(parts)}")
        try:
            times.append(float(parts[0]))
            delta_T.append(float(parts[1]))
            power.append(float(parts[2]))
        except ValueError as exc:
            raise SchemaError(f"trace line {i}: {exc}") from None
        phase.append(parts[3].strip())
    return QubTrace(times=np.array(times), delta_T=np.array(delta_T),
                    power=np.array(power), phase=np.array(phase))
