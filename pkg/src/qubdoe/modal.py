"""Eigenstructure of RC models and exact step responses.

The state matrix of a reduced RC network is similar to a symmetric
negative-definite matrix (congruence through the square root of the
capacity diagonal), so its spectrum is real, stable and diagonalizable.
Every constant-input response can therefore be written as a finite sum
of decaying exponentials

    y(t) = Σ_i (m_i + n_i) e^{λ_i t} + y_ss

where the m_i come from the initial state, the n_i from the input step,
and y_ss is the stationary value.  This module computes those pieces
exactly (no time stepping) and sorts every mode into the amplitude /
time-constant classes used to judge how long a two-pulse experiment
must run.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .network import StateSpaceModel

__all__ = [
    "EigenBasis",
    "ModalDecomposition",
    "ClassThresholds",
    "eigendecompose",
    "initial_state",
    "state_at",
    "step_response",
    "modal_decomposition",
    "classify_modes",
]

#: eigenvector-matrix condition number beyond which the basis is rejected
COND_LIMIT = 1e10

#: |Im λ| / |Re λ| beyond which an eigenvalue is no longer considered real
_REALNESS_TOL = 1e-9


@dataclass(frozen=True)
class EigenBasis:
    """Sorted eigendecomposition A = V Λ V⁻¹ of a state matrix.

    Eigenvalues are real (enforced), sorted by descending magnitude so
    the fastest mode comes first.  ``time_constants`` is -1/λ.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    inv_vectors: np.ndarray

    @property
    def time_constants(self) -> np.ndarray:
        return -1.0 / self.eigenvalues


def eigendecompose(model: StateSpaceModel) -> EigenBasis:
    """Diagonalize the state matrix.

    Raises
    ------
    NumericalError
        If an eigenvalue has a significant imaginary part (the model is
        not an RC-type network) or the eigenvector matrix is too badly
        conditioned to invert reliably (condition number above 1e10).
    """
    lam, V = np.linalg.eig(model.A)
    scale = np.maximum(np.abs(lam.real), np.finfo(float).tiny)
    if np.any(np.abs(lam.imag) > _REALNESS_TOL * scale):
        worst = lam[np.argmax(np.abs(lam.imag) / scale)]
        raise NumericalError(
            f"state matrix has a significantly complex eigenvalue {worst}; "
            "not a reciprocal RC network"
        )
    lam = lam.real
    V = V.real
    order = np.argsort(-np.abs(lam), kind="stable")
    lam = lam[order]
    V = V[:, order]
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalError(
            f"eigenvector basis is ill-conditioned (cond = {cond:.3e} > "
            f"{COND_LIMIT:.0e}); modal form is unreliable"
        )
    return EigenBasis(eigenvalues=lam, vectors=V, inv_vectors=np.linalg.inv(V))


def initial_state(model: StateSpaceModel, u0: np.ndarray) -> np.ndarray:
    """Stationary state under constant input ``u0``: x = -A⁻¹ B u0."""
    u0 = np.asarray(u0, dtype=float)
    return np.linalg.solve(model.A, -(model.B @ u0))


def _state_trajectory(model: StateSpaceModel, u: np.ndarray, x0: np.ndarray,
                      times: np.ndarray, basis: EigenBasis) -> np.ndarray:
    """States at the given times for a constant input:
    x(t) = V [e^{Λt} V⁻¹x0 + Λ⁻¹(e^{Λt} - I) V⁻¹Bu]."""
    lam = basis.eigenvalues
    w0 = basis.inv_vectors @ x0
    wu = basis.inv_vectors @ (model.B @ u)
    phase = np.outer(times, lam)
    growth = np.exp(phase) * w0
    # expm1 keeps t -> 0 and slow modes accurate
    forced = (np.expm1(phase) / lam) * wu
    return (growth + forced) @ basis.vectors.T


def step_response(model: StateSpaceModel, u: np.ndarray, x0: np.ndarray,
                  times: np.ndarray, basis: EigenBasis | None = None) -> np.ndarray:
    """Exact response to a constant input from an arbitrary start state.

    Parameters
    ----------
    model : StateSpaceModel
    u : ndarray, shape (n_inputs,)
        Input held constant over the whole horizon.
    x0 : ndarray, shape (n_states,)
        State at t = 0.
    times : ndarray, shape (nt,)
        Evaluation instants (s); need not be uniform.
    basis : EigenBasis, optional
        Reuse a precomputed eigendecomposition (the decomposition does
        not depend on u or x0, so sweeps share one).

    Returns
    -------
    ndarray, shape (nt, n_outputs)
        y(t) = C[e^{At}x0 + A⁻¹(e^{At} - I)Bu] + Du, evaluated through
        the eigenbasis, so accuracy is uniform in t.
    """
    u = np.asarray(u, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if basis is None:
        basis = eigendecompose(model)
    states = _state_trajectory(model, u, x0, times, basis)
    return states @ model.C.T + (model.D @ u)[None, :]


def state_at(model: StateSpaceModel, u: np.ndarray, x0: np.ndarray,
             t: float, basis: EigenBasis | None = None) -> np.ndarray:
    """State vector after holding input ``u`` for ``t`` seconds from ``x0``."""
    u = np.asarray(u, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if basis is None:
        basis = eigendecompose(model)
    return _state_trajectory(model, u, x0, np.array([float(t)]), basis)[0]


@dataclass(frozen=True)
class ModalDecomposition:
    """Per-mode split of a constant-input response.

    For output o:  y_o(t) = Σ_i [init_amplitudes[o,i] +
    input_amplitudes[o,i]] e^{λ_i t} + steady_value[o].
    """

    eigenvalues: np.ndarray          # (n,)
    time_constants: np.ndarray       # (n,)
    eigenvectors: np.ndarray         # (n, n)
    init_amplitudes: np.ndarray      # (n_outputs, n)
    input_amplitudes: np.ndarray     # (n_outputs, n)
    steady_value: np.ndarray         # (n_outputs,)
    output_names: tuple[str, ...]

    def evaluate(self, times: np.ndarray) -> np.ndarray:
        """Reconstruct y(t) from the modal sum; shape (nt, n_outputs)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        decay = np.exp(np.outer(times, self.eigenvalues))
        coeff = self.init_amplitudes + self.input_amplitudes
        return decay @ coeff.T + self.steady_value[None, :]

    def mode_amplitudes(self) -> np.ndarray:
        """|initial + input| coefficient of each mode, worst output."""
        return np.max(np.abs(self.init_amplitudes + self.input_amplitudes), axis=0)


def modal_decomposition(model: StateSpaceModel, u: np.ndarray, x0: np.ndarray,
                        basis: EigenBasis | None = None) -> ModalDecomposition:
    """Split the constant-input response into its exponential modes.

    The initial-state part carries coefficients CV·diag(V⁻¹x0), the
    forced part CA⁻¹V·diag(V⁻¹Bu), and the stationary value is
    (-CA⁻¹B + D)u; their sum at t = 0 reproduces y(0) = Cx0 + Du.
    """
    u = np.asarray(u, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if basis is None:
        basis = eigendecompose(model)
    V = basis.vectors
    CV = model.C @ V
    CAinvV = model.C @ np.linalg.solve(model.A, V)
    w0 = basis.inv_vectors @ x0
    wu = basis.inv_vectors @ (model.B @ u)
    steady = -model.C @ np.linalg.solve(model.A, model.B @ u) + model.D @ u
    return ModalDecomposition(
        eigenvalues=basis.eigenvalues,
        time_constants=basis.time_constants,
        eigenvectors=V,
        init_amplitudes=CV * w0[None, :],
        input_amplitudes=CAinvV * wu[None, :],
        steady_value=steady,
        output_names=model.output_names,
    )


@dataclass(frozen=True)
class ClassThresholds:
    """Tunable boundaries of the mode classes (multiples of t_qub).

    A mode settles after ``settle_factor`` time constants.  It is fast
    when it settles within ``fast_fraction``·t_qub, slow when it is
    still alive after ``slow_multiple``·t_qub, medium in between.
    Modes whose coefficient falls below ``amplitude_cutoff`` of the
    largest are insignificant; insignificant non-slow modes split at
    ``split_multiple``·t_qub into the quick (b) and sluggish (d) bins.
    """

    amplitude_cutoff: float = 0.01
    settle_factor: float = 4.0
    fast_fraction: float = 0.2
    slow_multiple: float = 4.0
    split_multiple: float = 2.0


def classify_modes(decomposition: ModalDecomposition, t_qub: float,
                   thresholds: ClassThresholds = ClassThresholds()) -> list[tuple[int, str]]:
    """Assign each mode one of the design classes a-e.

    a : settles early in the pulse and shapes the response — harmless.
    b : quick but with a negligible coefficient.
    c : significant and settling on the experiment's own scale — these
        force the pulse to be long enough.
    d : negligible coefficient, sluggish.
    e : barely decays within the experiment, any amplitude — these bias
        late-window slopes and drive the intrinsic estimation error.

    The partition is exhaustive and exclusive for every mode.
    """
    if not t_qub > 0.0:
        raise NumericalError(f"t_qub must be positive, got {t_qub}")
    taus = decomposition.time_constants
    if np.any(taus <= 0.0):
        raise NumericalError("unstable mode (non-positive time constant); "
                             "classes are undefined")
    amps = decomposition.mode_amplitudes()
    largest = amps.max(initial=0.0)
    cut = thresholds.amplitude_cutoff * largest
    labels: list[tuple[int, str]] = []
    for i, tau in enumerate(taus):
        settle = thresholds.settle_factor * tau
        significant = largest > 0.0 and amps[i] >= cut
        if settle > thresholds.slow_multiple * t_qub:
            label = "e"
        elif settle <= thresholds.fast_fraction * t_qub:
            label = "a" if significant else "b"
        elif significant:
            label = "c"
        else:
            label = "b" if settle <= thresholds.split_multiple * t_qub else "d"
        labels.append((i, label))
    return labels
