"""Steady-state and transient solutions of the one-body correlator equation.

The correlator C obeys dC/dt = -X C - C X^dag + Y.  When every
eigenvalue of X has positive real part the dynamics relax to the unique
fixed point of the continuous Lyapunov equation

    X C + C X^dag = Y.

Two exact routes are implemented: a dense linear solve of the
vectorized system (the reference, with an equivalent Schur-based path
for larger chains) and the spectral sum over biorthogonal mode pairs

    C = sum_mn  <L_m|Y|L_n> / (beta_m + conj(beta_n))  |R_m><R_n|,

which is exact for trustworthy decompositions and is how closed-form
spectra are turned into closed-form correlators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (DarkSourceError, ParameterError, SiteIndexError, SolveError,
                     StabilityError, StepSizeError)
from .models import matrix_entries
from .spectral import BiorthogonalSpectrum, slow_mode_position

# Matrices smaller than this are solved by the vectorized reference route
# when route="auto"; beyond it the Schur path is used (identical results
# to solver accuracy, verified over the full test grid).
AUTO_VECTORIZED_LIMIT = 16

# Fixed-step integration diverging past this norm is reported as a step
# size problem rather than allowed to overflow silently.
DIVERGENCE_NORM_LIMIT = 1e150


@dataclass(frozen=True)
class SteadyCorrelator:
    """Hermitian one-body correlator with solver provenance.

    ``method`` is "direct", "spectral", or "integrated"; ``residual`` is
    the relative Lyapunov defect ||X C + C X^dag - Y||_F / ||Y||_F at
    the time the object was produced (distance from stationarity for
    transient snapshots); ``asymmetry`` records max |C - C^dag| before
    the Hermitian symmetrization that every producer applies.
    """

    entries: np.ndarray
    method: str
    residual: float
    asymmetry: float

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ParameterError(f"correlator must be square, got shape {m.shape}")
        if self.method not in ("direct", "spectral", "integrated"):
            raise ParameterError(f"unknown solver method {self.method!r}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SingleModeResult:
    """Rank-one slow-mode approximation of a steady correlator.

    ``loading`` is A_0 = strength |L_0(s)|^2 / (2 Re beta_0) and
    ``predicted_occupation`` its estimate A_0 <R_0|R_0> of the top
    natural-orbital occupation.
    """

    rank_one: SteadyCorrelator
    loading: float
    predicted_occupation: float


@dataclass(frozen=True)
class CorrelatorTrajectory:
    """Fixed-step correlator snapshots; states[k] is at times[k]."""

    times: np.ndarray
    states: tuple[SteadyCorrelator, ...]
    dt: float


def lyapunov_residual(x, c, y) -> float:
    """Relative Frobenius defect of the Lyapunov equation (absolute if Y = 0)."""
    x, c, y = (np.asarray(matrix_entries(m)) for m in (x, c, y))
    defect = float(np.linalg.norm(x @ c + c @ x.conj().T - y))
    ynorm = float(np.linalg.norm(y))
    return defect / ynorm if ynorm > 0 else defect


def _stable_betas(x: np.ndarray) -> np.ndarray:
    betas = np.linalg.eigvals(x)
    worst = float(betas.real.min())
    if worst <= 0:
        raise StabilityError(
            f"relaxation matrix is not strictly stable: min Re beta = {worst:.6e}")
    return betas


def _check_beta_stability(betas: np.ndarray) -> None:
    worst = float(np.asarray(betas).real.min())
    if worst <= 0:
        raise StabilityError(
            f"spectrum is not strictly stable: min Re beta = {worst:.6e}")


def _hermitize(c: np.ndarray) -> tuple[np.ndarray, float]:
    asym = float(np.abs(c - c.conj().T).max()) if c.size else 0.0
    return 0.5 * (c + c.conj().T), asym


def solve_vectorized(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Reference route: row-major vectorization of X C + C X^dag = Y.

    vec(X C) = (X kron I) vec(C) and vec(C X^dag) = (I kron conj(X)) vec(C)
    for row-major vec, so one dense solve of an N^2 x N^2 system.  No
    stability screening here; callers are expected to have checked.
    """
    n = x.shape[0]
    eye = np.eye(n)
    a = np.kron(x, eye) + np.kron(eye, x.conj())
    try:
        c = np.linalg.solve(a, y.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise SolveError(f"vectorized Lyapunov system is singular: {exc}") from exc
    return c.reshape(n, n)


def solve_schur(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Schur-factorization route (order N^3), equivalent to the reference."""
    try:
        return scipy.linalg.solve_sylvester(x, x.conj().T, y)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolveError(f"Schur Lyapunov solve failed: {exc}") from exc


def solve_lyapunov_direct(relaxation, source, route: str = "auto") -> SteadyCorrelator:
    """Exact steady correlator by dense linear algebra.

    Parameters
    ----------
    relaxation, source : matrix wrappers or arrays
        X and Y of the Lyapunov equation; Y is trusted to be Hermitian.
    route : {"auto", "vectorized", "schur"}
        "auto" uses the vectorized reference up to dim 16 and the Schur
        path beyond; both agree to solver accuracy.

    Raises
    ------
    StabilityError
        Some Re beta <= 0, so no steady state exists.
    SolveError
        The backing linear system could not be solved.
    """
    x = matrix_entries(relaxation)
    y = matrix_entries(source)
    if y.shape != x.shape:
        raise ParameterError(f"source shape {y.shape} does not match relaxation {x.shape}")
    _stable_betas(x)
    if route == "auto":
        route = "vectorized" if x.shape[0] <= AUTO_VECTORIZED_LIMIT else "schur"
    if route == "vectorized":
        c = solve_vectorized(x, y)
    elif route == "schur":
        c = solve_schur(x, y)
    else:
        raise ParameterError(f"unknown route {route!r}")
    c, asym = _hermitize(c)
    return SteadyCorrelator(c, "direct", lyapunov_residual(x, c, y), asym)


def _spectral_denominators(betas: np.ndarray) -> np.ndarray:
    _check_beta_stability(betas)
    return betas[:, None] + betas[None, :].conj()


def solve_lyapunov_spectral(spectrum: BiorthogonalSpectrum, source) -> SteadyCorrelator:
    """Steady correlator from the biorthogonal mode sum.

    The residual is evaluated against the matrix the spectrum actually
    diagonalizes (R diag(beta) L^dag), so it measures the accuracy of
    the sum itself, not of the upstream eigendecomposition.
    """
    y = matrix_entries(source)
    if y.shape[0] != spectrum.dim:
        raise ParameterError("source dimension does not match spectrum")
    denom = _spectral_denominators(spectrum.betas)
    weights = (spectrum.left.conj().T @ y @ spectrum.left) / denom
    c = spectrum.right @ weights @ spectrum.right.conj().T
    c, asym = _hermitize(c)
    x_rec = spectrum.reconstruct()
    return SteadyCorrelator(c, "spectral", lyapunov_residual(x_rec, c, y), asym)


def single_mode_approximation(spectrum: BiorthogonalSpectrum, pump_site: int,
                              pump_strength: float) -> SingleModeResult:
    """Rank-one steady state kept by the slowest mode alone.

    For a single-site pump of the given strength at ``pump_site``,
    C ~= A_0 |R_0><R_0| with A_0 = strength |L_0(s)|^2 / (2 Re beta_0).

    Raises DarkSourceError when the pump site sits on a node of the
    slow left mode (|L_0(s)| <= 1e-14), where the approximation is empty.
    """
    if pump_strength <= 0 or not np.isfinite(pump_strength):
        raise ParameterError(f"pump strength must be positive, got {pump_strength}")
    if int(pump_site) != pump_site or not 1 <= pump_site <= spectrum.dim:
        raise SiteIndexError(f"pump site {pump_site} outside 1..{spectrum.dim}")
    _check_beta_stability(spectrum.betas)
    pos = slow_mode_position(spectrum.betas)
    amp = spectrum.left[int(pump_site) - 1, pos]
    if abs(amp) <= 1e-14:
        raise DarkSourceError(
            f"pump site {pump_site} is a node of the slow mode (|L_0(s)| = {abs(amp):.2e})")
    beta0 = spectrum.betas[pos]
    loading = float(pump_strength * abs(amp) ** 2 / (2.0 * beta0.real))
    r0 = spectrum.right[:, pos]
    c = loading * np.outer(r0, r0.conj())
    c, asym = _hermitize(c)
    y = np.zeros((spectrum.dim, spectrum.dim), dtype=complex)
    y[int(pump_site) - 1, int(pump_site) - 1] = pump_strength
    residual = lyapunov_residual(spectrum.reconstruct(), c, y)
    predicted = loading * float(np.vdot(r0, r0).real)
    return SingleModeResult(SteadyCorrelator(c, "spectral", residual, asym),
                            loading, predicted)


def default_step(x: np.ndarray) -> float:
    """Default integrator step: 0.01 / max |beta|."""
    betas = np.linalg.eigvals(x)
    top = float(np.abs(betas).max())
    if top == 0.0:
        return 0.01
    return 0.01 / top


def propagate_correlator(relaxation, source, initial, t_final: float,
                         dt: float | None = None, stride: int = 1) -> CorrelatorTrajectory:
    """Fixed-step fourth-order Runge-Kutta integration of the correlator.

    Snapshots (symmetrized, with their distance from stationarity as
    ``residual``) are stored every ``stride`` steps and always at the
    final time.  Divergence under a stable relaxation matrix is reported
    as StepSizeError rather than letting the state overflow.
    """
    x = matrix_entries(relaxation)
    y = matrix_entries(source)
    c0 = matrix_entries(initial)
    if y.shape != x.shape or c0.shape != x.shape:
        raise ParameterError("relaxation, source, and initial state dimensions differ")
    if t_final < 0:
        raise ParameterError(f"t_final must be nonnegative, got {t_final}")
    if stride < 1 or int(stride) != stride:
        raise ParameterError(f"stride must be a positive integer, got {stride!r}")
    if dt is None:
        dt = default_step(x)
    if dt <= 0 or not np.isfinite(dt):
        raise ParameterError(f"dt must be positive and finite, got {dt}")

    def rhs(c):
        return -(x @ c) - (c @ x.conj().T) + y

    n_steps = int(round(t_final / dt)) if t_final > 0 else 0
    c, asym = _hermitize(c0)
    times = [0.0]
    states = [SteadyCorrelator(c, "integrated", lyapunov_residual(x, c, y), asym)]
    for step in range(1, n_steps + 1):
        k1 = rhs(c)
        k2 = rhs(c + 0.5 * dt * k1)
        k3 = rhs(c + 0.5 * dt * k2)
        k4 = rhs(c + dt * k3)
        # re-symmetrize after every step so rounding asymmetry cannot accumulate
        c, asym = _hermitize(c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        norm = float(np.linalg.norm(c))
        if not np.isfinite(norm) or norm > DIVERGENCE_NORM_LIMIT:
            raise StepSizeError(
                f"integration diverged at t = {step * dt:.4g} (norm {norm:.3e}); "
                f"reduce dt below {dt:.3e}")
        if step % stride == 0 or step == n_steps:
            times.append(step * dt)
            states.append(SteadyCorrelator(c, "integrated",
                                           lyapunov_residual(x, c, y), asym))
    return CorrelatorTrajectory(np.asarray(times), tuple(states), float(dt))


def closed_form_correlator(spectrum: BiorthogonalSpectrum, source, initial,
                           t: float) -> np.ndarray:
    """Exact correlator at time t in the biorthogonal eigenbasis.

    C(t) = e^{-X t} C0 e^{-X^dag t}
           + sum_mn <L_m|Y|L_n> (1 - e^{-(beta_m + conj beta_n) t})
                    / (beta_m + conj beta_n) |R_m><R_n|.

    Requires a strictly stable spectrum; reduces to the spectral steady
    state as t -> inf and to C0 at t = 0.
    """
    y = matrix_entries(source)
    c0 = matrix_entries(initial)
    if y.shape[0] != spectrum.dim or c0.shape[0] != spectrum.dim:
        raise ParameterError("source or initial state dimension does not match spectrum")
    if t < 0:
        raise ParameterError(f"time must be nonnegative, got {t}")
    denom = _spectral_denominators(spectrum.betas)
    decay = np.exp(-spectrum.betas * t)
    propagated = (spectrum.right * decay[None, :]) @ (spectrum.left.conj().T @ c0
                                                      @ spectrum.left) \
        @ (spectrum.right * decay[None, :]).conj().T
    weights = (spectrum.left.conj().T @ y @ spectrum.left) * (
        -np.expm1(-denom * t) / denom)
    driven = spectrum.right @ weights @ spectrum.right.conj().T
    c, _ = _hermitize(propagated + driven)
    return c
