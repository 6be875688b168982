"""Biorthogonal spectral analysis of non-Hermitian relaxation matrices.

A diagonalizable relaxation matrix X has right and left eigenvectors

    X |R_n> = beta_n |R_n>,      X^dag |L_n> = conj(beta_n) |L_n>,

normalized pairwise so that <L_m|R_n> = delta_mn.  For strongly
nonreciprocal chains the right/left modes carry exponentially opposite
envelopes, so the closed-form constructors below assemble amplitudes in
the log domain and refuse configurations whose envelopes cannot be
represented in double precision.

Mode indices, like site indices, are 1-based in the public interface.
Modes are ordered by ascending real part of beta (slowest first), with
ties broken by ascending imaginary part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DecompositionError, DegeneracyError, EnvelopeOverflowError,
                     NormalizationError, ParameterError, RegimeError, SiteIndexError)
from .matio import matrix_payload
from .models import (HatanoNelsonParams, SshParams, build_hatano_nelson,
                     default_labels, matrix_entries)

# Largest |log amplitude| we allow before exp() would overflow/underflow.
ENVELOPE_LOG_LIMIT = 700.0
SIMILARITY_LOG_LIMIT = 600.0

# Numeric decompositions with a worse right-eigenvector condition number
# than this are not trusted by downstream consumers.
CONDITION_TRUST_LIMIT = 1e12


@dataclass(frozen=True)
class ModeVector:
    """Single mode profile with its normalization convention.

    normalization is "biorthogonal" (paired with a left/right partner so
    <L|R> = 1) or "euclidean" (unit 2-norm, phase-gauged).
    """

    amplitudes: np.ndarray
    normalization: str = "biorthogonal"

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.size == 0:
            raise ParameterError("mode vector must not be empty")
        if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
            raise ParameterError("mode vector contains non-finite amplitudes")
        if self.normalization not in ("biorthogonal", "euclidean"):
            raise ParameterError(f"unknown normalization {self.normalization!r}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


def _gauge_phase(column: np.ndarray) -> complex:
    """Phase factor that makes the largest-magnitude entry real positive."""
    k = int(np.argmax(np.abs(column)))
    pivot = column[k]
    if pivot == 0:
        raise NormalizationError("cannot gauge a zero vector")
    return pivot / abs(pivot)


def euclidean_normalize(vector) -> ModeVector:
    """Unit-norm copy with the largest-|entry| gauged real positive."""
    v = np.asarray(getattr(vector, "amplitudes", vector), dtype=complex).reshape(-1)
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise NormalizationError("cannot normalize a non-finite vector")
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        raise NormalizationError("cannot normalize the zero vector")
    v = v / nrm
    v = v * _gauge_phase(v).conjugate()
    return ModeVector(v, "euclidean")


@dataclass(frozen=True)
class BiorthogonalSpectrum:
    """Sorted eigenvalues with paired right/left mode matrices.

    ``right`` and ``left`` hold the modes as columns; columns satisfy
    left^dag @ right = identity up to the decomposition accuracy.
    ``condition_estimate`` is the 2-norm condition number of ``right``
    and is the figure of merit deciding whether numeric spectra can be
    trusted (see :data:`CONDITION_TRUST_LIMIT`).
    """

    betas: np.ndarray
    right: np.ndarray
    left: np.ndarray
    condition_estimate: float

    def __post_init__(self):
        b = np.asarray(self.betas, dtype=complex).reshape(-1)
        r = np.asarray(self.right, dtype=complex)
        l = np.asarray(self.left, dtype=complex)
        if r.shape != (b.size, b.size) or l.shape != r.shape:
            raise ParameterError("spectrum arrays have inconsistent shapes")
        for arr in (b, r, l):
            arr.flags.writeable = False
        object.__setattr__(self, "betas", b)
        object.__setattr__(self, "right", r)
        object.__setattr__(self, "left", l)
        object.__setattr__(self, "condition_estimate", float(self.condition_estimate))

    @property
    def dim(self) -> int:
        return self.betas.size

    def _check_mode(self, n: int) -> int:
        if int(n) != n or not 1 <= n <= self.dim:
            raise SiteIndexError(f"mode index {n} outside 1..{self.dim}")
        return int(n) - 1

    def right_mode(self, n: int) -> ModeVector:
        return ModeVector(self.right[:, self._check_mode(n)], "biorthogonal")

    def left_mode(self, n: int) -> ModeVector:
        return ModeVector(self.left[:, self._check_mode(n)], "biorthogonal")

    def right_mode_unit(self, n: int) -> ModeVector:
        return euclidean_normalize(self.right[:, self._check_mode(n)])

    def reconstruct(self) -> np.ndarray:
        """R diag(beta) L^dag, the matrix this spectrum actually diagonalizes."""
        return (self.right * self.betas[None, :]) @ self.left.conj().T


def slow_mode_position(betas: np.ndarray) -> int:
    """0-based index of the slowest mode: minimal Re beta, ties by Im, then index."""
    b = np.asarray(betas)
    order = np.lexsort((np.arange(b.size), b.imag, b.real))
    return int(order[0])


def gap_ratio(spectrum: BiorthogonalSpectrum) -> float:
    """Relative spectral gap (rate_second - rate_slow) / rate_slow.

    Only the number is reported; whether a given ratio makes the
    single-slow-mode picture valid is for the caller to decide.
    """
    rates = np.sort(spectrum.betas.real)
    if rates.size < 2:
        return math.inf
    if rates[0] == 0:
        return math.inf
    return float((rates[1] - rates[0]) / rates[0])


def _sorted_order(betas: np.ndarray) -> np.ndarray:
    """Ascending (Re, Im); real parts equal up to rounding noise count as ties."""
    order = np.lexsort((betas.imag, betas.real))
    if betas.size < 2:
        return order
    diameter = float(np.abs(betas[:, None] - betas[None, :]).max())
    tol = 64.0 * np.finfo(float).eps * diameter
    if tol == 0.0:
        return order
    re = betas[order].real
    start = 0
    for k in range(1, betas.size + 1):
        if k < betas.size and re[k] - re[k - 1] <= tol:
            continue
        if k - start > 1:
            sub = order[start:k]
            inner = np.lexsort((betas[sub].real, betas[sub].imag))
            order[start:k] = sub[inner]
        start = k
    return order


def _min_pairwise_gap(betas: np.ndarray) -> tuple[float, tuple[int, int]]:
    d = np.abs(betas[:, None] - betas[None, :])
    np.fill_diagonal(d, np.inf)
    flat = int(np.argmin(d))
    i, j = divmod(flat, betas.size)
    return float(d[i, j]), (min(i, j) + 1, max(i, j) + 1)


def biorthogonal_decompose(matrix) -> BiorthogonalSpectrum:
    """Full biorthogonal eigendecomposition of a relaxation matrix.

    Left modes are obtained from the inverse of the right-eigenvector
    matrix, which enforces <L_m|R_n> = delta_mn to solver accuracy
    instead of pairing two independent eigensolves.  Hermitian input is
    detected and routed through the symmetric solver, in which case left
    and right modes coincide and all beta are real.

    Raises
    ------
    DegeneracyError
        Near-defective input: an eigenvalue pair closer than 1e-10 of
        the spectral diameter while the mode matrix condition exceeds
        1e12.
    DecompositionError
        The eigensolver failed or the mode matrix is singular.
    """
    x = matrix_entries(matrix)
    dim = x.shape[0]
    scale = max(1.0, float(np.abs(x).max()))
    if np.abs(x - x.conj().T).max() <= 1e-13 * scale:
        w, r = np.linalg.eigh(0.5 * (x + x.conj().T))
        betas = w.astype(complex)
        phases = np.array([_gauge_phase(r[:, k]).conjugate() for k in range(dim)])
        r = r * phases[None, :]
        return BiorthogonalSpectrum(betas, r, r.copy(), float(np.linalg.cond(r)))

    try:
        betas, r = np.linalg.eig(x)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition failed: {exc}") from exc
    order = _sorted_order(betas)
    betas, r = betas[order], r[:, order]
    phases = np.array([_gauge_phase(r[:, k]).conjugate() for k in range(dim)])
    r = r * phases[None, :]

    cond = float(np.linalg.cond(r))
    if dim > 1:
        gap, pair = _min_pairwise_gap(betas)
        diameter = float(np.abs(betas[:, None] - betas[None, :]).max())
        clustered = (gap < 1e-10 * diameter) if diameter > 0 else True
        if clustered and cond > CONDITION_TRUST_LIMIT:
            raise DegeneracyError(
                f"modes {pair[0]} and {pair[1]} are nearly degenerate "
                f"(gap {gap:.3e}) with mode-matrix condition {cond:.3e}")
    try:
        left = np.linalg.inv(r).conj().T
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"right-eigenvector matrix is singular: {exc}") from exc
    return BiorthogonalSpectrum(betas, r, left, cond)


def _hn_sine_basis(params: HatanoNelsonParams) -> tuple[np.ndarray, np.ndarray]:
    """(betas, phi) of the reciprocal reference chain; phi[j-1, n-1] = phi_n(j)."""
    n = params.n_sites
    modes = np.arange(1, n + 1)
    betas = params.kappa - 2.0 * math.sqrt(params.t_right * params.t_left) * np.cos(
        modes * np.pi / (n + 1))
    sites = np.arange(1, n + 1)
    phi = math.sqrt(2.0 / (n + 1)) * np.sin(np.outer(sites, modes) * np.pi / (n + 1))
    return betas, phi


def _require_hn_hoppings(params: HatanoNelsonParams) -> float:
    if params.t_right <= 0 or params.t_left <= 0:
        raise ParameterError("closed-form chain spectra require strictly positive hoppings")
    return 0.5 * (math.log(params.t_right) - math.log(params.t_left))


def _sign_gauge_pair(r: np.ndarray, l: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flip real mode pairs so each right column peaks positive; <L|R> unchanged."""
    signs = np.empty(r.shape[1])
    for k in range(r.shape[1]):
        signs[k] = 1.0 if r[int(np.argmax(np.abs(r[:, k]))), k].real >= 0 else -1.0
    return r * signs[None, :], l * signs[None, :]


def hn_analytic_spectrum(params: HatanoNelsonParams) -> BiorthogonalSpectrum:
    """Closed-form spectrum of the nonreciprocal single-band chain.

    With r = sqrt(t_right/t_left) and the open-chain sine basis phi_n,

        beta_n  = kappa - 2 sqrt(t_right t_left) cos(n pi / (N+1)),
        R_n(j)  = r^j  phi_n(j),      L_n(j) = r^-j phi_n(j),

    already biorthonormal.  Amplitudes are assembled in the log domain;
    configurations with N |log r| > 700 cannot be exponentiated in
    double precision and raise EnvelopeOverflowError (use
    :func:`hn_normalized_modes` for profiles in that regime).
    """
    logr = _require_hn_hoppings(params)
    n = params.n_sites
    if n * abs(logr) > ENVELOPE_LOG_LIMIT:
        raise EnvelopeOverflowError(
            f"envelope exponent N |log r| = {n * abs(logr):.1f} exceeds "
            f"{ENVELOPE_LOG_LIMIT:.0f}; request unit-norm profiles via hn_normalized_modes")
    betas, phi = _hn_sine_basis(params)
    sites = np.arange(1, n + 1, dtype=float)
    right = np.exp(sites * logr)[:, None] * phi
    left = np.exp(-sites * logr)[:, None] * phi
    right, left = _sign_gauge_pair(right, left)
    # R = diag(r^j) @ (orthogonal sine basis), so cond(R) = r^(N-1) exactly.
    cond = math.exp((n - 1) * abs(logr))
    return BiorthogonalSpectrum(betas.astype(complex), right, left, cond)


def hn_normalized_modes(params: HatanoNelsonParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(betas, right_unit, left_unit) with unit-norm gauged mode columns.

    Safe at any chain length: each column is scaled by its peak in the
    log domain before exponentiation, so only ratios <= 1 are ever
    exponentiated.  The biorthogonal pairing is lost; use
    :func:`hn_analytic_spectrum` when left/right weights are needed.
    """
    logr = _require_hn_hoppings(params)
    n = params.n_sites
    betas, phi = _hn_sine_basis(params)
    sites = np.arange(1, n + 1, dtype=float)
    right = np.empty((n, n))
    left = np.empty((n, n))
    with np.errstate(divide="ignore"):
        logphi = np.log(np.abs(phi))
    signs = np.sign(phi)
    for k in range(n):
        for dest, env in ((right, sites * logr), (left, -sites * logr)):
            a = env + logphi[:, k]
            col = signs[:, k] * np.exp(a - a.max())
            col /= np.linalg.norm(col)
            if col[int(np.argmax(np.abs(col)))] < 0:
                col = -col
            dest[:, k] = col
    return betas.copy(), right, left


def hn_similarity_residual(params: HatanoNelsonParams) -> float:
    """Hermiticity defect of S^-1 X S with S = diag(r^j).

    The similarity S maps the nonreciprocal chain onto its reciprocal
    reference; the returned max |M - M^dag| should vanish to rounding.
    Guarded so the r^N envelope stays representable.
    """
    logr = _require_hn_hoppings(params)
    n = params.n_sites
    if n * abs(logr) >= SIMILARITY_LOG_LIMIT:
        raise EnvelopeOverflowError(
            f"similarity envelope exponent N |log r| = {n * abs(logr):.1f} exceeds "
            f"{SIMILARITY_LOG_LIMIT:.0f}")
    x = build_hatano_nelson(params).entries
    env = np.exp(np.arange(1, n + 1, dtype=float) * logr)
    m = x * (env[None, :] / env[:, None])
    return float(np.abs(m - m.conj().T).max())


def ssh_edge_envelopes(params: SshParams) -> tuple[ModeVector, ModeVector]:
    """Closed-form edge-mode envelope candidates of the two-band chain.

    In the topological regime t1 < t2 the boundary mode has support on
    the A sublattice with cell-to-cell ratios

        right: -(t1/t2) exp(+2g),      left: -(t1/t2) exp(-2g),

    for the right and left eigenvector respectively.  Both are returned
    unit-normalized (assembled in the log domain, so any g is safe).
    """
    if params.t1 <= 0 or params.t2 <= 0:
        raise ParameterError("edge envelopes require strictly positive hoppings")
    if params.t1 >= params.t2:
        raise RegimeError(
            f"edge envelope undefined for t1 >= t2 (got t1={params.t1}, t2={params.t2})")
    n = params.n_cells
    cells = np.arange(n, dtype=float)
    base = math.log(params.t1 / params.t2)
    out = []
    for sign_g in (+1.0, -1.0):
        logq = base + 2.0 * sign_g * params.g
        logamp = cells * logq
        amp = ((-1.0) ** cells) * np.exp(logamp - logamp.max())
        full = np.zeros(2 * n)
        full[0::2] = amp
        out.append(euclidean_normalize(full))
    return out[0], out[1]


def spectrum_payload(spectrum: BiorthogonalSpectrum, labels=None) -> dict:
    """JSON payload for a spectrum (betas, mode matrices, condition)."""
    labels = tuple(labels) if labels else default_labels(spectrum.dim)
    return {
        "dim": spectrum.dim,
        "betas": {
            "re": [float(v) for v in spectrum.betas.real],
            "im": [float(v) for v in spectrum.betas.imag],
        },
        "right": matrix_payload(spectrum.right, labels),
        "left": matrix_payload(spectrum.left, labels),
        "condition_estimate": float(spectrum.condition_estimate),
    }
