"""Inverse design: microscopic gain/loss realizations of a target dynamics.

Any target pair (X, Y) with Hermitian positive semidefinite Y formally
splits into a Hamiltonian and two jump Gram matrices,

    h = (X - X^dag) / 2i,     gain gram = Y,     loss gram = X + X^dag - Y,

and the pair is physical precisely when the loss gram is positive
semidefinite.  For the two chain families this module also produces
explicit local jump operators (nearest-neighbor loss bonds, onsite
losses, onsite pumps) whose Grams rebuild the target exactly, gated by
the closed-form feasibility conditions on the residual onsite weights.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InfeasibilityError, ParameterError, ValidationError
from .models import (HatanoNelsonParams, SshParams, default_labels, matrix_entries,
                     ssh_labels)

# Loss grams with min eigenvalue above this are reported as physical.
PHYSICALITY_TOL = 1e-10

# Relative slack on the feasibility conditions, so exact boundary cases
# (vanishing interior weights) are accepted and tiny negative squared
# weights are clamped to zero.
FEASIBILITY_RTOL = 1e-8


@dataclass(frozen=True)
class JumpVector:
    """One jump operator, stored as its one-body coefficient vector.

    ``kind`` is "loss" (operator sum_j v_j c_j) or "gain"
    (sum_j v_j c_j^dag); ``label`` names the structural role, e.g.
    "bond(3)", "onsite(2A)", "pump(1)".
    """

    label: str
    kind: str
    vector: np.ndarray

    def __post_init__(self):
        if self.kind not in ("loss", "gain"):
            raise ParameterError(f"jump kind must be 'loss' or 'gain', got {self.kind!r}")
        v = np.asarray(self.vector, dtype=complex).reshape(-1)
        if v.size == 0 or not np.all(np.isfinite(v.real) & np.isfinite(v.imag)):
            raise ParameterError(f"jump vector {self.label!r} must be finite and non-empty")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)

    @property
    def dim(self) -> int:
        return self.vector.size


@dataclass(frozen=True)
class JumpSet:
    """All loss and gain jump vectors of one microscopic realization."""

    dim: int
    loss_vectors: tuple[JumpVector, ...]
    gain_vectors: tuple[JumpVector, ...]

    def __post_init__(self):
        for v in (*self.loss_vectors, *self.gain_vectors):
            if v.dim != self.dim:
                raise ParameterError(
                    f"jump vector {v.label!r} has dim {v.dim}, expected {self.dim}")

    def loss_gram(self) -> np.ndarray:
        """Damping matrix sum_mu conj(u_mu) u_mu^T.

        The conjugated outer product is what enters the relaxation
        matrix for C_ij = <c_j^dag c_i>; real vectors hide the
        distinction.
        """
        g = np.zeros((self.dim, self.dim), dtype=complex)
        for v in self.loss_vectors:
            g += np.outer(v.vector.conj(), v.vector)
        return g

    def gain_gram(self) -> np.ndarray:
        """Source matrix sum_mu v_mu conj(v_mu)^T."""
        g = np.zeros((self.dim, self.dim), dtype=complex)
        for v in self.gain_vectors:
            g += np.outer(v.vector, v.vector.conj())
        return g


@dataclass(frozen=True)
class MicroscopicRealization:
    """Formal (h, gain gram, loss gram) split of a target (X, Y) pair.

    ``physical`` records whether the loss gram is positive semidefinite
    within tolerance; an unphysical split is still a valid formal
    solution and is returned rather than rejected.
    """

    hamiltonian: np.ndarray
    gain_gram: np.ndarray
    loss_gram: np.ndarray
    target_relaxation: np.ndarray
    target_source: np.ndarray
    loss_min_eigenvalue: float
    physical: bool
    jumps: "JumpSet | None" = None

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def with_jumps(self, jumps: JumpSet) -> "MicroscopicRealization":
        if jumps.dim != self.dim:
            raise ParameterError("jump set dimension does not match realization")
        return replace(self, jumps=jumps)

    def rebuild_relaxation(self) -> np.ndarray:
        """i h + (loss gram + gain gram) / 2, which must reproduce X."""
        return 1j * self.hamiltonian + 0.5 * (self.loss_gram + self.gain_gram)


def inverse_design(relaxation, source) -> MicroscopicRealization:
    """Split a target (X, Y) into Hamiltonian and gain/loss Grams.

    Y must be Hermitian positive semidefinite (it becomes the gain gram
    verbatim).  The loss gram inherits whatever X + X^dag - Y is; its
    minimum eigenvalue and the resulting physicality flag are reported,
    not enforced.
    """
    x = matrix_entries(relaxation)
    y = matrix_entries(source)
    if y.shape != x.shape:
        raise ParameterError(f"source shape {y.shape} does not match target {x.shape}")
    herm = float(np.abs(y - y.conj().T).max()) if y.size else 0.0
    if herm > 1e-12:
        raise ParameterError(f"source must be Hermitian: max |Y - Y^dag| = {herm:.3e}")
    y = 0.5 * (y + y.conj().T)
    yw = np.linalg.eigvalsh(y)
    if float(yw.min()) < -1e-12 * float(yw.max()):
        raise ParameterError(
            f"source must be positive semidefinite: min eigenvalue {float(yw.min()):.3e}")
    h = (x - x.conj().T) / 2j
    loss = x + x.conj().T - y
    loss = 0.5 * (loss + loss.conj().T)
    wmin = float(np.linalg.eigvalsh(loss).min())
    return MicroscopicRealization(
        hamiltonian=h,
        gain_gram=y,
        loss_gram=loss,
        target_relaxation=x,
        target_source=y,
        loss_min_eigenvalue=wmin,
        physical=wmin >= -PHYSICALITY_TOL,
    )


def _basis(dim: int, site: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[site - 1] = 1.0
    return v


def _bond(dim: int, site_a: int, site_b: int, weight: float) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[site_a - 1] = weight
    v[site_b - 1] = -weight
    return v


def _pump_profile(dim: int, pump, context: str) -> np.ndarray:
    """Site-resolved pump strengths from a scalar (uniform) or vector."""
    y = np.asarray(pump, dtype=float)
    if y.ndim == 0:
        if y <= 0 or not np.isfinite(y):
            raise ParameterError(f"{context}: uniform pump strength must be positive")
        return np.full(dim, float(y))
    if y.shape != (dim,):
        raise ParameterError(f"{context}: pump profile must have length {dim}")
    if not np.all(np.isfinite(y)) or np.any(y < 0):
        raise ParameterError(f"{context}: pump profile entries must be finite and >= 0")
    return y


def _gate_uniform(delta: float, required: float, context: str) -> None:
    scale = max(1.0, abs(delta), abs(required))
    deficit = delta - required
    if deficit < -FEASIBILITY_RTOL * scale:
        raise InfeasibilityError(
            f"{context}: feasibility condition fails by {-deficit:.6g} "
            f"(need 2 kappa - gamma >= {required:.6g}, have {delta:.6g})",
            ((context, float(deficit)),))


def _onsite_weights(args: dict, context: str) -> dict:
    """Clamp tiny negative squared weights; collect genuine deficits per site."""
    scale = max(1.0, *(abs(a) for a in args.values()))
    deficits = [(label, float(a)) for label, a in args.items()
                if a < -FEASIBILITY_RTOL * scale]
    if deficits:
        worst = min(deficits, key=lambda d: d[1])
        raise InfeasibilityError(
            f"{context}: onsite loss weight squared is negative at {worst[0]} "
            f"({worst[1]:.6g}); {len(deficits)} site(s) infeasible",
            tuple(deficits))
    return {label: np.sqrt(max(a, 0.0)) for label, a in args.items()}


def hn_jump_decomposition(params: HatanoNelsonParams, gamma) -> JumpSet:
    """Local jump operators realizing the single-band chain with pumping.

    Loss channels: bond jumps sqrt(t_right + t_left) (c_j - c_{j+1}) on
    every nearest-neighbor pair, plus one onsite loss per site whose
    squared weight is delta - beta at the two boundary sites and
    delta - 2 beta in the bulk, with delta = 2 kappa - gamma_j and
    beta = t_right + t_left.  Gain channels: sqrt(gamma_j) c_j^dag.

    A uniform gamma is gated by the closed-form sufficient condition
    2 kappa - gamma >= 2 (t_right + t_left) (for a single site the bond
    term is absent and the condition reduces to gamma <= 2 kappa).  A
    site-resolved profile replaces gamma by y_j in the onsite weights
    and is gated per site on the actual squared weights, reporting
    every deficit.
    """
    n = params.n_sites
    labels = default_labels(n)
    y = _pump_profile(n, gamma, "single-band decomposition")
    beta = params.t_right + params.t_left
    uniform = bool(np.all(y == y[0]))
    if uniform:
        required = 2.0 * beta if n >= 2 else 0.0
        _gate_uniform(2.0 * params.kappa - y[0], required, "single-band decomposition")

    loss = []
    if beta > 0:
        w = np.sqrt(beta)
        for j in range(1, n):
            loss.append(JumpVector(f"bond({labels[j - 1]})", "loss", _bond(n, j, j + 1, w)))
    args = {}
    for j in range(1, n + 1):
        bond_diag = 0.0 if n == 1 else (beta if j in (1, n) else 2.0 * beta)
        args[labels[j - 1]] = 2.0 * params.kappa - y[j - 1] - bond_diag
    weights = _onsite_weights(args, "single-band decomposition")
    for j in range(1, n + 1):
        loss.append(JumpVector(f"onsite({labels[j - 1]})", "loss",
                               weights[labels[j - 1]] * _basis(n, j)))
    gain = [JumpVector(f"pump({labels[j - 1]})", "gain", np.sqrt(y[j - 1]) * _basis(n, j))
            for j in range(1, n + 1) if y[j - 1] > 0]
    return JumpSet(n, tuple(loss), tuple(gain))


def ssh_jump_decomposition(params: SshParams, gamma) -> JumpSet:
    """Local jump operators realizing the two-band chain with pumping.

    Bond losses carry sqrt(beta_1) = sqrt(t1_right + t1_left) within
    cells and sqrt(beta_2) = sqrt(t2_right + t2_left) between cells.
    Onsite squared weights are delta - beta_1 on the two outer sites
    (1A and NB) and delta - beta_1 - beta_2 elsewhere, with
    delta = 2 kappa - gamma_j.  A uniform gamma is gated by
    2 kappa - gamma >= beta_1 + beta_2 (single cell: >= beta_1).
    """
    n = params.n_cells
    dim = params.n_sites
    labels = ssh_labels(n)
    y = _pump_profile(dim, gamma, "two-band decomposition")
    beta1 = params.t1_right + params.t1_left
    beta2 = params.t2_right + params.t2_left
    uniform = bool(np.all(y == y[0]))
    if uniform:
        required = beta1 + beta2 if n >= 2 else beta1
        _gate_uniform(2.0 * params.kappa - y[0], required, "two-band decomposition")

    loss = []
    if beta1 > 0:
        w1 = np.sqrt(beta1)
        for cell in range(1, n + 1):
            a, b = 2 * cell - 1, 2 * cell
            loss.append(JumpVector(f"bond({labels[a - 1]})", "loss", _bond(dim, a, b, w1)))
    if beta2 > 0:
        w2 = np.sqrt(beta2)
        for cell in range(1, n):
            b, a2 = 2 * cell, 2 * cell + 1
            loss.append(JumpVector(f"bond({labels[b - 1]})", "loss", _bond(dim, b, a2, w2)))
    args = {}
    for site in range(1, dim + 1):
        outer = site in (1, dim)
        bond_diag = beta1 if outer else beta1 + beta2
        args[labels[site - 1]] = 2.0 * params.kappa - y[site - 1] - bond_diag
    weights = _onsite_weights(args, "two-band decomposition")
    for site in range(1, dim + 1):
        loss.append(JumpVector(f"onsite({labels[site - 1]})", "loss",
                               weights[labels[site - 1]] * _basis(dim, site)))
    gain = [JumpVector(f"pump({labels[s - 1]})", "gain", np.sqrt(y[s - 1]) * _basis(dim, s))
            for s in range(1, dim + 1) if y[s - 1] > 0]
    return JumpSet(dim, tuple(loss), tuple(gain))


@dataclass(frozen=True)
class JumpValidationReport:
    """Per-check maximum deviations of a jump set against its targets."""

    loss_gram_error: float
    gain_gram_error: float
    relaxation_error: float
    source_error: float
    tolerance: float
    passed: bool


def validate_jump_set(jumps: JumpSet, realization: MicroscopicRealization,
                      tolerance: float = 1e-12) -> JumpValidationReport:
    """Check that the jump Grams rebuild the realization and its targets.

    Raises ValidationError (with the report attached and the worst
    entry named) when any maximum deviation exceeds ``tolerance``.
    """
    if jumps.dim != realization.dim:
        raise ParameterError("jump set and realization dimensions differ")
    checks = {}
    worst = ("", 0, 0, -1.0)
    for name, got, want in (
        ("loss_gram", jumps.loss_gram(), realization.loss_gram),
        ("gain_gram", jumps.gain_gram(), realization.gain_gram),
        ("relaxation", 1j * realization.hamiltonian
         + 0.5 * (jumps.loss_gram() + jumps.gain_gram()), realization.target_relaxation),
        ("source", jumps.gain_gram(), realization.target_source),
    ):
        dev = np.abs(got - want)
        err = float(dev.max())
        checks[name] = err
        if err > worst[3]:
            i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
            worst = (name, int(i) + 1, int(j) + 1, err)
    report = JumpValidationReport(
        loss_gram_error=checks["loss_gram"],
        gain_gram_error=checks["gain_gram"],
        relaxation_error=checks["relaxation"],
        source_error=checks["source"],
        tolerance=float(tolerance),
        passed=max(checks.values()) <= tolerance,
    )
    if not report.passed:
        raise ValidationError(
            f"jump set deviates from target: {worst[0]} entry "
            f"({worst[1]}, {worst[2]}) off by {worst[3]:.3e} (tolerance {tolerance:g})",
            report)
    return report


def jump_set_payload(jumps: JumpSet) -> dict:
    """JSON payload listing every jump vector with its label and kind."""
    def vec(v: JumpVector) -> dict:
        return {
            "label": v.label,
            "kind": v.kind,
            "re": [float(a) for a in v.vector.real],
            "im": [float(a) for a in v.vector.imag],
        }

    return {
        "dim": jumps.dim,
        "loss": [vec(v) for v in jumps.loss_vectors],
        "gain": [vec(v) for v in jumps.gain_vectors],
    }


def realization_payload(realization: MicroscopicRealization, labels=None) -> dict:
    """JSON payload of the formal split (matrices plus physicality report)."""
    from .matio import matrix_payload

    labels = tuple(labels) if labels else default_labels(realization.dim)
    return {
        "dim": realization.dim,
        "hamiltonian": matrix_payload(realization.hamiltonian, labels),
        "gain_gram": matrix_payload(realization.gain_gram, labels),
        "loss_gram": matrix_payload(realization.loss_gram, labels),
        "loss_min_eigenvalue": realization.loss_min_eigenvalue,
        "physical": realization.physical,
    }
