"""Brute-force many-body master-equation oracle for tiny chains.

Everything here works in the full 2^N-dimensional Fock space with dense
matrices and Jordan-Wigner fermion operators.  It exists to validate
the one-body correlator reduction against the exact Lindblad dynamics,
so it is deliberately capped at four sites; use the correlator stack
for anything larger.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import JumpSet
from .errors import (ConvergenceError, ParameterError, ScaleError, StabilityError,
                     StepSizeError)

MAX_ORACLE_SITES = 4
# Default time budget certifies convergence only up to three sites.
MAX_DEFAULT_BUDGET_SITES = 3
CAR_TOL = 1e-14
TRACE_DRIFT_LIMIT = 1e-6
# Density-matrix entries are bounded by 1, so growth past this is divergence.
# The trace-free RHS keeps the trace exact under RK4 even when the step is
# unstable, so the drift check alone cannot catch a blow-up.
STATE_NORM_LIMIT = 1e3

_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# Lowering operator |0><1| in the (empty, occupied) = (index 0, index 1) basis.
_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_EYE2 = np.eye(2, dtype=complex)


class FockOperatorSet:
    """Dense Jordan-Wigner fermion operators for up to four sites.

    Site 1 is the leftmost tensor factor; the sign string of Z factors
    precedes each lowering operator.  Operator matrices depend on this
    ordering, but every number-conserving expectation value computed
    from them does not.
    """

    def __init__(self, n_sites: int):
        if n_sites < 1:
            raise ParameterError(f"n_sites must be >= 1, got {n_sites}")
        if n_sites > MAX_ORACLE_SITES:
            raise ScaleError(
                f"oracle supports at most {MAX_ORACLE_SITES} sites, got {n_sites}; "
                "use the correlator stack for larger systems")
        self.n_sites = int(n_sites)
        self.dim = 2 ** self.n_sites
        self._annihilation = tuple(self._jordan_wigner(j) for j in range(self.n_sites))
        self._pair_cache: dict[tuple[int, int], np.ndarray] = {}
        self._verify_car()

    def _jordan_wigner(self, position: int) -> np.ndarray:
        factors = [_PAULI_Z] * position + [_LOWER] + [_EYE2] * (self.n_sites - position - 1)
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        return op

    def _verify_car(self) -> None:
        eye = np.eye(self.dim)
        for i in range(self.n_sites):
            ci = self._annihilation[i]
            for j in range(i, self.n_sites):
                cj = self._annihilation[j]
                mixed = ci @ cj.conj().T + cj.conj().T @ ci
                want = eye if i == j else 0.0
                if np.abs(mixed - want).max() > CAR_TOL:
                    raise ParameterError(
                        f"anticommutator {{c_{i + 1}, c_{j + 1}^dag}} violates CAR")
                same = ci @ cj + cj @ ci
                if np.abs(same).max() > CAR_TOL:
                    raise ParameterError(
                        f"anticommutator {{c_{i + 1}, c_{j + 1}}} violates CAR")

    def annihilation(self, site: int) -> np.ndarray:
        """c_site, 1-based."""
        return self._annihilation[site - 1]

    def creation(self, site: int) -> np.ndarray:
        """c_site^dag, 1-based."""
        return self._annihilation[site - 1].conj().T

    def pair_product(self, i: int, j: int) -> np.ndarray:
        """c_i^dag c_j, 1-based, cached."""
        key = (i, j)
        if key not in self._pair_cache:
            self._pair_cache[key] = self.creation(i) @ self.annihilation(j)
        return self._pair_cache[key]

    def number(self, site: int) -> np.ndarray:
        return self.pair_product(site, site)

    def one_body_operator(self, coefficients) -> np.ndarray:
        """sum_ij M_ij c_i^dag c_j as a full Fock-space matrix."""
        m = np.asarray(coefficients, dtype=complex)
        if m.shape != (self.n_sites, self.n_sites):
            raise ParameterError(
                f"coefficient matrix must be {self.n_sites}x{self.n_sites}, got {m.shape}")
        op = np.zeros((self.dim, self.dim), dtype=complex)
        for i in range(1, self.n_sites + 1):
            for j in range(1, self.n_sites + 1):
                if m[i - 1, j - 1] != 0:
                    op += m[i - 1, j - 1] * self.pair_product(i, j)
        return op

    def loss_operator(self, vector) -> np.ndarray:
        """sum_j u_j c_j."""
        v = np.asarray(vector, dtype=complex).reshape(-1)
        if v.size != self.n_sites:
            raise ParameterError(f"jump vector length {v.size} != n_sites {self.n_sites}")
        op = np.zeros((self.dim, self.dim), dtype=complex)
        for j in range(self.n_sites):
            if v[j] != 0:
                op += v[j] * self._annihilation[j]
        return op

    def gain_operator(self, vector) -> np.ndarray:
        """sum_j v_j c_j^dag."""
        v = np.asarray(vector, dtype=complex).reshape(-1)
        if v.size != self.n_sites:
            raise ParameterError(f"jump vector length {v.size} != n_sites {self.n_sites}")
        op = np.zeros((self.dim, self.dim), dtype=complex)
        for j in range(self.n_sites):
            if v[j] != 0:
                op += v[j] * self._annihilation[j].conj().T
        return op


_OPERATOR_CACHE: dict[int, FockOperatorSet] = {}


def operator_set(n_sites: int) -> FockOperatorSet:
    """Shared per-size operator set (construction verifies the CAR)."""
    if n_sites not in _OPERATOR_CACHE:
        _OPERATOR_CACHE[n_sites] = FockOperatorSet(n_sites)
    return _OPERATOR_CACHE[n_sites]


@dataclass(frozen=True)
class DensityMatrix:
    """Validated many-body state: Hermitian, unit trace, nonnegative."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ParameterError(f"density matrix must be square, got {rho.shape}")
        n = rho.shape[0].bit_length() - 1
        if 2 ** n != rho.shape[0]:
            raise ParameterError(f"density matrix dimension {rho.shape[0]} is not 2^N")
        herm = float(np.abs(rho - rho.conj().T).max())
        if herm > 1e-12:
            raise ParameterError(f"density matrix not Hermitian: max deviation {herm:.3e}")
        rho = 0.5 * (rho + rho.conj().T)
        trace_err = abs(float(np.trace(rho).real) - 1.0)
        if trace_err > 1e-10:
            raise ParameterError(f"density matrix trace off by {trace_err:.3e}")
        wmin = float(np.linalg.eigvalsh(rho).min())
        if wmin < -1e-8:
            raise ParameterError(f"density matrix has eigenvalue {wmin:.3e} < -1e-8")
        rho = rho.copy()
        rho.flags.writeable = False
        object.__setattr__(self, "entries", rho)

    @property
    def n_sites(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    @classmethod
    def vacuum(cls, n_sites: int) -> "DensityMatrix":
        dim = 2 ** n_sites
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
        return cls(rho)

    @classmethod
    def from_pure(cls, amplitudes) -> "DensityMatrix":
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0 or not np.isfinite(norm):
            raise ParameterError("pure state amplitudes must be normalizable")
        v = v / norm
        return cls(np.outer(v, v.conj()))


@dataclass(frozen=True)
class MasterTrajectory:
    """Sampled master-equation solution with its trace-drift log."""

    times: np.ndarray
    states: tuple[DensityMatrix, ...]
    dt: float
    max_trace_drift: float

    def final(self) -> DensityMatrix:
        return self.states[-1]


def _liouvillian_parts(ops: FockOperatorSet, h, jumps: JumpSet):
    """Return (K, jump operators) with K = -iH - (1/2) sum L^dag L."""
    hmat = np.asarray(h, dtype=complex)
    if hmat.shape != (ops.n_sites, ops.n_sites):
        raise ParameterError(
            f"one-body Hamiltonian must be {ops.n_sites}x{ops.n_sites}, got {hmat.shape}")
    herm = float(np.abs(hmat - hmat.conj().T).max()) if hmat.size else 0.0
    if herm > 1e-12:
        raise ParameterError(f"Hamiltonian must be Hermitian: max deviation {herm:.3e}")
    if jumps.dim != ops.n_sites:
        raise ParameterError(f"jump set dim {jumps.dim} != n_sites {ops.n_sites}")
    big_h = ops.one_body_operator(hmat)
    ls = [ops.loss_operator(v.vector) for v in jumps.loss_vectors]
    ls += [ops.gain_operator(v.vector) for v in jumps.gain_vectors]
    k = -1j * big_h
    for op in ls:
        k -= 0.5 * (op.conj().T @ op)
    return k, ls


def _master_rhs(rho: np.ndarray, k: np.ndarray, ls) -> np.ndarray:
    out = k @ rho + rho @ k.conj().T
    for op in ls:
        out += op @ rho @ op.conj().T
    return out


def evolve_master(rho0: DensityMatrix, h, jumps: JumpSet, t_final: float,
                  dt: float, stride: int = 1) -> MasterTrajectory:
    """Integrate the full Lindblad equation with fixed-step RK4.

    ``h`` is the one-body Hamiltonian matrix (n_sites x n_sites); jump
    vectors are promoted to Fock-space operators internally.  Snapshots
    are stored every ``stride`` steps plus the final state.  Trace
    drift is logged, never corrected; drift beyond 1e-6 aborts.
    """
    if dt <= 0 or not np.isfinite(dt):
        raise ParameterError(f"dt must be positive, got {dt}")
    if t_final < 0 or not np.isfinite(t_final):
        raise ParameterError(f"t_final must be >= 0, got {t_final}")
    if stride < 1:
        raise ParameterError(f"stride must be >= 1, got {stride}")
    ops = operator_set(rho0.n_sites)
    k, ls = _liouvillian_parts(ops, h, jumps)

    n_steps = int(np.ceil(t_final / dt - 1e-12)) if t_final > 0 else 0
    rho = np.array(rho0.entries, dtype=complex)
    times = [0.0]
    states = [rho0]
    max_drift = abs(float(np.trace(rho).real) - 1.0)
    for step in range(1, n_steps + 1):
        h_step = min(dt, t_final - (step - 1) * dt)
        k1 = _master_rhs(rho, k, ls)
        k2 = _master_rhs(rho + 0.5 * h_step * k1, k, ls)
        k3 = _master_rhs(rho + 0.5 * h_step * k2, k, ls)
        k4 = _master_rhs(rho + h_step * k3, k, ls)
        rho = rho + (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        peak = float(np.abs(rho).max())
        if not np.isfinite(peak) or peak > STATE_NORM_LIMIT:
            raise StepSizeError(
                f"state entries reached {peak:.3e} at step {step}; "
                "the integration diverged, reduce dt")
        drift = abs(float(np.trace(rho).real) - 1.0)
        max_drift = max(max_drift, drift)
        if drift > TRACE_DRIFT_LIMIT:
            raise StepSizeError(
                f"trace drift {drift:.3e} exceeds {TRACE_DRIFT_LIMIT:g} at step {step}; "
                "reduce dt")
        if step % stride == 0 or step == n_steps:
            times.append(min(step * dt, t_final))
            try:
                states.append(DensityMatrix(rho))
            except ParameterError as exc:
                # truncation error past the validity band means the step is too big
                raise StepSizeError(f"state invalid at step {step}: {exc}") from exc
    return MasterTrajectory(
        times=np.asarray(times, dtype=float),
        states=tuple(states),
        dt=float(dt),
        max_trace_drift=float(max_drift),
    )


def correlator_of(rho: DensityMatrix) -> np.ndarray:
    """One-body correlator C_ij = Tr(rho c_j^dag c_i), symmetrized."""
    ops = operator_set(rho.n_sites)
    n = ops.n_sites
    c = np.empty((n, n), dtype=complex)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            c[i - 1, j - 1] = np.trace(rho.entries @ ops.pair_product(j, i))
    return 0.5 * (c + c.conj().T)


def steady_state_oracle(h, jumps: JumpSet, dt: float | None = None,
                        t_max: float | None = None) -> DensityMatrix:
    """Long-time limit of the master equation, from the vacuum.

    Integrates until the right-hand side max norm drops below 1e-12 or
    the time budget 50 / (slowest relaxation rate) runs out, whichever
    comes first.  The default budget is certified only up to three
    sites; larger systems must pass ``t_max`` explicitly.
    """
    jumps_dim = jumps.dim
    if jumps_dim > MAX_DEFAULT_BUDGET_SITES and t_max is None:
        raise ScaleError(
            f"default time budget covers at most {MAX_DEFAULT_BUDGET_SITES} sites; "
            f"pass t_max explicitly for {jumps_dim} sites")
    hmat = np.asarray(h, dtype=complex)
    x = 1j * hmat + 0.5 * (np.asarray(jumps.loss_gram()) + np.asarray(jumps.gain_gram()))
    betas = np.linalg.eigvals(x)
    min_rate = float(betas.real.min())
    if min_rate <= 0:
        raise StabilityError(
            f"relaxation spectrum has min real part {min_rate:.6g} <= 0; "
            "no steady state to converge to")
    if t_max is None:
        t_max = 50.0 / min_rate
    if dt is None:
        dt = min(0.01, 0.1 / float(np.abs(betas).max()))

    ops = operator_set(jumps_dim)
    k, ls = _liouvillian_parts(ops, hmat, jumps)
    rho = np.array(DensityMatrix.vacuum(jumps_dim).entries, dtype=complex)
    t = 0.0
    while t < t_max:
        k1 = _master_rhs(rho, k, ls)
        if float(np.abs(k1).max()) < 1e-12:
            return DensityMatrix(rho)
        step = min(dt, t_max - t)
        k2 = _master_rhs(rho + 0.5 * step * k1, k, ls)
        k3 = _master_rhs(rho + 0.5 * step * k2, k, ls)
        k4 = _master_rhs(rho + step * k3, k, ls)
        rho = rho + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        peak = float(np.abs(rho).max())
        if not np.isfinite(peak) or peak > STATE_NORM_LIMIT:
            raise StepSizeError(
                f"state entries reached {peak:.3e}; the integration diverged, reduce dt")
        drift = abs(float(np.trace(rho).real) - 1.0)
        if drift > TRACE_DRIFT_LIMIT:
            raise StepSizeError(
                f"trace drift {drift:.3e} exceeds {TRACE_DRIFT_LIMIT:g}; reduce dt")
        t += step
    if float(np.abs(_master_rhs(rho, k, ls)).max()) < 1e-12:
        return DensityMatrix(rho)
    raise ConvergenceError(
        f"master equation not stationary after t = {t_max:.6g}; "
        "residual still above 1e-12")
