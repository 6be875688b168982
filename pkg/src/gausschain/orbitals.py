"""Natural-orbital diagnostics: locking, loading, and scan drivers.

The natural orbitals of a steady correlator C are its eigenvectors; the
eigenvalues are the orbital occupations.  In strongly nonreciprocal
chains the top orbital locks onto the slowest relaxation mode whenever
that mode dominates the pump loading

    A_n(s) = strength |L_n(s)|^2 / (2 Re beta_n),

and the diagnostics here quantify that locking: overlaps of the top
orbital with candidate modes, normalized occupation spectra, normalized
density profiles, and the two production scans (pump-position scan for
the single-band chain, nonreciprocity scan for the two-band chain).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import (GausschainError, NormalizationError, ParameterError,
                     SiteIndexError, StabilityError)
from .models import (HatanoNelsonParams, SshParams, build_hatano_nelson,
                     build_local_pump, build_ssh, matrix_entries, ssh_index)
from .spectral import (BiorthogonalSpectrum, ModeVector, biorthogonal_decompose,
                       hn_analytic_spectrum, slow_mode_position)
from .steady import solve_lyapunov_direct, solve_lyapunov_spectral

# Default edge-candidate search: eigenvalues within this fraction of the
# spectral diameter around kappa, ranked by weight on this many boundary
# sites (one unit cell of the two-band chain).
EDGE_WINDOW_FRACTION = 0.1
EDGE_BOUNDARY_SITES = 2

UNIT_NORM_TOL = 1e-8

# Occupations closer than this to the top one make the dominant orbital
# ambiguous; diagnostics then flag the state as unlocked.
DOMINANT_TIE_TOL = 1e-10


@dataclass(frozen=True)
class NaturalOrbitalSet:
    """Occupations (descending) with orthonormal orbital columns."""

    occupations: np.ndarray
    orbitals: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.occupations, dtype=float).reshape(-1)
        v = np.asarray(self.orbitals, dtype=complex)
        if v.shape != (w.size, w.size):
            raise ParameterError("orbital matrix shape does not match occupations")
        w.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "occupations", w)
        object.__setattr__(self, "orbitals", v)

    @property
    def dim(self) -> int:
        return self.occupations.size

    def orbital(self, alpha: int) -> ModeVector:
        """alpha-th most occupied orbital, 1-based."""
        if int(alpha) != alpha or not 1 <= alpha <= self.dim:
            raise SiteIndexError(f"orbital index {alpha} outside 1..{self.dim}")
        return ModeVector(self.orbitals[:, int(alpha) - 1], "euclidean")

    def top_orbital(self) -> ModeVector:
        return self.orbital(1)

    def occupations_normalized(self) -> np.ndarray:
        top = self.occupations[0]
        if top == 0:
            raise NormalizationError("all orbital occupations vanish")
        return self.occupations / top

    def dominant_indices(self, tie_tol: float = DOMINANT_TIE_TOL) -> tuple[int, ...]:
        """1-based indices tied with the top occupation within tie_tol.

        More than one index means the dominant orbital is ambiguous and
        the state should be flagged as unlocked, not resolved by fiat.
        """
        top = self.occupations[0]
        return tuple(int(a) + 1 for a in np.flatnonzero(top - self.occupations <= tie_tol))

    def reconstruct(self) -> np.ndarray:
        return (self.orbitals * self.occupations[None, :]) @ self.orbitals.conj().T


def natural_orbitals(correlator) -> NaturalOrbitalSet:
    """Eigendecomposition of a Hermitian correlator, most occupied first.

    Each orbital is phase-gauged (largest-|entry| real positive) so
    exported profiles are reproducible.
    """
    c = matrix_entries(correlator)
    scale = max(1.0, float(np.abs(c).max()))
    if np.abs(c - c.conj().T).max() > 1e-10 * scale:
        raise ParameterError("correlator is not Hermitian; refusing to diagonalize")
    w, v = np.linalg.eigh(0.5 * (c + c.conj().T))
    w, v = w[::-1].copy(), v[:, ::-1].copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        pivot = col[int(np.argmax(np.abs(col)))]
        if abs(pivot) > 0:
            v[:, k] = col * (pivot.conjugate() / abs(pivot))
    return NaturalOrbitalSet(w, v)


def density(correlator) -> np.ndarray:
    """Site-resolved density, the real diagonal of the correlator."""
    return np.real(np.diag(matrix_entries(correlator))).copy()


def normalized_density(correlator) -> np.ndarray:
    """Density scaled to unit total, n_j / sum_l n_l."""
    n = density(correlator)
    total = float(n.sum())
    if total == 0.0:
        raise NormalizationError("total density vanishes; cannot normalize")
    return n / total


@dataclass(frozen=True)
class LoadingFactors:
    """Per-mode pump loadings A_n(s) and their unit-peak normalization."""

    values: np.ndarray
    normalized: np.ndarray


def loading_factors(spectrum: BiorthogonalSpectrum, pump_site: int,
                    pump_strength: float) -> LoadingFactors:
    """A_n(s) = strength |L_n(s)|^2 / (2 Re beta_n) for every mode."""
    if pump_strength <= 0 or not np.isfinite(pump_strength):
        raise ParameterError(f"pump strength must be positive, got {pump_strength}")
    if int(pump_site) != pump_site or not 1 <= pump_site <= spectrum.dim:
        raise SiteIndexError(f"pump site {pump_site} outside 1..{spectrum.dim}")
    rates = spectrum.betas.real
    if rates.min() <= 0:
        raise StabilityError(
            f"loading factors need a strictly stable spectrum: min Re beta = {rates.min():.3e}")
    amps = spectrum.left[int(pump_site) - 1, :]
    values = pump_strength * np.abs(amps) ** 2 / (2.0 * rates)
    peak = values.max()
    normalized = values / peak if peak > 0 else values.copy()
    return LoadingFactors(values, normalized)


def overlap(first, second) -> float:
    """Squared overlap |<u|v>|^2 of two unit-normalized vectors."""
    out = []
    for v in (first, second):
        a = np.asarray(getattr(v, "amplitudes", v), dtype=complex).reshape(-1)
        nrm = float(np.linalg.norm(a))
        if abs(nrm - 1.0) > UNIT_NORM_TOL:
            raise NormalizationError(
                f"overlap requires unit-normalized inputs (got norm {nrm:.6e})")
        out.append(a)
    if out[0].size != out[1].size:
        raise ParameterError("overlap inputs have different dimensions")
    return float(abs(np.vdot(out[0], out[1])) ** 2)


def identify_slow_mode(spectrum: BiorthogonalSpectrum) -> int:
    """1-based index of the slowest mode (min Re beta; ties: min Im, lowest index)."""
    return slow_mode_position(spectrum.betas) + 1


@dataclass(frozen=True)
class EdgeCandidate:
    """Outcome of the edge-mode search.

    ``in_window_count`` is how many eigenvalues fell inside the search
    window around kappa; when zero, the globally closest eigenvalue was
    used instead (``used_fallback``).
    """

    index: int
    in_window_count: int
    used_fallback: bool


def identify_edge_candidate(spectrum: BiorthogonalSpectrum, kappa: float,
                            window_fraction: float = EDGE_WINDOW_FRACTION,
                            boundary_sites: int = EDGE_BOUNDARY_SITES) -> EdgeCandidate:
    """Mode closest to the free-damping point kappa with boundary-peaked weight.

    Scans eigenvalues within ``window_fraction`` of the spectral
    diameter around kappa and returns the one whose unit-normalized
    right mode has the largest weight on the first or last
    ``boundary_sites`` sites.  Always returns a candidate; an empty
    window falls back to the globally closest eigenvalue.
    """
    if spectrum.dim == 1:
        return EdgeCandidate(1, 1, False)
    dist = np.abs(spectrum.betas - kappa)
    diameter = float(np.abs(spectrum.betas[:, None] - spectrum.betas[None, :]).max())
    window = np.flatnonzero(dist <= window_fraction * diameter)
    fallback = window.size == 0
    pool = window if not fallback else np.array([int(np.argmin(dist))])
    m = min(int(boundary_sites), spectrum.dim)
    best, best_weight = None, -1.0
    for k in pool:
        profile = np.abs(np.asarray(spectrum.right_mode_unit(int(k) + 1).amplitudes)) ** 2
        weight = max(float(profile[:m].sum()), float(profile[-m:].sum()))
        if weight > best_weight:
            best, best_weight = int(k), weight
    return EdgeCandidate(best + 1, int(window.size), fallback)


@dataclass(frozen=True)
class DiagnosticsReport:
    """Bundle of locking diagnostics for one steady state.

    ``dominant_indices`` lists every orbital tied with the top
    occupation; ``locked`` is False when that tie is ambiguous.
    """

    density: np.ndarray
    density_normalized: np.ndarray
    occupations_normalized: np.ndarray
    overlaps: dict
    loadings: LoadingFactors
    dominant_indices: tuple[int, ...]
    locked: bool


def diagnostics_report(spectrum: BiorthogonalSpectrum, correlator, pump_site: int,
                       pump_strength: float, kappa: float | None = None) -> DiagnosticsReport:
    """Standard diagnostics: densities, occupation spectrum, mode overlaps.

    ``overlaps`` always carries "slow" (top orbital vs slowest mode);
    when ``kappa`` is given it also carries "edge" for the edge
    candidate around kappa.
    """
    orbitals = natural_orbitals(correlator)
    top = orbitals.top_orbital()
    slow = identify_slow_mode(spectrum)
    overlaps = {"slow": overlap(spectrum.right_mode_unit(slow), top)}
    if kappa is not None:
        edge = identify_edge_candidate(spectrum, kappa)
        overlaps["edge"] = overlap(spectrum.right_mode_unit(edge.index), top)
    dominant = orbitals.dominant_indices()
    return DiagnosticsReport(
        density=density(correlator),
        density_normalized=normalized_density(correlator),
        occupations_normalized=orbitals.occupations_normalized(),
        overlaps=overlaps,
        loadings=loading_factors(spectrum, pump_site, pump_strength),
        dominant_indices=dominant,
        locked=len(dominant) == 1,
    )


def _map_ordered(fn, items, threads: int):
    """Apply fn preserving item order, optionally on a thread pool."""
    if threads is None or threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class SourceScan:
    """Pump-position scan of the single-band chain.

    Columns: pump site, exact top occupation, slow-mode loading A_1(s),
    and both normalized to unit peak over the scan.
    """

    sites: np.ndarray
    nu_max: np.ndarray
    loading: np.ndarray
    nu_max_normalized: np.ndarray
    loading_normalized: np.ndarray

    def rows(self):
        for k in range(self.sites.size):
            yield (int(self.sites[k]), float(self.nu_max[k]), float(self.loading[k]),
                   float(self.nu_max_normalized[k]), float(self.loading_normalized[k]))


SOURCE_SCAN_HEADER = ("s", "nu_max", "A1", "nu_max_norm", "A1_norm")


def _check_solver(solver: str) -> None:
    if solver not in ("direct", "spectral"):
        raise ParameterError(f"solver must be 'direct' or 'spectral', got {solver!r}")


def hn_source_scan(params: HatanoNelsonParams, pump_strength: float,
                   sites=None, route: str = "auto", threads: int = 1,
                   solver: str = "direct") -> SourceScan:
    """Exact nu_max(s) against the closed-form slow-mode loading A_1(s).

    One dense Lyapunov solve per pump position; the loading column comes
    from the closed-form spectrum, so the two normalized columns agree
    exactly where the slow mode locks the top orbital.
    """
    _check_solver(solver)
    x = build_hatano_nelson(params)
    spectrum = hn_analytic_spectrum(params)
    slow = identify_slow_mode(spectrum) - 1
    if sites is None:
        sites = np.arange(1, params.n_sites + 1)
    sites = np.asarray([int(s) for s in sites])
    if sites.size == 0:
        raise ParameterError("source scan needs at least one pump site")
    for s in sites:
        if not 1 <= s <= params.n_sites:
            raise SiteIndexError(f"pump site {s} outside 1..{params.n_sites}")
    numeric = biorthogonal_decompose(x) if solver == "spectral" else None

    def job(site):
        pump = build_local_pump(params.n_sites, int(site), pump_strength)
        try:
            if solver == "spectral":
                corr = solve_lyapunov_spectral(numeric, pump)
            else:
                corr = solve_lyapunov_direct(x, pump, route=route)
        except GausschainError as exc:
            # abort the whole scan, but name the position that failed
            raise type(exc)(f"pump site {site}: {exc}") from exc
        nu = float(np.linalg.eigvalsh(np.asarray(corr.entries)).max())
        a1 = float(loading_factors(spectrum, int(site), pump_strength).values[slow])
        return nu, a1

    results = _map_ordered(job, list(sites), threads)
    nu = np.asarray([r[0] for r in results])
    a1 = np.asarray([r[1] for r in results])
    return SourceScan(sites, nu, a1, nu / nu.max(), a1 / a1.max())


@dataclass(frozen=True)
class CrossoverScan:
    """Nonreciprocity scan of the two-band chain.

    For each g, the squared overlap of the top orbital with the edge
    candidate and with the slowest mode, plus the 1-based indices of
    both modes.  Points whose solve failed are recorded in ``failures``
    as (g, message) and skipped in the table.
    """

    g_values: np.ndarray
    o_edge: np.ndarray
    o_slow: np.ndarray
    edge_index: np.ndarray
    slow_index: np.ndarray
    failures: tuple[tuple[float, str], ...]

    def rows(self):
        for k in range(self.g_values.size):
            yield (float(self.g_values[k]), float(self.o_edge[k]), float(self.o_slow[k]),
                   int(self.edge_index[k]), int(self.slow_index[k]))


CROSSOVER_HEADER = ("g", "O_edge", "O_slow", "edge_mode_index", "slow_mode_index")

CROSSOVER_G_RANGE = (-0.55, 0.60)
CROSSOVER_G_POINTS = 24


def default_crossover_grid() -> np.ndarray:
    return np.linspace(CROSSOVER_G_RANGE[0], CROSSOVER_G_RANGE[1], CROSSOVER_G_POINTS)


def ssh_crossover_scan(params: SshParams, pump_cell: int = 1, pump_sublattice: str = "A",
                       pump_strength: float = 1e-8, g_values=None, route: str = "auto",
                       threads: int = 1,
                       window_fraction: float = EDGE_WINDOW_FRACTION,
                       boundary_sites: int = EDGE_BOUNDARY_SITES,
                       solver: str = "direct") -> CrossoverScan:
    """Edge-versus-bulk locking competition along a nonreciprocity scan.

    ``params.g`` is ignored; each scan point replaces it with a grid
    value.  Per-point failures do not abort the scan.
    """
    _check_solver(solver)
    if g_values is None:
        g_values = default_crossover_grid()
    g_values = np.asarray([float(g) for g in g_values])
    if g_values.size == 0:
        raise ParameterError("crossover scan needs at least one g value")
    site = ssh_index(pump_cell, pump_sublattice, params.n_cells)

    def job(g):
        p = replace(params, g=float(g))
        x = build_ssh(p)
        spectrum = biorthogonal_decompose(x)
        pump = build_local_pump(p.n_sites, site, pump_strength)
        if solver == "spectral":
            corr = solve_lyapunov_spectral(spectrum, pump)
        else:
            corr = solve_lyapunov_direct(x, pump, route=route)
        top = natural_orbitals(corr).top_orbital()
        slow = identify_slow_mode(spectrum)
        edge = identify_edge_candidate(spectrum, p.kappa, window_fraction, boundary_sites)
        return (float(g),
                overlap(spectrum.right_mode_unit(edge.index), top),
                overlap(spectrum.right_mode_unit(slow), top),
                edge.index, slow)

    def safe_job(g):
        try:
            return job(g), None
        except GausschainError as exc:
            return None, (float(g), f"{type(exc).__name__}: {exc}")

    results = _map_ordered(safe_job, list(g_values), threads)
    rows = [r for r, _ in results if r is not None]
    failures = tuple(f for _, f in results if f is not None)
    if not rows:
        raise ParameterError("every crossover scan point failed; first: "
                             + failures[0][1])
    return CrossoverScan(
        g_values=np.asarray([r[0] for r in rows]),
        o_edge=np.asarray([r[1] for r in rows]),
        o_slow=np.asarray([r[2] for r in rows]),
        edge_index=np.asarray([r[3] for r in rows], dtype=int),
        slow_index=np.asarray([r[4] for r in rows], dtype=int),
        failures=failures,
    )


PROFILE_HEADER = ("j", "label", "R_slow_sq", "phi_max_sq", "density_norm")


def profile_rows(labels, slow_mode_unit: ModeVector, top_orbital_unit: ModeVector,
                 density_norm: np.ndarray):
    """Rows of the standard profile table (1-based site, label, three profiles)."""
    r2 = np.abs(np.asarray(slow_mode_unit.amplitudes)) ** 2
    p2 = np.abs(np.asarray(top_orbital_unit.amplitudes)) ** 2
    for j in range(len(labels)):
        yield (j + 1, labels[j], float(r2[j]), float(p2[j]), float(density_norm[j]))
