"""Batch command-line surface exposing every pipeline stage as data files.

Each subcommand reads its parameters from built-in defaults, an optional
JSON config file, and command-line flags, in that order (flags win).
Outputs are a CSV table plus a JSON summary per command; both embed the
toolkit version and the fully resolved config, and identical configs
produce byte-identical files.

Exit codes: 0 success, 1 validation failure, 2 numeric or parameter
error, 3 infeasibility.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .design import (hn_jump_decomposition, inverse_design, jump_set_payload,
                     realization_payload, ssh_jump_decomposition, validate_jump_set)
from .errors import (GausschainError, InfeasibilityError, ParameterError,
                     ValidationError)
from .manybody import DensityMatrix, correlator_of, evolve_master, steady_state_oracle
from .matio import (dumps_json, ensure_dir, read_json, read_matrix, write_csv,
                    write_json)
from .models import (HatanoNelsonParams, SourceMatrix, SshParams, build_diagonal_pump,
                     build_hatano_nelson, build_local_pump, build_ssh, default_labels,
                     matrix_entries, ssh_index, ssh_labels)
from .orbitals import (CROSSOVER_HEADER, PROFILE_HEADER, SOURCE_SCAN_HEADER,
                       hn_source_scan, identify_edge_candidate, identify_slow_mode,
                       natural_orbitals, normalized_density, overlap, profile_rows,
                       ssh_crossover_scan)
from .spectral import (ModeVector, biorthogonal_decompose, hn_normalized_modes,
                       slow_mode_position)
from .steady import (closed_form_correlator, solve_lyapunov_direct,
                     solve_lyapunov_spectral)

OCCUPATION_HEADER = ("alpha", "nu", "nu_norm")

# Thresholds applied by the validate and oracle-check commands.
VALIDATE_RESIDUAL_LIMIT = 1e-8
VALIDATE_ASYMMETRY_LIMIT = 1e-10
VALIDATE_OCCUPATION_SLACK = 1e-10
VALIDATE_DENSITY_LIMIT = 1e-12
VALIDATE_TRACE_LIMIT = 1e-10
ORACLE_TRAJECTORY_LIMIT = 1e-7
ORACLE_STEADY_LIMIT = 1e-8

COMMON_DEFAULTS = {"out": ".", "threads": 1, "solver": "direct", "seed": 0}

COMMAND_DEFAULTS = {
    "hn-profiles": {
        "n_sites": 40, "t_right": 1.0, "t_left": 0.17, "kappa": 0.91,
        "pump_site": 15, "pump_strength": 0.03,
    },
    "hn-source-scan": {
        "n_sites": 40, "t_right": 1.0, "t_left": 0.17, "kappa": 0.91,
        "pump_strength": 0.03, "s_min": 1, "s_max": 0,
    },
    "hn-occupations": {
        "n_sites": 40, "t_right": 1.0, "t_left": 0.17, "kappa": 0.91,
        "pump_site": 15, "pump_strength": 0.03,
    },
    "ssh-profiles": {
        "n_cells": 20, "t1": 0.5, "t2": 1.0, "g": -0.25, "kappa": 1.5,
        "pump_cell": 1, "pump_sublattice": "A", "pump_strength": 1e-8,
    },
    "ssh-crossover": {
        "n_cells": 20, "t1": 0.5, "t2": 1.0, "kappa": 1.5,
        "pump_cell": 1, "pump_sublattice": "A", "pump_strength": 1e-8,
        "g_min": -0.55, "g_max": 0.60, "g_points": 24,
    },
    "inverse-design": {
        "model": "hn", "n_sites": 3, "t_right": 1.0, "t_left": 0.17,
        "n_cells": 3, "t1": 0.5, "t2": 1.0, "g": 0.0, "kappa": 1.5,
        "gamma": 0.1, "pump_file": "", "x_file": "", "y_file": "",
    },
    "validate": {"x_file": "", "y_file": ""},
    "oracle-check": {
        "n_sites": 3, "t_right": 1.0, "t_left": 0.17, "kappa": 1.5,
        "gamma": 0.1, "t_final": 10.0, "dt": 0.002, "stride": 50,
    },
}

COMMAND_HELP = {
    "hn-profiles": "slow-mode, top-orbital, and density profiles of the single-band chain",
    "hn-source-scan": "top occupation vs analytic loading for every pump position",
    "hn-occupations": "natural-orbital occupation spectrum of the single-band steady state",
    "ssh-profiles": "profiles and edge/slow overlaps of the two-band chain at one g",
    "ssh-crossover": "edge vs slow locking overlap along a nonreciprocity scan",
    "inverse-design": "split a target (X, Y) into Hamiltonian, Grams, and local jumps",
    "validate": "run the invariant suite on a matrix-JSON (X, Y) pair",
    "oracle-check": "compare the correlator stack against the many-body master equation",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gausschain",
        description="Steady states, natural orbitals, and inverse design for "
                    "quadratic open fermion chains.")
    parser.add_argument("--version", action="version",
                        version=f"gausschain {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, defaults in COMMAND_DEFAULTS.items():
        p = sub.add_parser(command, help=COMMAND_HELP[command],
                           description=COMMAND_HELP[command])
        p.add_argument("--config", default=None, metavar="PATH",
                       help="JSON file of parameter overrides (flags win)")
        p.add_argument("--out", default=None, metavar="DIR",
                       help="output directory (default current directory)")
        p.add_argument("--threads", type=int, default=None, metavar="N",
                       help="worker threads for scan commands (default 1)")
        p.add_argument("--solver", choices=("direct", "spectral"), default=None,
                       help="steady-state solver (default direct)")
        p.add_argument("--seed", type=int, default=None, metavar="N",
                       help="random seed; reserved, echoed into outputs")
        for key, value in defaults.items():
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, type=type(value), default=None,
                           metavar=key.upper(),
                           help=f"override {key} (default {value!r})")
    return parser


def _coerce(key: str, value, target: type):
    if target is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if target is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if target is int and isinstance(value, float) and value == int(value):
        return int(value)
    if target is str and isinstance(value, str):
        return value
    raise ParameterError(f"config key {key!r} must be of type {target.__name__}")


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and flags into one echoable dict."""
    command = args.command
    specific = dict(COMMAND_DEFAULTS[command])
    common = dict(COMMON_DEFAULTS)
    if args.config:
        overrides = read_json(args.config)
        if not isinstance(overrides, dict):
            raise ParameterError(f"config file {args.config} must hold a JSON object")
        for key, value in overrides.items():
            if key in specific:
                specific[key] = _coerce(key, value, type(COMMAND_DEFAULTS[command][key]))
            elif key in common:
                common[key] = _coerce(key, value, type(COMMON_DEFAULTS[key]))
            else:
                raise ParameterError(f"unknown config key {key!r} for command {command}")
    for key in specific:
        value = getattr(args, key, None)
        if value is not None:
            specific[key] = value
    for key in common:
        value = getattr(args, key, None)
        if value is not None:
            common[key] = value
    return {"command": command, **common, **specific}


def _comments(cfg: dict) -> tuple[str, str]:
    return (f"gausschain {__version__}", f"config: {dumps_json(cfg)}")


def _summary(cfg: dict, **fields) -> dict:
    return {"version": __version__, "command": cfg["command"], "config": cfg, **fields}


def _out_paths(cfg: dict) -> tuple[str, str]:
    outdir = ensure_dir(cfg["out"])
    base = os.path.join(outdir, cfg["command"])
    return base + ".csv", base + ".json"


def _hn_params(cfg: dict) -> HatanoNelsonParams:
    return HatanoNelsonParams(cfg["n_sites"], cfg["t_right"], cfg["t_left"], cfg["kappa"])


def _ssh_params(cfg: dict, g: float | None = None) -> SshParams:
    return SshParams(cfg["n_cells"], cfg["t1"], cfg["t2"],
                     cfg["g"] if g is None else g, cfg["kappa"])


def _solve_steady(x, pump, solver: str, spectrum=None):
    """Dispatch on the --solver choice; returns (correlator, spectrum or None)."""
    if solver == "spectral":
        if spectrum is None:
            spectrum = biorthogonal_decompose(matrix_entries(x))
        return solve_lyapunov_spectral(spectrum, pump), spectrum
    return solve_lyapunov_direct(x, pump), spectrum


def _hn_condition(params: HatanoNelsonParams) -> float:
    try:
        return math.exp((params.n_sites - 1) * abs(math.log(params.asymmetry_ratio())))
    except OverflowError:
        return math.inf


def _betas_payload(betas: np.ndarray) -> dict:
    betas = np.asarray(betas, dtype=complex)
    return {"re": [float(b) for b in betas.real],
            "im": [float(b) for b in betas.imag]}


def cmd_hn_profiles(cfg: dict) -> None:
    params = _hn_params(cfg)
    x = build_hatano_nelson(params)
    pump = build_local_pump(params.n_sites, cfg["pump_site"], cfg["pump_strength"])
    corr, _ = _solve_steady(x, pump, cfg["solver"])
    betas, right_unit, _ = hn_normalized_modes(params)
    slow = slow_mode_position(betas.astype(complex))
    slow_vec = ModeVector(right_unit[:, slow], "euclidean")
    orbs = natural_orbitals(corr)
    top = orbs.top_orbital()
    dens = normalized_density(corr)
    labels = default_labels(params.n_sites)

    csv_path, json_path = _out_paths(cfg)
    write_csv(csv_path, PROFILE_HEADER, profile_rows(labels, slow_vec, top, dens),
              comments=_comments(cfg))
    o_slow = overlap(slow_vec, top)
    dominant = orbs.dominant_indices()
    write_json(json_path, _summary(
        cfg,
        betas=_betas_payload(betas),
        occupations=[float(v) for v in orbs.occupations],
        occupations_normalized=[float(v) for v in orbs.occupations_normalized()],
        overlap_slow=o_slow,
        dominant_indices=list(dominant),
        locked=len(dominant) == 1,
        density_argmax=int(np.argmax(dens)) + 1,
        condition_estimate=_hn_condition(params),
        residual=corr.residual,
        method=corr.method,
    ))
    print(f"hn-profiles: {params.n_sites} sites, overlap_slow={o_slow:.9f}, "
          f"wrote {csv_path} and {json_path}")


def cmd_hn_occupations(cfg: dict) -> None:
    params = _hn_params(cfg)
    x = build_hatano_nelson(params)
    pump = build_local_pump(params.n_sites, cfg["pump_site"], cfg["pump_strength"])
    corr, _ = _solve_steady(x, pump, cfg["solver"])
    orbs = natural_orbitals(corr)
    normalized = orbs.occupations_normalized()

    csv_path, json_path = _out_paths(cfg)
    rows = [(a + 1, float(orbs.occupations[a]), float(normalized[a]))
            for a in range(orbs.dim)]
    write_csv(csv_path, OCCUPATION_HEADER, rows, comments=_comments(cfg))
    dominant = orbs.dominant_indices()
    separation = float(normalized[1]) if orbs.dim > 1 else None
    write_json(json_path, _summary(
        cfg,
        nu_max=float(orbs.occupations[0]),
        occupations=[float(v) for v in orbs.occupations],
        occupations_normalized=[float(v) for v in normalized],
        separation_second=separation,
        trace=float(orbs.occupations.sum()),
        dominant_indices=list(dominant),
        locked=len(dominant) == 1,
        residual=corr.residual,
        method=corr.method,
    ))
    print(f"hn-occupations: nu_max={orbs.occupations[0]:.9g}, "
          f"second/top={separation if separation is not None else 'n/a'}, "
          f"wrote {csv_path} and {json_path}")


def cmd_hn_source_scan(cfg: dict) -> None:
    params = _hn_params(cfg)
    s_max = cfg["s_max"] if cfg["s_max"] > 0 else params.n_sites
    sites = range(cfg["s_min"], s_max + 1)
    scan = hn_source_scan(params, cfg["pump_strength"], sites=sites,
                          threads=cfg["threads"], solver=cfg["solver"])
    csv_path, json_path = _out_paths(cfg)
    write_csv(csv_path, SOURCE_SCAN_HEADER, scan.rows(), comments=_comments(cfg))
    deviation = np.abs(scan.nu_max_normalized - scan.loading_normalized)
    write_json(json_path, _summary(
        cfg,
        n_points=int(scan.sites.size),
        max_abs_deviation=float(deviation.max()),
        deviation_argmax_site=int(scan.sites[int(np.argmax(deviation))]),
        occupation_argmax_site=int(scan.sites[int(np.argmax(scan.nu_max_normalized))]),
        loading_argmax_site=int(scan.sites[int(np.argmax(scan.loading_normalized))]),
    ))
    print(f"hn-source-scan: {scan.sites.size} sites, "
          f"max |nu_norm - A1_norm| = {deviation.max():.6g}, "
          f"wrote {csv_path} and {json_path}")


def cmd_ssh_profiles(cfg: dict) -> None:
    params = _ssh_params(cfg)
    x = build_ssh(params)
    site = ssh_index(cfg["pump_cell"], cfg["pump_sublattice"], params.n_cells)
    pump = build_local_pump(params.n_sites, site, cfg["pump_strength"])
    spectrum = biorthogonal_decompose(matrix_entries(x))
    corr, _ = _solve_steady(x, pump, cfg["solver"], spectrum)
    orbs = natural_orbitals(corr)
    top = orbs.top_orbital()
    dens = normalized_density(corr)
    slow = identify_slow_mode(spectrum)
    edge = identify_edge_candidate(spectrum, params.kappa)
    slow_vec = spectrum.right_mode_unit(slow)

    csv_path, json_path = _out_paths(cfg)
    write_csv(csv_path, PROFILE_HEADER,
              profile_rows(ssh_labels(params.n_cells), slow_vec, top, dens),
              comments=_comments(cfg))
    o_slow = overlap(slow_vec, top)
    o_edge = overlap(spectrum.right_mode_unit(edge.index), top)
    dominant = orbs.dominant_indices()
    write_json(json_path, _summary(
        cfg,
        betas=_betas_payload(spectrum.betas),
        overlap_edge=o_edge,
        overlap_slow=o_slow,
        edge_mode_index=edge.index,
        slow_mode_index=slow,
        edge_in_window_count=edge.in_window_count,
        edge_used_fallback=edge.used_fallback,
        dominant_indices=list(dominant),
        locked=len(dominant) == 1,
        condition_estimate=float(spectrum.condition_estimate),
        residual=corr.residual,
        method=corr.method,
    ))
    print(f"ssh-profiles: g={params.g:g}, O_edge={o_edge:.6f}, O_slow={o_slow:.6f}, "
          f"wrote {csv_path} and {json_path}")


def cmd_ssh_crossover(cfg: dict) -> None:
    if cfg["g_points"] < 1:
        raise ParameterError(f"g_points must be >= 1, got {cfg['g_points']}")
    params = _ssh_params(cfg, g=0.0)
    grid = np.linspace(cfg["g_min"], cfg["g_max"], cfg["g_points"])
    scan = ssh_crossover_scan(params, cfg["pump_cell"], cfg["pump_sublattice"],
                              cfg["pump_strength"], g_values=grid,
                              threads=cfg["threads"], solver=cfg["solver"])
    csv_path, json_path = _out_paths(cfg)
    write_csv(csv_path, CROSSOVER_HEADER, scan.rows(), comments=_comments(cfg))
    margin = scan.o_edge - scan.o_slow
    crossings = [[float(scan.g_values[k]), float(scan.g_values[k + 1])]
                 for k in range(margin.size - 1)
                 if margin[k] != 0 and margin[k] * margin[k + 1] < 0]
    write_json(json_path, _summary(
        cfg,
        n_points=int(scan.g_values.size),
        crossings=crossings,
        failures=[[g, message] for g, message in scan.failures],
    ))
    print(f"ssh-crossover: {scan.g_values.size} points, "
          f"{len(crossings)} sign change(s) of O_edge - O_slow, "
          f"wrote {csv_path} and {json_path}")


def _uniform_pump(dim: int, gamma: float) -> SourceMatrix:
    return build_diagonal_pump([gamma] * dim)


def _design_inputs(cfg: dict):
    """Target (X, labels, Y, gamma value, decomposition callable) per model."""
    model = cfg["model"]
    if model == "hn":
        params = _hn_params(cfg)
        x = build_hatano_nelson(params)
        dim = params.n_sites
        decompose = lambda gamma: hn_jump_decomposition(params, gamma)
    elif model == "ssh":
        params = _ssh_params(cfg)
        x = build_ssh(params)
        dim = params.n_sites
        decompose = lambda gamma: ssh_jump_decomposition(params, gamma)
    elif model == "custom-file":
        if not cfg["x_file"] or not cfg["y_file"]:
            raise ParameterError("model custom-file requires x_file and y_file")
        entries, labels = read_matrix(cfg["x_file"])
        y_entries, _ = read_matrix(cfg["y_file"])
        return entries, labels, SourceMatrix(y_entries, labels=labels), None
    else:
        raise ParameterError(f"model must be hn, ssh, or custom-file, got {model!r}")
    if cfg["pump_file"]:
        profile = read_json(cfg["pump_file"])
        if not isinstance(profile, list) or len(profile) != dim:
            raise ParameterError(
                f"pump_file must hold a JSON list of {dim} site strengths")
        gamma = np.asarray([float(v) for v in profile])
        y = build_diagonal_pump(gamma)
    else:
        gamma = float(cfg["gamma"])
        y = _uniform_pump(dim, gamma)
    return matrix_entries(x), x.labels, y, (gamma, decompose)


def cmd_inverse_design(cfg: dict) -> None:
    x_entries, labels, y, jump_spec = _design_inputs(cfg)
    realization = inverse_design(x_entries, y)
    jumps = None
    validation = None
    if jump_spec is not None:
        gamma, decompose = jump_spec
        jumps = decompose(gamma)
        report = validate_jump_set(jumps, realization)
        validation = {
            "loss_gram_error": report.loss_gram_error,
            "gain_gram_error": report.gain_gram_error,
            "relaxation_error": report.relaxation_error,
            "source_error": report.source_error,
            "tolerance": report.tolerance,
            "passed": report.passed,
        }
    _, json_path = _out_paths(cfg)
    write_json(json_path, _summary(
        cfg,
        realization=realization_payload(realization, labels),
        jumps=jump_set_payload(jumps) if jumps is not None else None,
        validation=validation,
    ))
    print(f"inverse-design: physical={realization.physical}, "
          f"loss_min_eigenvalue={realization.loss_min_eigenvalue:.6g}, "
          f"wrote {json_path}")
    if validation is not None:
        print(f"inverse-design: jump set validated, max deviation "
              f"{max(v for k, v in validation.items() if k.endswith('_error')):.3e}")


def cmd_validate(cfg: dict) -> None:
    if not cfg["x_file"] or not cfg["y_file"]:
        raise ParameterError("validate requires x_file and y_file")
    x, labels = read_matrix(cfg["x_file"])
    y_entries, _ = read_matrix(cfg["y_file"])

    checks: list[dict] = []

    def add(name: str, passed, value, limit, detail: str = "") -> None:
        checks.append({"name": name, "passed": bool(passed),
                       "value": value, "limit": limit, "detail": detail})

    try:
        source = SourceMatrix(y_entries, labels=labels)
        ymin = float(np.linalg.eigvalsh(matrix_entries(source)).min())
        add("source_hermitian_psd", True, ymin, -1e-12)
    except GausschainError as exc:
        source = None
        add("source_hermitian_psd", False, None, -1e-12, str(exc))

    betas = np.linalg.eigvals(x)
    min_rate = float(betas.real.min())
    stable = min_rate > 0
    add("relaxation_stable", stable, min_rate, 0.0,
        "" if stable else "slowest mode does not decay")

    if source is not None and stable:
        try:
            corr = solve_lyapunov_direct(x, source)
            add("steady_residual", corr.residual <= VALIDATE_RESIDUAL_LIMIT,
                corr.residual, VALIDATE_RESIDUAL_LIMIT)
            add("correlator_hermitian", corr.asymmetry <= VALIDATE_ASYMMETRY_LIMIT,
                corr.asymmetry, VALIDATE_ASYMMETRY_LIMIT)
            orbs = natural_orbitals(corr)
            occ_min = float(orbs.occupations.min())
            occ_max = float(orbs.occupations.max())
            add("occupations_in_unit_interval",
                occ_min >= -VALIDATE_OCCUPATION_SLACK
                and occ_max <= 1.0 + VALIDATE_OCCUPATION_SLACK,
                {"min": occ_min, "max": occ_max}, VALIDATE_OCCUPATION_SLACK)
            profile = (np.abs(orbs.orbitals) ** 2 @ orbs.occupations).real
            recon = float(np.abs(profile
                                 - np.asarray(corr.entries).diagonal().real).max())
            add("density_reconstruction", recon <= VALIDATE_DENSITY_LIMIT,
                recon, VALIDATE_DENSITY_LIMIT)
            trace_gap = abs(float(orbs.occupations.sum())
                            - float(np.trace(np.asarray(corr.entries)).real))
            add("occupation_trace", trace_gap <= VALIDATE_TRACE_LIMIT,
                trace_gap, VALIDATE_TRACE_LIMIT)
        except GausschainError as exc:
            add("steady_state", False, None, None, str(exc))
    else:
        add("steady_state", False, None, None,
            "skipped: prerequisites failed (source or stability)")

    passed = all(c["passed"] for c in checks)
    _, json_path = _out_paths(cfg)
    write_json(json_path, _summary(cfg, checks=checks, passed=passed))
    for c in checks:
        status = "ok  " if c["passed"] else "FAIL"
        print(f"validate: {status} {c['name']} value={dumps_json(c['value'])} "
              f"limit={dumps_json(c['limit'])}"
              + (f" ({c['detail']})" if c["detail"] else ""))
    if not passed:
        failed = ", ".join(c["name"] for c in checks if not c["passed"])
        raise ValidationError(f"invariant suite failed: {failed}", checks)
    print(f"validate: all {len(checks)} checks passed, wrote {json_path}")


def cmd_oracle_check(cfg: dict) -> None:
    params = _hn_params(cfg)
    n = params.n_sites
    gamma = float(cfg["gamma"])
    x = build_hatano_nelson(params)
    y = _uniform_pump(n, gamma)
    realization = inverse_design(x, y)
    jumps = hn_jump_decomposition(params, gamma)
    spectrum = biorthogonal_decompose(matrix_entries(x))

    trajectory = evolve_master(DensityMatrix.vacuum(n), realization.hamiltonian,
                               jumps, cfg["t_final"], cfg["dt"], stride=cfg["stride"])
    zero = np.zeros((n, n))
    max_dev = 0.0
    for time, state in zip(trajectory.times, trajectory.states):
        reduced = correlator_of(state)
        closed = closed_form_correlator(spectrum, y, zero, float(time))
        max_dev = max(max_dev, float(np.abs(reduced - closed).max()))

    steady_rho = steady_state_oracle(realization.hamiltonian, jumps)
    direct = solve_lyapunov_direct(x, y)
    steady_dev = float(np.abs(correlator_of(steady_rho)
                              - np.asarray(direct.entries)).max())

    passed = max_dev <= ORACLE_TRAJECTORY_LIMIT and steady_dev <= ORACLE_STEADY_LIMIT
    _, json_path = _out_paths(cfg)
    write_json(json_path, _summary(
        cfg,
        n_samples=int(trajectory.times.size),
        max_trajectory_deviation=max_dev,
        trajectory_limit=ORACLE_TRAJECTORY_LIMIT,
        steady_state_deviation=steady_dev,
        steady_limit=ORACLE_STEADY_LIMIT,
        max_trace_drift=trajectory.max_trace_drift,
        passed=passed,
    ))
    print(f"oracle-check: max trajectory deviation {max_dev:.3e} "
          f"(limit {ORACLE_TRAJECTORY_LIMIT:g}), steady deviation {steady_dev:.3e} "
          f"(limit {ORACLE_STEADY_LIMIT:g}), wrote {json_path}")
    if not passed:
        raise ValidationError(
            f"oracle disagrees with the correlator stack: trajectory {max_dev:.3e}, "
            f"steady {steady_dev:.3e}")


HANDLERS = {
    "hn-profiles": cmd_hn_profiles,
    "hn-source-scan": cmd_hn_source_scan,
    "hn-occupations": cmd_hn_occupations,
    "ssh-profiles": cmd_ssh_profiles,
    "ssh-crossover": cmd_ssh_crossover,
    "inverse-design": cmd_inverse_design,
    "validate": cmd_validate,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        HANDLERS[args.command](cfg)
    except InfeasibilityError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        for label, deficit in exc.deficits:
            print(f"  deficit at {label}: {deficit:.6g}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1
    except (GausschainError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
