"""Regenerate the frozen reference values in tests/data/goldens.json.

The locking and crossover thresholds are qualitative, so the suite
measures them once with this script and then pins the numbers.  Rerun
only when a deliberate change to the pipeline shifts the reference
output; review the diff before committing a new file.
"""

import os
import sys

import numpy as np

from gausschain import (HatanoNelsonParams, SshParams, build_hatano_nelson,
                        build_local_pump, hn_source_scan, natural_orbitals,
                        overlap, solve_lyapunov_direct, ssh_crossover_scan)
from gausschain.matio import write_json
from gausschain.spectral import ModeVector, hn_normalized_modes, slow_mode_position

OUT = os.path.join(os.path.dirname(__file__), os.pardir, "tests", "data",
                   "goldens.json")


def hn_locking_block() -> dict:
    params = HatanoNelsonParams(40, 1.0, 0.17, 0.91)
    x = build_hatano_nelson(params)
    pump = build_local_pump(40, 15, 0.03)
    corr = solve_lyapunov_direct(x, pump)
    orbs = natural_orbitals(corr)
    betas, right, _ = hn_normalized_modes(params)
    slow = slow_mode_position(betas.astype(complex))
    o_slow = overlap(ModeVector(right[:, slow], "euclidean"), orbs.top_orbital())

    scan = hn_source_scan(params, 0.03)
    deviation = np.abs(scan.nu_max_normalized - scan.loading_normalized)
    return {
        "overlap_slow": float(o_slow),
        "nu_max": float(orbs.occupations[0]),
        "occupation_second_normalized": float(orbs.occupations_normalized()[1]),
        "scan_max_deviation": float(deviation.max()),
        "scan_deviation_argmax_site": int(scan.sites[int(np.argmax(deviation))]),
        "scan_occupation_argmax_site": int(scan.sites[int(np.argmax(scan.nu_max_normalized))]),
        "scan_loading_argmax_site": int(scan.sites[int(np.argmax(scan.loading_normalized))]),
    }


def ssh_crossover_block() -> dict:
    params = SshParams(20, 0.5, 1.0, 0.0, 1.5)
    scan = ssh_crossover_scan(params, pump_cell=1, pump_sublattice="A",
                              pump_strength=1e-8)
    if scan.failures:
        raise SystemExit(f"crossover scan had failures: {scan.failures}")
    margin = scan.o_edge - scan.o_slow
    flips = [k for k in range(margin.size - 1) if margin[k] * margin[k + 1] < 0]

    def point(g):
        p = SshParams(20, 0.5, 1.0, g, 1.5)
        sub = ssh_crossover_scan(p, pump_cell=1, pump_sublattice="A",
                                 pump_strength=1e-8, g_values=[g])
        return {"o_edge": float(sub.o_edge[0]), "o_slow": float(sub.o_slow[0])}

    return {
        "sign_changes": len(flips),
        "crossing_bracket": [float(scan.g_values[flips[0]]),
                             float(scan.g_values[flips[0] + 1])] if flips else None,
        "edge_point": point(-0.25),
        "bulk_point": point(0.20),
    }


def main() -> int:
    payload = {"hn_locking": hn_locking_block(), "ssh_crossover": ssh_crossover_block()}
    write_json(OUT, payload)
    print(f"wrote {os.path.normpath(OUT)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
