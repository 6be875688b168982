"""Shared fixtures and independent oracles for the test suite.

The two steady-state oracles here deliberately avoid the library's own
solvers: one integrates the defining integral by adaptive quadrature,
the other is a from-scratch closed form for the single-band chain with
a local pump, written directly against the analytic mode formulas.
"""

import json
import math
import os

import numpy as np
import pytest
from scipy.integrate import quad_vec
from scipy.linalg import expm

GOLDEN_PATH = os.path.join(os.path.dirname(__file__), "data", "goldens.json")

# Reference chain configurations used throughout the suite.
HN_REFERENCE = dict(n_sites=40, t_right=1.0, t_left=0.17, kappa=0.91,
                    pump_site=15, pump_strength=0.03)
SSH_REFERENCE = dict(n_cells=20, t1=0.5, t2=1.0, kappa=1.5,
                     pump_cell=1, pump_sublattice="A", pump_strength=1e-8,
                     g_edge=-0.25, g_bulk=0.20)


def lyapunov_quadrature(x, y, t_max=200.0):
    """Steady state as the integral of e^{-Xt} Y e^{-X^dag t} over [0, t_max]."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)

    def integrand(t):
        p = expm(-x * t)
        return p @ y @ p.conj().T

    value, _ = quad_vec(integrand, 0.0, t_max, epsabs=1e-13, epsrel=1e-13)
    return value


def hn_closed_form_steady(n, t_right, t_left, kappa, gamma, s):
    """Exact steady correlator of the single-band chain, pump of strength
    gamma at site s, assembled from the sine-mode formulas only.

    C_jk = gamma * r^(j+k-2s) * [phi W phi^T]_jk,
    W_mn = phi_m(s) phi_n(s) / (beta_m + beta_n),

    with r = sqrt(t_right/t_left) and phi_m(j) the open-chain sine basis.
    Every quantity is O(1) except the final envelope power, so this is
    usable at any chain length the envelope itself can represent.
    """
    r = math.sqrt(t_right / t_left)
    modes = np.arange(1, n + 1)
    betas = kappa - 2.0 * math.sqrt(t_right * t_left) * np.cos(modes * np.pi / (n + 1))
    sites = np.arange(1, n + 1)
    phi = np.sqrt(2.0 / (n + 1)) * np.sin(np.outer(sites, modes) * np.pi / (n + 1))
    w = np.outer(phi[s - 1], phi[s - 1]) / (betas[:, None] + betas[None, :])
    core = phi @ w @ phi.T
    envelope = r ** (sites[:, None] + sites[None, :] - 2 * s)
    return gamma * envelope * core


def hn_closed_form_betas(n, t_right, t_left, kappa):
    """Relaxation rates of the single-band chain, straight from the formula."""
    modes = np.arange(1, n + 1)
    return kappa - 2.0 * math.sqrt(t_right * t_left) * np.cos(modes * np.pi / (n + 1))


@pytest.fixture(scope="session")
def golden():
    """Frozen reference values; regenerate with tools/make_goldens.py."""
    with open(GOLDEN_PATH, "r", encoding="utf-8") as fh:
        return json.load(fh)
