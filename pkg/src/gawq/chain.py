"""Geometry, derived couplings and effective Hamiltonians of the chain."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError


@dataclass(frozen=True)
class DerivedCouplings:
    gamma_mean: float
    delta: float
    phi: float
    phi_prime: float
    J: float
    gamma_eff: float

    def gamma_eff_approx(self):
        """Small-``delta`` estimate ``delta**2 / gamma`` (comparison only)."""
        return self.delta ** 2 / self.gamma_mean


def derive_couplings(cfg):
    """Delay phases, exchange coupling and single-atom decay for ``cfg``.

    The delay phase is tuned to the decoherence-free point
    ``phi + phi' = (2n - 1) pi`` for the hardware ratio ``zeta = phi'/phi``.
    """
    if cfg.gamma1 < 0 or cfg.gamma2 < 0:
        raise ConfigError("negative decay rates")
    gamma = 0.5 * (cfg.gamma1 + cfg.gamma2)
    delta = 0.5 * (cfg.gamma2 - cfg.gamma1)
    phi = (2 * cfg.winding - 1) * math.pi / (cfg.zeta + 1.0)
    phi_prime = cfg.zeta * phi
    # 2(g - sqrt(g^2 - d^2)) rewritten to avoid cancellation when d << g
    gamma_eff = 2.0 * delta * delta / (gamma + math.sqrt(cfg.gamma1 * cfg.gamma2))
    return DerivedCouplings(
        gamma_mean=gamma,
        delta=delta,
        phi=phi,
        phi_prime=phi_prime,
        J=gamma * math.sin(phi),
        gamma_eff=gamma_eff,
    )


def build_geometry(cfg, couplings=None):
    """Accumulated phases ``theta[i, m]`` of every connection point.

    Row ``i`` is atom ``i + 1``; column 0 is its left leg, column 1 its
    right leg. The origin is pinned at ``theta[0, 0] = 0``.
    """
    c = couplings or derive_couplings(cfg)
    left = np.arange(cfg.n) * c.phi_prime
    return np.column_stack([left, left + (c.phi + c.phi_prime)])


def on_site_detunings(cfg):
    """``V0 cos(2 pi beta i + varphi)`` for ``i = 1..N``."""
    i = np.arange(1, cfg.n + 1)
    return cfg.v0 * np.cos(2.0 * np.pi * cfg.beta.value * i + cfg.varphi)


@dataclass(frozen=True, eq=False)
class EffectiveModel:
    """Non-Hermitian effective Hamiltonian ``H`` and coupling vector ``V``.

    ``H`` lives in the frame rotating at the bare atomic frequency, so its
    diagonal carries the on-site detunings.
    """

    H: np.ndarray
    V: np.ndarray
    loss_included: bool = False

    def __post_init__(self):
        self.H.setflags(write=False)
        self.V.setflags(write=False)

    @property
    def n(self):
        return self.V.shape[0]

    def with_loss(self, gamma0):
        """Fold a uniform non-waveguide loss ``gamma0`` into the diagonal."""
        H = self.H - 0.5j * gamma0 * np.eye(self.n)
        return EffectiveModel(H, self.V.copy(), loss_included=self.loss_included or gamma0 > 0)


def model_from_geometry(theta, gammas, detunings, gamma0=0.0):
    """Assemble ``H`` and ``V`` for arbitrary connection-point phases.

    Parameters
    ----------
    theta : (N, M) array
        Phase of leg ``m`` of atom ``i``.
    gammas : (M,) array
        Decay rate through each leg.
    detunings : (N,) array
        On-site frequencies relative to the reference frequency.
    gamma0 : float
        Non-waveguide loss rate added as ``-i gamma0 / 2`` on the diagonal.
    """
    theta = np.asarray(theta, dtype=float)
    amp = np.sqrt(np.asarray(gammas, dtype=float))
    n, m = theta.shape
    flat_theta = theta.reshape(-1)
    flat_amp = np.tile(amp, n)
    kernel = np.exp(1j * np.abs(flat_theta[:, None] - flat_theta[None, :]))
    kernel *= flat_amp[:, None] * flat_amp[None, :]
    # sum the M x M leg blocks for every (i, j) pair
    coupled = kernel.reshape(n, m, n, m).sum(axis=(1, 3))
    H = np.diag(np.asarray(detunings, dtype=float) - 0.5j * gamma0) - 0.5j * coupled
    V = (amp / math.sqrt(2.0) * np.exp(1j * theta)).sum(axis=1)
    return EffectiveModel(H.astype(complex), V.astype(complex), loss_included=gamma0 > 0)


def build_effective_model(cfg):
    c = derive_couplings(cfg)
    theta = build_geometry(cfg, c)
    return model_from_geometry(
        theta, [cfg.gamma1, cfg.gamma2], on_site_detunings(cfg), cfg.gamma0
    )


def build_aah_matrix(cfg):
    """Real symmetric tridiagonal target Hamiltonian of the chain."""
    J = derive_couplings(cfg).J
    M = np.diag(on_site_detunings(cfg))
    if cfg.n > 1:
        idx = np.arange(cfg.n - 1)
        M[idx, idx + 1] = J
        M[idx + 1, idx] = J
    return M


@dataclass(frozen=True)
class ValidityReport:
    ratio: float | None
    ok: bool | None
    threshold: float

    @property
    def status(self):
        if self.ok is None:
            return "unknown"
        return "ok" if self.ok else "violated"


def markov_validity(cfg, threshold=0.01):
    """Check ``N gamma << omega_a`` through the ratio ``N / (omega_a/gamma)``.

    The boundary ``ratio == threshold`` counts as satisfied.
    """
    if cfg.omega_ratio is None:
        return ValidityReport(None, None, threshold)
    ratio = cfg.n / cfg.omega_ratio
    return ValidityReport(ratio, ratio <= threshold, threshold)
