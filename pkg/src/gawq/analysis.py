"""Localization metrics, dip extraction, band counting and the butterfly map."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .aah import cluster_levels, eigensystem
from .chain import build_aah_matrix, build_effective_model, derive_couplings
from .config import Beta
from .exceptions import GawqError
from .modes import decompose, lorentzian_amplitudes
from .scattering import amplitudes

log = logging.getLogger(__name__)


def decay_variance(modes, gamma_ref):
    """Mean squared deviation of the mode widths from ``gamma_ref``."""
    widths = np.asarray(modes.widths if hasattr(modes, "widths") else modes)
    return float(np.mean((widths - gamma_ref) ** 2))


def ipr_decay(modes, gamma_ref):
    """Participation ratio of the normalized widths ``w_n / (N gamma_ref)``."""
    widths = np.asarray(modes.widths if hasattr(modes, "widths") else modes)
    norm = widths / (widths.size * gamma_ref)
    return float(np.sum(norm ** 2))


def loss_corrected_metrics(modes, gamma_eff, gamma0):
    """Width variance and decay IPR of a lossy mode set.

    The widths are expected to already contain ``gamma0``; the reference
    width becomes ``gamma_eff + gamma0``.
    """
    ref = gamma_eff + gamma0
    return decay_variance(modes, ref), ipr_decay(modes, ref)


@dataclass(frozen=True)
class LocalizationReport:
    v0: float
    sigma2: float
    ipr_decay: float
    aah_ground_ipr: float
    sigma2_lossy: float | None = None
    ipr_decay_lossy: float | None = None


def localization_report(cfg):
    """Decay-width statistics of ``cfg`` plus the ground-state IPR of its
    target chain.

    The lossless metrics use the exact mean width of the loss-free model as
    reference; when ``cfg.gamma0 > 0`` the lossy variants are computed from
    the widths of the lossy Hamiltonian.
    """
    lossless = build_effective_model(cfg.replace(gamma0=0.0))
    modes = decompose(lossless)
    ref = float(np.mean(modes.widths))
    eig = eigensystem(build_aah_matrix(cfg))
    ground = float(np.sum(eig.states[:, 0] ** 4))
    report = dict(
        v0=cfg.v0,
        sigma2=decay_variance(modes, ref),
        ipr_decay=ipr_decay(modes, ref),
        aah_ground_ipr=ground,
    )
    if cfg.gamma0 > 0:
        lossy = decompose(lossless.with_loss(cfg.gamma0))
        s2, ip = loss_corrected_metrics(lossy, ref, cfg.gamma0)
        report.update(sigma2_lossy=s2, ipr_decay_lossy=ip)
    return LocalizationReport(**report)


def localization_sweep(cfg, v0_values, threads=1):
    """One :class:`LocalizationReport` per modulation amplitude, in order."""
    cfgs = [cfg.replace(v0=float(v)) for v in v0_values]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(localization_report, cfgs))


@dataclass(frozen=True)
class Dip:
    center: float
    width: float
    depth: float


def _parabola_vertex(x, y):
    """Vertex of the parabola through three points (falls back to the
    middle sample when the fit is not convex or leaves the bracket)."""
    xc = x - x[1]
    a, b, c = np.polyfit(xc, y, 2)
    if a <= 0:
        return x[1], y[1]
    xv = -b / (2.0 * a)
    if not xc[0] <= xv <= xc[2]:
        return x[1], y[1]
    return x[1] + xv, c - b * b / (4.0 * a)


def _crossing(delta, T, k, level, step):
    """Walk from index ``k`` in direction ``step`` until ``T`` rises above
    ``level`` or stops rising; return the interpolated abscissa."""
    j = k
    while 0 <= j + step < len(T):
        nxt = j + step
        if T[nxt] >= level:
            frac = (level - T[j]) / (T[nxt] - T[j])
            return delta[j] + frac * (delta[nxt] - delta[j])
        if T[nxt] < T[j]:
            break
        j = nxt
    return delta[j]


def find_dips(grid, threshold=0.995):
    """Local minima of the transmittance below ``threshold``.

    Centers are refined by a three-point parabola and widths are the full
    width at half depth. Each resonance must span at least three grid
    points for the estimates to mean anything.
    """
    delta = np.asarray(grid.delta, dtype=float)
    T = np.asarray(grid.T, dtype=float)
    dips = []
    for k in range(1, len(T) - 1):
        if not (T[k] < threshold and T[k] < T[k - 1] and T[k] <= T[k + 1]):
            continue
        center, tmin = _parabola_vertex(delta[k - 1:k + 2], T[k - 1:k + 2])
        tmin = min(max(tmin, 0.0), T[k])
        depth = 1.0 - tmin
        level = tmin + 0.5 * depth
        lo = _crossing(delta, T, k, level, -1)
        hi = _crossing(delta, T, k, level, +1)
        dips.append(Dip(float(center), float(hi - lo), float(min(depth, 1.0))))
    return dips


def band_clusters(dips, gap_factor=3.0):
    """Group dip centers into bands; isolated dips are returned as edges."""
    centers = np.array([d.center for d in dips], dtype=float)
    if centers.size == 0:
        return [], []
    if centers.size == 1:
        return [centers], []
    bands, edges = [], []
    for idx in cluster_levels(centers, gap_factor):
        if idx.size == 1:
            edges.append(float(centers[idx[0]]))
        else:
            bands.append(centers[idx])
    return bands, edges


def band_count(dips, gap_factor=3.0):
    bands, _ = band_clusters(dips, gap_factor)
    return len(bands)


def default_delta_grid(cfg, points=1500):
    """Symmetric grid covering the target spectrum with a margin."""
    c = derive_couplings(cfg)
    half = 2.0 * abs(c.J) + cfg.v0 + 2.0 * c.gamma_eff
    return np.linspace(-half, half, points)


@dataclass(frozen=True, eq=False)
class ButterflyMap:
    betas: np.ndarray
    delta: np.ndarray
    T: np.ndarray
    valid: np.ndarray
    used_direct: np.ndarray

    @property
    def invalid_fraction(self):
        return float(np.mean(~self.valid)) if self.valid.size else 0.0


def butterfly_betas(count):
    """``count`` modulation frequencies ``k / (count + 1)`` inside (0, 1)."""
    return [Beta.parse(Fraction(k, count + 1)) for k in range(1, count + 1)]


def _butterfly_row(cfg, grid, spot_every, spot_tol):
    model = build_effective_model(cfg)
    try:
        modes = decompose(model)
        if modes.defective or modes.zero_width:
            raise GawqError("mode expansion unusable")
        t, _ = lorentzian_amplitudes(modes, grid)
        for k in range(0, grid.size, spot_every):
            td, _ = amplitudes(model, grid[k])
            if abs(td - t[k]) > spot_tol:
                raise GawqError(f"spot check failed at delta={grid[k]}")
        return np.abs(t) ** 2, True, False
    except GawqError as exc:
        log.info("beta=%s: falling back to direct solve (%s)", cfg.beta, exc)
    try:
        t = np.array([amplitudes(model, d)[0] for d in grid])
        return np.abs(t) ** 2, True, True
    except GawqError as exc:
        log.warning("beta=%s: row invalid (%s)", cfg.beta, exc)
        return np.full(grid.size, np.nan), False, True


def butterfly_assemble(cfg, beta_count=299, delta_grid=None, threads=1,
                       spot_every=32, spot_tol=1e-8):
    """Transmittance map ``T[beta, delta]`` with ``varphi = 0``.

    Each row uses the mode expansion, spot-checked against the direct
    solve at every ``spot_every``-th detuning. Rows that fail are redone
    with the direct solve and, failing that, marked invalid.
    """
    base = cfg.replace(varphi=0.0)
    grid = default_delta_grid(base) if delta_grid is None else np.asarray(delta_grid, float)
    betas = butterfly_betas(beta_count)
    cfgs = [base.replace(beta=b) for b in betas]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(lambda c: _butterfly_row(c, grid, spot_every, spot_tol), cfgs))
    T = np.vstack([r[0] for r in rows]) if rows else np.empty((0, grid.size))
    return ButterflyMap(
        betas=np.array([b.value for b in betas]),
        delta=grid,
        T=T,
        valid=np.array([r[1] for r in rows], dtype=bool),
        used_direct=np.array([r[2] for r in rows], dtype=bool),
    )


def center_band_window(cfg, gap_factor=3.0):
    """Detuning window around the band of the target chain nearest zero."""
    from .aah import band_intervals

    eig = eigensystem(build_aah_matrix(cfg))
    bands, _ = band_intervals(eig.energies, gap_factor)
    lo, hi = min(bands, key=lambda b: 0.0 if b[0] <= 0.0 <= b[1] else min(abs(b[0]), abs(b[1])))
    pad = 0.1 * (hi - lo) + 2.0 * derive_couplings(cfg).gamma_eff
    return lo - pad, hi + pad
