"""Collective modes of the effective Hamiltonian and the Lorentzian form
of the scattering amplitudes built from them."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .scattering import SpectrumGrid, check_grid

DEFECTIVE_CONDITION = 1e10
ZERO_WIDTH = 1e-14


class DefectiveWarning(RuntimeWarning):
    """Right eigenvectors are nearly linearly dependent."""


class ZeroWidthWarning(RuntimeWarning):
    """A mode couples to the waveguide but has (numerically) zero width."""


@dataclass(frozen=True, eq=False)
class ModeSet:
    """Biorthonormal eigendata of ``H`` sorted by center, then width.

    ``t_residue[n]`` and ``r_residue[n]`` hold the products
    ``eta_n * width_n / 2`` and ``xi_n * width_n / 2``; they stay finite when a
    width vanishes, in which case ``eta``/``xi`` are NaN and the mode index
    is listed in ``zero_width``.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    t_residue: np.ndarray
    r_residue: np.ndarray
    eta: np.ndarray
    xi: np.ndarray
    condition: float
    defective: bool
    zero_width: tuple

    @property
    def centers(self):
        return self.eigenvalues.real

    @property
    def widths(self):
        return -2.0 * self.eigenvalues.imag

    def __len__(self):
        return self.eigenvalues.shape[0]


def decompose(model, defective_condition=DEFECTIVE_CONDITION, width_scale=None):
    """Eigendecompose ``model.H`` into collective modes.

    Left eigenvectors come from inverting the right-eigenvector matrix, so
    ``left^H @ right`` is the identity to the accuracy of that inversion.
    ``width_scale`` sets the rate unit for the zero-width test (defaults to
    the largest coupling ``|V_i|^2`` or 1).
    """
    H = np.asarray(model.H)
    V = np.asarray(model.V)
    lam, right = scipy.linalg.eig(H)
    order = np.lexsort((-2.0 * lam.imag, lam.real))
    lam = lam[order]
    right = right[:, order]

    cond = np.linalg.cond(right)
    defective = not np.isfinite(cond) or cond > defective_condition
    if defective:
        warnings.warn(
            f"right eigenvector matrix has condition {cond:.3e}; "
            "model is close to an exceptional point",
            DefectiveWarning,
            stacklevel=2,
        )
    inv_right = scipy.linalg.inv(right)
    left = inv_right.conj().T

    overlap_in = inv_right @ V  # U_L^H V
    t_num = (V.conj() @ right) * overlap_in
    r_num = (V @ right) * overlap_in
    t_res = -1j * t_num
    r_res = -1j * r_num

    widths = -2.0 * lam.imag
    if width_scale is None:
        width_scale = max(float(np.max(np.abs(V) ** 2, initial=0.0)), 1.0)
    tiny = widths < ZERO_WIDTH * width_scale
    weightless = (np.abs(t_num) <= ZERO_WIDTH * width_scale) & (
        np.abs(r_num) <= ZERO_WIDTH * width_scale
    )
    eta = np.zeros_like(lam)
    xi = np.zeros_like(lam)
    regular = ~tiny
    eta[regular] = 2.0 * t_res[regular] / widths[regular]
    xi[regular] = 2.0 * r_res[regular] / widths[regular]
    broken = tiny & ~weightless
    eta[broken] = np.nan
    xi[broken] = np.nan
    zero_width = tuple(int(k) for k in np.flatnonzero(broken))
    if zero_width:
        warnings.warn(
            f"modes {zero_width} have zero width but non-zero weight; "
            "use t_residue/r_residue",
            ZeroWidthWarning,
            stacklevel=2,
        )
    return ModeSet(
        eigenvalues=lam,
        right=right,
        left=left,
        t_residue=t_res,
        r_residue=r_res,
        eta=eta,
        xi=xi,
        condition=float(cond),
        defective=bool(defective),
        zero_width=zero_width,
    )


def lorentzian_amplitudes(modes, delta_grid):
    """``(t, r)`` arrays from the sum of single-mode Lorentzians."""
    d = np.asarray(delta_grid, dtype=float)
    denom = d[:, None] - modes.eigenvalues[None, :]
    t = 1.0 + (modes.t_residue[None, :] / denom).sum(axis=1)
    r = (modes.r_residue[None, :] / denom).sum(axis=1)
    return t, r


def lorentzian_spectrum(modes, delta_grid):
    """Spectrum from the mode expansion; O(N) work per detuning."""
    if modes.defective:
        warnings.warn(
            "mode set is flagged defective; prefer the direct solve",
            DefectiveWarning,
            stacklevel=2,
        )
    grid = check_grid(delta_grid)
    t, r = lorentzian_amplitudes(modes, grid)
    return SpectrumGrid(grid, t, r)


@dataclass(frozen=True)
class Classification:
    labels: tuple
    superradiant: int
    subradiant: int


def classify(modes, gamma_eff):
    """Label each mode superradiant (width strictly above ``gamma_eff``)."""
    sup = modes.widths > gamma_eff
    labels = tuple("superradiant" if s else "subradiant" for s in sup)
    return Classification(labels, int(sup.sum()), int((~sup).sum()))
