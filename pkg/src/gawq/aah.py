"""Exact diagonalization of the target tight-binding chain."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import CountMismatch, NotNormalized


@dataclass(frozen=True, eq=False)
class AahEigensystem:
    energies: np.ndarray
    states: np.ndarray

    def iprs(self):
        return np.sum(np.abs(self.states) ** 4, axis=0)


def eigensystem(M):
    """Ascending energies and orthonormal states (columns) of ``M``."""
    M = np.asarray(M, dtype=float)
    if M.shape[0] == 1:
        return AahEigensystem(M.diagonal().copy(), np.ones((1, 1)))
    energies, states = scipy.linalg.eigh_tridiagonal(
        M.diagonal().copy(), M.diagonal(1).copy()
    )
    return AahEigensystem(energies, states)


def ipr(state, tol=1e-8):
    """Inverse participation ratio ``sum |psi_m|^4`` of a normalized state."""
    prob = np.abs(np.asarray(state)) ** 2
    norm = prob.sum()
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f"state has norm^2 {norm:.12g}")
    return float(np.sum(prob ** 2))


@dataclass(frozen=True)
class MatchReport:
    pairs: tuple
    deviations: np.ndarray
    max_center_deviation: float
    mean_center_deviation: float
    reliable: bool


def match_modes(modes, eig, J=1.0):
    """Pair sorted mode centers with sorted energies index by index.

    Deviations are reported in units of ``J``. If a deviation exceeds half
    the smallest level spacing the pairing is flagged unreliable.
    """
    centers = np.asarray(modes.centers)
    energies = np.asarray(eig.energies)
    if centers.shape != energies.shape:
        raise CountMismatch(f"{centers.size} modes vs {energies.size} levels")
    ci = np.argsort(centers, kind="stable")
    ei = np.argsort(energies, kind="stable")
    dev = np.abs(centers[ci] - energies[ei]) / abs(J)
    reliable = True
    if energies.size > 1:
        half_gap = 0.5 * np.min(np.diff(energies[ei])) / abs(J)
        if np.max(dev) > half_gap:
            reliable = False
            warnings.warn(
                "center deviation exceeds half the minimum level spacing; "
                "sorted pairing may be unreliable",
                RuntimeWarning,
                stacklevel=2,
            )
    pairs = tuple((int(a), int(b)) for a, b in zip(ci, ei))
    return MatchReport(
        pairs=pairs,
        deviations=dev,
        max_center_deviation=float(dev.max()),
        mean_center_deviation=float(dev.mean()),
        reliable=reliable,
    )


def cluster_levels(levels, gap_factor=3.0):
    """Split sorted ``levels`` wherever a spacing exceeds ``gap_factor`` times
    the median spacing. Returns a list of index arrays into the sorted order.
    """
    levels = np.sort(np.asarray(levels, dtype=float))
    if levels.size < 2:
        return [np.arange(levels.size)]
    gaps = np.diff(levels)
    cut = gaps > gap_factor * np.median(gaps)
    return np.split(np.arange(levels.size), np.flatnonzero(cut) + 1)


def band_intervals(energies, gap_factor=3.0):
    """``(bands, edges)``: ``[lo, hi]`` of multi-level clusters and the
    isolated single levels sitting in gaps."""
    e = np.sort(np.asarray(energies, dtype=float))
    bands, edges = [], []
    for idx in cluster_levels(e, gap_factor):
        if idx.size == 1 and e.size > 1:
            edges.append(float(e[idx[0]]))
        else:
            bands.append((float(e[idx[0]]), float(e[idx[-1]])))
    return bands, edges


def in_gap_mask(values, reference_energies, gap_factor=3.0, distance_factor=3.0):
    """True where ``values`` lie further than ``distance_factor`` median
    spacings from every band of ``reference_energies``."""
    ref = np.sort(np.asarray(reference_energies, dtype=float))
    bands, _ = band_intervals(ref, gap_factor)
    spacing = np.median(np.diff(ref)) if ref.size > 1 else 0.0
    values = np.asarray(values, dtype=float)
    dist = np.full(values.shape, np.inf)
    for lo, hi in bands:
        d = np.maximum(0.0, np.maximum(lo - values, values - hi))
        dist = np.minimum(dist, d)
    return dist > distance_factor * spacing
