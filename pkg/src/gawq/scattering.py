"""Single-photon transmission and reflection through the chain.

Two independent routes are provided: the resolvent formula on the effective
model (:func:`amplitudes`, :func:`spectrum`) and a brute-force solve of the
real-space equations of motion (:func:`eom_oracle`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .chain import build_geometry, derive_couplings, on_site_detunings
from .exceptions import CoincidentPoints, IllConditioned, SingularSystem

CONDITION_LIMIT = 1e12


def is_decoupled(model):
    """True when ``V`` is zero up to roundoff of the phase sums.

    A coupling of ``|V|^2 ~ 1e-28`` (rate units of ``H``) would need
    ``delta/gamma ~ 1e-14``; anything below is numerical residue of the
    exactly cancelling legs.
    """
    scale = max(1.0, float(np.abs(model.H).max(initial=0.0)))
    return float(np.max(np.abs(model.V), initial=0.0)) ** 2 <= 1e-28 * scale


def amplitudes(model, delta, condition_limit=CONDITION_LIMIT):
    """Return ``(t, r)`` at detuning ``delta``.

    Solves ``(delta - H) x = V`` once, then ``t = 1 - i <V, x>`` and
    ``r = -i V^T x``. Raises :class:`IllConditioned` when the LAPACK
    1-norm condition estimate exceeds ``condition_limit``.
    """
    V = model.V
    if is_decoupled(model):
        return 1.0 + 0.0j, 0.0j
    A = delta * np.eye(model.n) - model.H
    anorm = np.abs(A).sum(axis=0).max()
    lu, piv, info = lapack.zgetrf(A)
    if info > 0:
        raise IllConditioned(delta, np.inf)
    rcond, _ = lapack.zgecon(lu, anorm, norm="1")
    if rcond == 0 or 1.0 / rcond > condition_limit:
        raise IllConditioned(delta, np.inf if rcond == 0 else 1.0 / rcond)
    x, _ = lapack.zgetrs(lu, piv, V)
    t = 1.0 - 1j * np.vdot(V, x)
    r = -1j * (V @ x)
    return complex(t), complex(r)


@dataclass(frozen=True, eq=False)
class SpectrumGrid:
    """Scattering amplitudes sampled on a detuning grid.

    ``fallback`` marks points computed through the mode expansion after the
    direct solve was ill-conditioned; ``invalid`` marks points where no
    route produced a value (amplitudes are NaN there).
    """

    delta: np.ndarray
    t: np.ndarray
    r: np.ndarray
    fallback: np.ndarray = field(default=None)
    invalid: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.delta)
        if self.fallback is None:
            object.__setattr__(self, "fallback", np.zeros(n, dtype=bool))
        if self.invalid is None:
            object.__setattr__(self, "invalid", np.zeros(n, dtype=bool))

    @property
    def T(self):
        return np.abs(self.t) ** 2

    @property
    def R(self):
        return np.abs(self.r) ** 2

    def __len__(self):
        return len(self.delta)


def check_grid(delta_grid):
    grid = np.asarray(delta_grid, dtype=float)
    if grid.ndim != 1:
        raise ValueError("detuning grid must be one-dimensional")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("detuning grid must be strictly increasing")
    return grid


def spectrum(model, delta_grid, condition_limit=CONDITION_LIMIT):
    """Evaluate :func:`amplitudes` on every point of ``delta_grid``.

    Ill-conditioned points fall back to the collective-mode expansion; if
    that is unavailable too the point is marked invalid and the sweep
    continues.
    """
    from .modes import decompose, lorentzian_amplitudes

    grid = check_grid(delta_grid)
    t = np.empty(grid.size, dtype=complex)
    r = np.empty(grid.size, dtype=complex)
    fallback = np.zeros(grid.size, dtype=bool)
    invalid = np.zeros(grid.size, dtype=bool)
    modes = None
    for k, d in enumerate(grid):
        try:
            t[k], r[k] = amplitudes(model, d, condition_limit)
        except IllConditioned:
            if modes is None:
                modes = decompose(model)
            if modes.defective:
                t[k] = r[k] = np.nan
                invalid[k] = True
                continue
            tk, rk = lorentzian_amplitudes(modes, np.array([d]))
            t[k], r[k] = tk[0], rk[0]
            fallback[k] = True
    return SpectrumGrid(grid, t, r, fallback, invalid)


@dataclass(frozen=True, eq=False)
class OracleSolution:
    """Full real-space solution at one detuning.

    ``tp[p]`` and ``rp[p]`` are the right- and left-moving amplitudes just
    right (``tp``) and just left (``rp``) of the ``p``-th coupling point,
    counted from the left in position order.
    """

    t: complex
    r: complex
    f: np.ndarray
    tp: np.ndarray
    rp: np.ndarray
    order: np.ndarray


def eom_oracle(cfg, delta, theta=None, tol=1e-9):
    """Solve the equations of motion for a photon incident from the left.

    Builds the dense ``5N x 5N`` linear system in the piecewise field
    amplitudes and the atomic amplitudes directly, with the field at a
    coupling point taken as the mean of its one-sided limits. Independent
    of :func:`amplitudes` by construction.

    ``theta`` overrides the geometry (rows are atoms, columns legs).
    """
    n = cfg.n
    if theta is None:
        theta = build_geometry(cfg, derive_couplings(cfg))
    theta = np.asarray(theta, dtype=float)
    gammas = np.array([cfg.gamma1, cfg.gamma2])
    n_legs = theta.shape[1]
    n_pts = n * n_legs

    flat = theta.reshape(-1)
    order = np.argsort(flat, kind="stable")
    pos = flat[order]
    if n_pts > 1 and np.min(np.diff(pos)) < tol:
        raise CoincidentPoints(
            f"connection points closer than {tol} in phase; oracle needs a tie-free geometry"
        )
    atom = order // n_legs
    leg = order % n_legs
    g = np.sqrt(gammas[leg] / 2.0)
    ph = np.exp(1j * pos)

    # unknowns: t_1..t_P | r_1..r_P | f_1..f_N
    size = 2 * n_pts + n
    A = np.zeros((size, size), dtype=complex)
    b = np.zeros(size, dtype=complex)
    ti = lambda p: p - 1  # noqa: E731  (p = 1..P)
    ri = lambda p: n_pts + p - 1  # noqa: E731
    fi = lambda i: 2 * n_pts + i  # noqa: E731

    row = 0
    for p in range(1, n_pts + 1):
        k = p - 1
        # t_p - t_{p-1} + i g f e^{-i theta_p} = 0, with t_0 = 1
        A[row, ti(p)] = 1.0
        if p > 1:
            A[row, ti(p - 1)] = -1.0
        else:
            b[row] = 1.0
        A[row, fi(atom[k])] += 1j * g[k] / ph[k]
        row += 1
        # r_p - r_{p+1} + i g f e^{+i theta_p} = 0, with r_{P+1} = 0
        A[row, ri(p)] = 1.0
        if p < n_pts:
            A[row, ri(p + 1)] = -1.0
        A[row, fi(atom[k])] += 1j * g[k] * ph[k]
        row += 1

    detuning = on_site_detunings(cfg) - delta - 0.5j * cfg.gamma0
    for i in range(n):
        A[row, fi(i)] = detuning[i]
        for k in np.flatnonzero(atom == i):
            p = k + 1
            # right-moving field: e^{i theta_p} (t_{p-1} + t_p) / 2
            A[row, ti(p)] += 0.5 * g[k] * ph[k]
            if p > 1:
                A[row, ti(p - 1)] += 0.5 * g[k] * ph[k]
            else:
                b[row] -= 0.5 * g[k] * ph[k]
            # left-moving field: e^{-i theta_p} (r_p + r_{p+1}) / 2
            A[row, ri(p)] += 0.5 * g[k] / ph[k]
            if p < n_pts:
                A[row, ri(p + 1)] += 0.5 * g[k] / ph[k]
        row += 1

    try:
        x = scipy.linalg.solve(A, b, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystem("non-finite solution")
    tp = x[:n_pts]
    rp = x[n_pts:2 * n_pts]
    f = x[2 * n_pts:]
    return OracleSolution(t=complex(tp[-1]), r=complex(rp[0]), f=f, tp=tp, rp=rp, order=order)
