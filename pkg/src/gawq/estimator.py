"""scikit-learn style front end.

:class:`GiantAtomChain` treats detunings as samples: ``fit`` builds the
effective model and its collective modes, ``transform`` maps each detuning
to ``(T, R)``. Because the physical parameters are ordinary estimator
parameters, ``clone``/``set_params`` and ``ParameterGrid`` drive sweeps.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .aah import eigensystem
from .analysis import localization_report
from .chain import build_aah_matrix, build_effective_model, derive_couplings
from .config import parse_config
from .modes import classify, decompose, lorentzian_amplitudes
from .scattering import spectrum


def _detunings(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    X = check_array(X, dtype=float)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single detuning column, got {X.shape[1]} features")
    return X[:, 0]


class GiantAtomChain(TransformerMixin, BaseEstimator):
    """Single-photon scattering off a braided giant-atom chain.

    Parameters
    ----------
    n_atoms : int
    gamma1, gamma2 : float
        Decay rates through the left and right leg of every atom.
    zeta : float
        Hardware ratio of the two delay phases.
    winding : int
        Picks the decoherence-free point ``phi + phi' = (2 winding - 1) pi``.
    v0 : float or str
        Modulation amplitude; strings like ``"2J"`` scale the exchange
        coupling.
    beta : str or float
        ``"p/q"``, ``"golden"`` or a number.
    varphi : float
        Modulation phase.
    gamma0 : float
        Loss rate into non-guided channels.
    method : {"modes", "direct"}
        Mode expansion (one eigendecomposition, cheap per detuning) or one
        linear solve per detuning.
    """

    def __init__(self, n_atoms=30, gamma1=0.9, gamma2=1.1, zeta=1.0, winding=1,
                 v0=0.0, beta="0/1", varphi=0.0, gamma0=0.0, method="modes"):
        self.n_atoms = n_atoms
        self.gamma1 = gamma1
        self.gamma2 = gamma2
        self.zeta = zeta
        self.winding = winding
        self.v0 = v0
        self.beta = beta
        self.varphi = varphi
        self.gamma0 = gamma0
        self.method = method

    def _config(self):
        beta = self.beta if isinstance(self.beta, str) else float(self.beta)
        return parse_config({
            "n": self.n_atoms, "gamma1": self.gamma1, "gamma2": self.gamma2,
            "zeta": self.zeta, "winding": self.winding, "v0": self.v0,
            "beta": beta, "varphi": self.varphi, "gamma0": self.gamma0,
        })

    def fit(self, X=None, y=None):
        """Build the chain; ``X`` is only validated, detunings are not needed."""
        if self.method not in ("modes", "direct"):
            raise ValueError(f"method must be 'modes' or 'direct', got {self.method!r}")
        if X is not None:
            _detunings(X)
            self.n_features_in_ = 1
        self.config_ = self._config()
        self.couplings_ = derive_couplings(self.config_)
        self.model_ = build_effective_model(self.config_)
        self.modes_ = decompose(self.model_)
        return self

    def scattering_amplitudes(self, X):
        """Complex ``(t, r)`` for each detuning in ``X``."""
        check_is_fitted(self, "model_")
        delta = _detunings(X)
        if self.method == "modes" and not self.modes_.defective:
            return lorentzian_amplitudes(self.modes_, delta)
        order = np.argsort(delta, kind="stable")
        uniq, inverse = np.unique(delta[order], return_inverse=True)
        grid = spectrum(self.model_, uniq)
        t = np.empty(delta.size, complex)
        r = np.empty(delta.size, complex)
        t[order] = grid.t[inverse]
        r[order] = grid.r[inverse]
        return t, r

    def transform(self, X):
        """``(n_samples, 2)`` array of transmittance and reflectance."""
        t, r = self.scattering_amplitudes(X)
        return np.column_stack([np.abs(t) ** 2, np.abs(r) ** 2])

    def predict(self, X):
        """Transmittance at each detuning."""
        return self.transform(X)[:, 0]

    @property
    def mode_labels_(self):
        check_is_fitted(self, "modes_")
        return classify(self.modes_, self.couplings_.gamma_eff).labels

    def aah_energies(self):
        check_is_fitted(self, "config_")
        return eigensystem(build_aah_matrix(self.config_)).energies


class LocalizationProbe(BaseEstimator):
    """Decay-width localization metrics as a function of ``V0``.

    ``transform`` takes a column of modulation amplitudes in units of the
    exchange coupling and returns ``sigma2``, ``ipr_decay`` and the
    ground-state IPR of the target chain for each.
    """

    def __init__(self, n_atoms=300, gamma1=0.99, gamma2=1.01, zeta=1.0, winding=1,
                 beta="golden", varphi=0.0, gamma0=0.0):
        self.n_atoms = n_atoms
        self.gamma1 = gamma1
        self.gamma2 = gamma2
        self.zeta = zeta
        self.winding = winding
        self.beta = beta
        self.varphi = varphi
        self.gamma0 = gamma0

    def fit(self, X=None, y=None):
        self.config_ = GiantAtomChain(
            n_atoms=self.n_atoms, gamma1=self.gamma1, gamma2=self.gamma2, zeta=self.zeta,
            winding=self.winding, beta=self.beta, varphi=self.varphi, gamma0=self.gamma0,
        )._config()
        self.J_ = derive_couplings(self.config_).J
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        v0 = _detunings(X) * self.J_
        out = []
        for v in v0:
            rep = localization_report(self.config_.replace(v0=float(v)))
            out.append((rep.sigma2, rep.ipr_decay, rep.aah_ground_ipr))
        return np.array(out).reshape(-1, 3)
