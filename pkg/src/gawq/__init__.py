"""Single-photon scattering simulator for braided giant-atom chains that
emulate the Aubry-Andre-Harper model."""

__version__ = "0.1.0"

from .aah import AahEigensystem, MatchReport, eigensystem, ipr, match_modes
from .analysis import (
    LocalizationReport,
    band_count,
    butterfly_assemble,
    decay_variance,
    find_dips,
    ipr_decay,
    localization_report,
    localization_sweep,
    loss_corrected_metrics,
)
from .chain import (
    DerivedCouplings,
    EffectiveModel,
    build_aah_matrix,
    build_effective_model,
    build_geometry,
    derive_couplings,
    markov_validity,
    model_from_geometry,
)
from .config import Beta, ChainConfig, load_config, parse_config
from .estimator import GiantAtomChain, LocalizationProbe
from .modes import ModeSet, classify, decompose, lorentzian_spectrum
from .scattering import OracleSolution, SpectrumGrid, amplitudes, eom_oracle, spectrum

__all__ = [
    "AahEigensystem", "Beta", "ChainConfig", "DerivedCouplings", "EffectiveModel",
    "GiantAtomChain", "LocalizationProbe", "LocalizationReport", "MatchReport",
    "ModeSet", "OracleSolution", "SpectrumGrid", "amplitudes", "band_count",
    "build_aah_matrix", "build_effective_model", "build_geometry",
    "butterfly_assemble", "classify", "decay_variance", "decompose",
    "derive_couplings", "eigensystem", "eom_oracle", "find_dips", "ipr",
    "ipr_decay", "load_config", "localization_report", "localization_sweep",
    "lorentzian_spectrum", "loss_corrected_metrics", "markov_validity",
    "match_modes", "model_from_geometry", "parse_config", "spectrum",
]
