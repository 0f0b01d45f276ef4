"""Chain configuration, modulation frequency and config-document parsing."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .exceptions import ConfigError

GOLDEN_INVERSE = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Beta:
    """Modulation frequency of the on-site potential.

    One of three kinds: ``"rational"`` (``p/q`` with coprime integers),
    ``"real"`` (a plain double) or ``"golden"`` (the inverse golden ratio,
    kept as a token so sweeps are reproducible).
    """

    kind: str
    p: int = 0
    q: int = 1
    real: float = 0.0

    def __post_init__(self):
        if self.kind == "rational":
            if self.q <= 0:
                raise ConfigError(f"beta: denominator must be positive, got {self.q}")
            if math.gcd(self.p, self.q) != 1:
                raise ConfigError(f"beta: {self.p}/{self.q} is not in lowest terms")
            if not 0 <= self.p <= self.q:
                raise ConfigError(f"beta: {self.p}/{self.q} outside [0, 1]")
        elif self.kind == "real":
            if not math.isfinite(self.real):
                raise ConfigError(f"beta: non-finite value {self.real}")
        elif self.kind != "golden":
            raise ConfigError(f"beta: unknown kind {self.kind!r}")

    @classmethod
    def rational(cls, p, q):
        return cls("rational", p=int(p), q=int(q))

    @classmethod
    def from_float(cls, value):
        return cls("real", real=float(value))

    @classmethod
    def golden(cls):
        return cls("golden")

    @classmethod
    def parse(cls, value):
        """Build from ``"p/q"``, ``"golden"``, a decimal string or a number."""
        if isinstance(value, Beta):
            return value
        if isinstance(value, Fraction):
            return cls.rational(value.numerator, value.denominator)
        if isinstance(value, bool):
            raise ConfigError(f"beta: cannot interpret {value!r}")
        if isinstance(value, (int, float)):
            return cls.from_float(value)
        if not isinstance(value, str):
            raise ConfigError(f"beta: cannot interpret {value!r}")
        text = value.strip().lower()
        if text in ("golden", "golden_inverse", "goldeninverse"):
            return cls.golden()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                p, q = int(num), int(den)
            except ValueError:
                raise ConfigError(f"beta: malformed rational {value!r}") from None
            return cls.rational(p, q)
        try:
            return cls.from_float(float(text))
        except ValueError:
            raise ConfigError(f"beta: cannot interpret {value!r}") from None

    @property
    def value(self):
        if self.kind == "rational":
            return self.p / self.q
        if self.kind == "golden":
            return GOLDEN_INVERSE
        return self.real

    def __str__(self):
        if self.kind == "rational":
            return f"{self.p}/{self.q}"
        if self.kind == "golden":
            return "golden"
        return repr(self.real)


@dataclass(frozen=True)
class ChainConfig:
    """Physical description of a braided giant-atom chain.

    Rates are in arbitrary but common units (the figures use gamma = 1).
    ``v0`` is an absolute rate; use :func:`parse_config` to write it as a
    multiple of the exchange coupling (``"2J"``).
    """

    n: int
    gamma1: float
    gamma2: float
    zeta: float = 1.0
    winding: int = 1
    v0: float = 0.0
    beta: Beta = field(default_factory=lambda: Beta.rational(0, 1))
    varphi: float = 0.0
    gamma0: float = 0.0
    omega_ratio: float | None = None

    def __post_init__(self):
        if isinstance(self.beta, (str, int, float, Fraction)):
            object.__setattr__(self, "beta", Beta.parse(self.beta))
        problems = []
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            problems.append(f"n: must be a positive integer, got {self.n!r}")
        if self.gamma1 < 0 or self.gamma2 < 0:
            problems.append(
                f"gamma1/gamma2: rates must be non-negative, got {self.gamma1}, {self.gamma2}"
            )
        elif self.gamma1 + self.gamma2 <= 0:
            problems.append("gamma1/gamma2: at least one rate must be positive")
        if not self.zeta > 0:
            problems.append(f"zeta: must be > 0, got {self.zeta}")
        if isinstance(self.winding, bool) or int(self.winding) != self.winding or self.winding < 1:
            problems.append(f"winding: must be a positive integer, got {self.winding!r}")
        if self.v0 < 0:
            problems.append(f"v0: must be >= 0, got {self.v0}")
        if self.gamma0 < 0:
            problems.append(f"gamma0: must be >= 0, got {self.gamma0}")
        if self.omega_ratio is not None and not self.omega_ratio > 0:
            problems.append(f"omega_ratio: must be > 0, got {self.omega_ratio}")
        for name in ("gamma1", "gamma2", "zeta", "v0", "varphi", "gamma0"):
            if not math.isfinite(getattr(self, name)):
                problems.append(f"{name}: must be finite")
        if problems:
            raise ConfigError("; ".join(problems))
        if self.zeta < 1:
            warnings.warn(
                f"zeta={self.zeta} < 1 gives phi > phi'; accepted as is",
                stacklevel=3,
            )

    @classmethod
    def from_gamma_delta(cls, n, gamma, delta, **kwargs):
        """Build from mean rate ``gamma`` and half-difference ``delta``."""
        return cls(n=n, gamma1=gamma - delta, gamma2=gamma + delta, **kwargs)

    @property
    def gamma(self):
        return 0.5 * (self.gamma1 + self.gamma2)

    @property
    def delta(self):
        return 0.5 * (self.gamma2 - self.gamma1)

    def replace(self, **changes):
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return ChainConfig(**values)

    def to_dict(self):
        """Flat document with every default materialized."""
        out = asdict(self)
        out["beta"] = str(self.beta)
        return out


KNOWN_KEYS = frozenset(
    ["n", "gamma1", "gamma2", "gamma", "delta", "zeta", "winding", "v0",
     "beta", "varphi", "gamma0", "omega_ratio"]
)


def _number(key, value, errors):
    if isinstance(value, bool):
        errors.append(f"{key}: expected a number, got {value!r}")
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        errors.append(f"{key}: expected a number, got {value!r}")
        return None


def _j_multiple(key, value, errors):
    """Return ``(multiple_of_J, None)`` or ``(None, absolute)``."""
    if isinstance(value, str):
        text = value.strip().replace(" ", "")
        if text.upper().endswith("J"):
            coeff = text[:-1]
            if coeff in ("", "+"):
                return 1.0, None
            if "/" in coeff:
                num, _, den = coeff.partition("/")
                try:
                    return float(num) / float(den), None
                except (ValueError, ZeroDivisionError):
                    errors.append(f"{key}: malformed J multiple {value!r}")
                    return None, None
            try:
                return float(coeff), None
            except ValueError:
                errors.append(f"{key}: malformed J multiple {value!r}")
                return None, None
    return None, _number(key, value, errors)


def parse_config(document):
    """Validate a flat key-value mapping into a :class:`ChainConfig`.

    Rates may be given as ``gamma1``/``gamma2`` or as ``gamma``/``delta``.
    ``v0`` accepts a number or a multiple of the derived exchange coupling
    such as ``"2J"`` or ``"1/2J"``. All problems are collected and reported
    together.
    """
    from .chain import derive_couplings

    if not isinstance(document, dict):
        raise ConfigError("config document must be a mapping")
    errors = []
    unknown = sorted(set(document) - KNOWN_KEYS)
    for key in unknown:
        errors.append(f"{key}: unknown key")

    if "n" not in document:
        errors.append("n: required")
    n = document.get("n", 1)
    if isinstance(n, bool) or not isinstance(n, (int, float)) or int(n) != n:
        errors.append(f"n: must be an integer, got {n!r}")
        n = 1
    n = int(n)

    pair = {"gamma1", "gamma2"} & set(document)
    alt = {"gamma", "delta"} & set(document)
    gamma1 = gamma2 = 1.0
    if pair and alt:
        errors.append("gamma1/gamma2 and gamma/delta are mutually exclusive")
    elif alt:
        gamma = _number("gamma", document.get("gamma", 1.0), errors)
        delta = _number("delta", document.get("delta", 0.0), errors)
        if gamma is not None and delta is not None:
            gamma1, gamma2 = gamma - delta, gamma + delta
    elif pair == {"gamma1", "gamma2"}:
        g1 = _number("gamma1", document["gamma1"], errors)
        g2 = _number("gamma2", document["gamma2"], errors)
        if g1 is not None and g2 is not None:
            gamma1, gamma2 = g1, g2
    else:
        errors.append("gamma1 and gamma2 (or gamma and delta) are required")

    kwargs = {}
    for key in ("zeta", "varphi", "gamma0", "omega_ratio"):
        if key in document and document[key] is not None:
            val = _number(key, document[key], errors)
            if val is not None:
                kwargs[key] = val
    if "winding" in document:
        w = document["winding"]
        if isinstance(w, bool) or not isinstance(w, (int, float)) or int(w) != w:
            errors.append(f"winding: must be an integer, got {w!r}")
        else:
            kwargs["winding"] = int(w)
    if "beta" in document:
        try:
            kwargs["beta"] = Beta.parse(document["beta"])
        except ConfigError as exc:
            errors.append(str(exc))

    multiple, v0 = _j_multiple("v0", document.get("v0", 0.0), errors)
    try:
        cfg = ChainConfig(n=n, gamma1=gamma1, gamma2=gamma2, **kwargs)
    except ConfigError as exc:
        errors.append(str(exc))
    if errors:
        raise ConfigError("; ".join(errors))

    if multiple is not None:
        v0 = multiple * derive_couplings(cfg).J
        if v0 < 0:
            raise ConfigError(f"v0: resolves to negative amplitude {v0}")
    return cfg.replace(v0=v0)


def load_config(path):
    """Read a JSON or YAML config file and parse it."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml

        document = yaml.safe_load(text)
    else:
        document = json.loads(text)
    return parse_config(document)
