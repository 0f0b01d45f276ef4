import math
import warnings

import numpy as np
import pytest

from gawq import ChainConfig, parse_config

QUARTER = {"n": 30, "gamma": 1.0, "delta": 0.1, "v0": "2J", "beta": "1/4", "varphi": 3 * math.pi / 4}


@pytest.fixture
def quarter_cfg():
    return parse_config(dict(QUARTER))


@pytest.fixture
def single_atom():
    """One giant atom, gamma = 1, delta = 0.1, phi + phi' = pi."""
    return ChainConfig(n=1, gamma1=0.9, gamma2=1.1)


def random_tie_free_config(rng, n_max=8, delta_max=0.3, tol=1e-6):
    """Random chain whose 2N connection-point phases are all distinct."""
    from gawq.chain import build_geometry

    while True:
        n = int(rng.integers(1, n_max + 1))
        gamma = 1.0
        delta = float(rng.uniform(0.0, delta_max))
        if delta == 0.0:
            continue
        zeta = float(rng.uniform(1.05, 4.0))
        winding = int(rng.integers(1, 3))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cfg = ChainConfig.from_gamma_delta(
                n, gamma, delta, zeta=zeta, winding=winding,
                v0=float(rng.uniform(0, 3)), beta=float(rng.uniform(0, 1)),
                varphi=float(rng.uniform(0, 2 * math.pi)),
            )
        theta = np.sort(build_geometry(cfg).ravel())
        if theta.size < 2 or np.min(np.diff(theta)) > tol:
            return cfg
