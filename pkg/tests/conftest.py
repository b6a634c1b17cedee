"""Shared fixtures for the gascatter test suite."""

import math

import numpy as np
import pytest

from gascatter.config import GascatterConfig, config
from gascatter.core.model import PhenomConfig, phenom_to_rateset


@pytest.fixture(autouse=True)
def default_config():
    """Every test starts and ends with the default runtime settings."""
    config.update_from(GascatterConfig())
    yield config
    config.update_from(GascatterConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def phenom():
    """Factory: phenomenological instance with angles given in units of pi."""
    def build(phi_plus=0.0, phi_minus=0.0, phi_J=0.0, theta=0.5, tau_gamma=0.0,
              Gamma=1.0, coupling_ratio=1.0):
        cfg = PhenomConfig(
            Gamma=Gamma,
            theta=theta * math.pi,
            phi_plus=phi_plus * math.pi,
            phi_minus=phi_minus * math.pi,
            phi_J=phi_J * math.pi,
            tau_Gamma=tau_gamma,
            coupling_ratio=coupling_ratio,
        )
        return phenom_to_rateset(cfg)
    return build
