import numpy as np
import pytest

from irsopt import ChannelSet


def complex_normal(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_channels(rng, n_irs, n_elements, n_users, n_tx) -> ChannelSet:
    """Unit-scale random channel set (no geometry, for algebra tests)."""
    return ChannelSet(
        complex_normal(rng, (n_users, n_tx)),
        complex_normal(rng, (n_irs, n_elements, n_tx)),
        complex_normal(rng, (n_irs, n_users, n_elements)),
    )


def random_wmmse_instance(rng, n_users, n_tx, noise_span=(-2, 0)):
    """Random (hbar, W, alpha, noise) tuple for rate/MSE identities."""
    hbar = complex_normal(rng, (n_users, n_tx))
    w = complex_normal(rng, (n_users, n_tx))
    alpha = rng.uniform(0.2, 2.0, n_users)
    noise = 10.0 ** rng.uniform(*noise_span)
    return hbar, w, alpha, noise


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
