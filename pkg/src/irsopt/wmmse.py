"""Rate and mean-square-error computations with the closed-form updates
that tie the weighted sum rate to its weighted-MSE surrogate.

Rates are kept in nats throughout; conversion to bits happens only at the
reporting layer. For scalar receive filters the chain is

    u_k = hbar_k^H w_k / (sum_j |hbar_k^H w_j|^2 + noise)      (MMSE decoder)
    E_k = |u_k|^2 (sum_j |hbar_k^H w_j|^2 + noise)
          - 2 Re(u_k^* hbar_k^H w_k) + 1
    q_k = 1 / E_k

after which the surrogate sum_k alpha_k (log q_k - q_k E_k + 1) equals the
weighted sum rate exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError


@dataclass(frozen=True)
class BeamformerSet:
    """Transmit beamformers, row k holding w_k."""

    w: np.ndarray  # (n_users, n_tx)

    def __post_init__(self):
        w = np.array(self.w, dtype=complex)
        if w.ndim != 2:
            raise ValueError("beamformers must be an (n_users, n_tx) array")
        if not np.all(np.isfinite(w.real)) or not np.all(np.isfinite(w.imag)):
            raise ValueError("beamformers contain non-finite entries")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def total_power(self) -> float:
        return float(np.sum(np.abs(self.w) ** 2))


@dataclass(frozen=True)
class WmmseState:
    """Per-user decoders, surrogate weights, and MSE values."""

    decoders: np.ndarray   # (n_users,) complex
    mse_weights: np.ndarray  # (n_users,) positive real
    mse: np.ndarray        # (n_users,) positive real


def _w_matrix(beamformers) -> np.ndarray:
    if isinstance(beamformers, BeamformerSet):
        return beamformers.w
    return np.asarray(beamformers, dtype=complex)


def cross_gains(hbar: np.ndarray, beamformers) -> np.ndarray:
    """Matrix of complex gains, entry (k, j) = hbar_k^H w_j."""
    return np.conj(hbar) @ _w_matrix(beamformers).T


def compute_rates(hbar: np.ndarray, beamformers, noise_power: float) -> np.ndarray:
    """Per-user achievable rate ln(1 + SINR_k) in nats."""
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    gains = cross_gains(hbar, beamformers)
    signal = np.abs(np.diag(gains)) ** 2
    total = np.sum(np.abs(gains) ** 2, axis=1) + noise_power
    return np.log1p(signal / (total - signal))


def weighted_sum_rate(weights: np.ndarray, rates: np.ndarray) -> float:
    weights = np.asarray(weights, dtype=float)
    rates = np.asarray(rates, dtype=float)
    if weights.shape != rates.shape:
        raise ValueError("weights and rates must have matching length")
    return float(weights @ rates)


def update_decoders(hbar: np.ndarray, beamformers, noise_power: float) -> np.ndarray:
    """MMSE scalar receivers u_k = hbar_k^H w_k / (sum_j |hbar_k^H w_j|^2 + noise)."""
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    gains = cross_gains(hbar, beamformers)
    total = np.sum(np.abs(gains) ** 2, axis=1) + noise_power
    return np.diag(gains) / total

def compute_mse(hbar: np.ndarray, beamformers, decoders: np.ndarray,
                noise_power: float) -> np.ndarray:
    """Symbol-estimate MSE per user for arbitrary scalar decoders."""
    if noise_power <= 0:
        raise ValueError("noise_power must be positive")
    gains = cross_gains(hbar, beamformers)
    total = np.sum(np.abs(gains) ** 2, axis=1) + noise_power
    u = np.asarray(decoders, dtype=complex)
    return (np.abs(u) ** 2 * total
            - 2.0 * np.real(np.conj(u) * np.diag(gains)) + 1.0)


def update_weights(mse: np.ndarray) -> np.ndarray:
    """Optimal surrogate weights q_k = 1 / E_k."""
    mse = np.asarray(mse, dtype=float)
    if np.any(mse <= 0) or not np.all(np.isfinite(mse)):
        raise NumericalError("MSE values must be positive; upstream update is broken")
    return 1.0 / mse


def wmse_objective(weights: np.ndarray, mse_weights: np.ndarray,
                   mse: np.ndarray) -> float:
    """Surrogate objective sum_k alpha_k (ln q_k - q_k E_k + 1), in nats."""
    q = np.asarray(mse_weights, dtype=float)
    if np.any(q <= 0):
        raise ValueError("surrogate weights must be positive")
    return float(np.asarray(weights, dtype=float)
                 @ (np.log(q) - q * np.asarray(mse, dtype=float) + 1.0))


def optimal_state(hbar: np.ndarray, beamformers, noise_power: float) -> WmmseState:
    """Decoder and weight updates in sequence; after this the surrogate
    objective equals the weighted sum rate."""
    u = update_decoders(hbar, beamformers, noise_power)
    mse = compute_mse(hbar, beamformers, u, noise_power)
    return WmmseState(decoders=u, mse_weights=update_weights(mse), mse=mse)
