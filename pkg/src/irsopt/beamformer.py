"""Globally optimal transmit beamforming under a sum-power cap.

The stationarity condition of the power-constrained weighted-MSE problem
gives w_k = (H + lam*I)^-1 alpha_k q_k u_k hbar_k with H the weighted
channel Gram matrix. Working in H's positive eigenbasis makes the total
transmit power a cheap closed-form function of the dual variable lam,
which a bisection drives to the complementary-slackness point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .wmmse import BeamformerSet

# Eigenvalues at or below this fraction of the largest one are treated as
# the null space; the Gram matrix has rank <= n_users in practice.
EIG_TRUNCATION_REL = 1e-12


@dataclass(frozen=True)
class LagrangianContext:
    """Eigen-factorized data of one beamforming subproblem.

    gram     : (n_tx, n_tx) Hermitian PSD weighted channel Gram matrix
    eigvecs  : (n_tx, n_pos) eigenvectors of the positive eigenvalues
    eigvals  : (n_pos,) positive eigenvalues, ascending
    rhs      : (n_users, n_tx) right-hand sides alpha_k q_k u_k hbar_k
    zdiag    : (n_users, n_pos) |u_k|^2 |eigvecs^H hbar_k|^2 per mode
    coef     : (n_users,) alpha_k^2 q_k^2
    """

    gram: np.ndarray
    eigvecs: np.ndarray
    eigvals: np.ndarray
    rhs: np.ndarray
    zdiag: np.ndarray
    coef: np.ndarray


def assemble_context(hbar: np.ndarray, decoders: np.ndarray,
                     mse_weights: np.ndarray, weights: np.ndarray) -> LagrangianContext:
    """Build and eigen-factorize the subproblem data.

    Only the positive-eigenvalue block is materialized; the right-hand
    sides lie in its span by construction, so the reduced solve is exact.
    """
    u = np.asarray(decoders, dtype=complex)
    q = np.asarray(mse_weights, dtype=float)
    alpha = np.asarray(weights, dtype=float)
    if np.any(q <= 0):
        raise ValueError("surrogate weights must be positive")
    scale = alpha * q * np.abs(u) ** 2
    gram = np.einsum("k,kn,km->nm", scale, hbar, np.conj(hbar))
    gram = 0.5 * (gram + gram.conj().T)
    try:
        eigvals, eigvecs = np.linalg.eigh(gram)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("eigendecomposition of the Gram matrix failed") from exc
    cutoff = EIG_TRUNCATION_REL * max(float(eigvals[-1]), 0.0)
    keep = eigvals > cutoff
    eigvals = eigvals[keep]
    eigvecs = eigvecs[:, keep]
    rhs = (alpha * q * u)[:, None] * hbar
    proj = np.conj(eigvecs).T @ hbar.T  # (n_pos, n_users), column k = F1^H hbar_k
    zdiag = np.abs(u[:, None]) ** 2 * np.abs(proj.T) ** 2
    return LagrangianContext(gram=gram, eigvecs=eigvecs, eigvals=eigvals,
                             rhs=rhs, zdiag=zdiag, coef=(alpha * q) ** 2)


def beamformers_at(lam: float, ctx: LagrangianContext) -> BeamformerSet:
    """Stationary beamformers (H + lam*I)^-1 rhs_k via the eigenbasis."""
    if lam < 0:
        raise ValueError("dual variable must be nonnegative")
    n_users, n_tx = ctx.rhs.shape
    if ctx.eigvals.size == 0:
        return BeamformerSet(np.zeros((n_users, n_tx), dtype=complex))
    proj = np.conj(ctx.eigvecs).T @ ctx.rhs.T      # (n_pos, n_users)
    w = ctx.eigvecs @ (proj / (ctx.eigvals + lam)[:, None])
    return BeamformerSet(w.T)


def power_g(lam: float, ctx: LagrangianContext) -> float:
    """Total transmit power of beamformers_at(lam), evaluated in closed form."""
    if lam < 0:
        raise ValueError("dual variable must be nonnegative")
    if ctx.eigvals.size == 0:
        return 0.0
    return float(np.sum(ctx.coef[:, None] * ctx.zdiag / (ctx.eigvals + lam) ** 2))


def lambda_upper_bound(ctx: LagrangianContext, p_max: float) -> float:
    """Smallest dual value guaranteed to satisfy the power cap."""
    if p_max <= 0:
        raise ValueError("p_max must be positive")
    return float(np.sqrt(np.sum(ctx.coef[:, None] * ctx.zdiag) / p_max))


def solve_beamforming(hbar: np.ndarray, decoders: np.ndarray,
                      mse_weights: np.ndarray, weights: np.ndarray,
                      p_max: float, *,
                      power_tol_rel: float = 1e-8,
                      lambda_tol_rel: float = 1e-12,
                      ) -> tuple[BeamformerSet, float, int]:
    """Solve the power-constrained subproblem to global optimality.

    Returns (beamformers, lam_star, n_probes). If the unconstrained
    solution already fits the budget, lam_star = 0; otherwise lam_star is
    bisected until the power matches p_max within power_tol_rel * p_max or
    the bracket shrinks below lambda_tol_rel * lambda_max.
    """
    ctx = assemble_context(hbar, decoders, mse_weights, weights)
    if power_g(0.0, ctx) <= p_max:
        return beamformers_at(0.0, ctx), 0.0, 0
    lam_max = lambda_upper_bound(ctx, p_max)
    if power_g(lam_max, ctx) > p_max * (1.0 + 1e-9):
        raise NumericalError("bisection bracket is invalid; upper bound violated")
    power_tol = power_tol_rel * p_max
    lam_tol = lambda_tol_rel * lam_max
    lo, hi = 0.0, lam_max
    probes = 0
    lam = lam_max
    while hi - lo > lam_tol:
        mid = 0.5 * (lo + hi)
        probes += 1
        g_mid = power_g(mid, ctx)
        if abs(g_mid - p_max) <= power_tol:
            lam = mid
            break
        if g_mid > p_max:
            lo = mid
        else:
            hi = mid
    else:
        lam = hi  # feasible side of the bracket
    return beamformers_at(lam, ctx), lam, probes
