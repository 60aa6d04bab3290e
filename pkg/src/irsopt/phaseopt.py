"""Phase-shift optimization over the product of unit circles.

With decoders, weights, and beamformers held fixed, the weighted-MSE
objective is an explicit Hermitian quadratic in the stacked reflection
vector. Assembling that quadratic once per outer iteration lets the
conjugate-gradient descent in ``_kernels`` run on a plain matrix-vector
product. A nonnegative diagonal shift (Gershgorin bound by default) makes
the ambient quadratic convex without moving its constrained minimizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channels import UNIT_MODULUS_TOL, ChannelSet, PhaseConfig
from .wmmse import _w_matrix


@dataclass(frozen=True)
class QuadraticForm:
    """f(v) = v^H (j_hat + omega I) v + 2 Re(v^H z), plus bookkeeping.

    const_term collects the terms of the weighted MSE that do not depend
    on the phases, so that for any unit-modulus v

        f(v) + const_term - omega * size == sum_k alpha_k q_k E_k.
    """

    j_hat: np.ndarray      # (size, size) Hermitian
    z: np.ndarray          # (size,)
    omega: float
    const_term: float
    n_irs: int
    n_elements: int

    @property
    def size(self) -> int:
        return self.n_irs * self.n_elements


def assemble_quadratic(channels: ChannelSet, beamformers, decoders,
                       mse_weights, weights, noise_power: float,
                       omega: float | None = None) -> QuadraticForm:
    """Collect the weighted MSE into a quadratic in the stacked phases.

    omega=None picks the Gershgorin row-sum bound of j_hat, the smallest
    cheap shift that certifies j_hat + omega I is positive semidefinite.
    """
    w = _w_matrix(beamformers)
    u = np.asarray(decoders, dtype=complex)
    q = np.asarray(mse_weights, dtype=float)
    alpha = np.asarray(weights, dtype=float)
    g = channels.g_bs_irs          # (L, M, n_tx)
    h_ru = channels.h_irs_user     # (L, K, M)
    h = channels.h_direct          # (K, n_tx)
    n_irs, n_el = channels.n_irs, channels.n_elements
    size = n_irs * n_el

    aq = alpha * q
    w_gram = w.T @ np.conj(w)      # sum_k w_k w_k^H, (n_tx, n_tx)

    # Phase-independent part: aq_k * (|u_k|^2 (h_k^H W h_k + noise) - 2 Re(u_k w_k^H h_k) + 1)
    quad_direct = np.einsum("ka,ab,kb->k", np.conj(h), w_gram, h).real
    e_direct = u * np.sum(np.conj(w) * h, axis=1)
    const = float(np.sum(aq * (np.abs(u) ** 2 * (quad_direct + noise_power)
                               - 2.0 * e_direct.real + 1.0)))

    if size == 0:
        return QuadraticForm(np.zeros((0, 0), dtype=complex),
                             np.zeros(0, dtype=complex),
                             0.0 if omega is None else float(omega),
                             const, n_irs, n_el)

    # Quadratic blocks: (sum_k aq_k |u_k|^2 h_{i,k} h_{j,k}^H) o (G_j W G_i^H)^T
    cu = aq * np.abs(u) ** 2
    gw = np.einsum("lma,ab->lmb", g, w_gram)             # G_l @ W-gram
    pair = np.einsum("k,ikm,jkn->ijmn", cu, h_ru, np.conj(h_ru))
    ebar_t = np.einsum("jna,ima->ijmn", gw, np.conj(g))  # entry (m,n) = Ebar_{i,j}[n,m]
    j_hat = (pair * ebar_t).transpose(0, 2, 1, 3).reshape(size, size)
    j_hat = 0.5 * (j_hat + j_hat.conj().T)

    # Linear term from the diagonals of the direct-cross blocks.
    gwh = np.einsum("lma,ka->lkm", gw, h)                # (G_l W h_k)[m]
    gwk = np.einsum("lma,ka->lkm", g, w)                 # (G_l w_k)[m]
    z_lkm = h_ru * (np.abs(u) ** 2)[None, :, None] * np.conj(gwh)
    z_lkm -= h_ru * u[None, :, None] * np.conj(gwk)
    z = np.einsum("k,lkm->lm", aq, z_lkm).reshape(size)

    if omega is None:
        omega = float(np.max(np.sum(np.abs(j_hat), axis=1)))
    return QuadraticForm(j_hat, z, float(omega), const, n_irs, n_el)


def _phase_vector(phases) -> np.ndarray:
    if isinstance(phases, PhaseConfig):
        return phases.v_hat
    v = np.asarray(phases, dtype=complex).reshape(-1)
    if v.size and np.max(np.abs(np.abs(v) - 1.0)) > UNIT_MODULUS_TOL:
        raise ValueError("phase vector must be unit modulus")
    return v


def objective(form: QuadraticForm, phases) -> float:
    """Quadratic value at a feasible point; the shift contributes exactly
    omega * size for any unit-modulus argument."""
    v = _phase_vector(phases)
    if v.size != form.size:
        raise ValueError("phase vector length does not match the form")
    if v.size == 0:
        return 0.0
    return float(np.vdot(v, form.j_hat @ v).real
                 + form.omega * form.size
                 + 2.0 * np.vdot(v, form.z).real)


def euclidean_gradient(form: QuadraticForm, v) -> np.ndarray:
    """Ambient gradient 2 (j_hat + omega I) v + 2 z; valid at any point."""
    v = np.asarray(v if not isinstance(v, PhaseConfig) else v.v_hat,
                   dtype=complex).reshape(-1)
    return 2.0 * (form.j_hat @ v + form.omega * v + form.z)


def project_tangent(base, vec) -> np.ndarray:
    """Project vec onto the tangent space at a unit-modulus point:
    vec - Re(conj(vec) o base) o base. Idempotent."""
    v = _phase_vector(base)
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    return vec - np.real(np.conj(vec) * v) * v


def retract(v_plus, n_irs: int, n_elements: int) -> PhaseConfig:
    """Entrywise normalization back onto the circles; zero entries are
    degenerate and rejected."""
    v = np.asarray(v_plus, dtype=complex).reshape(-1)
    mags = np.abs(v)
    if np.any(mags == 0.0):
        raise ValueError("cannot retract a vector with zero entries")
    return PhaseConfig(v / mags, n_irs, n_elements)


@dataclass(frozen=True)
class RmcgTrace:
    """Inner-iteration record of one conjugate-gradient run."""

    objectives: np.ndarray   # length n_iters + 1, objective before/after each step
    grad_norms: np.ndarray   # Riemannian gradient norms at the same points
    n_iters: int
    converged: bool
    line_search_failed: bool
    tangency_residual: float  # worst Re(x o conj(v)) over gradients/directions


def rmcg_solve(form: QuadraticForm, init: PhaseConfig, *,
               grad_tol: float | None = None,
               max_iters: int = 100,
               initial_step: float | None = None,
               shrink: float = 0.5,
               armijo_c: float = 1e-4,
               max_backtracks: int = 40) -> tuple[PhaseConfig, RmcgTrace]:
    """Minimize the quadratic over the circle manifold from ``init``.

    grad_tol defaults to 1e-6 * sqrt(size); initial_step to half the
    reciprocal of the shifted matrix's inf-norm. The returned objective
    sequence is non-increasing; if the line search stalls the incumbent is
    returned with the failure flagged.
    """
    if init.size != form.size:
        raise ValueError("initial point does not match the form size")
    if form.size == 0:
        empty = np.array([0.0])
        return init, RmcgTrace(empty, np.array([0.0]), 0, True, False, 0.0)
    if grad_tol is None:
        grad_tol = 1e-6 * np.sqrt(form.size)
    q_mat = form.j_hat + form.omega * np.eye(form.size)
    if initial_step is None:
        inf_norm = float(np.max(np.sum(np.abs(q_mat), axis=1)))
        initial_step = 0.5 / inf_norm if inf_norm > 0 else 1.0
    v, n_iters, obj_hist, grad_hist, tang_res, failed, converged = _kernels.rmcg_core(
        np.ascontiguousarray(q_mat),
        np.ascontiguousarray(form.z),
        np.ascontiguousarray(init.v_hat),
        float(grad_tol), int(max_iters), float(initial_step),
        float(shrink), float(armijo_c), int(max_backtracks))
    trace = RmcgTrace(objectives=obj_hist[:n_iters + 1],
                      grad_norms=grad_hist[:n_iters + 1],
                      n_iters=int(n_iters),
                      converged=bool(converged),
                      line_search_failed=bool(failed),
                      tangency_residual=float(tang_res))
    return PhaseConfig(v, form.n_irs, form.n_elements), trace
