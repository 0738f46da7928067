"""Successive convex approximation over the beamforming covariances.

Each round linearizes the concave part -(G1 + G2) of the objective at the
current iterate (both G blocks are convex, so their first-order expansions
are global underestimators, tight at the expansion point), solves the
resulting convex subproblem, and repeats until the true objective stalls.
The true objective never increases: the subproblem upper-bounds it and
touches it at the expansion point.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from . import convex_inner
from .channels import ChannelSet
from .convex_inner import InnerSolverError, SolverStatus, SubproblemSpec
from .metrics import (
    LN2,
    _log_arguments,
    effective_eve_channel,
    effective_user_channels,
    objective_value,
    power_used,
)
from .solution import HistoryRecord, RunHistory, TransmitSolution, hermitize

logger = logging.getLogger(__name__)


def _gram_matrices(u: np.ndarray, ch: ChannelSet):
    """A_k = h_k h_k^H and B = b b^H for the current phase vector."""
    h = effective_user_channels(ch, u)
    b = effective_eve_channel(ch, u)
    a_mats = np.einsum("kn,kp->knp", h, np.conj(h))
    b_mat = np.outer(b, np.conj(b))
    return a_mats, b_mat


def grad_G1(W: np.ndarray, Z: np.ndarray, u: np.ndarray, ch: ChannelSet):
    """Gradients of G1 wrt each W_r and Z; all outputs Hermitian.

    G1 = -sum_k log2(d_k) with d_k the interference-plus-noise term of user
    k, so dG1/dW_r = -sum_{k != r} A_k / (ln2 d_k) and dG1/dZ sums over all k.
    """
    a_mats, _ = _gram_matrices(u, ch)
    _, d, _, _, _ = _log_arguments(W, Z, u, ch)
    if np.any(d <= 0):
        raise ValueError("non-positive log argument in G1")
    coef = 1.0 / (LN2 * d)
    g_z = -np.einsum("k,knp->np", coef, a_mats)
    # W_r is absent from its own d_r, so add its term back
    g_w = g_z[None, :, :] + coef[:, None, None] * a_mats
    return hermitize(g_w), hermitize(g_z)


def grad_G2(W: np.ndarray, Z: np.ndarray, u: np.ndarray, ch: ChannelSet):
    """Gradients of G2 wrt each W_k and Z; per-user denominators e_k."""
    _, b_mat = _gram_matrices(u, ch)
    _, _, e, _, _ = _log_arguments(W, Z, u, ch)
    if np.any(e <= 0):
        raise ValueError("non-positive log argument in G2")
    coef = 1.0 / (LN2 * e)
    g_w = -coef[:, None, None] * b_mat[None, :, :]
    g_z = -coef.sum() * b_mat
    return hermitize(g_w), hermitize(g_z)


@dataclass
class Linearization:
    """First-order expansion of a convex block at (w_point, z_point)."""

    w_point: np.ndarray
    z_point: np.ndarray
    value: float
    grad_w: np.ndarray
    grad_z: np.ndarray

    def value_at(self, W: np.ndarray, Z: np.ndarray) -> float:
        dw = np.einsum("kij,kij->", np.conj(self.grad_w), W - self.w_point).real
        dz = np.einsum("ij,ij->", np.conj(self.grad_z), Z - self.z_point).real
        return float(self.value + dw + dz)


def linearize_g1(W, Z, u, ch: ChannelSet) -> Linearization:
    _, d, _, _, _ = _log_arguments(W, Z, u, ch)
    g_w, g_z = grad_G1(W, Z, u, ch)
    return Linearization(W.copy(), Z.copy(), -float(np.log2(d).sum()), g_w, g_z)


def linearize_g2(W, Z, u, ch: ChannelSet) -> Linearization:
    _, _, e, _, _ = _log_arguments(W, Z, u, ch)
    g_w, g_z = grad_G2(W, Z, u, ch)
    return Linearization(W.copy(), Z.copy(), -float(np.log2(e).sum()), g_w, g_z)


def build_subproblem(
    W_i: np.ndarray,
    Z_i: np.ndarray,
    u: np.ndarray,
    ch: ChannelSet,
    p_max: float,
    *,
    an_enabled: bool = True,
) -> SubproblemSpec:
    """Package the convex subproblem around the expansion point (W_i, Z_i)."""
    W_i = hermitize(np.asarray(W_i, dtype=complex))
    Z_i = hermitize(np.asarray(Z_i, dtype=complex))
    TransmitSolution(W=W_i, Z=Z_i, u=u).validate(p_max)

    lin1 = linearize_g1(W_i, Z_i, u, ch)
    lin2 = linearize_g2(W_i, Z_i, u, ch)
    lin_w = lin1.grad_w + lin2.grad_w
    lin_z = lin1.grad_z + lin2.grad_z
    affine_const = (
        lin1.value
        + lin2.value
        - np.einsum("kij,kij->", np.conj(lin_w), W_i).real
        - np.einsum("ij,ij->", np.conj(lin_z), Z_i).real
    )
    a_mats, b_mat = _gram_matrices(u, ch)
    return SubproblemSpec(
        a_mats=a_mats,
        noise_user=ch.noise_user,
        b_mat=b_mat,
        noise_eve=ch.noise_eve,
        lin_w=lin_w,
        lin_z=lin_z,
        affine_const=float(affine_const),
        p_max=p_max,
        an_enabled=an_enabled,
    )


def default_start(
    u: np.ndarray, ch: ChannelSet, p_max: float, *, an_enabled: bool = True
) -> TransmitSolution:
    """Matched-filter beamformers on half the budget, isotropic AN on the rest.

    Without AN the whole budget goes to the beamformers.
    """
    nt = ch.num_bs_antennas
    k = ch.num_users
    h = effective_user_channels(ch, u)
    an_power = p_max / 2.0 if an_enabled else 0.0
    per_user = (p_max - an_power) / k
    W = np.zeros((k, nt, nt), dtype=complex)
    for i in range(k):
        norm = np.linalg.norm(h[i])
        if norm > 0:
            w = np.sqrt(per_user) * h[i] / norm
            W[i] = np.outer(w, np.conj(w))
    Z = (an_power / nt) * np.eye(nt, dtype=complex)
    return TransmitSolution(W=W, Z=Z, u=np.asarray(u, dtype=complex))


def max_rank_residual(W: np.ndarray) -> float:
    """Largest second-to-first eigenvalue ratio across the user covariances."""
    vals = np.linalg.eigvalsh(hermitize(W))
    out = 0.0
    for k in range(W.shape[0]):
        lam = vals[k]
        if lam[-1] > 0 and lam.shape[0] > 1:
            out = max(out, max(lam[-2], 0.0) / lam[-1])
    return out


def run_sca(
    u: np.ndarray,
    ch: ChannelSet,
    p_max: float,
    start: TransmitSolution | None = None,
    *,
    tol: float = 1e-3,
    max_iters: int = 30,
    an_enabled: bool = True,
    inner_tol: float = 1e-6,
    inner_max_iters: int = 500,
    backend=None,
) -> tuple[TransmitSolution, RunHistory]:
    """Iterate linearize-and-solve until |f change| <= tol, tracking f."""
    u = np.asarray(u, dtype=complex)
    if start is None:
        start = default_start(u, ch, p_max, an_enabled=an_enabled)
    W = hermitize(np.asarray(start.W, dtype=complex))
    Z = hermitize(np.asarray(start.Z, dtype=complex))
    if not an_enabled and np.linalg.norm(Z) != 0:
        raise ValueError("an_enabled=False requires a zero AN covariance start")

    history = RunHistory()
    f_prev = objective_value(W, Z, u, ch)
    history.append(
        HistoryRecord(
            iteration=0,
            phase="sca",
            f=f_prev,
            power_used=float(np.einsum("kii->", W).real + np.trace(Z).real),
            rank_residual=max_rank_residual(W),
        )
    )
    history.status = "max_iters"
    for i in range(1, max_iters + 1):
        t0 = time.perf_counter()
        spec = build_subproblem(W, Z, u, ch, p_max, an_enabled=an_enabled)
        sol_i, report = convex_inner.solve(
            spec,
            TransmitSolution(W=W, Z=Z, u=u),
            tol=inner_tol,
            max_iters=inner_max_iters,
            backend=backend,
        )
        if report.status == SolverStatus.NUMERICAL_FAILURE:
            raise InnerSolverError(
                f"inner solver failed at SCA iteration {i} "
                f"(residual {report.residual:.3e}, objective {report.objective:.6e})"
            )
        W, Z = sol_i.W, sol_i.Z
        f_new = objective_value(W, Z, u, ch)
        history.append(
            HistoryRecord(
                iteration=i,
                phase="sca",
                f=f_new,
                power_used=power_used(sol_i),
                rank_residual=max_rank_residual(W),
                wall_time_ms=(time.perf_counter() - t0) * 1e3,
            )
        )
        if abs(f_new - f_prev) <= tol:
            history.status = "converged"
            break
        f_prev = f_new
    return TransmitSolution(W=W, Z=Z, u=u), history


def extract_rank_one(W_k: np.ndarray) -> tuple[np.ndarray, float]:
    """Principal-eigenpair beamformer and the rank-one defect lambda2/lambda1."""
    W_k = np.asarray(W_k, dtype=complex)
    vals, vecs = np.linalg.eigh(hermitize(W_k))
    trace = float(vals.sum())
    if vals.min() < -1e-9 * max(trace, 1e-30):
        raise ValueError("extract_rank_one requires a PSD matrix")
    lam1 = float(vals[-1])
    if lam1 <= 0:
        return np.zeros(W_k.shape[0], dtype=complex), 0.0
    w = np.sqrt(lam1) * vecs[:, -1]
    lam2 = float(vals[-2]) if vals.shape[0] > 1 else 0.0
    return w, max(lam2, 0.0) / lam1
