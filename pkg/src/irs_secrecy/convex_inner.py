"""Projected-gradient solver for the relaxed convex beamforming subproblem.

The subproblem minimizes  F1 + F2 - (affine underestimator of G1 + G2) over
PSD matrices {W_k}, Z under the total-power budget, the rank constraint
having been dropped. The -log2 terms act as implicit barriers (their
arguments stay >= the noise constants on the feasible set), so projected
gradient steps with Armijo backtracking converge without any further cone
machinery.

The constraint set is spectral, which makes the exact Euclidean projection
cheap (eigenvalue clip plus a water-filling shift when the power budget
binds); :func:`solve` uses it so that the gradient mapping vanishes exactly
at KKT points. The cheaper clip-then-rescale surrogate remains available as
:func:`feasibility_map` for mapping arbitrary candidates into the feasible
set.

An external conic solver can be plugged in through the ``backend`` hook of
:func:`solve`; the callable receives ``(spec, start)`` and must return a
feasible ``(TransmitSolution, SolverReport)`` pair whose objective does not
exceed the start's. The result is re-validated here.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .solution import (
    POWER_REL_TOL,
    PSD_EIG_TOL,
    TransmitSolution,
    hermitize,
)

LN2 = np.log(2.0)
ARMIJO_C = 1e-4
MAX_BACKTRACKS = 60
LOG_GUARD = 1e-12  # reject log arguments below guard * noise constant


class SolverStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    NUMERICAL_FAILURE = "numerical_failure"


class InnerSolverError(RuntimeError):
    """Raised when a numerical failure has to propagate with context."""


@dataclass
class SubproblemSpec:
    """Data of one convexified subproblem.

    a_mats : (K, N, N) Gram matrices A_k = h_k h_k^H of the user links
    b_mat  : (N, N) Gram matrix of the eavesdropper link
    lin_w, lin_z : gradients of the subtracted affine underestimator
    affine_const : its value at W = 0, Z = 0
    an_enabled   : when False, Z is pinned to the zero matrix
    """

    a_mats: np.ndarray
    noise_user: float
    b_mat: np.ndarray
    noise_eve: float
    lin_w: np.ndarray
    lin_z: np.ndarray
    affine_const: float
    p_max: float
    an_enabled: bool = True

    def __post_init__(self):
        self.a_mats = hermitize(np.asarray(self.a_mats, dtype=complex))
        self.b_mat = hermitize(np.asarray(self.b_mat, dtype=complex))
        self.lin_w = hermitize(np.asarray(self.lin_w, dtype=complex))
        self.lin_z = hermitize(np.asarray(self.lin_z, dtype=complex))
        if self.noise_user <= 0 or self.noise_eve <= 0:
            raise ValueError("noise constants must be positive")
        if self.p_max < 0:
            raise ValueError("p_max must be non-negative")

    @property
    def num_users(self) -> int:
        return self.a_mats.shape[0]


@dataclass
class SolverReport:
    objective: float
    iterations: int
    final_step_norm: float
    residual: float
    power_slack: float
    min_eigenvalue: float
    status: SolverStatus


def subproblem_objective(spec: SubproblemSpec, W: np.ndarray, Z: np.ndarray) -> float:
    """F1 + F2 minus the affine part; +inf outside the log domain guard."""
    tw = np.einsum("kij,rji->kr", spec.a_mats, W).real
    tz = np.einsum("kij,ji->k", spec.a_mats, Z).real
    n = tw.sum(axis=1) + tz + spec.noise_user
    m = np.einsum("ij,ji->", spec.b_mat, Z).real + spec.noise_eve
    if np.any(n <= LOG_GUARD * spec.noise_user) or m <= LOG_GUARD * spec.noise_eve:
        return np.inf
    k = spec.num_users
    lin = (
        np.einsum("kij,kij->", np.conj(spec.lin_w), W).real
        + np.einsum("ij,ij->", np.conj(spec.lin_z), Z).real
    )
    return float(-np.log2(n).sum() - k * np.log2(m) - (spec.affine_const + lin))


def subproblem_gradient(spec: SubproblemSpec, W: np.ndarray, Z: np.ndarray):
    """Hermitian gradients (dW, dZ) of the subproblem objective."""
    tw = np.einsum("kij,rji->kr", spec.a_mats, W).real
    tz = np.einsum("kij,ji->k", spec.a_mats, Z).real
    n = tw.sum(axis=1) + tz + spec.noise_user
    m = np.einsum("ij,ji->", spec.b_mat, Z).real + spec.noise_eve
    coef = 1.0 / (LN2 * n)
    s_a = np.einsum("k,kij->ij", coef, spec.a_mats)
    g_w = -s_a[None, :, :] - spec.lin_w
    g_z = -s_a - (spec.num_users / (LN2 * m)) * spec.b_mat - spec.lin_z
    return g_w, g_z


def _psd_clip(mats: np.ndarray) -> np.ndarray:
    """Project a stack of Hermitian matrices onto the PSD cone."""
    vals, vecs = np.linalg.eigh(hermitize(mats))
    vals = np.maximum(vals, 0.0)
    return np.einsum("...ij,...j,...kj->...ik", vecs, vals, np.conj(vecs))


def _project(W: np.ndarray, Z: np.ndarray, p_max: float, an_enabled: bool):
    """Surrogate map of :func:`feasibility_map`: PSD clip then radial rescale."""
    W = _psd_clip(W)
    Z = _psd_clip(Z[None])[0] if an_enabled else np.zeros_like(Z)
    power = float(np.einsum("kii->", W).real + np.trace(Z).real)
    if power > p_max:
        scale = 0.0 if power == 0.0 else p_max / power
        W = W * scale
        Z = Z * scale
    return W, Z


def _project_exact(W: np.ndarray, Z: np.ndarray, p_max: float, an_enabled: bool):
    """Exact Euclidean projection onto {W_k, Z PSD, total trace <= p_max}.

    The constraint is spectral, so the projection diagonalizes each block and
    projects the concatenated eigenvalue vector onto the simplex-with-budget
    {x >= 0, sum(x) <= p_max}: clip at zero, and if the clipped sum still
    exceeds the budget, shift all eigenvalues down by the water-filling level
    before clipping. Unlike the radial surrogate this map fixes every KKT
    point, which keeps projected-gradient steps descent directions.
    """
    stack = np.concatenate([W, Z[None]], axis=0) if an_enabled else W
    vals, vecs = np.linalg.eigh(hermitize(stack))
    clipped = np.maximum(vals, 0.0)
    if clipped.sum() > p_max:
        flat = np.sort(vals.ravel())[::-1]
        cumsum = np.cumsum(flat)
        idx = np.arange(1, flat.size + 1)
        level = (cumsum - p_max) / idx
        active = np.nonzero(flat - level > 0)[0]
        lam = level[active[-1]] if active.size else cumsum[-1] - p_max
        clipped = np.maximum(vals - lam, 0.0)
    out = np.einsum("kij,kj,klj->kil", vecs, clipped, np.conj(vecs))
    if an_enabled:
        return out[:-1], out[-1]
    return out, np.zeros_like(Z)


def feasibility_map(candidate: TransmitSolution, p_max: float) -> TransmitSolution:
    """Eigenvalue-clip to the PSD cone, then radially rescale into the budget.

    Idempotent on feasible points; the output always satisfies the power and
    PSD constraints.
    """
    if p_max < 0:
        raise ValueError("p_max must be non-negative")
    W, Z = _project(
        hermitize(np.asarray(candidate.W, dtype=complex)),
        hermitize(np.asarray(candidate.Z, dtype=complex)),
        p_max,
        an_enabled=True,
    )
    return TransmitSolution(W=W, Z=Z, u=candidate.u, w=None)


def _check_start_feasible(spec: SubproblemSpec, W: np.ndarray, Z: np.ndarray) -> None:
    for name, mats in (("W", W), ("Z", Z[None])):
        eigs = np.linalg.eigvalsh(hermitize(mats))
        traces = np.einsum("kii->k", mats).real
        if np.any(eigs.min(axis=1) < -PSD_EIG_TOL * np.maximum(traces, 1.0)):
            raise ValueError(f"infeasible start: {name} not PSD within tolerance")
    power = float(np.einsum("kii->", W).real + np.trace(Z).real)
    if power > spec.p_max * (1.0 + POWER_REL_TOL) + POWER_REL_TOL:
        raise ValueError(
            f"infeasible start: power {power} exceeds budget {spec.p_max}"
        )


def solve(
    spec: SubproblemSpec,
    start: TransmitSolution,
    *,
    tol: float = 1e-6,
    max_iters: int = 500,
    backend: Optional[Callable] = None,
) -> tuple[TransmitSolution, SolverReport]:
    """Minimize the subproblem from a feasible start; never ascends.

    Stops when the unit-step gradient-mapping norm ||X - P(X - grad)||
    drops below ``tol * (1 + |objective|)``. With ``backend`` set, delegates
    to the external solver and re-validates its output against the same
    feasibility and non-ascent contract.
    """
    W0 = hermitize(np.asarray(start.W, dtype=complex))
    Z0 = hermitize(np.asarray(start.Z, dtype=complex))
    _check_start_feasible(spec, W0, Z0)

    if backend is not None:
        sol, report = backend(spec, start)
        sol.validate(spec.p_max)
        q_start = subproblem_objective(spec, W0, Z0)
        q_back = subproblem_objective(spec, sol.W, sol.Z)
        if q_back > q_start + 1e-9 * (1.0 + abs(q_start)):
            raise InnerSolverError(
                f"backend ascended: {q_back} > start objective {q_start}"
            )
        return sol, report

    W, Z = _project_exact(W0, Z0, spec.p_max, spec.an_enabled)
    q = subproblem_objective(spec, W, Z)
    delta = 1.0
    step_norm = 0.0
    residual = np.inf
    status = SolverStatus.MAX_ITERS
    iterations = 0
    check_residual = True  # evaluate the reference residual on entry

    def _unit_step_residual(g_w, g_z):
        # norm of the gradient mapping at unit reference step; zero exactly
        # at KKT points of the subproblem
        Wr, Zr = _project_exact(W - g_w, Z - g_z, spec.p_max, spec.an_enabled)
        return float(
            np.sqrt(np.linalg.norm(Wr - W) ** 2 + np.linalg.norm(Zr - Z) ** 2)
        )

    for iterations in range(1, max_iters + 1):
        g_w, g_z = subproblem_gradient(spec, W, Z)
        if check_residual:
            residual = _unit_step_residual(g_w, g_z)
            if residual <= tol * (1.0 + abs(q)):
                status = SolverStatus.CONVERGED
                break
        x_norm = float(np.sqrt(np.linalg.norm(W) ** 2 + np.linalg.norm(Z) ** 2))
        accepted = False
        stalled = False
        for _ in range(MAX_BACKTRACKS):
            Wt, Zt = _project_exact(
                W - delta * g_w, Z - delta * g_z, spec.p_max, spec.an_enabled
            )
            step_sq = float(
                np.linalg.norm(Wt - W) ** 2 + np.linalg.norm(Zt - Z) ** 2
            )
            step = np.sqrt(step_sq)
            if step <= 1e-13 * (1.0 + x_norm):
                # below eigendecomposition noise: the map cannot move the point
                residual = step / delta
                status = SolverStatus.CONVERGED
                stalled = True
                break
            qt = subproblem_objective(spec, Wt, Zt)
            if qt <= q - (ARMIJO_C / delta) * step_sq:
                accepted = True
                break
            delta *= 0.5
        if stalled:
            break
        if not accepted:
            # distinguish float-level stationarity from a genuine failure
            residual = _unit_step_residual(g_w, g_z)
            status = (
                SolverStatus.CONVERGED
                if residual <= 10.0 * tol * (1.0 + abs(q))
                else SolverStatus.NUMERICAL_FAILURE
            )
            break
        step_norm = float(np.sqrt(step_sq))
        W, Z, q = Wt, Zt, qt
        delta = min(delta * 2.0, 1e8)
        # a small accepted displacement is only a hint: confirm with the
        # unit-step residual next round (a huge step size can fake smallness)
        check_residual = step_norm / delta <= tol * (1.0 + abs(q))
        residual = step_norm / delta

    power = float(np.einsum("kii->", W).real + np.trace(Z).real)
    min_eig = float(
        min(
            np.linalg.eigvalsh(hermitize(W)).min(),
            np.linalg.eigvalsh(hermitize(Z)).min(),
        )
    )
    report = SolverReport(
        objective=q,
        iterations=iterations,
        final_step_norm=step_norm,
        residual=residual,
        power_slack=spec.p_max - power,
        min_eigenvalue=min_eig,
        status=status,
    )
    return TransmitSolution(W=W, Z=Z, u=start.u, w=None), report
