"""Containers shared by the solvers: candidate solutions and run histories."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PSD_EIG_TOL = 1e-9        # relative to trace, constraint C3/C4 slack
POWER_REL_TOL = 1e-9      # constraint C1 slack
UNIT_MODULUS_TOL = 1e-12  # constraint C2 slack


def hermitize(a: np.ndarray) -> np.ndarray:
    """Symmetrize (A + A^H)/2 along the last two axes to kill round-off skew."""
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


@dataclass
class TransmitSolution:
    """Beamforming covariances W_k, AN covariance Z and IRS phase vector u.

    W : (K, N_T, N_T) Hermitian PSD, one per user
    Z : (N_T, N_T) Hermitian PSD
    u : (M,) unit-modulus entries, u_m = exp(-1j * phi_m)
    w : optional (K, N_T) rank-one beamformers extracted from W
    """

    W: np.ndarray
    Z: np.ndarray
    u: np.ndarray
    w: np.ndarray | None = None

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=complex)
        self.Z = np.asarray(self.Z, dtype=complex)
        self.u = np.asarray(self.u, dtype=complex).ravel()
        if self.W.ndim != 3 or self.W.shape[1] != self.W.shape[2]:
            raise ValueError(f"W must be (K, N, N), got {self.W.shape}")
        if self.Z.shape != self.W.shape[1:]:
            raise ValueError(f"Z must be (N, N) matching W, got {self.Z.shape}")
        if self.w is not None:
            self.w = np.asarray(self.w, dtype=complex)
            if self.w.shape != self.W.shape[:2]:
                raise ValueError(f"w must be (K, N), got {self.w.shape}")

    @property
    def num_users(self) -> int:
        return self.W.shape[0]

    def copy(self) -> "TransmitSolution":
        return TransmitSolution(
            W=self.W.copy(),
            Z=self.Z.copy(),
            u=self.u.copy(),
            w=None if self.w is None else self.w.copy(),
        )

    def validate(self, p_max: float) -> None:
        """Raise ValueError if any constraint is violated beyond tolerance."""
        for name, mats in (("W", self.W), ("Z", self.Z[None])):
            eigs = np.linalg.eigvalsh(hermitize(mats))
            traces = np.einsum("kii->k", mats).real
            floor = -PSD_EIG_TOL * np.maximum(traces, 1.0)
            if np.any(eigs.min(axis=1) < floor):
                raise ValueError(f"{name} is not PSD within tolerance")
        power = float(np.einsum("kii->", self.W).real + np.trace(self.Z).real)
        if power > p_max * (1.0 + POWER_REL_TOL) + POWER_REL_TOL:
            raise ValueError(f"power {power} exceeds budget {p_max}")
        if np.max(np.abs(np.abs(self.u) - 1.0)) > UNIT_MODULUS_TOL:
            raise ValueError("u has entries off the unit circle")
        if self.w is not None:
            for k in range(self.num_users):
                resid = np.linalg.norm(self.W[k] - np.outer(self.w[k], np.conj(self.w[k])))
                tr = max(np.trace(self.W[k]).real, 0.0)
                if resid > 1e-6 * max(tr, 1e-30) and tr > 0:
                    raise ValueError(f"w[{k}] inconsistent with W[{k}]")


@dataclass
class HistoryRecord:
    iteration: int
    phase: str                      # "init" | "sca" | "manifold"
    f: float
    power_used: float
    sum_secrecy: float | None = None
    rank_residual: float | None = None
    wall_time_ms: float | None = None


@dataclass
class RunHistory:
    """Ordered objective trace used for monotonicity auditing."""

    records: list[HistoryRecord] = field(default_factory=list)
    status: str = "converged"

    def append(self, record: HistoryRecord) -> None:
        self.records.append(record)

    def f_trace(self) -> np.ndarray:
        return np.array([r.f for r in self.records], dtype=float)

    def is_monotone(self, slack: float = 1e-6) -> bool:
        f = self.f_trace()
        return bool(np.all(np.diff(f) <= slack))

    def to_rows(self) -> list[dict]:
        return [
            {
                "iteration": r.iteration,
                "phase": r.phase,
                "f": r.f,
                "power_used": r.power_used,
                "sum_secrecy": r.sum_secrecy,
                "rank_residual": r.rank_residual,
                "wall_time_ms": r.wall_time_ms,
            }
            for r in self.records
        ]
