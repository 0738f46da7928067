"""Scenario configuration and unit conversion helpers.

All powers inside the library are in watts; dBm conversion happens at the
CLI boundary.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass


def derive_seed(*parts) -> int:
    """Stable 64-bit sub-seed from a label and indices (never Python's hash)."""
    digest = hashlib.sha256(repr(tuple(parts)).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError(f"watts must be positive, got {watts}")
    import math

    return 10.0 * math.log10(watts * 1000.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Geometry, dimensions, powers and solver tolerances for one scenario.

    Defaults: 40 dBm transmit power budget, -110 dBm noise at users and
    eavesdropper, 1e-3 convergence tolerances, 500 m cell with the blocked
    sector served by an IRS 50 m from the BS.
    """

    num_users: int = 3
    num_bs_antennas: int = 6
    num_irs_elements: int = 6
    p_max: float = 10.0            # watts (40 dBm)
    noise_user: float = 1e-14      # watts (-110 dBm)
    noise_eve: float = 1e-14       # watts (-110 dBm)
    cell_radius: float = 500.0     # m
    r_be: float = 200.0            # BS-eavesdropper distance, m
    r_re: float = 250.0            # IRS-eavesdropper distance, m
    bs_irs_distance: float = 50.0  # m
    pl0_db: float = 30.0           # reference loss at 1 m, dB
    pl_exp_bs_irs: float = 2.2
    pl_exp_irs_user: float = 2.8
    pl_exp_irs_eve: float = 2.8
    rng_seed: int = 0
    tol_manifold: float = 1e-3     # gradient-norm tolerance of the phase optimizer
    tol_outer: float = 1e-3        # |f change| tolerance of the alternating loop
    max_outer_iters: int = 20
    sca_max_iters: int = 30
    normalize_noise: bool = True

    def __post_init__(self) -> None:
        if self.num_users < 1:
            raise ValueError(f"num_users must be >= 1, got {self.num_users}")
        if self.num_bs_antennas <= 1:
            raise ValueError(
                f"num_bs_antennas must be > 1, got {self.num_bs_antennas}"
            )
        if self.num_irs_elements < 1:
            raise ValueError(
                f"num_irs_elements must be >= 1, got {self.num_irs_elements}"
            )
        if self.p_max <= 0:
            raise ValueError(f"p_max must be positive, got {self.p_max}")
        if self.noise_user <= 0 or self.noise_eve <= 0:
            raise ValueError("noise powers must be positive")
        for name in ("cell_radius", "r_be", "r_re", "bs_irs_distance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_outer_iters < 1 or self.sca_max_iters < 1:
            raise ValueError("iteration caps must be >= 1")
        if not (0 <= self.rng_seed < 2 ** 64):
            raise ValueError("rng_seed must fit in an unsigned 64-bit integer")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("scenario config JSON must be an object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())
