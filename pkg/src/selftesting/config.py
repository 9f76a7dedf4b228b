"""Centralised numerical tolerances."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    rel_tol: float = 1e-9
    hermitian_tol: float = 1e-10
    norm_tol: float = 1e-12
    psd_tol: float = 1e-10
    projective_tol: float = 1e-9
    rank_tol: float = 1e-10
    jacobi_tol: float = 1e-12
    jacobi_max_sweeps: int = 100
    prune_tol: float = 1e-15
    kraus_tol: float = 1e-10
    choi_clamp: float = 1e-9
    # eps = w_q - w(S) is a difference of O(1) sums; below this it is rounding noise
    eps_floor: float = 1e-13

    def with_overrides(self, **kwargs) -> "Config":
        for key, value in kwargs.items():
            if isinstance(value, float) and value <= 0:
                raise ValueError(f"tolerance {key} must be positive")
        return replace(self, **kwargs)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


DEFAULT = Config()
