"""
Solver knobs shared by the SDR feasibility engine, the randomization step
and the alternating-optimization driver. Loaded from the [solver] section
of the config file (see config.py); the defaults below apply otherwise.
"""

import math
from dataclasses import asdict, dataclass

from errors import ValidationError


@dataclass(frozen=True)
class AOConfig:
    bisection_eps: float = 1e-4          # bps/Hz
    max_ao_iters: int = 30
    ao_rate_tol: float = 1e-4            # bps/Hz
    randomization_count: int = 200
    bm_rank: int | None = None           # None -> ceil(sqrt(M+1)) + 1
    bm_max_iters: int = 2000
    bm_step: float = 1.0
    bm_step_shrink: float = 0.5
    bm_tau_start: float = 0.05
    bm_tau_min: float = 1e-5
    bm_tau_decay: float = 0.5
    bm_stall_tol: float = 1e-10
    bm_init_noise: float = 0.05
    feasibility_slack_tol: float = 1e-7
    cholesky_shift: float = 1e-10

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value is None:
                continue
            if value <= 0:
                raise ValidationError(f"solver.{name} must be > 0, got {value}")
        for name in ("bm_step_shrink", "bm_tau_decay"):
            if getattr(self, name) >= 1:
                raise ValidationError(f"solver.{name} must lie in (0, 1), got {getattr(self, name)}")
        for name in ("max_ao_iters", "randomization_count", "bm_max_iters"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ValidationError(f"solver.{name} must be an integer, got {getattr(self, name)}")

    def rank_for(self, m: int) -> int:
        """Factorization rank for an (M+1)-order lifted problem."""
        n = m + 1
        rank = self.bm_rank if self.bm_rank is not None else math.ceil(math.sqrt(n)) + 1
        return max(1, min(int(rank), n))
