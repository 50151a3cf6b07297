"""Run configuration shared by the pipeline and the command line."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

from .contour import CUSP_RESIDUAL_TOL, TraceOptions
from .morse import EIGEN_ZERO
from .oracle import GridSpec


@dataclass(frozen=True)
class RunConfig:
    root_width: float = 1e-12
    cusp_residual: float = CUSP_RESIDUAL_TOL
    eigen_zero: float = EIGEN_ZERO
    trace: TraceOptions = field(default_factory=TraceOptions)
    snap: float = 1e-9
    grid: GridSpec = field(default_factory=GridSpec)
    oracle: bool = True
    oracle_extra: int = 3  # extra samples per chamber for the constancy check
    seed: int = 0
    out: Optional[str] = None
    svg: bool = False

    def __post_init__(self):
        for name in ("root_width", "cusp_residual", "eigen_zero", "snap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.trace.max_turn < 90:
            raise ValueError("max_turn must lie in (0, 90) degrees")

    def to_dict(self) -> dict:
        d = asdict(self)
        # output locations do not affect results; keep reports path independent
        del d["out"], d["svg"]
        if d["trace"]["box"] is not None:
            d["trace"]["box"] = list(d["trace"]["box"])
        return d
