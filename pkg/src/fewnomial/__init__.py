"""Connected components of positive zero sets of near-circuit exponential sums."""

from .config import RunConfig
from .counter import AnalysisReport, PipelineError, analyze
from .support import CanonicalSystem, SignedSupport, normalize, parse_instance

__all__ = [
    "AnalysisReport",
    "CanonicalSystem",
    "PipelineError",
    "RunConfig",
    "SignedSupport",
    "analyze",
    "normalize",
    "parse_instance",
]
__version__ = "0.1.0"
