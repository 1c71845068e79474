import os
import logging
from dataclasses import dataclass, fields, replace, asdict
from typing import Any, Dict

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

ENV_PREFIX = "NUGAP_"


@dataclass(frozen=True)
class NumericConfig:
    """Every tolerance and budget used by the numerics.

    A single record is threaded through each public operation so that a run
    is reproducible from the record alone; result documents embed it.

    Attributes:
        tol_root: roots closer than this are identified (gcd, lcm, matching)
        tol_eval: relative residual allowed at a computed polynomial root
        tol_bezout: coefficient sup-norm bound on x*a + y*b - 1
        tol_div: residual allowed when dividing out a gcd
        tol_rank: singular value threshold for rank decisions
        dist_circle_min: minimum distance of a plant pole from the unit circle
        tol_normalization: bound on G*G - I for normalized factors
        tol_graph: bound on Gt*G for graph symbols
        tol_specfac: relative residual of the scalar spectral factor
        tol_specfac_mat: residual of the matrix spectral factor
        tol_bezout_mat: residual of the factor-level Bezout certificate
        tol_invertible: modulus floor for circle-invertibility
        tol_norm_rel: relative stagnation threshold of the norm refinement
        tol_poisson: truncation tolerance for the harmonic extension
        tol_consistency: slack allowed before results are inconsistent
        grid_size: base circle grid (power of two)
        validation_grid: grid used for factorization residuals
        phi_grid: grid used for positivity checks before spectral factoring
        winding_budget: maximum samples used to certify a winding number
        bauer_min_blocks: first block-Toeplitz section size
        bauer_max_blocks: last block-Toeplitz section size
        max_dim: largest allowed plant row/column count
        max_entry_degree: largest allowed entry numerator/denominator degree
        norm_peaks: number of grid maxima refined by the norm search
    """

    tol_root: float = 1e-7
    tol_eval: float = 1e-8
    tol_bezout: float = 1e-8
    tol_div: float = 1e-8
    tol_rank: float = 1e-7
    dist_circle_min: float = 1e-6
    tol_normalization: float = 1e-8
    tol_graph: float = 1e-7
    tol_specfac: float = 1e-9
    tol_specfac_mat: float = 1e-7
    tol_bezout_mat: float = 1e-6
    tol_invertible: float = 1e-6
    tol_norm_rel: float = 1e-9
    tol_poisson: float = 1e-10
    tol_consistency: float = 1e-6
    grid_size: int = 4096
    validation_grid: int = 512
    phi_grid: int = 1024
    winding_budget: int = 2**20
    bauer_min_blocks: int = 64
    bauer_max_blocks: int = 4096
    max_dim: int = 8
    max_entry_degree: int = 12
    norm_peaks: int = 8

    def __post_init__(self):
        for size_field in ("grid_size", "validation_grid", "phi_grid"):
            size = getattr(self, size_field)
            if size < 64 or size & (size - 1):
                raise ValueError(f"{size_field} must be a power of two >= 64, got {size}")

    @classmethod
    def from_env(cls) -> "NumericConfig":
        """Build a config from NUGAP_<FIELD> environment overrides."""
        overrides: Dict[str, Any] = {}
        for f in fields(cls):
            raw = os.getenv(ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            overrides[f.name] = int(raw) if f.type in (int, "int") else float(raw)
            logger.debug(f"Config override from environment: {f.name}={raw}")
        return cls(**overrides)

    def with_overrides(self, **overrides: Any) -> "NumericConfig":
        """Return a copy with the non-None overrides applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


DEFAULT_CONFIG = NumericConfig()
