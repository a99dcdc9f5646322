"""Torsion detection in simplicial homology by comparing dimensions over R and F_p."""

from __future__ import annotations

from .bounds import (
    NormMoments,
    berry_esseen_bound,
    bound_sweep,
    cantelli_bound,
    monte_carlo_norm_prob,
    norm_sq_moments,
)
from .complex_core import (
    SPACES,
    SimplicialComplex,
    boundary_matrix,
    euler_characteristic,
    from_facets,
    generate,
    incidence_matrix,
    laplacian,
    parse_complex,
    serialize,
)
from .detector import (
    TorsionReport,
    detect_torsion,
    dim_homology,
    dim_homology_laplacian,
    scan_orders,
    verify_uct,
)
from .emulator import EmulatorConfig, PipelineTrace, emulate_detection
from .errors import TorsionKitError
from .ff_linalg import (
    FpMatrix,
    FpScalar,
    homology_over_Z,
    mod_reduce,
    rank_exact_rational,
    rank_ff,
    smith_normal_form,
)
from .rank_sketch import ChebParams, RankEstimate, SketchParams, sketch_rank_ff, stochastic_rank_real
from .spectral import condition_number, spectral_extent

__version__ = "0.1.0"
