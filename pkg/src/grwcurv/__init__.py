"""Pointwise curvature conditions on warped products with a one-dimensional base."""

__version__ = "0.1.0"

from .chartgeo import (  # noqa: E402
    CurvatureSnapshot,
    MetricField,
    product_of_spheres,
    snapshot_from_field,
    space_form_snapshot,
    synthetic_snapshot,
)
from .conditionlab import (  # noqa: E402
    FitResult,
    classify_sets,
    evaluate,
    fit_condition,
    ge_residual,
    quasi_einstein,
    roter_fit,
)
from .gaussfiber import HypersurfaceData, gauss_snapshot, jordan3_fixture  # noqa: E402
from .tensorkit import DenseTensor, kulkarni_nomizu, tachibana  # noqa: E402
from .warpedlab import WarpedSpec, warped_blocks, warped_snapshot  # noqa: E402

__all__ = [
    "CurvatureSnapshot", "DenseTensor", "FitResult", "HypersurfaceData", "MetricField",
    "WarpedSpec", "classify_sets", "evaluate", "fit_condition", "gauss_snapshot",
    "ge_residual", "jordan3_fixture", "kulkarni_nomizu", "product_of_spheres",
    "quasi_einstein", "roter_fit", "snapshot_from_field", "space_form_snapshot",
    "synthetic_snapshot", "tachibana", "warped_blocks", "warped_snapshot",
]
