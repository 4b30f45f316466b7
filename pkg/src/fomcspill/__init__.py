"""High-frequency monetary/information shock decomposition and spillover estimation."""

__version__ = "0.1.0"

from .errors import (
    CollinearSurprisesError,
    DegenerateInputError,
    IdentificationFailureError,
    InputError,
    NumericalError,
)
from .hfdecomp import (
    PoorMansShocks,
    ShockDecomposition,
    SurprisePair,
    SurprisePanel,
    admissible_angle_interval,
    angle_from_variance_ratio,
    decompose_at,
    decompose_at_angle,
    pca_composite,
    poor_mans_decompose,
    rotation_grid,
)
from .paneldata import (
    PanelDataset,
    VariableSpec,
    align_shocks,
    load_panel,
    subset,
)
from .pbvar import (
    BvarConfig,
    IrfResult,
    MeanGroupResult,
    PosteriorSample,
    PriorConfig,
    RotationBandResult,
    build_design,
    fit_posterior,
    mean_group,
    rotation_band_irf,
    structural_irf,
)
from .localproj import (
    LpConfig,
    LpResult,
    lp_estimate,
    sbic_lag_select,
    twoway_cluster_cov,
)
from .dgpsim import DgpSpec, SimulationResult, simulate, true_irf

__all__ = [
    "BvarConfig",
    "CollinearSurprisesError",
    "DegenerateInputError",
    "DgpSpec",
    "IdentificationFailureError",
    "InputError",
    "IrfResult",
    "LpConfig",
    "LpResult",
    "MeanGroupResult",
    "NumericalError",
    "PanelDataset",
    "PoorMansShocks",
    "PosteriorSample",
    "PriorConfig",
    "RotationBandResult",
    "ShockDecomposition",
    "SimulationResult",
    "SurprisePair",
    "SurprisePanel",
    "VariableSpec",
    "admissible_angle_interval",
    "align_shocks",
    "angle_from_variance_ratio",
    "build_design",
    "decompose_at",
    "decompose_at_angle",
    "fit_posterior",
    "load_panel",
    "lp_estimate",
    "mean_group",
    "pca_composite",
    "poor_mans_decompose",
    "rotation_band_irf",
    "rotation_grid",
    "sbic_lag_select",
    "simulate",
    "structural_irf",
    "subset",
    "true_irf",
    "twoway_cluster_cov",
    "__version__",
]
