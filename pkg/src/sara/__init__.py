"""Minimal angular sampling and exact reconstruction of ULA/URA angular responses."""

from .detection import DetectionReport, DetectorConfig, Peak, cfar_threshold, detect, sidelobe_level
from .errors import (
    ConfigError,
    DimensionError,
    GridError,
    MetricError,
    NonPhysicalLad,
    PlanError,
    SaraError,
)
from .geometry import (
    UlaGeometry,
    UraGeometry,
    aal_positions,
    angle_from_lad,
    element_positions,
    lad_from_angle,
    sum_coarray,
    wavelength_from_frequency,
    wrap_lad,
)
from .metrics import crlb, lad_rmse, normalized_rmse_2d, peak_rmse, rmse
from .reconstruction import (
    LadGrid,
    LadResponse,
    LadResponse2D,
    cubic_baseline,
    cubic_baseline_2d,
    direct_interpolation,
    reconstruct,
    reconstruct_2d,
    reconstruct_ar,
    reconstruct_lr,
)
from .sampling import (
    SamplingPlan,
    SamplingPlan2D,
    angle_uniform_plan,
    extended_plan,
    lad_uniform_plan,
    reduced_plan,
    ura_plan,
)
from .signal_model import (
    MONOSTATIC,
    RX_ONLY,
    ScanRecord,
    ScanRecord2D,
    Scatterer,
    Scene,
    beamform,
    dirichlet,
    lad_response,
    planar_wave,
    scan_scene,
    scan_scene_2d,
)
from .simulation import ScenarioConfig

__version__ = "0.1.0"
