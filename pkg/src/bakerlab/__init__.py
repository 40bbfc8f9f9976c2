"""bakerlab: certified numerics for translation-plus-pole-field maps."""

from .classify import (
    OneStepReport,
    SeedEvidence,
    TypeVerdict,
    Verdict,
    classify,
    hyperbolic_one_step_test,
)
from .config import ExperimentConfig
from .errors import (
    AmbiguousWindingError,
    BakerlabError,
    CertificationError,
    ConfigError,
    PoleProximityError,
    RefinementLimitError,
    UncertifiedPointError,
)
from .hypmetric import (
    MetricBound,
    TWO_PUNCTURE_CONSTANT,
    density_upper,
    hyp_distance_lower_two_punctures,
    hyp_distance_upper,
    hyp_step_upper_series,
    log_upper_bound,
)
from .loops import (
    LoopPath,
    PersistenceReport,
    WindingReport,
    contractibility,
    persistence_check,
    push_forward,
    refine_loop,
    winding,
)
from .mapfamily import (
    BoundInterval,
    MapModel,
    PoleCase,
    build_map,
    coefficient,
    coefficient_budget,
    coeff_normalizer,
    dist_to_boundary_interval,
    dist_to_poles,
    eval_e,
    eval_f,
    nearest_pole,
    poles_in_box,
    truncation_radius,
)
from .orbits import (
    AbelValue,
    DriftReport,
    Orbit,
    abel,
    drift_certificate,
    iterate,
    iterate_batch,
    ratio_enclosure,
    step_ratio_series,
)
from .render import Viewport, ppm_bytes, render_region, write_ppm

__version__ = "0.1.0"
