"""Diversity-guided diffusion sampling on analytic Gaussian-mixture worlds.

The library couples a DDIM sampler with gradient guidance that pushes each
new sample to raise the Vendi diversity of what was already generated,
optionally pulled back toward a small exemplar set. Synthetic scenarios
with known coverage gaps make the effect measurable.
"""

from .diffusion import (
    Condition,
    Component,
    MixtureWorld,
    NoiseSchedule,
    SampleState,
    analytic_epsilon,
    classifier_guidance_epsilon,
    classifier_log_prob,
    ddim_denoise_approx,
    ddim_step,
    derive_seeds,
    make_schedule,
    sample_unguided,
    sample_unguided_batch,
)
from .errors import ContractViolation, NumericalError
from .guidance import (
    ExemplarSet,
    GuidanceConfig,
    GuidanceLog,
    MemoryBank,
    feedback_guidance_epsilon,
    generate_feedback_sequence,
    generate_one,
    generate_sequence,
    guided_epsilon,
)
from .harness import (
    ExperimentConfig,
    RunRecord,
    config_flat,
    config_from_flat,
    config_hash,
    config_text,
    emit_reports,
    load_records,
    one_region_out_select,
    parse_config_file,
    parse_results_table,
    resolve_kernel,
    run_experiment,
    save_records,
    sweep,
)
from .kernels import (
    KernelSpec,
    LinearFeatureMap,
    build_kernel_matrix,
    kernel_gradient,
    kernel_row,
    kernel_value,
    median_bandwidth,
)
from .metrics import (
    EvalSet,
    MetricsReport,
    RegionMetrics,
    consistency_score,
    f1_score,
    improved_precision,
    improved_recall,
    knn_radii,
    manifold_membership,
    object_posteriors,
    region_report,
)
from .scenarios import (
    LabeledSamples,
    ScenarioBundle,
    ScenarioSpec,
    build_scenario,
    default_collapse_scenario,
    imbalanced_scenario,
    parse_bundle,
    pick_exemplars,
    serialize_bundle,
)
from .vendi import (
    KernelCache,
    VendiGradient,
    VendiResult,
    vendi_from_kernel,
    vendi_gradient,
    vendi_score,
)

__version__ = "0.1.0"

__all__ = [
    "Condition",
    "Component",
    "ContractViolation",
    "EvalSet",
    "ExemplarSet",
    "ExperimentConfig",
    "GuidanceConfig",
    "GuidanceLog",
    "KernelCache",
    "KernelSpec",
    "LabeledSamples",
    "LinearFeatureMap",
    "MemoryBank",
    "MetricsReport",
    "MixtureWorld",
    "NoiseSchedule",
    "NumericalError",
    "RegionMetrics",
    "RunRecord",
    "SampleState",
    "ScenarioBundle",
    "ScenarioSpec",
    "VendiGradient",
    "VendiResult",
    "analytic_epsilon",
    "build_kernel_matrix",
    "build_scenario",
    "classifier_guidance_epsilon",
    "classifier_log_prob",
    "config_flat",
    "config_from_flat",
    "config_hash",
    "config_text",
    "consistency_score",
    "ddim_denoise_approx",
    "ddim_step",
    "default_collapse_scenario",
    "derive_seeds",
    "emit_reports",
    "f1_score",
    "feedback_guidance_epsilon",
    "generate_feedback_sequence",
    "generate_one",
    "generate_sequence",
    "guided_epsilon",
    "imbalanced_scenario",
    "improved_precision",
    "improved_recall",
    "kernel_gradient",
    "kernel_row",
    "kernel_value",
    "knn_radii",
    "load_records",
    "make_schedule",
    "manifold_membership",
    "median_bandwidth",
    "object_posteriors",
    "one_region_out_select",
    "parse_bundle",
    "parse_config_file",
    "parse_results_table",
    "resolve_kernel",
    "pick_exemplars",
    "region_report",
    "run_experiment",
    "sample_unguided",
    "sample_unguided_batch",
    "save_records",
    "serialize_bundle",
    "sweep",
    "vendi_from_kernel",
    "vendi_gradient",
    "vendi_score",
]
