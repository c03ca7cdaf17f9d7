"""whisksim: spring-whisker vibration simulation and terrain classification."""

from .beam import (
    CANTILEVER_MODE_CONSTANTS,
    BeamSpec,
    Excitation,
    SpringSpec,
    SweepSurface,
    TimeSeries,
    displacement,
    displacement_series,
    modal_angular_frequency,
    modal_sweep,
    spring_to_beam,
    steady_state_offset,
    transient_time_constant,
)
from .config import ExperimentConfig, SweepConfig, load_config
from .errors import (
    ConfigError,
    DegenerateWindowError,
    PhysicsError,
    TrainingDivergedError,
    WhisksimError,
)
from .mlp import (
    ConfusionMatrix,
    MlpArchitecture,
    MlpModel,
    TrainConfig,
    evaluate,
    forward,
    gradient_check,
    gradients,
    init,
    loss,
    model_from_json,
    model_to_json,
    train,
)
from .pipeline import (
    FEATURE_WIDTH,
    Dataset,
    FeatureVector,
    Spectrum,
    build_dataset,
    dominant_frequency,
    fft_magnitude,
    read_dataset_csv,
    split,
    standardize,
    window,
    write_dataset_csv,
)
from .terrain import (
    RobotRun,
    SpectralComponent,
    SpectralProfile,
    TerrainClass,
    default_profiles,
    load_profiles,
    profiles_from_json,
    profiles_to_json,
    save_profiles,
    smoke_profiles,
    strip_randomness,
    synthesize_run,
    temporal_components,
)

__version__ = "0.1.0"
