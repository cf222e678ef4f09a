"""syncsim: event-driven simulation and exact moment analytics for
N-particle random walks with k-particle synchronization events.

The package splits into:

* :mod:`syncsim.model`       model parameters, jump laws, observables
* :mod:`syncsim.maps`        synchronization maps on index tuples
* :mod:`syncsim.oracle`      exhaustive generator-identity checks
* :mod:`syncsim.moments`     exact mean/variance curves and asymptotics
* :mod:`syncsim.dynamics`    the event-driven simulator
* :mod:`syncsim.experiments` replicated Monte Carlo runs and sweeps
* :mod:`syncsim.cli`         the ``syncsim`` command-line tool
"""
from .dynamics import (
    Checkpoint,
    ConfigDigest,
    FreeJump,
    NumericFailureError,
    SimEvent,
    SyncJump,
    TrajectoryResult,
    apply_event,
    next_event,
    simulate,
    simulate_embedded,
)
from .experiments import (
    DriftCheck,
    EstimateRow,
    ExperimentSpec,
    ExplicitInit,
    IIDInit,
    InitSpec,
    PhaseSweepRow,
    PointInit,
    SpreadInit,
    drift_check,
    expected_initial_mean,
    expected_initial_variance,
    init_configuration,
    moment_curve_for,
    phase_sweep,
    replica_observables,
    run_experiment,
)
from .maps import (
    EnumerationTooLargeError,
    SyncGroup,
    apply_sync,
    enumerate_tuples,
    falling_factorial,
    mean_shift,
    partition_tuple,
    sample_uniform_tuple,
)
from .model import (
    DiscreteJumps,
    ModelFamily,
    ModelSpec,
    Signature,
    SyncTerm,
    UniformJumps,
    distribution_moments,
    sample_jump,
    sample_mean,
    sample_variance,
)
from .moments import (
    GrowingSpreadCheck,
    MomentCurve,
    PhaseRegime,
    check_growing_initial_spread,
    phase_asymptote,
)
from .oracle import (
    free_variance_drift_enumerated,
    mean_drift,
    sync_mean_drift_enumerated,
    sync_variance_drift_enumerated,
    variance_drift,
)

__version__ = "0.1.0"

__all__ = [
    "Checkpoint",
    "ConfigDigest",
    "DiscreteJumps",
    "DriftCheck",
    "EnumerationTooLargeError",
    "EstimateRow",
    "ExperimentSpec",
    "ExplicitInit",
    "FreeJump",
    "GrowingSpreadCheck",
    "IIDInit",
    "InitSpec",
    "ModelFamily",
    "ModelSpec",
    "MomentCurve",
    "NumericFailureError",
    "PhaseRegime",
    "PhaseSweepRow",
    "PointInit",
    "SimEvent",
    "Signature",
    "SpreadInit",
    "SyncGroup",
    "SyncJump",
    "SyncTerm",
    "TrajectoryResult",
    "UniformJumps",
    "apply_event",
    "apply_sync",
    "check_growing_initial_spread",
    "distribution_moments",
    "drift_check",
    "enumerate_tuples",
    "expected_initial_mean",
    "expected_initial_variance",
    "falling_factorial",
    "free_variance_drift_enumerated",
    "init_configuration",
    "mean_drift",
    "mean_shift",
    "moment_curve_for",
    "next_event",
    "partition_tuple",
    "phase_asymptote",
    "phase_sweep",
    "replica_observables",
    "run_experiment",
    "sample_jump",
    "sample_mean",
    "sample_uniform_tuple",
    "sample_variance",
    "simulate",
    "simulate_embedded",
    "sync_mean_drift_enumerated",
    "sync_variance_drift_enumerated",
    "variance_drift",
]
