"""Quantum scores, Fisher information and fidelity for Werner-type N-qudit states."""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ConvergenceError,
    DimensionError,
    DomainError,
    IllPosedMeasurementError,
    ParameterError,
    UninformativeMeasurementError,
    ValidationError,
    WernerQFIError,
)
from .estimation import (
    EstimationReport,
    Estimator,
    build_estimator,
    run_experiment,
    sample_outcomes,
    single_shot_variance,
)
from .hermitian import (
    EigenDecomposition,
    HermitianOperator,
    eigh,
    kron,
    spectral_function,
    trace_product,
)
from .metrics import (
    FisherReport,
    Povm,
    classical_fisher,
    computational_povm,
    cramer_rao_bound,
    fidelity,
    ghz_povm,
    qfi_rld,
    qfi_sld,
    random_povm,
    werner_fidelity_closed_form,
    werner_qfi_closed_form,
)
from .score import (
    QuadratureConfig,
    ScoreTriple,
    exact_score_quadrature,
    exact_score_spectral,
    rld,
    sld,
)
from .werner import (
    QuditSystem,
    StateVector,
    WernerSpectrum,
    WernerState,
    density,
    derivative,
    ghz_vector,
    inverse,
    qfi_minimizer,
    separability_threshold,
    werner_spectrum,
)
