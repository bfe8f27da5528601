"""Simulation and spectral analysis of cyclic monotone negative-feedback delay systems."""

from ._kernels import BACKEND as kernel_backend
from .genenet import GeneTransform, hill, hill_derivative, repressilator_preset, to_unidirectional
from .integrator import (
    GeneTrajectory,
    ModelSystem,
    Trajectory,
    integrate,
    integrate_gene,
    model_system,
)
from .lyapunov import (
    LyapunovSeries,
    LyapunovValue,
    is_slowly_oscillating,
    lyapunov_series,
    lyapunov_value,
    sign_changes,
)
from .nonlinearity import Nonlinearity
from .orbit import (
    CrossingSequence,
    OrbitReport,
    detect_cycle,
    poincare_crossings,
    projected_injectivity_probe,
    seed_on_eigenspace,
)
from .spectral import (
    A1Report,
    GeneralCharFunction,
    Linearization,
    SpectralProjector,
    SpectrumReport,
    UniCharFunction,
    char_eval,
    char_function,
    critical_frequency,
    find_roots,
    oscillation_border,
    plane_coordinates,
    stability_border,
    verify_a1,
)
from .steady import IntervalBox, attractor_box, equilibrium_gene, equilibrium_unidirectional
from .systems import (
    CyclicSystem,
    DifferenceCoefficients,
    GeneNetwork,
    SystemState,
    UnidirectionalSystem,
    difference_coefficients,
    validate_feedback,
)

__version__ = "0.1.0"
