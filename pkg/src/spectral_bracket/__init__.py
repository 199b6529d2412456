"""Periodic Zakharov-Shabat spectral theory and numerical checks of Poisson-bracket identities."""
from .bracket import (
    FieldBracketResult,
    PointGradients,
    Verification,
    divisor_gradients,
    grad_A,
    grad_monodromy_entry,
    grad_W,
    grad_w,
    grad_weyl,
    grad_xi,
    monodromy_gradients,
    poisson_bracket,
    rpb_closed_forms,
    verify_A_bracket,
    verify_ah_degeneration,
    verify_canonical,
    verify_deformed_ah,
    verify_field_brackets,
    verify_popd,
    verify_quartic_identity,
    verify_rpb,
)
from .dirac import (
    TransitionGradient,
    TransitionMatrix,
    gradient_transition,
    gradient_transition_batch,
    monodromy,
    monodromy_batch,
    transition_matrix,
    transition_with_lambda_derivative,
)
from .errors import (
    AmbiguousSheetError,
    DegenerateDivisorError,
    DegenerateTransformError,
    DivisorPoleError,
    GridMismatchError,
    IntegrationError,
    PoleError,
    SpectralError,
)
from .onegap import OneGapCurve
from .potential import Potential, conserved_quantities, eval_potential, make_plane_wave
from .quadrature import GradientField, gregory_weights, uniform_grid
from .spectrum import (
    CurvePoint,
    SpectrumPoint,
    SpectrumReport,
    curve_point,
    discriminant,
    discriminant_batch,
    divisor,
    dw_dDelta,
    floquet_multiplier,
    hadamard_residual,
    omega,
    periodic_spectrum,
    quasimomentum,
    quasimomentum_expansion,
)
from .toda import (
    TodaSpectralData,
    TodaState,
    casimir_bracket,
    jacobi_matrix,
    toda_bracket,
    toda_flow_step,
    toda_spectral_data,
    toda_weyl,
    verify_mah,
)
from .weyl import (
    INFINITY,
    ProjectivePoint,
    WeylValue,
    coefficient_A,
    floquet_solution,
    lft_transform,
    recover_field,
    weyl_function,
    wronskian_W,
    xi,
)

__version__ = "0.1.0"
