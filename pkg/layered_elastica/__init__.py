from .bie2d import (
    BoundaryNodes,
    DiscretizedBall,
    IncidentSource,
    ScatterSolution,
    SurfaceProfile,
    assemble_system,
    boundary_operators,
    exterior_field,
    operator_K,
    operator_S,
    reconstruct_exterior,
    reference_wave,
    solve,
    solve_scattering,
)
from .elastic_fields import (
    FieldJet,
    GreenMatrix,
    SurfaceFrame,
    helmholtz_recompose,
    helmholtz_split,
    kupradze_tensor,
    m_nu,
    phi,
    radiation_probe_energy,
    radiation_probe_pair,
    stress_direct,
    stress_identity,
)
from .errors import LayeredElasticaError
from .green2d import FarFieldPattern, assemble_G, coeff_AB, correction_U, far_field, tilde_G
from .green3d import (
    AngularFactor,
    Coeff3DKey,
    assemble_G3d,
    coeff3d,
    correction3d,
    far_field3d,
    hankel_reduce,
    tilde_G3d,
)
from .medium import ElasticMedium, StressWeights, Wavenumbers, beta, refl_trans, spectral_constants, wavenumbers
from .quadrature import QuadConfig, QuadResult, fourier_inversion, hankel_path_integral
from .specfun import bessel_j, hankel1

__all__ = [
    "AngularFactor",
    "BoundaryNodes",
    "Coeff3DKey",
    "DiscretizedBall",
    "ElasticMedium",
    "FarFieldPattern",
    "FieldJet",
    "GreenMatrix",
    "IncidentSource",
    "LayeredElasticaError",
    "QuadConfig",
    "QuadResult",
    "ScatterSolution",
    "StressWeights",
    "SurfaceFrame",
    "SurfaceProfile",
    "Wavenumbers",
    "assemble_G",
    "assemble_G3d",
    "assemble_system",
    "bessel_j",
    "beta",
    "boundary_operators",
    "coeff3d",
    "coeff_AB",
    "correction3d",
    "correction_U",
    "exterior_field",
    "far_field",
    "far_field3d",
    "fourier_inversion",
    "hankel1",
    "hankel_path_integral",
    "hankel_reduce",
    "helmholtz_recompose",
    "helmholtz_split",
    "kupradze_tensor",
    "m_nu",
    "operator_K",
    "operator_S",
    "phi",
    "radiation_probe_energy",
    "radiation_probe_pair",
    "reconstruct_exterior",
    "reference_wave",
    "refl_trans",
    "solve",
    "solve_scattering",
    "spectral_constants",
    "stress_direct",
    "stress_identity",
    "tilde_G",
    "tilde_G3d",
    "wavenumbers",
]
