"""Symplectic linear algebra for Gaussian covariance matrices.

Quantumness and purity certification, Williamson normal form, polar
dualities of ellipsoids and reconstruction of Gaussian states from
marginals on Lagrangian planes.
"""

__version__ = "0.1.0"

from .errors import (
    DimensionError,
    DocumentError,
    DomainError,
    FactorizationError,
    NoSolutionError,
    PolarCovError,
    PurityError,
    TransversalityError,
    ValidationError,
)
from .symplectic import (
    PreIwasawa,
    SympRotation,
    generator_ML,
    generator_VP,
    is_symplectic,
    matrix_sqrt_spd,
    pre_iwasawa,
    random_symplectic,
    standard_J,
    symplectic_inverse,
)
from .lagrangian import (
    AffineLagrangian,
    LagrangianFrame,
    LagrangianPlane,
    basis_of,
    coordinate_plane,
    coordinate_plane_P,
    coordinate_plane_X,
    frame_transport,
    plane_image,
)
from .covariance import (
    CovarianceMatrix,
    PhaseSpaceEllipsoid,
    SubspaceEllipsoid,
    WilliamsonForm,
    block_inverse,
    covariance_ellipsoid,
    heisenberg_check,
    is_pure,
    is_quantum,
    project_along,
    project_onto,
    symplectic_eigenvalues,
    williamson,
)
from .duality import (
    QuantumBlob,
    inclusion_test,
    is_fixed_point,
    john_blob,
    lagrangian_polar_dual,
    polar_dual,
    symplectic_polar_dual,
)
from .states import (
    MixedGaussian,
    PureGaussian,
    apply_symplectic,
    covariance_to_state,
    marginal_densities,
    random_pure,
    state_to_covariance,
    wigner_shape,
)
from .tomography import (
    LagrangianMarginal,
    ReconstructionResult,
    marginal_on,
    radon_integral,
    reconstruct,
    state_from_measurement,
)
