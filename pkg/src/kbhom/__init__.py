"""kbhom: exact Koszul-Brylinski homology on finite complex Poisson models."""

__version__ = "0.1.0"

from .complexes import (
    ChainMap,
    Complex,
    ComplexInvariantError,
    DoubleComplex,
    LongExactSequence,
    NotShortExactError,
    SpectralPages,
    homology_dims,
    les_from_ses,
    shift,
    spectral_pages,
    tensor_double,
    total_complex,
)
from .engine import (
    HHDims,
    HodgeDiamond,
    KBDims,
    euler_char,
    hkr_hochschild,
    hodge_diamond,
    kb_double_complex,
    kb_homology,
)
from .linalg import Matrix, Subspace, kernel_basis, rank, subspace_arithmetic
from .models import (
    DolbeaultPoissonModel,
    KoszulDifferential,
    ModelValidationError,
    ValidationReport,
    contraction_from_bivector,
    koszul_differential,
    product_model,
    validate_model,
)
from .rules import (
    BlowupData,
    InconsistentBlowupError,
    blowup_hodge,
    blowup_kb,
    blowup_point_kb,
    flag_bundle_hh,
    flag_manifold_kb,
    kunneth_dims,
    leray_hirsch_hh,
    mv_euler_check,
    projective_bundle_hodge,
)
from .stein import (
    NonHomogeneousBivector,
    NotPoissonOnSlice,
    PolyBivector,
    SliceCapError,
    stein_complex,
    stein_homology,
)
from .zoo import (
    ModelFileError,
    StructureConstantError,
    hodge_formal,
    load_model,
    parallelizable,
    point,
    read_model,
    save_model,
    torus,
    write_model,
)
