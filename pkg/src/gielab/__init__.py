"""Gaussian intrinsic entanglement and Gaussian Renyi-2 entanglement of
two-mode Gaussian states: closed forms, purifications, Gaussian-measurement
conditioning and deterministic min-max verification."""

from .config import GridConfig, Tolerances, configure, load_config
from .errors import (
    DegenerateFamilyError,
    DomainNotCoveredError,
    GielabError,
    InvalidConditioningError,
    InvalidDimensionError,
    InvalidFamilyParamsError,
    InvalidInputError,
    InvalidMeasurementError,
    InvalidSqueezerError,
    InvalidThreeModeError,
    NumericalDegeneracyError,
    UnphysicalStateError,
    WrongFamilyError,
)
from .gie import (
    GieResult,
    QMatrixParams,
    gie_closed_form,
    gie_numeric,
    gie_numeric_asym_glems,
    gie_numeric_sym_glems,
    gie_numeric_sym_sq_thermal,
    k_h,
    k_h_determinant,
    minimize_kh,
    sym_glems_candidates,
    verified_domain,
)
from .information import f_decomposed, f_homodyne_ab, gcmi, gcmi_condition_g, gcmi_numeric, mutual_information_f
from .measurement import (
    Ccm,
    FiniteMeasurement,
    GaussianMeasurement,
    HomodyneMeasurement,
    apply_classical_channel,
    assemble_ccm,
    condition_on_e,
    general_single_mode,
    heterodyne,
    homodyne,
)
from .purification import Purification, purify, purify_asym_glems
from .renyi2 import (
    ThreeModePureParams,
    conjecture_gap,
    gr2_of_family,
    gr2_symmetric,
    gr2_two_mode_reduction,
    three_mode_cm,
    three_mode_couplings,
)
from .states import StateFamily, StdForm, classify, is_separable, make_family, std_form_cm, to_std_form
from .symplectic import (
    CovMat,
    SymplecticMatrix,
    WilliamsonDecomposition,
    build_symplectic,
    schur_complement,
    symplectic_eigenvalues,
    symplectic_form,
    williamson,
)

__version__ = "0.1.0"
