"""Plasma-like permittivities, generalized Kramers-Kronig relations and the
Lifshitz/PFA Casimir force between a sphere and a plate."""

from .constants import CODATA, HBAR_C, K_B, PN_PER_EV_NM, PhysicalConstants
from .errors import (
    CasimirKKError,
    ConvergenceError,
    DomainError,
    ExtrapolationError,
    ParseError,
    UnsupportedModelError,
    ValidationError,
)
from .kramers_kronig import (
    KKResult,
    PVIntegrand,
    kk_imag_axis,
    kk_imag_from_real,
    kk_real_from_imag,
    kk_round_trip,
    pv_integral,
    verify_oscillator_identity,
)
from .lifshitz import (
    IDEAL_METAL,
    ForceTable,
    LifshitzConfig,
    energy_plates_zero_T,
    force_sphere_plate,
    force_table,
    free_energy_plates,
    matsubara_frequency,
    reflection_coeffs,
)
from .models import (
    Drude,
    GeneralizedPlasma,
    Oscillator,
    PurePlasma,
    Tabulated,
    eps_imag,
    eps_real,
    eval_complex,
    eval_imag_axis,
    gold_default,
    load_material,
    oscillator_beta,
)
from .optical import (
    DrudeTail,
    ExtrapolationPolicy,
    OpticalDataset,
    eps_imag_axis_from_data,
    eps_imag_from_data,
    load_nk_table,
)

__version__ = "0.1.0"
