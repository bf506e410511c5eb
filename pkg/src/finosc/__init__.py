"""Low-correlation signal sets on the prime field line.

Builds the classical chirp-like families (eigenbases of commuting
time-frequency shift groups) and the torus character bases obtained from the
metaplectic action of SL2 over F_p, checks their auto/cross-correlation and
flatness bounds, and exercises them in radar shift recovery and multi-user
despreading simulations.
"""

from .applications import (
    CdmaReport,
    CdmaScenario,
    RadarEstimate,
    RadarReport,
    RadarScenario,
    cdma_simulate,
    radar_estimate,
    radar_simulate,
    random_codebook,
)
from .correlation import (
    AmbiguityTable,
    BoundReport,
    StabilityReport,
    ambiguity_table,
    cross_ambiguity,
    matrix_coefficient,
    papr,
    stability_check,
    verify_bounds,
    verify_extended,
)
from .field import (
    FpElement,
    MultiplicativeCharacter,
    additive_character,
    enumerate_mult_characters,
    is_odd_prime,
    legendre,
    mod_inv,
    primitive_root,
    psi_table,
)
from .heisenberg import (
    HeisenbergElement,
    Line,
    enumerate_lines,
    heisenberg_apply,
    heisenberg_operator,
    heisenberg_system,
    line_basis,
)
from .oscillator import (
    ExtendedSystem,
    FourierClosureReport,
    character_projector,
    extended_system,
    fourier_closure_check,
    nonsplit_system,
    oscillator_system,
    split_system,
    torus_basis,
)
from .sl2 import (
    BruhatFactors,
    SL2Element,
    Torus,
    bruhat_decompose,
    conjugate_torus,
    enumerate_tori,
    nonsplit_standard_torus,
    sp_elements,
    standard_torus,
    torus_representatives,
)
from .systems import Provenance, SignalSystem, phase_normalize
from .weil import (
    Operator,
    apply_factors,
    chirp_operator,
    fourier_matrix,
    fourier_operator,
    scaling_operator,
    weil_operator,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
