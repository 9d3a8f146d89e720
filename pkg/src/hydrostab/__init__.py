"""Stability certification for first-order relativistic viscous hydrodynamics.

The seven dissipation coefficients and the sound speed (``ModelParameters``)
determine everything: hyperbolicity class, the dissipativity conditions, the
composite stability verdict, causality, dispersion branches and the linear
decay of Sobolev norms.
"""

__version__ = "0.1.0"

from .catalog import PRESETS, Family, Preset, ScanAxis, ScanSpec, load_preset, run_scan, search_preset
from .causality import (
    CausalityReport,
    characteristic_speeds,
    check_causality,
    check_subcharacteristic,
    check_symmetry_condition,
)
from .decay import DecayTrace, InitialProfile, ModeState, decay_norm_trace, evolve_mode
from .dispersion import (
    BranchScan,
    DispersionBranch,
    NumericalError,
    dispersion_coefficients,
    dispersion_roots,
    max_growth_rate,
    scan_branches,
)
from .dissipativity import (
    Theorem1Verdict,
    Variant,
    certify_theorem1,
    check_D1,
    check_D2,
    check_D3,
    delta_decomposition,
    routh_hurwitz_coefficients,
    routh_hurwitz_delta,
    w1_restriction,
)
from .hyperbolicity import (
    HyperbolicityClass,
    HyperbolicityReport,
    classify_hyperbolicity,
    numeric_eigenstructure,
)
from .model import (
    ConfigError,
    DomainError,
    ModelParameters,
    SymbolSet,
    assemble_symbols,
    compute_sound_speed,
    load_config,
    parse_config,
    rescale_to_unit_cs,
)
from .report import StabilityReport, stability_report, to_json
