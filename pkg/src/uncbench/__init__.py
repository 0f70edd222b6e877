"""Numerical workbench for refined uncertainty relations with third-order commutators."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .operators import (  # noqa: E402
    HermitianOperator,
    QuantumState,
    Spinor,
    commutator_c,
    deviation,
    expectation,
    identity,
    kron,
    make_hermitian,
    make_state,
    min_eig,
    variance,
)
from .moments import MomentSet, extract_moments  # noqa: E402
from .bounds import (  # noqa: E402
    INEQUALITIES,
    STATUS,
    BoundReport,
    BoundValue,
    OscillatorMoments,
    ReportOptions,
    aux_bounds,
    effective_time_bound,
    full_report,
    kinetic_position_bound,
    refined,
    robertson,
    root_form,
    triple_margin,
)
from .gram import (  # noqa: E402
    GammaVector,
    GramAssembly,
    assemble_m6,
    build_f,
    expansion_check,
    minor_report,
    spin_matrix_n,
)
from .models import (  # noqa: E402
    LeakageMetric,
    OscillatorModel,
    SpinModel,
    bloch_state,
    coherent_state,
    fock_state,
    oscillator,
    oscillator_moments,
    scenario,
    spin,
)
from .search import (  # noqa: E402
    SaturationOptions,
    SearchResult,
    ViolationOptions,
    eq2_residual,
    saturation_search,
    violation_search,
)
