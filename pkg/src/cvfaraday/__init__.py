"""Gaussian phase-space simulation of light beams coupled to atomic ensembles.

Quadratures are ordered ``(x1, p1, x2, p2, ...)`` and covariance matrices are
normalised so that the vacuum is the identity.
"""

from .dynamics import (
    Direction,
    FrameRotation,
    PassSpec,
    SymplecticOp,
    Transit,
    apply,
    convert_to_symplectic,
    heisenberg_matrix,
    rotate_frame,
    transit,
    transit_op,
)
from .entanglement import (
    Bipartition,
    EntanglementVerdict,
    VarianceCriterion,
    all_bipartitions,
    duan_sum,
    fully_inseparable,
    ppt_test,
    symplectic_spectrum,
    vlf_test,
)
from .errors import CVFaradayError
from .gaussian import (
    GaussianState,
    ModeKind,
    ModeLabel,
    atomic,
    check_physicality,
    light,
    tensor,
    thermal_state,
    vacuum_state,
    variance_of,
)
from .homodyne import MeasurementRecord, OutcomePolicy, measure_homodyne
from .protocols import (
    ProtocolResult,
    SweepSpec,
    run_cluster,
    run_epr,
    run_epr_enhanced,
    run_eraser,
    sweep,
)

__all__ = [
    "Bipartition",
    "Direction",
    "EntanglementVerdict",
    "FrameRotation",
    "GaussianState",
    "ModeKind",
    "ModeLabel",
    "PassSpec",
    "ProtocolResult",
    "SweepSpec",
    "SymplecticOp",
    "Transit",
    "VarianceCriterion",
    "all_bipartitions",
    "apply",
    "atomic",
    "check_physicality",
    "convert_to_symplectic",
    "duan_sum",
    "fully_inseparable",
    "heisenberg_matrix",
    "light",
    "ppt_test",
    "rotate_frame",
    "run_cluster",
    "run_epr",
    "run_epr_enhanced",
    "run_eraser",
    "sweep",
    "symplectic_spectrum",
    "tensor",
    "thermal_state",
    "transit",
    "transit_op",
    "vacuum_state",
    "variance_of",
    "vlf_test",
]
