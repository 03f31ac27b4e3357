"""Finite quantum device models: representations, gauges, uniqueness and tomography."""

from ._config import Tolerances, override, set_tolerances, tol
from .core import (
    DensityMatrix,
    Effect,
    ModelRepresentation,
    ProbabilityTable,
    QuantumMap,
    check_physical,
    choi_of,
    devectorize,
    identity_map,
    is_trivial,
    map_from_kraus,
    map_from_unitary,
    probability,
    probability_table,
    random_model,
    sample_table,
    superop_from_choi,
    vectorize,
)
from .equivalence import (
    WignerFit,
    WignerTransform,
    classify_transform,
    distributions_equal,
    recover_gauge_gst,
    recover_wigner_from_projections,
    same_model,
)
from .gauge import (
    GaugeTransform,
    antiunitary_gauge,
    apply_gauge,
    depolarizing,
    dual,
    eta_kraus,
    is_hptp,
    max_depolarizing_F,
    random_gauge,
    transpose_map,
    unitary_gauge,
)
from .tomography import (
    FiducialFrame,
    GstDataset,
    collect_dataset,
    fiducial_frame,
    gauge_fix,
    lgst_reconstruct,
    sample_dataset,
)
from .uniqueness import (
    UniquenessVerdict,
    assess_uniqueness,
    classify_unitary_relation,
    complete_set_from,
    contains_projection_set,
    counterexample,
    fit_depolarizing,
    is_unitary_map,
    necessary_condition,
    projection_set_pi,
    projection_set_qpt,
    snd_approximant,
    super_non_degenerate,
    unitary_generation_check,
)

__version__ = "0.1.0"
