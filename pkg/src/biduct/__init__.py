"""biduct: inner and outer bounds on the entanglement-assisted classical capacity
region of two-way quantum channels, with one-way capacities and additivity suites."""

from .states import (
    ALICE,
    BOB,
    DensityOperator,
    PureState,
    SubsystemLayout,
    partial_trace,
    shannon_entropy,
    tensor,
    trace_distance,
    von_neumann_entropy,
)
from .channels import (
    ChannelDims,
    ChoiMatrix,
    EBVerdict,
    OneWayChannel,
    TwoWayChannel,
    apply,
    embed_classical,
    embed_one_way,
    is_entanglement_breaking,
    tensor_channels,
)
from .ensembles import (
    Ensemble,
    MessageEnsemble,
    apply_to_ensemble,
    chi_backward,
    chi_bar_backward,
    chi_bar_forward,
    chi_forward,
    delta_chi_backward,
    delta_chi_forward,
    holevo_chi,
)
from .optimize import (
    Budget,
    EnsembleFamily,
    OptimizationReport,
    bsst_capacity,
    hsw_capacity,
    maximize_delta_chi,
    one_way_capacity,
    restricted_delta_chi,
    superdense_ensemble,
)
from .region import (
    RateRectangle,
    RateRegion,
    hull_of_rectangles,
    inner_region,
    outer_region,
)
from .classical import (
    ClassicalTwoWayChannel,
    JointInputDistribution,
    classical_consistency_check,
    conditional_mutual_information,
    shannon_inner_region,
    shannon_outer_region,
    shannon_rectangle,
)
from .additivity import (
    AdditivityReport,
    CollapseReport,
    additivity_check,
    family_collapse_check,
    lemma_star_check,
)

__version__ = "0.1.0"
