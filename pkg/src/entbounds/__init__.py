"""entbounds: entanglement measures and distillation-bound checks for small
bipartite density matrices."""

__version__ = "0.1.0"

from .channels import (
    LocalInstrument,
    LoccProtocol,
    OutcomeEnsemble,
    apply_instrument,
    apply_protocol,
    forget_outcomes,
    random_local_instrument,
    twirl_exact,
    twirl_monte_carlo,
)
from .measures import (
    EnsembleDecomposition,
    MeasureResult,
    SeparableCertificate,
    binary_entropy,
    concurrence,
    entropy_of_entanglement,
    eof_two_qubit_closed,
    eof_variational,
    er_isotropic_closed,
    get_entry,
    hashing_lower_bound,
    log_negativity,
    registry,
    regularized_eof_probe,
    rel_ent_entanglement,
)
from .qmat import (
    DensityMatrix,
    PureState,
    Spectrum,
    entangled_fidelity,
    hermitian_eig,
    partial_trace,
    partial_transpose,
    relative_entropy,
    tensor_product,
    trace_distance,
    vn_entropy,
)
from .states import (
    BellDiagonalParams,
    IsotropicParams,
    bell_diagonal,
    isotropic,
    maximally_entangled,
    random_density,
    random_pure,
    random_separable,
    tiles_bound_entangled,
)
