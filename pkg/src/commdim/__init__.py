"""Classical vs. quantum dimension of one-way communication matrices."""
from .bounds import (
    BoundReport,
    classical_dim_bounds,
    column_sparsity_disjoint,
    faces,
    nrank_lb_from_rnrank,
    nrank_lb_log,
    phi_prime,
    phi_r,
    rnrank_rank3_disjoint,
)
from .ensembles import antidist_matrix, gate_matrix
from .factor import (
    NMFConfig,
    NonnegFactorization,
    StochasticFactorization,
    a7_explicit,
    nmf,
    nmf_rank_search,
    stochastic_normalize,
    verify_factorization,
)
from .majorize import Answer, uw_equivalent_deterministic, uw_leq, uw_leq_identity
from .matcore import (
    CommMatrix,
    Tolerances,
    deterministic_dimension,
    numerical_rank,
    reduce,
    validate,
)
from .quantum import gram, quantum_dim_lower_bound, qubit_implementation, verify_ensemble
from .shared import SRProtocol, block_factorization, min_coordinated_actions, mix

__version__ = "0.1.0"
