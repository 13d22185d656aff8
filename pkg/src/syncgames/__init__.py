"""Toolkit for synchronous nonlocal games: BCS and graph games, finite-dimensional
perfect-strategy verification, strategy/representation/certificate conversions,
and constructive rounding of approximate projections."""

from .errors import (
    BoundaryAmbiguityError,
    BudgetError,
    ClusterAmbiguityError,
    ToolkitError,
    ValidationError,
    VerificationError,
)
from .games import (
    DeterministicStrategy,
    GameRelationReport,
    SyncGame,
    build_hom_game,
    build_iso_game,
    build_synbcs,
    check_game_algebra_relations,
    find_deterministic_perfect,
    game_from_json_dict,
)
from .gf2 import BinaryLinearSystem, enumerate_si, solve_gf2
from .graphs import (
    Graph,
    IndependenceCertificate,
    alpha,
    chi,
    complement_colouring_ga0,
    complete,
    empty_graph,
    graph_from_system,
    independence_certificate_from_set,
    iso_strategy_from_bcs,
    max_clique,
    max_independent_set,
    omega,
    rep_from_independence,
    swap_iso_strategy,
    transport_independence,
)
from .magic_square import mermin_peres_system, pauli_magic_square_rep
from .matops import EigResult, hermitian_eig, kron, norm2, spectral_projection
from .rounding import (
    ContractionRoundingReport,
    FamilyRoundingReport,
    orthogonalize_family,
    round_contraction,
)
from .solution_group import (
    GroupPresentation,
    GroupRep,
    RepVerificationReport,
    normalize_j,
    presentation,
    rep_from_strategy,
    strategy_from_rep,
    strategy_from_solution,
    verify_rep,
)
from .strategies import (
    BipartiteStrategy,
    Correlation,
    OperatorStrategy,
    correlation_from_bipartite,
    correlation_from_tracial,
    decompose_qs,
    deterministic_to_operator,
    is_perfect,
    is_synchronous,
    pvm_to_unitary,
    sync_vector_defect,
    unitary_to_pvm,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryLinearSystem",
    "BipartiteStrategy",
    "BoundaryAmbiguityError",
    "BudgetError",
    "ClusterAmbiguityError",
    "ContractionRoundingReport",
    "Correlation",
    "DeterministicStrategy",
    "EigResult",
    "FamilyRoundingReport",
    "GameRelationReport",
    "Graph",
    "GroupPresentation",
    "GroupRep",
    "IndependenceCertificate",
    "OperatorStrategy",
    "RepVerificationReport",
    "SyncGame",
    "ToolkitError",
    "ValidationError",
    "VerificationError",
    "alpha",
    "build_hom_game",
    "build_iso_game",
    "build_synbcs",
    "check_game_algebra_relations",
    "chi",
    "complement_colouring_ga0",
    "complete",
    "correlation_from_bipartite",
    "correlation_from_tracial",
    "decompose_qs",
    "deterministic_to_operator",
    "empty_graph",
    "enumerate_si",
    "find_deterministic_perfect",
    "game_from_json_dict",
    "graph_from_system",
    "hermitian_eig",
    "independence_certificate_from_set",
    "is_perfect",
    "is_synchronous",
    "iso_strategy_from_bcs",
    "kron",
    "max_clique",
    "max_independent_set",
    "mermin_peres_system",
    "norm2",
    "normalize_j",
    "omega",
    "orthogonalize_family",
    "pauli_magic_square_rep",
    "presentation",
    "pvm_to_unitary",
    "rep_from_independence",
    "rep_from_strategy",
    "round_contraction",
    "solve_gf2",
    "spectral_projection",
    "strategy_from_rep",
    "strategy_from_solution",
    "swap_iso_strategy",
    "sync_vector_defect",
    "transport_independence",
    "unitary_to_pvm",
    "verify_rep",
]
