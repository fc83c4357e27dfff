//! Spectral-gap bounds for stoquastic Hamiltonians via graph conductance.
//!
//! A real symmetric matrix with non-positive entries and a connected
//! support defines, through its ground state, a weighted graph whose
//! conductance controls the gap between the two lowest eigenvalues. This
//! crate builds that graph, computes the Cheeger constant exactly or over
//! candidate cut families, and evaluates both the classic two-sided
//! conductance bounds and a sharper lower bound obtained by discarding
//! edges: a reduced edge set shrinks the constriction constant faster
//! than the reduced Cheeger value, tightening phi^2-style bounds by up to
//! the vertex degree. A max-flow certificate validates the combinatorial
//! claim the sharper bound rests on, arc by arc.
//!
//! Pipeline order: `model` builds or loads the matrix, `spectra` solves
//! for the low eigenpairs, `graph` derives the random-walk view and its
//! Laplacian identities, `cheeger` handles exact and candidate-family
//! conductance, `reduced` applies edge-reduction strategies, and
//! `flownet` certifies the flow-network theorem behind the generalized
//! bound.

pub mod cheeger;
pub mod error;
pub mod flownet;
pub mod graph;
pub mod model;
pub mod reduced;
pub mod spectra;

pub use cheeger::{
    cheeger_candidate, cheeger_exact, classic_bounds, flow_capacity, variational_upper,
    CheegerMethod, CheegerResult, Cut, CutFamily, CAP_TOL, ENUM_LIMIT,
};
pub use error::{Error, Result};
pub use flownet::{
    build_network, brute_force_min_cut, max_flow, network_to_text, positive_support,
    rayleigh_chain_bound, verify_theorem1, Arc, ArcKind, FlowNetwork, FlowResult, NodeLabel,
    PositiveSupport, Theorem1Report,
};
pub use graph::{
    export_graph, graph_from, graph_to_text, laplacian, verify_laplacian, LaplacianMatrix,
    LaplacianReport, WeightedGraph,
};
pub use model::{
    ising_chain, load_matrix, matrix_from_text, matrix_to_text, random_stoquastic, ring,
    save_matrix, transverse_field, ModelSpec, StoquasticMatrix, ValidationReport, MAX_QUBITS,
};
pub use reduced::{
    apply_strategy, best_of, best_reduction, evaluate_strategies, generalized_bound,
    reduce_cut_only, reduce_cut_plus_paths, reduce_full, reduced_cheeger, DomainMode,
    ReducedCheegerResult, ReducedGraph, ReductionStrategy, StrategySummary, SUBSET_LIMIT,
};
pub use spectra::{
    ground_state, low_spectrum, spectral_gap, EigenOptions, GroundState, SolveMethod,
    SpectralPair,
};
