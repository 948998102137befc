//! Finite experiments standing in for limits of ring sequences: tail
//! diagnostics, diameter trends, operation-graph bounds, order
//! stabilization, circle density and stabilized arithmetic.

mod convergence;
mod order;
mod sequence;
pub mod sieve;
mod stabilized;

pub use convergence::{
    cauchy_diagnostics, diameter_limit, epsilon_approximation, lifted_correspondence,
    op_graph_bound, op_graph_convergence, ConvergenceReport, ConvergenceRow, DiameterLimit, DiameterRow,
    DiameterVerdict, EpsilonApproximation, OpGraphReport, OpGraphRow, TailCheck,
    CANONICAL_BOUND_LIMIT,
};
pub use order::{
    characteristic, embedding_density, limit_function_probe, limit_function_probe_towards,
    order_stability, order_stability_over, Characteristic, LimitProbe, OrderRecord,
};
pub use sequence::{generate_sequence, Extent, Family, SequenceSpec};
pub use stabilized::{
    make_stabilized, stabilized_add, stabilized_mul, OperationRow, StabilizedElement,
    StabilizedOperation,
};
