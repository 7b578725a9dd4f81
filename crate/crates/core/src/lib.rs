//! Compile finite semiautomata into explicit shallow linear circuits.
//!
//! A semiautomaton `(Q, Σ, δ)` is pure state dynamics: no accepting states,
//! just a transition table. This crate turns such automata into circuit
//! plans built from a small set of linear stages and proves, at desk scale,
//! that running the circuit reproduces direct execution of the automaton:
//!
//! * transitions `x ↦ ax + b (mod n)` become phase/permutation operations
//!   on a Fourier state embedding — constant depth, width `n`;
//! * automata whose transition monoid is a group become blockwise matrix
//!   circuits over a representation of the group — constant depth,
//!   width `Σ dⱼ²`;
//! * automata factored as a semidirect product `N ⋊ H` (supplied as a hint)
//!   become log-depth prefix scans over `(n, h)` pairs;
//! * everything else falls back to a regular-representation scan.
//!
//! The [`runtime`] module executes plans and checks every trajectory
//! against [`algebra::direct_run`]; a divergence is a hard error, never a
//! silent mismatch.

pub mod algebra;
pub mod compiler;
pub mod error;
pub mod file;
pub mod fourier;
pub mod representations;
pub mod runtime;
pub mod semidirect;

pub use algebra::{direct_run, is_group, transition_monoid, FiniteMonoid, Semiautomaton, Transformation};
pub use compiler::{
    compile, detect_affine, detect_group, plan_metrics, CircuitPlan, LayerSpec, PlanAlgebra,
    PlanMetrics, Strategy, StrategyOverride,
};
pub use error::Error;
pub use file::{parse_automaton, AutomatonFile, SemidirectHintFile};
pub use fourier::{
    affine_compose, affine_freq_apply, circular_convolve, dft, fourier_attention, fourier_compose,
    fourier_embed, idft, AffineMap, ComplexVector,
};
pub use representations::{
    builtin_group_irreps, cyclic_irreps, direct_sum_embed, readout, regular_rep, rep_transition,
    MatrixRep, RepresentationSet,
};
pub use runtime::{run_plan, verify_equivalence, EquivalenceReport, ExecutionTrace};
pub use semidirect::{
    sd_from_tables, sd_multiply, sd_scan_sequential, sd_scan_tree, ScanDepth, SdElement,
    SemidirectStructure,
};
