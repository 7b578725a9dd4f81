//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown symbol {symbol:?} at position {position}")]
    UnknownSymbol { symbol: String, position: usize },

    #[error("symbol index {index} at position {position} out of range: alphabet has {alphabet_len} symbols")]
    SymbolOutOfRange {
        index: usize,
        position: usize,
        alphabet_len: usize,
    },

    #[error("state {state} out of range: automaton has {num_states} states")]
    StateOutOfRange { state: usize, num_states: usize },

    #[error("transition table for symbol {symbol:?} has {got} entries, expected {expected}")]
    IncompleteColumn {
        symbol: String,
        got: usize,
        expected: usize,
    },

    #[error("transformation image entry {value} out of range for {num_states} states")]
    BadTransformation { value: usize, num_states: usize },

    #[error("monoid too large: closure exceeded max_size {max_size} ({found} elements found so far)")]
    MonoidTooLarge { max_size: usize, found: usize },

    #[error("max_size {max_size} too small: need at least |Σ|+1 = {required}")]
    MaxSizeTooSmall { max_size: usize, required: usize },

    #[error("element {index} out of range for monoid of size {size}")]
    ElementOutOfRange { index: usize, size: usize },

    #[error("cayley table violates {law}: witness ({x}, {y}, {z})")]
    MonoidLaw {
        law: &'static str,
        x: usize,
        y: usize,
        z: usize,
    },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },

    #[error("residue {value} out of range mod {modulus}")]
    ResidueOutOfRange { value: usize, modulus: usize },

    #[error("affine coefficient a={a} is not invertible mod {n}; fall back to the generic strategy")]
    NonInvertibleAffine { a: usize, n: usize },

    #[error("semidirect structure violates {law}: witness ({x}, {y}, {z})")]
    SemidirectLaw {
        law: &'static str,
        x: usize,
        y: usize,
        z: usize,
    },

    #[error("semidirect hint does not match the automaton at state {state}, symbol {symbol:?}")]
    HintMismatch { state: usize, symbol: String },

    #[error("semidirect hint state encoding is invalid: {reason}")]
    BadStateEncoding { reason: String },

    #[error("readout margin too small: top peak {top:.6}, runner-up {second:.6}, required gap {required:.6}")]
    ReadoutMargin { top: f64, second: f64, required: f64 },

    #[error("readout found no element within tolerance {tolerance}")]
    ReadoutNoMatch { tolerance: f64 },

    #[error("readout ambiguous: elements {first} and {second} both within tolerance")]
    ReadoutAmbiguous { first: usize, second: usize },

    #[error("representation set is not faithful: elements {first} and {second} have equal embeddings")]
    NotFaithful { first: usize, second: usize },

    #[error("embedded vector has length {got}, expected total dimension {expected}")]
    EmbeddingLength { got: usize, expected: usize },

    #[error("unknown catalog group {name:?} (expected cyclic:<n>, dihedral:<n>, sym:3 or alt:5)")]
    UnknownCatalogName { name: String },

    #[error("transition monoid is not a group; use the scan strategy instead")]
    NotAGroup,

    #[error("automaton is not affine mod {n}; use another strategy")]
    NotAffine { n: usize },

    #[error("input length {len} exceeds plan capacity {capacity}")]
    CapacityExceeded { len: usize, capacity: usize },

    #[error("circuit diverged from direct execution at position {position}: expected state {expected}, got {got}")]
    Divergence {
        position: usize,
        expected: usize,
        got: usize,
    },

    #[error("plan integrity violated: {reason}")]
    PlanIntegrity { reason: String },

    #[error("automaton file field {field:?}: {reason}")]
    FileField { field: &'static str, reason: String },

    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse automaton file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
