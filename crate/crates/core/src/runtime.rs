//! Executes circuit plans over input sequences, decodes trajectories, and
//! checks oracle equivalence against direct automaton execution.
//!
//! Per-token parallelism is a contract, not a mechanism: within a stage the
//! complex work of each token slot depends only on exact integer parameters
//! (prefix bookkeeping), and scan combines are barriered by level with a
//! fixed combine order, so a sequential executor is bit-identical to any
//! parallel one. Every run compares its decoded trajectory against
//! [`direct_run`]; a mismatch aborts with the first divergent position.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{direct_run, FiniteMonoid, Semiautomaton};
use crate::compiler::{CircuitPlan, LayerSpec, PlanAlgebra, Strategy};
use crate::error::{Error, Result};
use crate::fourier::{apply_phase_perm, dft, fourier_embed, ComplexVector, READOUT_MARGIN_FACTOR};
use crate::representations::{direct_sum_embed, readout, rep_transition, RepresentationSet, SquareMatrix};
use crate::semidirect::{blelloch_exclusive, sd_multiply, SdElement, SemidirectStructure};

/// Stage vectors are kept in the trace only while the total entry count
/// stays under this cap; stats are always kept.
const TRACE_ENTRY_CAP: usize = 1 << 21;

#[derive(Clone, Debug, Serialize)]
pub struct StageStats {
    pub name: String,
    pub wall: Duration,
    pub max_width: usize,
    pub max_magnitude: f64,
}

/// What a plan execution produced: per-stage per-token vectors (when small
/// enough to retain), the decoded trajectory including the initial state,
/// and per-stage accounting.
#[derive(Clone, Debug)]
pub struct ExecutionTrace {
    pub stage_vectors: Option<Vec<Vec<Vec<Complex64>>>>,
    pub trajectory: Vec<usize>,
    pub stats: Vec<StageStats>,
    pub scan_levels: usize,
}

impl ExecutionTrace {
    pub fn max_width(&self) -> usize {
        self.stats.iter().map(|s| s.max_width).max().unwrap_or(0)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.stats
            .iter()
            .map(|s| s.max_magnitude)
            .fold(0.0, f64::max)
    }
}

/// Incremental trace builder enforcing the retention cap.
struct TraceBuilder {
    keep_vectors: bool,
    stage_vectors: Vec<Vec<Vec<Complex64>>>,
    stats: Vec<StageStats>,
    stored_entries: usize,
    stage_start: Instant,
}

impl TraceBuilder {
    fn new() -> Self {
        Self {
            keep_vectors: true,
            stage_vectors: Vec::new(),
            stats: Vec::new(),
            stored_entries: 0,
            stage_start: Instant::now(),
        }
    }

    fn begin_stage(&mut self) {
        self.stage_start = Instant::now();
    }

    fn finish_stage(&mut self, name: impl Into<String>, vectors: &[Vec<Complex64>]) {
        let wall = self.stage_start.elapsed();
        let max_width = vectors.iter().map(Vec::len).max().unwrap_or(0);
        let max_magnitude = vectors
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        self.stats.push(StageStats {
            name: name.into(),
            wall,
            max_width,
            max_magnitude,
        });
        if self.keep_vectors {
            let entries: usize = vectors.iter().map(Vec::len).sum();
            if self.stored_entries + entries > TRACE_ENTRY_CAP {
                self.keep_vectors = false;
                self.stage_vectors.clear();
            } else {
                self.stored_entries += entries;
                self.stage_vectors.push(vectors.to_vec());
            }
        }
    }

    fn finish(self, trajectory: Vec<usize>, scan_levels: usize) -> ExecutionTrace {
        ExecutionTrace {
            stage_vectors: self.keep_vectors.then_some(self.stage_vectors),
            trajectory,
            stats: self.stats,
            scan_levels,
        }
    }
}

fn validate_run_inputs(a: &Semiautomaton, q0: usize, input: &[usize]) -> Result<()> {
    if q0 >= a.num_states() {
        return Err(Error::StateOutOfRange {
            state: q0,
            num_states: a.num_states(),
        });
    }
    for (position, &s) in input.iter().enumerate() {
        if s >= a.num_symbols() {
            return Err(Error::SymbolOutOfRange {
                index: s,
                position,
                alphabet_len: a.num_symbols(),
            });
        }
    }
    Ok(())
}

fn check_divergence(got: &[usize], expected: &[usize]) -> Result<()> {
    for (position, (&g, &e)) in got.iter().zip(expected).enumerate() {
        if g != e {
            return Err(Error::Divergence {
                position,
                expected: e,
                got: g,
            });
        }
    }
    Ok(())
}

/// Executes a compiled plan on one input and returns the full trace. The
/// decoded trajectory is always compared against [`direct_run`]; any
/// mismatch surfaces as [`Error::Divergence`], never silently.
pub fn run_plan(
    p: &CircuitPlan,
    a: &Semiautomaton,
    q0: usize,
    input: &[usize],
) -> Result<ExecutionTrace> {
    validate_run_inputs(a, q0, input)?;
    let trace = match p.strategy {
        Strategy::FourierAffine => run_fourier(p, q0, input)?,
        Strategy::GroupRep => run_group_rep(p, q0, input)?,
        Strategy::SemidirectScan => run_semidirect_scan(p, q0, input)?,
        Strategy::GenericMonoidScan => run_generic_scan(p, q0, input)?,
    };
    let expected = direct_run(a, q0, input)?;
    check_divergence(&trace.trajectory, &expected)?;
    Ok(trace)
}

// ---------------------------------------------------------------------------
// FourierAffine
// ---------------------------------------------------------------------------

fn run_fourier(p: &CircuitPlan, q0: usize, input: &[usize]) -> Result<ExecutionTrace> {
    let LayerSpec::FrequencyAffine {
        modulus,
        maps,
        phase_tables,
    } = &p.layers[1]
    else {
        return Err(Error::PlanIntegrity {
            reason: "FourierAffine plan lacks its FrequencyAffine layer".into(),
        });
    };
    let n = *modulus;
    let mut tb = TraceBuilder::new();

    // embed: every token sees Φ(q0)
    tb.begin_stage();
    let phi0 = fourier_embed(q0, n)?;
    let embed: Vec<Vec<Complex64>> = (0..input.len())
        .map(|_| phi0.entries().to_vec())
        .collect();
    tb.finish_stage("FourierEmbed", &embed);

    // fused per-token transition: apply the prefix-composed map of each
    // token to the embedded initial state. The (permutation, phase-table)
    // pairs compose in canonical left-to-right order; token applications
    // are independent.
    tb.begin_stage();
    let mut perm = 1 % n;
    let mut table = ComplexVector::ones(n);
    let mut freq_vectors: Vec<Vec<Complex64>> = Vec::with_capacity(input.len());
    let mut freq_states: Vec<ComplexVector> = Vec::with_capacity(input.len());
    for &sym in input {
        let a_sym = maps[sym].a;
        let sym_table = &phase_tables[sym];
        let composed: Vec<Complex64> = (0..n)
            .map(|j| sym_table.entries()[j] * table.entries()[(j * a_sym) % n])
            .collect();
        table = ComplexVector::new(composed);
        perm = (a_sym * perm) % n;
        let v = apply_phase_perm(&phi0, perm, &table)?;
        freq_vectors.push(v.entries().to_vec());
        freq_states.push(v);
    }
    tb.finish_stage("FrequencyAffine", &freq_vectors);

    // decode the embedding back to a scaled one-hot, per token
    tb.begin_stage();
    let decoded: Vec<ComplexVector> = freq_states.iter().map(dft).collect();
    let decoded_vectors: Vec<Vec<Complex64>> =
        decoded.iter().map(|v| v.entries().to_vec()).collect();
    tb.finish_stage("InverseFourier", &decoded_vectors);

    tb.begin_stage();
    let margin = READOUT_MARGIN_FACTOR * n as f64;
    let mut trajectory = vec![q0];
    for v in &decoded {
        trajectory.push(v.argmax_with_margin(margin)?);
    }
    tb.finish_stage("Readout", &[]);

    Ok(tb.finish(trajectory, 0))
}

// ---------------------------------------------------------------------------
// GroupRep
// ---------------------------------------------------------------------------

fn rep_payload(p: &CircuitPlan) -> Result<(&FiniteMonoid, &RepresentationSet, &[usize])> {
    match &p.algebra {
        PlanAlgebra::Rep {
            monoid,
            reps,
            symbol_elements,
            ..
        } => Ok((monoid, reps, symbol_elements)),
        _ => Err(Error::PlanIntegrity {
            reason: "plan algebra does not match its strategy".into(),
        }),
    }
}

fn state_of_element(monoid: &FiniteMonoid, element: usize, q0: usize) -> Result<usize> {
    monoid
        .label(element)
        .map(|t| t.apply(q0))
        .ok_or_else(|| Error::PlanIntegrity {
            reason: "transition monoid lost its element labels".into(),
        })
}

fn run_group_rep(p: &CircuitPlan, q0: usize, input: &[usize]) -> Result<ExecutionTrace> {
    let (monoid, reps, symbol_elements) = rep_payload(p)?;
    let identity = monoid.identity().ok_or(Error::NotAGroup)?;
    let mut tb = TraceBuilder::new();

    // integer prefix bookkeeping: the monoid element before each token
    let mut prefixes = Vec::with_capacity(input.len());
    let mut acc = identity;
    for &sym in input {
        prefixes.push(acc);
        acc = monoid.product(acc, symbol_elements[sym]);
    }

    tb.begin_stage();
    let embeds: Vec<Vec<Complex64>> = prefixes
        .iter()
        .map(|&m| direct_sum_embed(reps, m))
        .collect::<Result<_>>()?;
    tb.finish_stage("RepEmbed", &embeds);

    // one fused blockwise matrix multiplication per token
    tb.begin_stage();
    let moved: Vec<Vec<Complex64>> = embeds
        .iter()
        .zip(input)
        .map(|(phi, &sym)| rep_transition(reps, phi, symbol_elements[sym]))
        .collect::<Result<_>>()?;
    tb.finish_stage("BlockMatMul", &moved);

    tb.begin_stage();
    let mut trajectory = vec![q0];
    for phi in &moved {
        let element = readout(reps, phi)?;
        trajectory.push(state_of_element(monoid, element, q0)?);
    }
    tb.finish_stage("Readout", &[]);

    Ok(tb.finish(trajectory, 0))
}

// ---------------------------------------------------------------------------
// scan strategies
// ---------------------------------------------------------------------------

fn blockwise_mul(rs: &RepresentationSet, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(rs.total_dim());
    let mut offset = 0;
    for rep in rs.reps() {
        let d = rep.dim();
        let a = SquareMatrix::new(d, x[offset..offset + d * d].to_vec());
        let b = SquareMatrix::new(d, y[offset..offset + d * d].to_vec());
        out.extend_from_slice(a.mul(&b).data());
        offset += d * d;
    }
    out
}

/// Runs the level-barriered tree scan over token vectors, recording one
/// stage per combine level, and returns the inclusive per-token vectors.
fn scan_vectors(
    tb: &mut TraceBuilder,
    tokens: &[Vec<Complex64>],
    identity: Vec<Complex64>,
    combine: &mut impl FnMut(&Vec<Complex64>, &Vec<Complex64>) -> Result<Vec<Complex64>>,
) -> Result<(Vec<Vec<Complex64>>, usize)> {
    let mut work = tokens.to_vec();
    let mut levels = 0usize;
    let mut level_start = Instant::now();
    let mut level_stats: Vec<StageStats> = Vec::new();
    let mut snapshots: Vec<Vec<Vec<Complex64>>> = Vec::new();
    let depth = blelloch_exclusive(&mut work, identity, combine, &mut |items| {
        let wall = level_start.elapsed();
        level_stats.push(StageStats {
            name: format!("ScanLevel {levels}"),
            wall,
            max_width: items.iter().map(Vec::len).max().unwrap_or(0),
            max_magnitude: items.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max),
        });
        snapshots.push(items.to_vec());
        levels += 1;
        level_start = Instant::now();
    })?;
    debug_assert_eq!(levels, depth.total());
    for (stat, snap) in level_stats.into_iter().zip(snapshots) {
        // route through the builder so the retention cap applies uniformly
        tb.begin_stage();
        tb.stats.push(stat);
        let entries: usize = snap.iter().map(Vec::len).sum();
        if tb.keep_vectors {
            if tb.stored_entries + entries > TRACE_ENTRY_CAP {
                tb.keep_vectors = false;
                tb.stage_vectors.clear();
            } else {
                tb.stored_entries += entries;
                tb.stage_vectors.push(snap);
            }
        }
    }

    // exclusive → inclusive: one extra combine per position, token-parallel
    let inclusive: Vec<Vec<Complex64>> = work
        .iter()
        .zip(tokens)
        .map(|(prefix, tok)| combine(prefix, tok))
        .collect::<Result<_>>()?;
    Ok((inclusive, levels))
}

fn plan_scan_levels(p: &CircuitPlan) -> usize {
    p.layers
        .iter()
        .filter(|l| matches!(l, LayerSpec::ScanLevel { .. }))
        .count()
}

fn pad_tokens(
    p: &CircuitPlan,
    mut tokens: Vec<Vec<Complex64>>,
    identity: &[Complex64],
    input_len: usize,
) -> Result<Vec<Vec<Complex64>>> {
    let capacity = p.seq_capacity.unwrap_or(input_len);
    if input_len > capacity {
        return Err(Error::CapacityExceeded {
            len: input_len,
            capacity,
        });
    }
    tokens.resize(capacity, identity.to_vec());
    Ok(tokens)
}

fn run_generic_scan(p: &CircuitPlan, q0: usize, input: &[usize]) -> Result<ExecutionTrace> {
    let (monoid, reps, symbol_elements) = rep_payload(p)?;
    let identity_elem = monoid.identity().ok_or(Error::NotAGroup)?;
    let mut tb = TraceBuilder::new();

    tb.begin_stage();
    let identity_vec = direct_sum_embed(reps, identity_elem)?;
    let tokens: Vec<Vec<Complex64>> = input
        .iter()
        .map(|&sym| direct_sum_embed(reps, symbol_elements[sym]))
        .collect::<Result<_>>()?;
    let padded = pad_tokens(p, tokens, &identity_vec, input.len())?;
    tb.finish_stage("RepEmbed", &padded);

    let mut combine = |x: &Vec<Complex64>, y: &Vec<Complex64>| -> Result<Vec<Complex64>> {
        Ok(blockwise_mul(reps, x, y))
    };
    let (inclusive, levels) = scan_vectors(&mut tb, &padded, identity_vec, &mut combine)?;
    let expected_levels = plan_scan_levels(p);
    if levels != expected_levels {
        return Err(Error::PlanIntegrity {
            reason: format!("executed {levels} scan levels, plan has {expected_levels}"),
        });
    }

    tb.begin_stage();
    let mut trajectory = vec![q0];
    for phi in inclusive.iter().take(input.len()) {
        let element = readout(reps, phi)?;
        trajectory.push(state_of_element(monoid, element, q0)?);
    }
    tb.finish_stage("Readout", &[]);

    Ok(tb.finish(trajectory, levels))
}

struct SdVectorCodec<'a> {
    structure: &'a SemidirectStructure,
    h_reps: &'a RepresentationSet,
    n_dim: usize,
}

impl<'a> SdVectorCodec<'a> {
    fn encode(&self, e: SdElement) -> Result<Vec<Complex64>> {
        let mut v = vec![Complex64::ZERO; self.n_dim];
        v[e.n] = Complex64::ONE;
        v.extend(direct_sum_embed(self.h_reps, e.h)?);
        Ok(v)
    }

    /// The semidirect combine on token vectors:
    /// `(n₁,h₁)·(n₂,h₂) = (n₁ + h₁·n₂, h₁h₂)`. The `h₁` block determines the
    /// action linearly (embeddings of distinct group elements are linearly
    /// independent), realized here by decoding it; the `N` part is the fixed
    /// bilinear form of the addition table; the `H` part is blockwise
    /// matrix multiplication.
    fn combine(&self, x: &[Complex64], y: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n_dim;
        let h1 = readout(self.h_reps, &x[n..])?;
        let mut acted = vec![Complex64::ZERO; n];
        for j in 0..n {
            if y[j] != Complex64::ZERO {
                acted[self.structure.apply_action(h1, j)] += y[j];
            }
        }
        let n_cayley = &self.structure.n_monoid().cayley;
        let mut out = vec![Complex64::ZERO; n];
        for i in 0..n {
            if x[i] == Complex64::ZERO {
                continue;
            }
            for (j, &a) in acted.iter().enumerate() {
                out[n_cayley[i][j]] += x[i] * a;
            }
        }
        out.extend(blockwise_mul(self.h_reps, &x[n..], &y[n..]));
        Ok(out)
    }

    fn decode(&self, v: &[Complex64]) -> Result<SdElement> {
        let one_hot = ComplexVector::new(v[..self.n_dim].to_vec());
        let n = one_hot.argmax_with_margin(0.5)?;
        let h = readout(self.h_reps, &v[self.n_dim..])?;
        Ok(SdElement::new(n, h))
    }
}

fn run_semidirect_scan(p: &CircuitPlan, q0: usize, input: &[usize]) -> Result<ExecutionTrace> {
    let PlanAlgebra::Semidirect {
        structure,
        h_reps,
        symbol_elements,
        state_encoding,
        ..
    } = &p.algebra
    else {
        return Err(Error::PlanIntegrity {
            reason: "plan algebra does not match its strategy".into(),
        });
    };
    let codec = SdVectorCodec {
        structure,
        h_reps,
        n_dim: structure.n_size(),
    };
    let mut tb = TraceBuilder::new();

    tb.begin_stage();
    let identity_vec = codec.encode(structure.identity())?;
    let tokens: Vec<Vec<Complex64>> = input
        .iter()
        .map(|&sym| codec.encode(symbol_elements[sym]))
        .collect::<Result<_>>()?;
    let padded = pad_tokens(p, tokens, &identity_vec, input.len())?;
    tb.finish_stage("RepEmbed", &padded);

    let mut combine =
        |x: &Vec<Complex64>, y: &Vec<Complex64>| -> Result<Vec<Complex64>> { codec.combine(x, y) };
    let (inclusive, levels) = scan_vectors(&mut tb, &padded, identity_vec, &mut combine)?;
    let expected_levels = plan_scan_levels(p);
    if levels != expected_levels {
        return Err(Error::PlanIntegrity {
            reason: format!("executed {levels} scan levels, plan has {expected_levels}"),
        });
    }

    tb.begin_stage();
    // decode each prefix pair and apply it to the encoded initial state
    let mut reverse = vec![usize::MAX; structure.order()];
    for (state, e) in state_encoding.iter().enumerate() {
        reverse[e.h * structure.n_size() + e.n] = state;
    }
    let enc_q0 = state_encoding[q0];
    let mut trajectory = vec![q0];
    for v in inclusive.iter().take(input.len()) {
        let prefix = codec.decode(v)?;
        let landed = sd_multiply(structure, enc_q0, prefix)?;
        let state = reverse[landed.h * structure.n_size() + landed.n];
        if state == usize::MAX {
            return Err(Error::BadStateEncoding {
                reason: format!("pair ({}, {}) has no state", landed.n, landed.h),
            });
        }
        trajectory.push(state);
    }
    tb.finish_stage("Readout", &[]);

    Ok(tb.finish(trajectory, levels))
}

// ---------------------------------------------------------------------------
// verification harness
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct FailureWitness {
    pub trial: usize,
    pub q0: usize,
    pub input: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub trials_requested: usize,
    pub trials_run: usize,
    pub failures: Vec<FailureWitness>,
}

impl EquivalenceReport {
    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-derives the plan's integer algebra before trusting it: Cayley tables
/// of labelled monoids must equal composition of their labels, semidirect
/// tables must still satisfy the structure laws, and stored metrics must
/// agree with the layer list. Any single corrupted table entry fails here.
pub fn check_plan_integrity(p: &CircuitPlan) -> Result<()> {
    crate::compiler::plan_metrics(p)?;
    match &p.algebra {
        PlanAlgebra::Fourier => {
            let LayerSpec::FrequencyAffine { modulus, maps, phase_tables } = &p.layers[1] else {
                return Err(Error::PlanIntegrity {
                    reason: "missing FrequencyAffine layer".into(),
                });
            };
            for m in maps {
                if m.n != *modulus || !m.is_invertible() {
                    return Err(Error::PlanIntegrity {
                        reason: format!("affine map ({}, {}) invalid mod {modulus}", m.a, m.b),
                    });
                }
            }
            if phase_tables.len() != maps.len()
                || phase_tables.iter().any(|t| t.modulus() != *modulus)
            {
                return Err(Error::PlanIntegrity {
                    reason: "phase table shape mismatch".into(),
                });
            }
        }
        PlanAlgebra::Rep { monoid, .. } => {
            if let Some(labels) = monoid.element_labels() {
                for x in 0..monoid.size() {
                    for y in 0..monoid.size() {
                        let composed = labels[x].then(&labels[y]);
                        match monoid.find_label(&composed) {
                            Some(idx) if idx == monoid.cayley[x][y] => {}
                            _ => {
                                return Err(Error::PlanIntegrity {
                                    reason: format!(
                                        "cayley[{x}][{y}] disagrees with label composition"
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }
        PlanAlgebra::Semidirect { structure, .. } => {
            crate::semidirect::sd_from_tables(
                structure.n_monoid().cayley.clone(),
                structure.h_group().cayley.clone(),
                structure.action().to_vec(),
            )
            .map_err(|e| Error::PlanIntegrity {
                reason: format!("semidirect tables no longer validate: {e}"),
            })?;
        }
    }
    Ok(())
}

/// Runs randomized equivalence trials of the plan against [`direct_run`].
/// Deterministic under a fixed seed; failures are data, not panics.
pub fn verify_equivalence(
    p: &CircuitPlan,
    a: &Semiautomaton,
    trials: usize,
    max_t: usize,
    seed: u64,
) -> EquivalenceReport {
    use rand::{Rng, SeedableRng};

    let mut report = EquivalenceReport {
        trials_requested: trials,
        trials_run: 0,
        failures: Vec::new(),
    };
    if let Err(e) = check_plan_integrity(p) {
        report.failures.push(FailureWitness {
            trial: 0,
            q0: 0,
            input: Vec::new(),
            message: e.to_string(),
        });
        return report;
    }

    let capacity = p.seq_capacity.unwrap_or(max_t).min(max_t).max(1);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let q0 = rng.random_range(0..a.num_states());
        let t = rng.random_range(1..=capacity);
        let input: Vec<usize> = (0..t)
            .map(|_| rng.random_range(0..a.num_symbols()))
            .collect();
        report.trials_run += 1;
        if let Err(e) = run_plan(p, a, q0, &input) {
            report.failures.push(FailureWitness {
                trial,
                q0,
                input,
                message: e.to_string(),
            });
        }
    }
    report
}
