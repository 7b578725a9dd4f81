//! Structure detection on semiautomata and strategy selection: emits a
//! [`CircuitPlan`] whose layers and depth/width metrics realize the bounds
//! the construction guarantees.
//!
//! Strategy priority under `auto`: `FourierAffine` (all transition columns
//! affine `x ↦ ax+b mod n` with invertible `a`) → `SemidirectScan` (only
//! when a verified hint is supplied) → `GroupRep` (transition monoid is a
//! group) → `GenericMonoidScan` (regular representation plus a tree scan).

use serde::{Deserialize, Serialize};

use crate::algebra::{is_group, transition_monoid, FiniteMonoid, Semiautomaton};
use crate::error::{Error, Result};
use crate::fourier::{AffineMap, ComplexVector};
use crate::representations::{recognize_group, regular_rep, RepresentationSet};
use crate::semidirect::{sd_multiply, SdElement, SemidirectStructure};

/// Cap on transition-monoid closure size used by [`compile`];
/// `|Q|^|Q|` explodes, so desk scale gets a clean error instead.
pub const DEFAULT_MAX_MONOID: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    FourierAffine,
    GroupRep,
    SemidirectScan,
    GenericMonoidScan,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Strategy::FourierAffine => "FourierAffine",
            Strategy::GroupRep => "GroupRep",
            Strategy::SemidirectScan => "SemidirectScan",
            Strategy::GenericMonoidScan => "GenericMonoidScan",
        };
        f.write_str(name)
    }
}

/// CLI-facing strategy override tokens.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StrategyOverride {
    #[default]
    Auto,
    Fourier,
    Rep,
    Scan,
}

impl std::str::FromStr for StrategyOverride {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "fourier" => Ok(Self::Fourier),
            "rep" => Ok(Self::Rep),
            "scan" => Ok(Self::Scan),
            other => Err(Error::FileField {
                field: "strategy",
                reason: format!("unknown strategy {other:?} (expected auto|fourier|rep|scan)"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanPhase {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReadoutKind {
    /// Argmax of entry modulus with the margin rule, then the state index.
    ModularArgmax,
    /// Nearest embedded monoid element, then apply its transformation to q0.
    NearestEmbedding,
    /// Decode the one-hot `n` block and the embedded `h` block, multiply the
    /// encoded q0 by the prefix pair, map back through the state encoding.
    SemidirectPair,
}

/// One stage of a circuit plan. Parameters are complete for the kind: a
/// plan plus an input sequence fully determines execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LayerSpec {
    FourierEmbed {
        modulus: usize,
    },
    /// Fused per-token transition: one affine map and one phase table per
    /// symbol, applied in frequency space.
    FrequencyAffine {
        modulus: usize,
        maps: Vec<AffineMap>,
        phase_tables: Vec<ComplexVector>,
    },
    /// Decodes the Fourier state embedding back to a scaled one-hot
    /// (kernel `ω^{−jk}`, un-normalized).
    InverseFourier {
        modulus: usize,
    },
    /// Block embedding `Φ(x) = ⊕ ρ⁽ʲ⁾(x)`; for semidirect plans the vector
    /// is `one-hot(n) ⊕ Φ_H(h)` and `onehot_n` records the `N` width.
    RepEmbed {
        width: usize,
        onehot_n: Option<usize>,
    },
    /// Fused per-token blockwise matrix multiplication by `ρ(t_σ)`.
    BlockMatMul {
        num_symbols: usize,
    },
    ScanLevel {
        level: usize,
        phase: ScanPhase,
    },
    /// Additive monoid accumulation of width `width`. Scan combines fuse
    /// this work into their level, so emitted plans carry it only as the
    /// `mlp_width` metric, never as a standalone stage.
    AdditiveUpdate {
        width: usize,
    },
    Readout {
        kind: ReadoutKind,
    },
}

impl LayerSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            LayerSpec::FourierEmbed { .. } => "FourierEmbed",
            LayerSpec::FrequencyAffine { .. } => "FrequencyAffine",
            LayerSpec::InverseFourier { .. } => "InverseFourier",
            LayerSpec::RepEmbed { .. } => "RepEmbed",
            LayerSpec::BlockMatMul { .. } => "BlockMatMul",
            LayerSpec::ScanLevel { .. } => "ScanLevel",
            LayerSpec::AdditiveUpdate { .. } => "AdditiveUpdate",
            LayerSpec::Readout { .. } => "Readout",
        }
    }

    fn is_embed(&self) -> bool {
        matches!(
            self,
            LayerSpec::FourierEmbed { .. } | LayerSpec::RepEmbed { .. }
        )
    }
}

/// Depth and width accounting for a plan. `depth` counts sequential interior
/// stages (embedding and readout excluded); `width` is the maximum per-token
/// vector length across stages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanMetrics {
    pub depth: usize,
    pub width: usize,
    pub embedding_dim: usize,
    pub attention_width: usize,
    pub mlp_width: usize,
}

/// Strategy-specific algebra a plan carries for execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PlanAlgebra {
    /// All Fourier parameters live in the `FrequencyAffine` layer.
    Fourier,
    /// Transition monoid, its representation set, and the monoid element of
    /// each symbol.
    Rep {
        monoid: FiniteMonoid,
        reps: RepresentationSet,
        symbol_elements: Vec<usize>,
        catalog: Option<String>,
    },
    Semidirect {
        structure: SemidirectStructure,
        h_reps: RepresentationSet,
        h_catalog: Option<String>,
        symbol_elements: Vec<SdElement>,
        state_encoding: Vec<SdElement>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitPlan {
    pub strategy: Strategy,
    pub layers: Vec<LayerSpec>,
    pub metrics: PlanMetrics,
    pub algebra: PlanAlgebra,
    /// Maximum input length a scan plan was laid out for (scan strategies
    /// only; constant-depth plans accept any length).
    pub seq_capacity: Option<usize>,
}

impl CircuitPlan {
    pub fn summary(&self) -> String {
        format!(
            "strategy={} depth={} width={} embedding_dim={} attention_width={} mlp_width={}",
            self.strategy,
            self.metrics.depth,
            self.metrics.width,
            self.metrics.embedding_dim,
            self.metrics.attention_width,
            self.metrics.mlp_width
        )
    }
}

/// A user-supplied semidirect factorization of the transition monoid,
/// together with a bijective encoding of automaton states as `(n, h)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemidirectHint {
    pub structure: SemidirectStructure,
    pub state_encoding: Vec<SdElement>,
}

impl SemidirectHint {
    /// Checks the encoding is a bijection `Q ↔ N×H` and that the hint's
    /// induced transitions match `δ`; returns the per-symbol pair elements.
    pub fn verify(&self, a: &Semiautomaton) -> Result<Vec<SdElement>> {
        let s = &self.structure;
        if self.state_encoding.len() != a.num_states() {
            return Err(Error::BadStateEncoding {
                reason: format!(
                    "{} entries for {} states",
                    self.state_encoding.len(),
                    a.num_states()
                ),
            });
        }
        if a.num_states() != s.order() {
            return Err(Error::BadStateEncoding {
                reason: format!(
                    "automaton has {} states but |N|·|H| = {}",
                    a.num_states(),
                    s.order()
                ),
            });
        }
        let mut seen = vec![false; s.order()];
        for (q, e) in self.state_encoding.iter().enumerate() {
            if e.n >= s.n_size() || e.h >= s.h_size() {
                return Err(Error::BadStateEncoding {
                    reason: format!("state {q} encoded as out-of-range pair ({}, {})", e.n, e.h),
                });
            }
            let flat = e.h * s.n_size() + e.n;
            if seen[flat] {
                return Err(Error::BadStateEncoding {
                    reason: format!("pair ({}, {}) used twice", e.n, e.h),
                });
            }
            seen[flat] = true;
        }

        let identity = s.identity();
        let q_e = self
            .state_encoding
            .iter()
            .position(|&e| e == identity)
            .expect("bijection covers the identity pair");

        // the symbol's pair element is the image of the encoded identity
        let symbol_elements: Vec<SdElement> = (0..a.num_symbols())
            .map(|sym| self.state_encoding[a.step(q_e, sym)])
            .collect();

        for sym in 0..a.num_symbols() {
            let m = symbol_elements[sym];
            for q in 0..a.num_states() {
                let expected = sd_multiply(s, self.state_encoding[q], m)?;
                if self.state_encoding[a.step(q, sym)] != expected {
                    return Err(Error::HintMismatch {
                        state: q,
                        symbol: a.alphabet()[sym].clone(),
                    });
                }
            }
        }
        Ok(symbol_elements)
    }
}

/// Per-symbol affine detection: candidate `b = δ(0,σ)`, `a = δ(1,σ) − b`,
/// accepted only if the whole column matches and `gcd(a, n) = 1`.
pub fn detect_affine(a: &Semiautomaton) -> Option<Vec<AffineMap>> {
    let n = a.num_states();
    if n < 2 {
        return None;
    }
    let mut maps = Vec::with_capacity(a.num_symbols());
    for sym in 0..a.num_symbols() {
        let b = a.step(0, sym);
        let coeff = (a.step(1, sym) + n - b) % n;
        let map = AffineMap::new(coeff, b, n).ok()?;
        if !map.is_invertible() {
            return None;
        }
        if (0..n).any(|x| a.step(x, sym) != map.apply(x)) {
            return None;
        }
        maps.push(map);
    }
    Some(maps)
}

/// What [`detect_group`] knows about a group transition monoid.
#[derive(Clone, Debug)]
pub struct GroupDetection {
    pub monoid: FiniteMonoid,
    pub reps: RepresentationSet,
    pub symbol_elements: Vec<usize>,
    /// Catalog name when the group was recognized by table isomorphism.
    pub catalog: Option<String>,
}

/// Computes the transition monoid; if it is a group, pairs it with catalog
/// irreps (recognized by Cayley-table isomorphism, desk scale `|G| ≤ 60`) or
/// the regular representation otherwise.
pub fn detect_group(a: &Semiautomaton, max_size: usize) -> Result<Option<GroupDetection>> {
    let monoid = transition_monoid(a, max_size)?;
    if is_group(&monoid).is_none() {
        return Ok(None);
    }
    let symbol_elements = symbol_elements_of(a, &monoid);
    let (catalog, reps) = match recognize_group(&monoid) {
        Some((name, reps)) => (Some(name), reps),
        None => (None, regular_rep(&monoid)?),
    };
    Ok(Some(GroupDetection {
        monoid,
        reps,
        symbol_elements,
        catalog,
    }))
}

fn symbol_elements_of(a: &Semiautomaton, monoid: &FiniteMonoid) -> Vec<usize> {
    (0..a.num_symbols())
        .map(|s| {
            monoid
                .find_label(&a.symbol_transformation(s))
                .expect("transition monoid contains every generator")
        })
        .collect()
}

fn ceil_log2(t: usize) -> usize {
    if t <= 1 {
        0
    } else {
        t.next_power_of_two().trailing_zeros() as usize
    }
}

/// Compiles a semiautomaton into a circuit plan for inputs of length up to
/// `seq_len`. Constant-depth strategies ignore `seq_len` entirely (their
/// layer lists carry no trace of it); scan strategies lay out
/// `2·ceil(log₂ seq_len)` combine levels.
pub fn compile(
    a: &Semiautomaton,
    hint: Option<&SemidirectHint>,
    strategy: StrategyOverride,
    seq_len: usize,
) -> Result<CircuitPlan> {
    // a mismatched hint is an error regardless of the chosen strategy
    let verified_hint = match hint {
        Some(h) => Some((h, h.verify(a)?)),
        None => None,
    };

    match strategy {
        StrategyOverride::Auto => {
            if let Some(maps) = detect_affine(a) {
                return Ok(fourier_plan(a, maps));
            }
            if let Some((h, symbol_elements)) = verified_hint {
                return semidirect_plan(h, symbol_elements, seq_len);
            }
            if let Some(found) = detect_group(a, DEFAULT_MAX_MONOID)? {
                return Ok(group_plan(found));
            }
            generic_plan(a, seq_len)
        }
        StrategyOverride::Fourier => match detect_affine(a) {
            Some(maps) => Ok(fourier_plan(a, maps)),
            None => Err(Error::NotAffine { n: a.num_states() }),
        },
        StrategyOverride::Rep => match detect_group(a, DEFAULT_MAX_MONOID)? {
            Some(found) => Ok(group_plan(found)),
            None => Err(Error::NotAGroup),
        },
        StrategyOverride::Scan => match verified_hint {
            Some((h, symbol_elements)) => semidirect_plan(h, symbol_elements, seq_len),
            None => generic_plan(a, seq_len),
        },
    }
}

fn fourier_plan(a: &Semiautomaton, maps: Vec<AffineMap>) -> CircuitPlan {
    let n = a.num_states();
    let phase_tables = maps.iter().map(AffineMap::phase_table).collect();
    let layers = vec![
        LayerSpec::FourierEmbed { modulus: n },
        LayerSpec::FrequencyAffine {
            modulus: n,
            maps,
            phase_tables,
        },
        LayerSpec::InverseFourier { modulus: n },
        LayerSpec::Readout {
            kind: ReadoutKind::ModularArgmax,
        },
    ];
    CircuitPlan {
        strategy: Strategy::FourierAffine,
        layers,
        metrics: PlanMetrics {
            depth: 2,
            width: n,
            embedding_dim: n,
            attention_width: n,
            mlp_width: 0,
        },
        algebra: PlanAlgebra::Fourier,
        seq_capacity: None,
    }
}

fn group_plan(found: GroupDetection) -> CircuitPlan {
    let width = found.reps.total_dim();
    let layers = vec![
        LayerSpec::RepEmbed {
            width,
            onehot_n: None,
        },
        LayerSpec::BlockMatMul {
            num_symbols: found.symbol_elements.len(),
        },
        LayerSpec::Readout {
            kind: ReadoutKind::NearestEmbedding,
        },
    ];
    CircuitPlan {
        strategy: Strategy::GroupRep,
        layers,
        metrics: PlanMetrics {
            depth: 1,
            width,
            embedding_dim: width,
            attention_width: width,
            mlp_width: 0,
        },
        algebra: PlanAlgebra::Rep {
            monoid: found.monoid,
            reps: found.reps,
            symbol_elements: found.symbol_elements,
            catalog: found.catalog,
        },
        seq_capacity: None,
    }
}

fn scan_layers(embed: LayerSpec, levels: usize, readout: ReadoutKind) -> Vec<LayerSpec> {
    let mut layers = Vec::with_capacity(levels + 2);
    layers.push(embed);
    for level in 0..levels {
        layers.push(LayerSpec::ScanLevel {
            level,
            phase: if level < levels / 2 {
                ScanPhase::Up
            } else {
                ScanPhase::Down
            },
        });
    }
    layers.push(LayerSpec::Readout { kind: readout });
    layers
}

fn semidirect_plan(
    hint: &SemidirectHint,
    symbol_elements: Vec<SdElement>,
    seq_len: usize,
) -> Result<CircuitPlan> {
    let s = &hint.structure;
    // dim(N) = |N| one-hot; dim(ρ_H) = length of the H embedding in use
    let n_dim = s.n_size();
    let (h_catalog, h_reps) = match recognize_group(s.h_group()) {
        Some((name, reps)) => (Some(name), reps),
        None => (None, regular_rep(s.h_group())?),
    };
    let h_dim = h_reps.total_dim();
    let width = n_dim + h_dim;
    let levels = 2 * ceil_log2(seq_len);
    let layers = scan_layers(
        LayerSpec::RepEmbed {
            width,
            onehot_n: Some(n_dim),
        },
        levels,
        ReadoutKind::SemidirectPair,
    );
    Ok(CircuitPlan {
        strategy: Strategy::SemidirectScan,
        layers,
        metrics: PlanMetrics {
            depth: levels,
            width,
            embedding_dim: width,
            attention_width: width,
            mlp_width: n_dim,
        },
        algebra: PlanAlgebra::Semidirect {
            structure: s.clone(),
            h_reps,
            h_catalog,
            symbol_elements,
            state_encoding: hint.state_encoding.clone(),
        },
        seq_capacity: Some(seq_len),
    })
}

fn generic_plan(a: &Semiautomaton, seq_len: usize) -> Result<CircuitPlan> {
    let monoid = transition_monoid(a, DEFAULT_MAX_MONOID)?;
    let symbol_elements = symbol_elements_of(a, &monoid);
    let reps = regular_rep(&monoid)?;
    let width = reps.total_dim();
    let levels = 2 * ceil_log2(seq_len);
    let layers = scan_layers(
        LayerSpec::RepEmbed {
            width,
            onehot_n: None,
        },
        levels,
        ReadoutKind::NearestEmbedding,
    );
    Ok(CircuitPlan {
        strategy: Strategy::GenericMonoidScan,
        layers,
        metrics: PlanMetrics {
            depth: levels,
            width,
            embedding_dim: width,
            attention_width: width,
            mlp_width: 0,
        },
        algebra: PlanAlgebra::Rep {
            monoid,
            reps,
            symbol_elements,
            catalog: None,
        },
        seq_capacity: Some(seq_len),
    })
}

/// Recomputes the metrics from the layer list and the plan algebra and
/// checks every metric invariant; any disagreement with the stored metrics
/// is an internal consistency bug.
pub fn plan_metrics(p: &CircuitPlan) -> Result<PlanMetrics> {
    let integrity = |reason: String| Error::PlanIntegrity { reason };

    let first = p.layers.first().ok_or_else(|| integrity("empty layer list".into()))?;
    if !first.is_embed() {
        return Err(integrity(format!(
            "plan must start with an embedding layer, found {}",
            first.kind_name()
        )));
    }
    if !matches!(p.layers.last(), Some(LayerSpec::Readout { .. })) {
        return Err(integrity("plan must end with a readout layer".into()));
    }

    let depth = p.layers.len() - 2;
    let scan_levels = p
        .layers
        .iter()
        .filter(|l| matches!(l, LayerSpec::ScanLevel { .. }))
        .count();

    let width = match (&p.strategy, &p.algebra) {
        (Strategy::FourierAffine, PlanAlgebra::Fourier) => {
            if scan_levels != 0 || depth != 2 {
                return Err(integrity(format!(
                    "FourierAffine plans are two fixed interior stages, got depth {depth}"
                )));
            }
            match &p.layers[0] {
                LayerSpec::FourierEmbed { modulus } => *modulus,
                other => {
                    return Err(integrity(format!(
                        "FourierAffine embed layer is {}",
                        other.kind_name()
                    )))
                }
            }
        }
        (Strategy::GroupRep, PlanAlgebra::Rep { reps, monoid, catalog, .. }) => {
            if scan_levels != 0 || depth != 1 {
                return Err(integrity(format!(
                    "GroupRep plans are one fused interior stage, got depth {depth}"
                )));
            }
            let width = reps.total_dim();
            if catalog.is_some() && width != monoid.size() {
                return Err(integrity(format!(
                    "catalog irreps must satisfy Σd² = |G|: {} vs {}",
                    width,
                    monoid.size()
                )));
            }
            width
        }
        (Strategy::SemidirectScan, PlanAlgebra::Semidirect { structure, h_reps, .. }) => {
            let expected = structure.n_size() + h_reps.total_dim();
            if p.metrics.embedding_dim != expected || p.metrics.attention_width != expected {
                return Err(integrity(format!(
                    "semidirect plans must have embedding_dim = attention_width = dim(N)+dim(ρ_H) = {expected}"
                )));
            }
            if depth != scan_levels {
                return Err(integrity("scan plans have only scan levels inside".into()));
            }
            expected
        }
        (Strategy::GenericMonoidScan, PlanAlgebra::Rep { reps, .. }) => {
            if depth != scan_levels {
                return Err(integrity("scan plans have only scan levels inside".into()));
            }
            reps.total_dim()
        }
        (strategy, _) => {
            return Err(integrity(format!(
                "strategy {strategy} does not match the plan algebra"
            )))
        }
    };

    let recomputed = PlanMetrics {
        depth,
        width,
        embedding_dim: p.metrics.embedding_dim,
        attention_width: p.metrics.attention_width,
        mlp_width: p.metrics.mlp_width,
    };
    if recomputed != p.metrics || width != p.metrics.width {
        return Err(integrity(format!(
            "stored metrics {:?} disagree with recomputed {:?}",
            p.metrics, recomputed
        )));
    }
    Ok(recomputed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mod_counter(n: usize) -> Semiautomaton {
        let col = (0..n).map(|x| (x + 1) % n).collect();
        Semiautomaton::new(n, vec!["σ".into()], vec![col]).unwrap()
    }

    fn z_table(n: usize) -> Vec<Vec<usize>> {
        (0..n)
            .map(|x| (0..n).map(|y| (x + y) % n).collect())
            .collect()
    }

    /// D_3 presented as Z_3 ⋊ Z_2 with the negation action, acting on its
    /// own six elements; states encoded as h·3 + n.
    pub(crate) fn d3_hinted_automaton() -> (Semiautomaton, SemidirectHint) {
        let action = vec![vec![0, 1, 2], vec![0, 2, 1]];
        let structure =
            crate::semidirect::sd_from_tables(z_table(3), z_table(2), action).unwrap();
        let encoding: Vec<SdElement> = structure.elements();
        let decode = |e: &SdElement| e.h * 3 + e.n;
        // symbols: a = (1, 0), b = (0, 1)
        let gens = [SdElement::new(1, 0), SdElement::new(0, 1)];
        let cols: Vec<Vec<usize>> = gens
            .iter()
            .map(|g| {
                encoding
                    .iter()
                    .map(|q| decode(&sd_multiply(&structure, *q, *g).unwrap()))
                    .collect()
            })
            .collect();
        let a = Semiautomaton::new(6, vec!["a".into(), "b".into()], cols).unwrap();
        (
            a,
            SemidirectHint {
                structure,
                state_encoding: encoding,
            },
        )
    }

    #[test]
    fn detect_affine_examples() {
        let inc = mod_counter(3);
        let maps = detect_affine(&inc).unwrap();
        assert_eq!((maps[0].a, maps[0].b), (1, 1));

        let constant = Semiautomaton::new(3, vec!["c".into()], vec![vec![0, 0, 0]]).unwrap();
        assert!(detect_affine(&constant).is_none());

        let double = Semiautomaton::new(3, vec!["d".into()], vec![vec![0, 2, 1]]).unwrap();
        let maps = detect_affine(&double).unwrap();
        assert_eq!((maps[0].a, maps[0].b), (2, 0));
    }

    #[test]
    fn detect_affine_rejects_non_affine() {
        // a permutation of Z_4 that is no affine map
        let a = Semiautomaton::new(4, vec!["p".into()], vec![vec![1, 0, 2, 3]]).unwrap();
        assert!(detect_affine(&a).is_none());
    }

    #[test]
    fn detect_group_on_counter() {
        let found = detect_group(&mod_counter(4), 100).unwrap().unwrap();
        assert_eq!(found.monoid.size(), 4);
        assert_eq!(found.catalog.as_deref(), Some("cyclic:4"));
        assert_eq!(found.reps.total_dim(), 4);
    }

    #[test]
    fn detect_group_rejects_resets() {
        let a = Semiautomaton::new(
            2,
            vec!["swap".into(), "set0".into()],
            vec![vec![1, 0], vec![0, 0]],
        )
        .unwrap();
        assert!(detect_group(&a, 100).unwrap().is_none());
    }

    #[test]
    fn detect_group_finds_sym3_on_three_states() {
        // generators (012) and (01) acting on 3 states
        let a = Semiautomaton::new(
            3,
            vec!["c".into(), "t".into()],
            vec![vec![1, 2, 0], vec![1, 0, 2]],
        )
        .unwrap();
        let found = detect_group(&a, 100).unwrap().unwrap();
        assert_eq!(found.monoid.size(), 6);
        assert!(found.catalog.is_some());
        assert_eq!(found.reps.total_dim(), 6);
        let all_perms = found
            .monoid
            .element_labels()
            .unwrap()
            .iter()
            .all(|t| t.is_permutation());
        assert!(all_perms);
    }

    #[test]
    fn compile_mod5_counter_is_constant_depth() {
        let a = mod_counter(5);
        let p1 = compile(&a, None, StrategyOverride::Auto, 1).unwrap();
        let p64 = compile(&a, None, StrategyOverride::Auto, 64).unwrap();
        assert_eq!(p1.strategy, Strategy::FourierAffine);
        assert_eq!(p1.metrics.depth, 2);
        assert_eq!(p1.metrics.width, 5);
        assert_eq!(p1, p64, "plan must not depend on T");
        plan_metrics(&p1).unwrap();
    }

    #[test]
    fn compile_sym3_uses_group_rep() {
        // every permutation of 3 points is affine mod 3, so auto would pick
        // the Fourier path here; the rep override exercises the group path
        let a = Semiautomaton::new(
            3,
            vec!["c".into(), "t".into()],
            vec![vec![1, 2, 0], vec![1, 0, 2]],
        )
        .unwrap();
        let p = compile(&a, None, StrategyOverride::Rep, 16).unwrap();
        assert_eq!(p.strategy, Strategy::GroupRep);
        assert_eq!(p.metrics.width, 6);
        assert_eq!(p.metrics.depth, 1);
        plan_metrics(&p).unwrap();
    }

    #[test]
    fn compile_d3_hint_matches_appendix_widths() {
        let (a, hint) = d3_hinted_automaton();
        let p = compile(&a, Some(&hint), StrategyOverride::Auto, 8).unwrap();
        assert_eq!(p.strategy, Strategy::SemidirectScan);
        assert_eq!(p.metrics.depth, 6, "2·ceil(log₂ 8)");
        assert_eq!(p.metrics.embedding_dim, 3 + 2);
        assert_eq!(p.metrics.attention_width, 3 + 2);
        assert_eq!(p.metrics.mlp_width, 3);
        plan_metrics(&p).unwrap();
    }

    #[test]
    fn scan_depth_grows_two_levels_per_doubling() {
        let (a, hint) = d3_hinted_automaton();
        for t in [2usize, 8, 32, 128] {
            let p = compile(&a, Some(&hint), StrategyOverride::Auto, t).unwrap();
            let p4 = compile(&a, Some(&hint), StrategyOverride::Auto, 4 * t).unwrap();
            assert_eq!(p4.metrics.depth, p.metrics.depth + 4);
        }
    }

    #[test]
    fn compile_generic_fallback() {
        let a = Semiautomaton::new(
            2,
            vec!["swap".into(), "set0".into()],
            vec![vec![1, 0], vec![0, 0]],
        )
        .unwrap();
        let p = compile(&a, None, StrategyOverride::Auto, 16).unwrap();
        assert_eq!(p.strategy, Strategy::GenericMonoidScan);
        assert_eq!(p.metrics.width, 16, "regular-representation width |S|²");
        plan_metrics(&p).unwrap();
    }

    #[test]
    fn override_rejections() {
        let a = Semiautomaton::new(
            2,
            vec!["swap".into(), "set0".into()],
            vec![vec![1, 0], vec![0, 0]],
        )
        .unwrap();
        assert!(matches!(
            compile(&a, None, StrategyOverride::Fourier, 4).unwrap_err(),
            Error::NotAffine { .. }
        ));
        assert!(matches!(
            compile(&a, None, StrategyOverride::Rep, 4).unwrap_err(),
            Error::NotAGroup
        ));
    }

    #[test]
    fn mismatched_hint_is_rejected_with_witness() {
        let (a, mut hint) = d3_hinted_automaton();
        hint.state_encoding.swap(1, 2);
        let err = compile(&a, Some(&hint), StrategyOverride::Auto, 8).unwrap_err();
        assert!(matches!(err, Error::HintMismatch { .. }), "{err:?}");
    }

    #[test]
    fn plan_metrics_examples() {
        let p = compile(&mod_counter(7), None, StrategyOverride::Auto, 4).unwrap();
        assert_eq!(plan_metrics(&p).unwrap().width, 7);

        let (a, hint) = d3_hinted_automaton();
        let p = compile(&a, Some(&hint), StrategyOverride::Auto, 1024).unwrap();
        assert_eq!(plan_metrics(&p).unwrap().depth, 20);
    }

    #[test]
    fn plan_metrics_detects_tampering() {
        let mut p = compile(&mod_counter(3), None, StrategyOverride::Auto, 4).unwrap();
        p.metrics.width = 99;
        assert!(plan_metrics(&p).is_err());
    }
}
