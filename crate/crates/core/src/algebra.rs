//! Exact finite-algebra substrate: semiautomata, transformations of a finite
//! state set, and finite monoids given by Cayley tables.
//!
//! Everything here is integer-exact. The composition convention is fixed
//! once for the whole crate: transformations act on the right of states, and
//! `compose(x, y)` means "apply `x` first, then `y`". With that convention a
//! left-to-right fold over input symbols computes the transition applied to
//! the initial state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Triple count above which monoid associativity is checked by sampling
/// instead of exhaustively.
const EXHAUSTIVE_ASSOC_LIMIT: usize = 64;
const SAMPLED_ASSOC_TRIPLES: usize = 100_000;

/// A semiautomaton `(Q, Σ, δ)`: states `0..num_states`, a named alphabet,
/// and one complete transition column per symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Semiautomaton {
    num_states: usize,
    alphabet: Vec<String>,
    /// `transitions[s][q]` is `δ(q, symbol s)`.
    transitions: Vec<Vec<usize>>,
}

impl Semiautomaton {
    pub fn new(
        num_states: usize,
        alphabet: Vec<String>,
        transitions: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::FileField {
                field: "states",
                reason: "automaton must have at least one state".into(),
            });
        }
        if transitions.len() != alphabet.len() {
            return Err(Error::FileField {
                field: "transitions",
                reason: format!(
                    "{} columns for {} symbols",
                    transitions.len(),
                    alphabet.len()
                ),
            });
        }
        for (sym, col) in alphabet.iter().zip(&transitions) {
            if col.len() != num_states {
                return Err(Error::IncompleteColumn {
                    symbol: sym.clone(),
                    got: col.len(),
                    expected: num_states,
                });
            }
            for &target in col {
                if target >= num_states {
                    return Err(Error::StateOutOfRange {
                        state: target,
                        num_states,
                    });
                }
            }
        }
        Ok(Self {
            num_states,
            alphabet,
            transitions,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    /// `δ(state, symbol)`. Both arguments must be in range.
    pub fn step(&self, state: usize, symbol: usize) -> usize {
        self.transitions[symbol][state]
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == name)
    }

    /// The transition column of `symbol` as a concrete map on states.
    pub fn symbol_transformation(&self, symbol: usize) -> Transformation {
        Transformation {
            image: self.transitions[symbol].clone(),
        }
    }

    /// Maps named symbols to indices, reporting the offending symbol and its
    /// position on failure.
    pub fn tokenize<S: AsRef<str>>(&self, symbols: &[S]) -> Result<Vec<usize>> {
        symbols
            .iter()
            .enumerate()
            .map(|(position, s)| {
                self.symbol_index(s.as_ref()).ok_or(Error::UnknownSymbol {
                    symbol: s.as_ref().to_string(),
                    position,
                })
            })
            .collect()
    }
}

/// A total map `Q → Q`, stored as the image of each state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transformation {
    image: Vec<usize>,
}

impl Transformation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        for &v in &image {
            if v >= n {
                return Err(Error::BadTransformation {
                    value: v,
                    num_states: n,
                });
            }
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    pub fn apply(&self, state: usize) -> usize {
        self.image[state]
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Apply `self` first, then `other`.
    pub fn then(&self, other: &Transformation) -> Transformation {
        Transformation {
            image: self.image.iter().map(|&q| other.image[q]).collect(),
        }
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.image.len()];
        for &v in &self.image {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }
}

/// A finite monoid (or semigroup) presented by its Cayley table.
///
/// `cayley[x][y]` is the product `x · y` under the crate-wide convention
/// "apply `x` first, then `y`". Closure, associativity and the identity laws
/// are checked at construction; associativity exhaustively up to
/// 64 elements and on 10⁵ sampled triples above that.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteMonoid {
    size: usize,
    pub cayley: Vec<Vec<usize>>,
    identity: Option<usize>,
    element_labels: Option<Vec<Transformation>>,
}

impl FiniteMonoid {
    pub fn new(
        cayley: Vec<Vec<usize>>,
        identity: Option<usize>,
        element_labels: Option<Vec<Transformation>>,
    ) -> Result<Self> {
        let size = cayley.len();
        if size == 0 {
            return Err(Error::MonoidLaw {
                law: "nonempty carrier",
                x: 0,
                y: 0,
                z: 0,
            });
        }
        for row in &cayley {
            if row.len() != size {
                return Err(Error::MonoidLaw {
                    law: "square table",
                    x: row.len(),
                    y: size,
                    z: 0,
                });
            }
            for &v in row {
                if v >= size {
                    return Err(Error::MonoidLaw {
                        law: "closure",
                        x: v,
                        y: size,
                        z: 0,
                    });
                }
            }
        }
        if let Some(labels) = &element_labels {
            if labels.len() != size {
                return Err(Error::MonoidLaw {
                    law: "one label per element",
                    x: labels.len(),
                    y: size,
                    z: 0,
                });
            }
        }
        let monoid = Self {
            size,
            cayley,
            identity,
            element_labels,
        };
        monoid.check_associativity()?;
        if let Some(e) = identity {
            if e >= size {
                return Err(Error::ElementOutOfRange { index: e, size });
            }
            for x in 0..size {
                if monoid.cayley[e][x] != x || monoid.cayley[x][e] != x {
                    return Err(Error::MonoidLaw {
                        law: "identity",
                        x: e,
                        y: x,
                        z: 0,
                    });
                }
            }
        }
        Ok(monoid)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.size;
        let assoc = |x: usize, y: usize, z: usize| {
            self.cayley[self.cayley[x][y]][z] == self.cayley[x][self.cayley[y][z]]
        };
        if n <= EXHAUSTIVE_ASSOC_LIMIT {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        if !assoc(x, y, z) {
                            return Err(Error::MonoidLaw {
                                law: "associativity",
                                x,
                                y,
                                z,
                            });
                        }
                    }
                }
            }
        } else {
            // Fixed-seed sampling keeps construction deterministic.
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_a550c);
            for _ in 0..SAMPLED_ASSOC_TRIPLES {
                let x = rng.random_range(0..n);
                let y = rng.random_range(0..n);
                let z = rng.random_range(0..n);
                if !assoc(x, y, z) {
                    return Err(Error::MonoidLaw {
                        law: "associativity",
                        x,
                        y,
                        z,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> Option<usize> {
        self.identity
    }

    pub fn element_labels(&self) -> Option<&[Transformation]> {
        self.element_labels.as_deref()
    }

    pub fn label(&self, x: usize) -> Option<&Transformation> {
        self.element_labels.as_ref().map(|l| &l[x])
    }

    /// Index of the element labelled by `t`, if labels are present.
    pub fn find_label(&self, t: &Transformation) -> Option<usize> {
        self.element_labels
            .as_ref()
            .and_then(|labels| labels.iter().position(|l| l == t))
    }

    /// Unchecked product lookup.
    pub fn product(&self, x: usize, y: usize) -> usize {
        self.cayley[x][y]
    }

    /// Order of `x`: the least `k ≥ 1` with `x^k = e`. Requires an identity;
    /// returns `None` if the powers never reach it (non-invertible element).
    pub fn element_order(&self, x: usize) -> Option<usize> {
        let e = self.identity?;
        let mut acc = x;
        for k in 1..=self.size {
            if acc == e {
                return Some(k);
            }
            acc = self.cayley[acc][x];
        }
        None
    }
}

/// Range-checked Cayley lookup: the product `x · y` ("apply x, then y").
pub fn compose(m: &FiniteMonoid, x: usize, y: usize) -> Result<usize> {
    let size = m.size();
    for idx in [x, y] {
        if idx >= size {
            return Err(Error::ElementOutOfRange { index: idx, size });
        }
    }
    Ok(m.product(x, y))
}

/// Runs the automaton directly: the ground-truth oracle every compiled
/// circuit is checked against. Returns the whole trajectory including `q0`.
pub fn direct_run(a: &Semiautomaton, q0: usize, input: &[usize]) -> Result<Vec<usize>> {
    if q0 >= a.num_states() {
        return Err(Error::StateOutOfRange {
            state: q0,
            num_states: a.num_states(),
        });
    }
    let mut trajectory = Vec::with_capacity(input.len() + 1);
    trajectory.push(q0);
    let mut state = q0;
    for (position, &symbol) in input.iter().enumerate() {
        if symbol >= a.num_symbols() {
            return Err(Error::SymbolOutOfRange {
                index: symbol,
                position,
                alphabet_len: a.num_symbols(),
            });
        }
        state = a.step(state, symbol);
        trajectory.push(state);
    }
    Ok(trajectory)
}

/// Closure of the per-symbol transition maps under composition, with the
/// identity adjoined, as a labelled monoid.
///
/// Fails with [`Error::MonoidTooLarge`] once the closure passes `max_size`.
pub fn transition_monoid(a: &Semiautomaton, max_size: usize) -> Result<FiniteMonoid> {
    if max_size < a.num_symbols() + 1 {
        return Err(Error::MaxSizeTooSmall {
            max_size,
            required: a.num_symbols() + 1,
        });
    }
    let generators: Vec<Transformation> = (0..a.num_symbols())
        .map(|s| a.symbol_transformation(s))
        .collect();

    let mut elements: Vec<Transformation> = vec![Transformation::identity(a.num_states())];
    let mut index_of = std::collections::HashMap::new();
    index_of.insert(elements[0].clone(), 0usize);

    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        for g in &generators {
            let next = current.then(g);
            if !index_of.contains_key(&next) {
                if elements.len() >= max_size {
                    return Err(Error::MonoidTooLarge {
                        max_size,
                        found: elements.len() + 1,
                    });
                }
                index_of.insert(next.clone(), elements.len());
                elements.push(next);
            }
        }
        frontier += 1;
    }

    let size = elements.len();
    let mut cayley = vec![vec![0usize; size]; size];
    for x in 0..size {
        for y in 0..size {
            let prod = elements[x].then(&elements[y]);
            cayley[x][y] = *index_of
                .get(&prod)
                .expect("closure is closed under composition");
        }
    }
    FiniteMonoid::new(cayley, Some(0), Some(elements))
}

/// Returns the inverse table when `m` is a group (identity present and every
/// element two-sided invertible), `None` otherwise.
pub fn is_group(m: &FiniteMonoid) -> Option<Vec<usize>> {
    let e = m.identity()?;
    let n = m.size();
    let mut inverses = vec![0usize; n];
    for x in 0..n {
        let inv = (0..n).find(|&y| m.product(x, y) == e && m.product(y, x) == e)?;
        inverses[x] = inv;
    }
    Some(inverses)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mod_counter(n: usize) -> Semiautomaton {
        let col = (0..n).map(|x| (x + 1) % n).collect();
        Semiautomaton::new(n, vec!["σ".into()], vec![col]).unwrap()
    }

    /// id, swap, const0, const1 on two states.
    fn flip_flop_like() -> Semiautomaton {
        Semiautomaton::new(
            2,
            vec!["swap".into(), "set0".into()],
            vec![vec![1, 0], vec![0, 0]],
        )
        .unwrap()
    }

    #[test]
    fn direct_run_counts_mod_3() {
        let a = mod_counter(3);
        let traj = direct_run(&a, 0, &[0, 0, 0]).unwrap();
        assert_eq!(traj, vec![0, 1, 2, 0]);
    }

    #[test]
    fn direct_run_empty_input() {
        let a = mod_counter(4);
        assert_eq!(direct_run(&a, 2, &[]).unwrap(), vec![2]);
    }

    #[test]
    fn direct_run_matches_hand_rolled_loop() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let num_states = 5;
        let alphabet = vec!["a".into(), "b".into()];
        let transitions: Vec<Vec<usize>> = (0..2)
            .map(|_| (0..num_states).map(|_| rng.random_range(0..num_states)).collect())
            .collect();
        let a = Semiautomaton::new(num_states, alphabet, transitions.clone()).unwrap();
        let input: Vec<usize> = (0..20).map(|_| rng.random_range(0..2)).collect();
        let q0 = rng.random_range(0..num_states);

        // Independent oracle: an explicit loop over the raw tables.
        let mut expected = vec![q0];
        let mut state = q0;
        for &s in &input {
            state = transitions[s][state];
            expected.push(state);
        }
        assert_eq!(direct_run(&a, q0, &input).unwrap(), expected);
    }

    #[test]
    fn direct_run_rejects_bad_symbol() {
        let a = mod_counter(3);
        let err = direct_run(&a, 0, &[0, 5]).unwrap_err();
        match err {
            Error::SymbolOutOfRange { index, position, .. } => {
                assert_eq!(index, 5);
                assert_eq!(position, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn tokenize_names_symbol_and_position() {
        let a = flip_flop_like();
        let err = a.tokenize(&["swap", "bogus"]).unwrap_err();
        match err {
            Error::UnknownSymbol { symbol, position } => {
                assert_eq!(symbol, "bogus");
                assert_eq!(position, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    /// Brute-force closure oracle: compose images until fixpoint.
    fn brute_force_closure(gens: &[Transformation], n: usize) -> Vec<Transformation> {
        let mut set = vec![Transformation::identity(n)];
        loop {
            let mut added = false;
            for x in set.clone() {
                for g in gens {
                    let prod = x.then(g);
                    if !set.contains(&prod) {
                        set.push(prod);
                        added = true;
                    }
                }
            }
            if !added {
                return set;
            }
        }
    }

    #[test]
    fn transition_monoid_of_shift_is_z3() {
        let a = mod_counter(3);
        let m = transition_monoid(&a, 100).unwrap();
        assert_eq!(m.size(), 3);
        let oracle = brute_force_closure(&[a.symbol_transformation(0)], 3);
        assert_eq!(oracle.len(), 3);
        // shift monoid is a group with inverses +0↦+0, +1↦+2, +2↦+1
        let shift1 = m.find_label(&a.symbol_transformation(0)).unwrap();
        let inv = is_group(&m).unwrap();
        assert_eq!(inv[0], 0);
        let shift2 = m.product(shift1, shift1);
        assert_eq!(inv[shift1], shift2);
        assert_eq!(inv[shift2], shift1);
    }

    #[test]
    fn transition_monoid_identity_generator() {
        let a = Semiautomaton::new(3, vec!["e".into()], vec![vec![0, 1, 2]]).unwrap();
        let m = transition_monoid(&a, 10).unwrap();
        assert_eq!(m.size(), 1);
    }

    #[test]
    fn transition_monoid_swap_and_const() {
        let a = flip_flop_like();
        let m = transition_monoid(&a, 100).unwrap();
        // brute force over all 4 functions on 2 points
        let oracle = brute_force_closure(
            &[a.symbol_transformation(0), a.symbol_transformation(1)],
            2,
        );
        assert_eq!(oracle.len(), 4);
        assert_eq!(m.size(), 4);
        assert!(is_group(&m).is_none(), "const0 has no inverse");
        // closure property: composing any two labels lands back in the set
        let labels = m.element_labels().unwrap().to_vec();
        for x in &labels {
            for y in &labels {
                assert!(m.find_label(&x.then(y)).is_some());
            }
        }
    }

    #[test]
    fn transition_monoid_respects_max_size() {
        let a = flip_flop_like();
        match transition_monoid(&a, 3).unwrap_err() {
            Error::MonoidTooLarge { max_size, found } => {
                assert_eq!(max_size, 3);
                assert_eq!(found, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn compose_matches_pointwise_composition() {
        let a = flip_flop_like();
        let m = transition_monoid(&a, 100).unwrap();
        let swap = m.find_label(&a.symbol_transformation(0)).unwrap();
        let const0 = m.find_label(&a.symbol_transformation(1)).unwrap();
        // const0 then swap = const1
        let const1 = m
            .find_label(&Transformation::new(vec![1, 1]).unwrap())
            .unwrap();
        assert_eq!(compose(&m, const0, swap).unwrap(), const1);
        // e·x = x
        for x in 0..m.size() {
            assert_eq!(compose(&m, 0, x).unwrap(), x);
        }
        // pointwise oracle over all pairs
        let labels = m.element_labels().unwrap().to_vec();
        for x in 0..m.size() {
            for y in 0..m.size() {
                let expected = labels[x].then(&labels[y]);
                assert_eq!(labels[compose(&m, x, y).unwrap()], expected);
            }
        }
    }

    #[test]
    fn compose_rejects_out_of_range() {
        let a = mod_counter(2);
        let m = transition_monoid(&a, 100).unwrap();
        assert!(compose(&m, 0, 7).is_err());
    }

    #[test]
    fn shift_composition_wraps() {
        let a = mod_counter(3);
        let m = transition_monoid(&a, 100).unwrap();
        let s1 = m.find_label(&a.symbol_transformation(0)).unwrap();
        let s2 = m.product(s1, s1);
        // shift(+1)·shift(+2) = shift(+0) = identity
        assert_eq!(m.product(s1, s2), 0);
    }

    #[test]
    fn trivial_monoid_is_group() {
        let m = FiniteMonoid::new(vec![vec![0]], Some(0), None).unwrap();
        assert_eq!(is_group(&m), Some(vec![0]));
    }

    #[test]
    fn group_rows_and_columns_are_permutations() {
        let a = mod_counter(5);
        let m = transition_monoid(&a, 100).unwrap();
        assert!(is_group(&m).is_some());
        for x in 0..m.size() {
            let row: Vec<usize> = (0..m.size()).map(|y| m.product(x, y)).collect();
            let col: Vec<usize> = (0..m.size()).map(|y| m.product(y, x)).collect();
            assert!(Transformation::new(row).unwrap().is_permutation());
            assert!(Transformation::new(col).unwrap().is_permutation());
        }
    }

    #[test]
    fn bad_cayley_rejected() {
        // non-associative magma on 2 elements
        let err = FiniteMonoid::new(vec![vec![1, 1], vec![0, 1]], None, None).unwrap_err();
        assert!(matches!(err, Error::MonoidLaw { law: "associativity", .. }));
    }

    #[test]
    fn fold_composition_of_runs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = flip_flop_like();
        for _ in 0..50 {
            let u: Vec<usize> = (0..rng.random_range(0..8)).map(|_| rng.random_range(0..2)).collect();
            let v: Vec<usize> = (0..rng.random_range(0..8)).map(|_| rng.random_range(0..2)).collect();
            let uv: Vec<usize> = u.iter().chain(v.iter()).copied().collect();
            let full = direct_run(&a, 0, &uv).unwrap();
            let first = direct_run(&a, 0, &u).unwrap();
            let second = direct_run(&a, *first.last().unwrap(), &v).unwrap();
            let stitched: Vec<usize> = first
                .iter()
                .copied()
                .chain(second.iter().skip(1).copied())
                .collect();
            assert_eq!(full, stitched);
        }
    }
}
