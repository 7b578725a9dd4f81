//! Semidirect products `N ⋊ H`: an additive monoid `N` (memory), a group `H`
//! (control) acting on `N`, pairs `(n, h)` with the product
//! `(n₁,h₁)(n₂,h₂) = (n₁ + h₁·n₂, h₁h₂)` — associative even when `N` has no
//! inverses — and sequential plus log-depth tree prefix scans over it.

use serde::{Deserialize, Serialize};

use crate::algebra::{is_group, FiniteMonoid};
use crate::error::{Error, Result};

/// Pair count above which the structure laws are checked by sampling.
const EXHAUSTIVE_PAIR_LIMIT: usize = 36;
const SAMPLED_TRIPLES: usize = 100_000;

/// An element `(n, h)` of a semidirect product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdElement {
    pub n: usize,
    pub h: usize,
}

impl SdElement {
    pub fn new(n: usize, h: usize) -> Self {
        Self { n, h }
    }
}

/// `N ⋊ H`: additive monoid `N` with identity `0`, group `H`, and an action
/// table `action[h][n]`. Construction verifies that the action is a monoid
/// homomorphism in `n` for each `h`, compatible with the group product, and
/// that the induced product on pairs is associative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemidirectStructure {
    n_monoid: FiniteMonoid,
    h_group: FiniteMonoid,
    action: Vec<Vec<usize>>,
}

impl SemidirectStructure {
    pub fn n_monoid(&self) -> &FiniteMonoid {
        &self.n_monoid
    }

    pub fn h_group(&self) -> &FiniteMonoid {
        &self.h_group
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    pub fn n_size(&self) -> usize {
        self.n_monoid.size()
    }

    pub fn h_size(&self) -> usize {
        self.h_group.size()
    }

    pub fn order(&self) -> usize {
        self.n_size() * self.h_size()
    }

    pub fn identity(&self) -> SdElement {
        SdElement {
            n: self.n_monoid.identity().expect("N has identity 0"),
            h: self.h_group.identity().expect("H is a group"),
        }
    }

    pub fn apply_action(&self, h: usize, n: usize) -> usize {
        self.action[h][n]
    }

    /// All `|N|·|H|` elements in the fixed order `h·|N| + n`.
    pub fn elements(&self) -> Vec<SdElement> {
        let mut out = Vec::with_capacity(self.order());
        for h in 0..self.h_size() {
            for n in 0..self.n_size() {
                out.push(SdElement { n, h });
            }
        }
        out
    }
}

/// Builds and validates a semidirect structure from raw tables. Fails with a
/// named law and a witness triple when any invariant is violated.
pub fn sd_from_tables(
    n_table: Vec<Vec<usize>>,
    h_table: Vec<Vec<usize>>,
    action: Vec<Vec<usize>>,
) -> Result<SemidirectStructure> {
    let n_monoid = FiniteMonoid::new(n_table, Some(0), None)?;
    let h_group = FiniteMonoid::new(h_table, Some(0), None)?;
    if is_group(&h_group).is_none() {
        return Err(Error::SemidirectLaw {
            law: "H must be a group",
            x: 0,
            y: 0,
            z: 0,
        });
    }
    let n = n_monoid.size();
    let h = h_group.size();
    if action.len() != h || action.iter().any(|row| row.len() != n) {
        return Err(Error::SemidirectLaw {
            law: "action table shape (|H| rows of |N| entries)",
            x: action.len(),
            y: h,
            z: n,
        });
    }
    for row in &action {
        for &v in row {
            if v >= n {
                return Err(Error::SemidirectLaw {
                    law: "action closure",
                    x: v,
                    y: n,
                    z: 0,
                });
            }
        }
    }

    let s = SemidirectStructure {
        n_monoid,
        h_group,
        action,
    };

    let e_n = s.n_monoid.identity().unwrap();
    let e_h = s.h_group.identity().unwrap();
    // h·0 = 0 and e·n = n
    for hh in 0..h {
        if s.action[hh][e_n] != e_n {
            return Err(Error::SemidirectLaw {
                law: "action fixes 0",
                x: hh,
                y: e_n,
                z: 0,
            });
        }
    }
    for nn in 0..n {
        if s.action[e_h][nn] != nn {
            return Err(Error::SemidirectLaw {
                law: "identity acts trivially",
                x: e_h,
                y: nn,
                z: 0,
            });
        }
    }
    // h·(n₁+n₂) = h·n₁ + h·n₂
    for hh in 0..h {
        for n1 in 0..n {
            for n2 in 0..n {
                let lhs = s.action[hh][s.n_monoid.product(n1, n2)];
                let rhs = s.n_monoid.product(s.action[hh][n1], s.action[hh][n2]);
                if lhs != rhs {
                    return Err(Error::SemidirectLaw {
                        law: "action is additive in n",
                        x: hh,
                        y: n1,
                        z: n2,
                    });
                }
            }
        }
    }
    // (h₁h₂)·n = h₁·(h₂·n) under the crate convention for the H product
    for h1 in 0..h {
        for h2 in 0..h {
            for nn in 0..n {
                let lhs = s.action[s.h_group.product(h1, h2)][nn];
                let rhs = s.action[h1][s.action[h2][nn]];
                if lhs != rhs {
                    return Err(Error::SemidirectLaw {
                        law: "action compatible with H product",
                        x: h1,
                        y: h2,
                        z: nn,
                    });
                }
            }
        }
    }

    // associativity of the induced product on pairs
    let order = s.order();
    let elements = s.elements();
    let idx = |e: SdElement| e.h * s.n_size() + e.n;
    let assoc = |x: SdElement, y: SdElement, z: SdElement| {
        let lhs = multiply(&s, multiply(&s, x, y), z);
        let rhs = multiply(&s, x, multiply(&s, y, z));
        lhs == rhs
    };
    if order <= EXHAUSTIVE_PAIR_LIMIT {
        for &x in &elements {
            for &y in &elements {
                for &z in &elements {
                    if !assoc(x, y, z) {
                        return Err(Error::SemidirectLaw {
                            law: "induced product associativity",
                            x: idx(x),
                            y: idx(y),
                            z: idx(z),
                        });
                    }
                }
            }
        }
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5d_a550c);
        for _ in 0..SAMPLED_TRIPLES {
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| SdElement {
                n: rng.random_range(0..s.n_size()),
                h: rng.random_range(0..s.h_size()),
            };
            let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            if !assoc(x, y, z) {
                return Err(Error::SemidirectLaw {
                    law: "induced product associativity",
                    x: idx(x),
                    y: idx(y),
                    z: idx(z),
                });
            }
        }
    }

    Ok(s)
}

fn multiply(s: &SemidirectStructure, x: SdElement, y: SdElement) -> SdElement {
    SdElement {
        n: s.n_monoid.product(x.n, s.action[x.h][y.n]),
        h: s.h_group.product(x.h, y.h),
    }
}

/// `(n₁,h₁)(n₂,h₂) = (n₁ + h₁·n₂, h₁h₂)`, with index checks.
pub fn sd_multiply(s: &SemidirectStructure, x: SdElement, y: SdElement) -> Result<SdElement> {
    for e in [x, y] {
        if e.n >= s.n_size() {
            return Err(Error::ElementOutOfRange {
                index: e.n,
                size: s.n_size(),
            });
        }
        if e.h >= s.h_size() {
            return Err(Error::ElementOutOfRange {
                index: e.h,
                size: s.h_size(),
            });
        }
    }
    Ok(multiply(s, x, y))
}

/// Inclusive prefix products, left to right: `out[t] = elems[0]·…·elems[t]`.
pub fn sd_scan_sequential(s: &SemidirectStructure, elems: &[SdElement]) -> Vec<SdElement> {
    let mut out = Vec::with_capacity(elems.len());
    let mut acc = None;
    for &e in elems {
        let next = match acc {
            None => e,
            Some(prev) => multiply(s, prev, e),
        };
        out.push(next);
        acc = Some(next);
    }
    out
}

/// Number of sequential combine levels a tree scan executed, split into the
/// up-sweep and down-sweep phases. Each phase runs `ceil(log₂ T)` levels;
/// combines within one level are independent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanDepth {
    pub up_levels: usize,
    pub down_levels: usize,
}

impl ScanDepth {
    pub fn total(&self) -> usize {
        self.up_levels + self.down_levels
    }
}

/// Blelloch two-phase tree scan over any associative combine, generic so the
/// integer semidirect scan and the runtime's vector scans share one shape.
/// Produces the *exclusive* prefixes in place and reports the levels run;
/// `on_level` fires once per combine level.
pub(crate) fn blelloch_exclusive<T: Clone, E>(
    items: &mut Vec<T>,
    identity: T,
    combine: &mut impl FnMut(&T, &T) -> std::result::Result<T, E>,
    on_level: &mut impl FnMut(&[T]),
) -> std::result::Result<ScanDepth, E> {
    let len = items.len();
    if len == 0 {
        return Ok(ScanDepth {
            up_levels: 0,
            down_levels: 0,
        });
    }
    let padded = len.next_power_of_two();
    items.resize(padded, identity.clone());
    let levels = padded.trailing_zeros() as usize;

    for d in 0..levels {
        let stride = 1usize << (d + 1);
        let half = 1usize << d;
        let mut i = 0;
        while i < padded {
            let merged = combine(&items[i + half - 1], &items[i + stride - 1])?;
            items[i + stride - 1] = merged;
            i += stride;
        }
        on_level(items);
    }

    items[padded - 1] = identity;
    for d in (0..levels).rev() {
        let stride = 1usize << (d + 1);
        let half = 1usize << d;
        let mut i = 0;
        while i < padded {
            let left = items[i + half - 1].clone();
            items[i + half - 1] = items[i + stride - 1].clone();
            // incoming prefix first, then the left subtree total
            items[i + stride - 1] = combine(&items[i + stride - 1], &left)?;
            i += stride;
        }
        on_level(items);
    }

    items.truncate(len);
    Ok(ScanDepth {
        up_levels: levels,
        down_levels: levels,
    })
}

/// Tree prefix scan: same output as [`sd_scan_sequential`], depth
/// `2·ceil(log₂ T)` combine levels (up-sweep plus down-sweep). The exclusive
/// scan is converted to inclusive by one extra combine per position, which
/// is per-token parallel and not a level.
pub fn sd_scan_tree(s: &SemidirectStructure, elems: &[SdElement]) -> (Vec<SdElement>, ScanDepth) {
    let mut work = elems.to_vec();
    let mut combine = |a: &SdElement, b: &SdElement| -> std::result::Result<SdElement, ()> {
        Ok(multiply(s, *a, *b))
    };
    let depth = blelloch_exclusive(&mut work, s.identity(), &mut combine, &mut |_| {})
        .expect("integer combine cannot fail");
    let inclusive = work
        .iter()
        .zip(elems)
        .map(|(prefix, e)| multiply(s, *prefix, *e))
        .collect();
    (inclusive, depth)
}
