//! Matrix representations of finite monoids and groups: the built-in
//! irreducible catalog, the regular-representation fallback, the direct-sum
//! embedding `Φ(x) = ⊕ ρ⁽ʲ⁾(x)`, and homomorphism/width verification.
//!
//! Every representation constructed here is verified rather than trusted:
//! construction checks `ρ(x·y) = ρ(x)·ρ(y)` over all pairs (exactly where
//! the matrices are integer, within `1e−9` otherwise) and `ρ(e) = I`.

mod catalog;
mod matrix;

pub use catalog::{builtin_group_irreps, catalog_entry, catalog_names, recognize_group, CatalogEntry};
pub use matrix::{int_mul, SquareMatrix};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteMonoid;
use crate::error::{Error, Result};

/// Entrywise tolerance for homomorphism checks on float-valued reps.
pub const HOMOMORPHISM_TOL: f64 = 1e-9;
/// ∞-norm tolerance for decoding an embedding back to an element.
pub const READOUT_TOL: f64 = 1e-6;

/// One matrix homomorphism `ρ: S → C^{d×d}`, with one matrix per element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRep {
    dim: usize,
    matrices: Vec<SquareMatrix>,
    /// Exact copy kept when every matrix is integer-valued.
    exact: Option<Vec<Vec<i64>>>,
}

impl MatrixRep {
    /// Wraps matrices after verifying the homomorphism property against the
    /// monoid's Cayley table (and `ρ(e) = I` when an identity is present).
    pub fn verified(monoid: &FiniteMonoid, dim: usize, matrices: Vec<SquareMatrix>) -> Result<Self> {
        assert_eq!(matrices.len(), monoid.size());
        let exact: Option<Vec<Vec<i64>>> =
            matrices.iter().map(SquareMatrix::to_integer).collect();
        let rep = Self {
            dim,
            matrices,
            exact,
        };
        rep.check_homomorphism(monoid)?;
        if let Some(e) = monoid.identity() {
            if rep.matrices[e].max_abs_diff(&SquareMatrix::identity(dim)) > HOMOMORPHISM_TOL {
                return Err(Error::MonoidLaw {
                    law: "representation of identity",
                    x: e,
                    y: 0,
                    z: 0,
                });
            }
        }
        Ok(rep)
    }

    fn check_homomorphism(&self, monoid: &FiniteMonoid) -> Result<()> {
        let n = monoid.size();
        for x in 0..n {
            for y in 0..n {
                let xy = monoid.product(x, y);
                if let Some(exact) = &self.exact {
                    if int_mul(self.dim, &exact[x], &exact[y]) != exact[xy] {
                        return Err(Error::MonoidLaw {
                            law: "representation homomorphism",
                            x,
                            y,
                            z: xy,
                        });
                    }
                } else {
                    let prod = self.matrices[x].mul(&self.matrices[y]);
                    if prod.max_abs_diff(&self.matrices[xy]) > HOMOMORPHISM_TOL {
                        return Err(Error::MonoidLaw {
                            law: "representation homomorphism",
                            x,
                            y,
                            z: xy,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, element: usize) -> &SquareMatrix {
        &self.matrices[element]
    }

    pub fn num_elements(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_integer_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_matrix(&self, element: usize) -> Option<&[i64]> {
        self.exact.as_ref().map(|e| e[element].as_slice())
    }

    /// Character of the representation: the trace at each element.
    pub fn character(&self) -> Vec<Complex64> {
        self.matrices.iter().map(SquareMatrix::trace).collect()
    }
}

/// An ordered family of representations realizing `Φ(x) = ⊕ ρ⁽ʲ⁾(x)`, the
/// block-structured frequency-domain state vector of total length
/// `D = Σ dⱼ²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationSet {
    reps: Vec<MatrixRep>,
    total_dim: usize,
    faithful: bool,
}

impl RepresentationSet {
    pub fn new(reps: Vec<MatrixRep>) -> Self {
        let total_dim = reps.iter().map(|r| r.dim * r.dim).sum();
        let mut rs = Self {
            reps,
            total_dim,
            faithful: false,
        };
        rs.faithful = rs.compute_faithful();
        rs
    }

    fn compute_faithful(&self) -> bool {
        let n = match self.reps.first() {
            Some(r) => r.num_elements(),
            None => return false,
        };
        for x in 0..n {
            for y in (x + 1)..n {
                let dist = self
                    .reps
                    .iter()
                    .map(|r| r.matrix(x).max_abs_diff(r.matrix(y)))
                    .fold(0.0, f64::max);
                if dist <= HOMOMORPHISM_TOL {
                    return false;
                }
            }
        }
        true
    }

    pub fn reps(&self) -> &[MatrixRep] {
        &self.reps
    }

    /// Total embedding dimension `D = Σ dⱼ²`.
    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    pub fn num_elements(&self) -> usize {
        self.reps.first().map_or(0, MatrixRep::num_elements)
    }

    /// Reindexes every representation along an isomorphism: entry `g` of the
    /// result is the matrix at `preimage[g]` of `self`.
    pub fn reindexed(&self, preimage: &[usize]) -> Self {
        let reps = self
            .reps
            .iter()
            .map(|r| {
                let matrices = preimage.iter().map(|&c| r.matrices[c].clone()).collect();
                MatrixRep {
                    dim: r.dim,
                    matrices,
                    exact: r
                        .exact
                        .as_ref()
                        .map(|e| preimage.iter().map(|&c| e[c].clone()).collect()),
                }
            })
            .collect();
        Self {
            reps,
            total_dim: self.total_dim,
            faithful: self.faithful,
        }
    }
}

/// The `n` characters of `Z_n`: rep `j` sends `x` to the 1×1 matrix
/// `[ω^{jx}]`. `D = n`, faithful, complete.
pub fn cyclic_irreps(n: usize) -> RepresentationSet {
    let monoid = catalog::cyclic_monoid(n);
    let reps = (0..n)
        .map(|j| {
            let matrices = (0..n)
                .map(|x| {
                    let angle = 2.0 * std::f64::consts::PI * ((j * x) % n) as f64 / n as f64;
                    SquareMatrix::new(1, vec![Complex64::from_polar(1.0, angle)])
                })
                .collect();
            MatrixRep::verified(&monoid, 1, matrices).expect("cyclic characters are homomorphisms")
        })
        .collect();
    RepresentationSet::new(reps)
}

/// The right regular representation: a single rep of dimension `|S|` with
/// `ρ(x)[y][y·x] = 1`. Faithful for monoids with identity; exact over the
/// integers; invertible elements give permutation matrices and
/// non-invertible elements give singular ones.
pub fn regular_rep(m: &FiniteMonoid) -> Result<RepresentationSet> {
    if m.identity().is_none() {
        return Err(Error::MonoidLaw {
            law: "regular representation needs an identity",
            x: 0,
            y: 0,
            z: 0,
        });
    }
    let n = m.size();
    let matrices = (0..n)
        .map(|x| {
            let mut mat = SquareMatrix::zeros(n);
            for y in 0..n {
                mat.set(y, m.product(y, x), Complex64::ONE);
            }
            mat
        })
        .collect();
    let rep = MatrixRep::verified(m, n, matrices)?;
    Ok(RepresentationSet::new(vec![rep]))
}

/// `Φ(x)`: concatenation of the row-major flattenings of each `ρ⁽ʲ⁾(x)`.
pub fn direct_sum_embed(rs: &RepresentationSet, x: usize) -> Result<Vec<Complex64>> {
    if x >= rs.num_elements() {
        return Err(Error::ElementOutOfRange {
            index: x,
            size: rs.num_elements(),
        });
    }
    let mut out = Vec::with_capacity(rs.total_dim);
    for rep in &rs.reps {
        out.extend_from_slice(rep.matrix(x).data());
    }
    Ok(out)
}

/// Applies a transition in the embedded space: each block `B_j` is replaced
/// by `B_j · ρ⁽ʲ⁾(t)`. For `phi = Φ(s)` the result is `Φ(s·t)`.
pub fn rep_transition(rs: &RepresentationSet, phi: &[Complex64], t: usize) -> Result<Vec<Complex64>> {
    if phi.len() != rs.total_dim {
        return Err(Error::EmbeddingLength {
            got: phi.len(),
            expected: rs.total_dim,
        });
    }
    if t >= rs.num_elements() {
        return Err(Error::ElementOutOfRange {
            index: t,
            size: rs.num_elements(),
        });
    }
    let mut out = Vec::with_capacity(rs.total_dim);
    let mut offset = 0;
    for rep in &rs.reps {
        let d = rep.dim;
        let block = SquareMatrix::new(d, phi[offset..offset + d * d].to_vec());
        out.extend_from_slice(block.mul(rep.matrix(t)).data());
        offset += d * d;
    }
    Ok(out)
}

/// Decodes an embedded vector back to the unique element whose embedding is
/// within [`READOUT_TOL`] in the ∞-norm.
pub fn readout(rs: &RepresentationSet, phi: &[Complex64]) -> Result<usize> {
    if !rs.faithful {
        let n = rs.num_elements();
        for x in 0..n {
            for y in (x + 1)..n {
                let dist = rs
                    .reps
                    .iter()
                    .map(|r| r.matrix(x).max_abs_diff(r.matrix(y)))
                    .fold(0.0, f64::max);
                if dist <= HOMOMORPHISM_TOL {
                    return Err(Error::NotFaithful { first: x, second: y });
                }
            }
        }
    }
    if phi.len() != rs.total_dim {
        return Err(Error::EmbeddingLength {
            got: phi.len(),
            expected: rs.total_dim,
        });
    }
    let mut matched = None;
    for x in 0..rs.num_elements() {
        let mut dist: f64 = 0.0;
        let mut offset = 0;
        'reps: for rep in &rs.reps {
            let d = rep.dim * rep.dim;
            for (i, z) in rep.matrix(x).data().iter().enumerate() {
                dist = dist.max((phi[offset + i] - z).norm());
                if dist > READOUT_TOL {
                    break 'reps;
                }
            }
            offset += d;
        }
        if dist <= READOUT_TOL {
            match matched {
                None => matched = Some(x),
                Some(first) => {
                    return Err(Error::ReadoutAmbiguous { first, second: x });
                }
            }
        }
    }
    matched.ok_or(Error::ReadoutNoMatch {
        tolerance: READOUT_TOL,
    })
}
