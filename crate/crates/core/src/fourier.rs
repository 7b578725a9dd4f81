//! DFT over `Z_n`, the Fourier state embedding, frequency-domain composition,
//! and frequency-domain affine transitions.
//!
//! Convention, fixed once: the forward transform uses kernel `ω^{−kx}` with
//! no scaling and the inverse uses `ω^{+kx}` with `1/n`, where
//! `ω = e^{2πi/n}`. Under this pair the state embedding
//! `Φ(x) = (ω^{0x}, …, ω^{(n−1)x})` is `n` times a row of the inverse
//! transform matrix, so the transform that decodes `Φ(x)` back to a scaled
//! one-hot (entry `n` at index `x`) is the un-normalized forward kernel.
//! The modulus is not required to be prime: only the coefficient permutation
//! `j ↦ ja` needs `gcd(a, n) = 1`, and that is gated per map.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Readout needs the top peak to beat the runner-up by this fraction of `n`.
pub const READOUT_MARGIN_FACTOR: f64 = 0.5;

/// A complex vector over `Z_n`; the modulus is the length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    /// The delta distribution `δ_index`.
    pub fn delta(n: usize, index: usize) -> Self {
        let mut entries = vec![Complex64::ZERO; n];
        entries[index] = Complex64::ONE;
        Self { entries }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            entries: vec![Complex64::ONE; n],
        }
    }

    pub fn modulus(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn infinity_distance(&self, other: &ComplexVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Pointwise (Hadamard) product.
    pub fn hadamard(&self, other: &ComplexVector) -> Result<ComplexVector> {
        check_moduli(self, other)?;
        Ok(ComplexVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a * b)
                .collect(),
        ))
    }

    /// Index of the entry with the largest modulus, provided it beats the
    /// runner-up by `margin`.
    pub fn argmax_with_margin(&self, margin: f64) -> Result<usize> {
        let mut best = (0usize, f64::NEG_INFINITY);
        let mut second = f64::NEG_INFINITY;
        for (i, z) in self.entries.iter().enumerate() {
            let mag = z.norm();
            if mag > best.1 {
                second = best.1;
                best = (i, mag);
            } else if mag > second {
                second = mag;
            }
        }
        if self.entries.len() > 1 && best.1 - second < margin {
            return Err(Error::ReadoutMargin {
                top: best.1,
                second,
                required: margin,
            });
        }
        Ok(best.0)
    }
}

fn check_moduli(f: &ComplexVector, g: &ComplexVector) -> Result<()> {
    if f.modulus() != g.modulus() {
        return Err(Error::ModulusMismatch {
            left: f.modulus(),
            right: g.modulus(),
        });
    }
    Ok(())
}

/// `ω^k = e^{2πik/n}`.
fn root_of_unity(n: usize, k: i64) -> Complex64 {
    let angle = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
    Complex64::from_polar(1.0, angle)
}

/// Forward transform: entry `k` is `Σ_x v[x]·ω^{−kx}`, no scaling.
pub fn dft(v: &ComplexVector) -> ComplexVector {
    let n = v.modulus();
    let entries = (0..n)
        .map(|k| {
            (0..n)
                .map(|x| v.entries[x] * root_of_unity(n, -((k * x) as i64)))
                .sum()
        })
        .collect();
    ComplexVector::new(entries)
}

/// Inverse transform: entry `x` is `(1/n)·Σ_k v[k]·ω^{+kx}`.
pub fn idft(v: &ComplexVector) -> ComplexVector {
    let n = v.modulus();
    let scale = 1.0 / n as f64;
    let entries = (0..n)
        .map(|x| {
            let sum: Complex64 = (0..n)
                .map(|k| v.entries[k] * root_of_unity(n, (k * x) as i64))
                .sum();
            sum * scale
        })
        .collect();
    ComplexVector::new(entries)
}

/// The Fourier state embedding `Φ(x)`: entry `j` is `ω^{jx}`.
pub fn fourier_embed(x: usize, p: usize) -> Result<ComplexVector> {
    if x >= p {
        return Err(Error::ResidueOutOfRange {
            value: x,
            modulus: p,
        });
    }
    Ok(ComplexVector::new(
        (0..p).map(|j| root_of_unity(p, (j * x) as i64)).collect(),
    ))
}

/// Decodes a state embedding: the un-normalized transform with kernel
/// `ω^{−jx}`, which maps `Φ(x)` to `n·δ_x`. This inverts [`fourier_embed`].
pub fn embedding_decode(v: &ComplexVector) -> ComplexVector {
    dft(v)
}

/// Circular convolution `(f ∗ g)(x) = Σ_y f(y)·g((x−y) mod n)` by the direct
/// double sum. This is the oracle side of the convolution theorem.
pub fn circular_convolve(f: &ComplexVector, g: &ComplexVector) -> Result<ComplexVector> {
    check_moduli(f, g)?;
    let n = f.modulus();
    let entries = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| f.entries[y] * g.entries[(x + n - y) % n])
                .sum()
        })
        .collect();
    Ok(ComplexVector::new(entries))
}

/// Frequency-domain composition `F⁻¹(F(f) ⊙ F(g))`; equals
/// [`circular_convolve`] by the convolution theorem.
pub fn fourier_compose(f: &ComplexVector, g: &ComplexVector) -> Result<ComplexVector> {
    check_moduli(f, g)?;
    Ok(idft(&dft(f).hadamard(&dft(g))?))
}

/// The attention-shaped composition: embed both states, take the Hadamard
/// product (no softmax, no dot product), then decode. Since
/// `Φ(q) ⊙ Φ(k) = Φ((q+k) mod p)`, the result is `p·δ_{(q+k) mod p}` and the
/// argmax of the modulus recovers `(q+k) mod p`.
pub fn fourier_attention(q_state: usize, k_state: usize, p: usize) -> Result<ComplexVector> {
    let q = fourier_embed(q_state, p)?;
    let k = fourier_embed(k_state, p)?;
    Ok(embedding_decode(&q.hadamard(&k)?))
}

/// An affine map `x ↦ ax + b (mod n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    pub a: usize,
    pub b: usize,
    pub n: usize,
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl AffineMap {
    pub fn new(a: usize, b: usize, n: usize) -> Result<Self> {
        for v in [a, b] {
            if v >= n {
                return Err(Error::ResidueOutOfRange {
                    value: v,
                    modulus: n,
                });
            }
        }
        Ok(Self { a, b, n })
    }

    pub fn identity(n: usize) -> Self {
        Self { a: 1 % n, b: 0, n }
    }

    pub fn is_invertible(&self) -> bool {
        gcd(self.a, self.n) == 1
    }

    pub fn apply(&self, x: usize) -> usize {
        (self.a * x + self.b) % self.n
    }

    /// The phase table `(ω^{jb})_j` this map multiplies frequency
    /// coefficients by.
    pub fn phase_table(&self) -> ComplexVector {
        ComplexVector::new(
            (0..self.n)
                .map(|j| root_of_unity(self.n, (j * self.b) as i64))
                .collect(),
        )
    }
}

/// Applies an affine transition in frequency space using an explicit phase
/// table: entry `j` of the output is `table[j] · phi[(j·a) mod n]`.
///
/// Split out from [`affine_freq_apply`] so the runtime can execute the
/// tables stored in a compiled plan.
pub fn apply_phase_perm(phi: &ComplexVector, a: usize, table: &ComplexVector) -> Result<ComplexVector> {
    check_moduli(phi, table)?;
    let n = phi.modulus();
    Ok(ComplexVector::new(
        (0..n)
            .map(|j| table.entries[j] * phi.entries[(j * a) % n])
            .collect(),
    ))
}

/// Applies `m` to a frequency-domain state: permute coefficients by
/// `j ↦ (j·a) mod n` and multiply by phases `ω^{jb}`. For `phi = Φ(x)` the
/// result is `Φ((ax+b) mod n)`. Requires `gcd(a, n) = 1`.
pub fn affine_freq_apply(phi: &ComplexVector, m: &AffineMap) -> Result<ComplexVector> {
    if phi.modulus() != m.n {
        return Err(Error::ModulusMismatch {
            left: phi.modulus(),
            right: m.n,
        });
    }
    if !m.is_invertible() {
        return Err(Error::NonInvertibleAffine { a: m.a, n: m.n });
    }
    apply_phase_perm(phi, m.a, &m.phase_table())
}

/// Composes two affine maps under the crate convention (apply `first`, then
/// `second`): `x ↦ a₂(a₁x+b₁)+b₂ = (a₂a₁)x + (a₂b₁+b₂)`.
pub fn affine_compose(first: &AffineMap, second: &AffineMap) -> Result<AffineMap> {
    if first.n != second.n {
        return Err(Error::ModulusMismatch {
            left: first.n,
            right: second.n,
        });
    }
    let n = first.n;
    Ok(AffineMap {
        a: (second.a * first.a) % n,
        b: (second.a * first.b + second.b) % n,
        n,
    })
}
