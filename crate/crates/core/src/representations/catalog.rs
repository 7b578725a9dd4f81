//! Built-in group catalog: Cayley tables, generating sets and complete
//! irreducible representation sets for `cyclic:<n>`, `dihedral:<n>`, `sym:3`
//! and `alt:5`, plus Cayley-table recognition of these groups.
//!
//! Catalog entries are constructed from standard explicit data (characters,
//! 2×2 rotation/reflection blocks, permutation actions restricted to the
//! sum-zero subspace, icosahedral rotation matrices) and then *verified*:
//! every rep passes the homomorphism check, `Σ dⱼ² = |G|` must hold exactly,
//! the reps must be pairwise inequivalent (distinct characters) and the
//! direct sum faithful. Nothing is trusted.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::algebra::{FiniteMonoid, Transformation};
use crate::error::{Error, Result};

use super::matrix::SquareMatrix;
use super::{MatrixRep, RepresentationSet, HOMOMORPHISM_TOL};

/// A catalog group: its table, its irreps, and a generating set (element
/// indices) used for recognition and for building test automata.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub monoid: FiniteMonoid,
    pub reps: RepresentationSet,
    pub generators: Vec<usize>,
}

pub fn catalog_names() -> &'static [&'static str] {
    &["cyclic:<n>", "dihedral:<n>", "sym:3", "alt:5"]
}

/// Looks up a catalog group by name (`cyclic:<n>`, `dihedral:<n>`, `sym:3`,
/// `alt:5`) and returns its Cayley table with a complete verified irrep set.
pub fn builtin_group_irreps(name: &str) -> Result<(FiniteMonoid, RepresentationSet)> {
    let entry = catalog_entry(name)?;
    Ok((entry.monoid, entry.reps))
}

/// Same lookup, including the generating set.
pub fn catalog_entry(name: &str) -> Result<CatalogEntry> {
    let unknown = || Error::UnknownCatalogName {
        name: name.to_string(),
    };
    let (family, param) = name.split_once(':').ok_or_else(unknown)?;
    let entry = match (family, param) {
        ("cyclic", p) => cyclic_entry(p.parse().map_err(|_| unknown())?),
        ("dihedral", p) => dihedral_entry(p.parse().map_err(|_| unknown())?),
        ("sym", "3") => sym3_entry(),
        ("alt", "5") => Ok(alt5_entry().clone()),
        _ => return Err(unknown()),
    }?;
    verify_entry(&entry)?;
    Ok(entry)
}

fn verify_entry(entry: &CatalogEntry) -> Result<()> {
    let order = entry.monoid.size();
    if entry.reps.total_dim() != order {
        return Err(Error::PlanIntegrity {
            reason: format!(
                "catalog {}: Σ d² = {} but |G| = {}",
                entry.name,
                entry.reps.total_dim(),
                order
            ),
        });
    }
    if !entry.reps.is_faithful() {
        return Err(Error::PlanIntegrity {
            reason: format!("catalog {}: direct sum not faithful", entry.name),
        });
    }
    // pairwise inequivalence: equivalent complex reps of a finite group have
    // equal characters, so distinct characters suffice
    let chars: Vec<Vec<Complex64>> = entry.reps.reps().iter().map(MatrixRep::character).collect();
    for i in 0..chars.len() {
        for j in (i + 1)..chars.len() {
            let dist = chars[i]
                .iter()
                .zip(&chars[j])
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if dist <= HOMOMORPHISM_TOL {
                return Err(Error::PlanIntegrity {
                    reason: format!("catalog {}: reps {} and {} equivalent", entry.name, i, j),
                });
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// cyclic
// ---------------------------------------------------------------------------

pub(super) fn cyclic_monoid(n: usize) -> FiniteMonoid {
    assert!(n >= 1);
    let cayley = (0..n)
        .map(|x| (0..n).map(|y| (x + y) % n).collect())
        .collect();
    FiniteMonoid::new(cayley, Some(0), None).expect("Z_n is a monoid")
}

fn cyclic_entry(n: usize) -> Result<CatalogEntry> {
    if n == 0 {
        return Err(Error::UnknownCatalogName {
            name: "cyclic:0".into(),
        });
    }
    let monoid = cyclic_monoid(n);
    let reps = super::cyclic_irreps(n);
    Ok(CatalogEntry {
        name: format!("cyclic:{n}"),
        generators: if n >= 2 { vec![1] } else { vec![] },
        monoid,
        reps,
    })
}

// ---------------------------------------------------------------------------
// dihedral
// ---------------------------------------------------------------------------

/// Dihedral group of order `2n`. Element `ε·n + j` is `rʲ sᵉ`; the product
/// rule is `(j₁,ε₁)(j₂,ε₂) = (j₁ + (−1)^{ε₁} j₂ mod n, ε₁⊕ε₂)`.
fn dihedral_entry(n: usize) -> Result<CatalogEntry> {
    if n == 0 {
        return Err(Error::UnknownCatalogName {
            name: "dihedral:0".into(),
        });
    }
    let order = 2 * n;
    let idx = |j: usize, eps: usize| eps * n + j;
    let parts = |x: usize| (x % n, x / n);
    let mut cayley = vec![vec![0usize; order]; order];
    for x in 0..order {
        for y in 0..order {
            let (j1, e1) = parts(x);
            let (j2, e2) = parts(y);
            let j = if e1 == 0 { (j1 + j2) % n } else { (j1 + n - j2 % n) % n };
            cayley[x][y] = idx(j, e1 ^ e2);
        }
    }
    let monoid = FiniteMonoid::new(cayley, Some(0), None)?;

    let mut reps = Vec::new();
    let one_dim = |chi: &dyn Fn(usize, usize) -> f64| -> Vec<SquareMatrix> {
        (0..order)
            .map(|x| {
                let (j, e) = parts(x);
                SquareMatrix::new(1, vec![Complex64::new(chi(j, e), 0.0)])
            })
            .collect()
    };
    reps.push(MatrixRep::verified(&monoid, 1, one_dim(&|_, _| 1.0))?);
    reps.push(MatrixRep::verified(
        &monoid,
        1,
        one_dim(&|_, e| if e == 0 { 1.0 } else { -1.0 }),
    )?);
    if n % 2 == 0 {
        reps.push(MatrixRep::verified(
            &monoid,
            1,
            one_dim(&|j, _| if j % 2 == 0 { 1.0 } else { -1.0 }),
        )?);
        reps.push(MatrixRep::verified(
            &monoid,
            1,
            one_dim(&|j, e| if (j + e) % 2 == 0 { 1.0 } else { -1.0 }),
        )?);
    }
    // 2-dim blocks: rotation by 2πhj/n followed by a reflection when ε = 1
    let two_dim_count = if n % 2 == 0 { n / 2 - 1 } else { (n - 1) / 2 };
    for h in 1..=two_dim_count {
        let matrices = (0..order)
            .map(|x| {
                let (j, e) = parts(x);
                let theta = 2.0 * std::f64::consts::PI * (h * j) as f64 / n as f64;
                let (s, c) = theta.sin_cos();
                let rot = SquareMatrix::from_real_rows(&[vec![c, -s], vec![s, c]]);
                if e == 0 {
                    rot
                } else {
                    let refl = SquareMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
                    rot.mul(&refl)
                }
            })
            .collect();
        reps.push(MatrixRep::verified(&monoid, 2, matrices)?);
    }

    let generators = if n >= 2 {
        vec![idx(1, 0), idx(0, 1)]
    } else {
        vec![idx(0, 1)]
    };
    Ok(CatalogEntry {
        name: format!("dihedral:{n}"),
        monoid,
        reps: RepresentationSet::new(reps),
        generators,
    })
}

// ---------------------------------------------------------------------------
// permutation groups: closure, parity, sum-zero standard rep
// ---------------------------------------------------------------------------

/// BFS closure of permutation generators; element 0 is the identity.
struct PermClosure {
    elements: Vec<Transformation>,
}

fn perm_closure(degree: usize, generators: &[Transformation]) -> PermClosure {
    let mut elements = vec![Transformation::identity(degree)];
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        for g in generators {
            let next = current.then(g);
            if !elements.contains(&next) {
                elements.push(next);
            }
        }
        frontier += 1;
    }
    PermClosure { elements }
}

fn cayley_from_labels(elements: &[Transformation]) -> FiniteMonoid {
    let size = elements.len();
    let mut cayley = vec![vec![0usize; size]; size];
    for x in 0..size {
        for y in 0..size {
            let prod = elements[x].then(&elements[y]);
            cayley[x][y] = elements
                .iter()
                .position(|e| e == &prod)
                .expect("closure is closed");
        }
    }
    FiniteMonoid::new(cayley, Some(0), Some(elements.to_vec())).expect("group table")
}

fn parity(t: &Transformation) -> f64 {
    let img = t.image();
    let mut inversions = 0;
    for i in 0..img.len() {
        for j in (i + 1)..img.len() {
            if img[i] > img[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The permutation action on the sum-zero subspace in the difference basis
/// `bᵢ = eᵢ − eᵢ₊₁`: integer matrices of dimension `degree − 1` satisfying
/// `R·B = B·P` for the row-action permutation matrices `P[i][π(i)] = 1`.
fn sum_zero_rep_matrices(elements: &[Transformation], degree: usize) -> Vec<SquareMatrix> {
    let d = degree - 1;
    elements
        .iter()
        .map(|perm| {
            let mut mat = SquareMatrix::zeros(d);
            for i in 0..d {
                // b_i · P = e_{π(i)} − e_{π(i+1)} expanded in consecutive differences
                let a = perm.apply(i);
                let b = perm.apply(i + 1);
                if a < b {
                    for j in a..b {
                        mat.set(i, j, Complex64::ONE);
                    }
                } else {
                    for j in b..a {
                        mat.set(i, j, -Complex64::ONE);
                    }
                }
            }
            mat
        })
        .collect()
}

fn sym3_entry() -> Result<CatalogEntry> {
    let cycle = Transformation::new(vec![1, 2, 0]).unwrap();
    let swap = Transformation::new(vec![1, 0, 2]).unwrap();
    let closure = perm_closure(3, &[cycle.clone(), swap.clone()]);
    assert_eq!(closure.elements.len(), 6);
    let monoid = cayley_from_labels(&closure.elements);

    let trivial = (0..6)
        .map(|_| SquareMatrix::identity(1))
        .collect::<Vec<_>>();
    let sign = closure
        .elements
        .iter()
        .map(|t| SquareMatrix::new(1, vec![Complex64::new(parity(t), 0.0)]))
        .collect::<Vec<_>>();
    let standard = sum_zero_rep_matrices(&closure.elements, 3);

    let reps = RepresentationSet::new(vec![
        MatrixRep::verified(&monoid, 1, trivial)?,
        MatrixRep::verified(&monoid, 1, sign)?,
        MatrixRep::verified(&monoid, 2, standard)?,
    ]);
    let generators = vec![
        closure.elements.iter().position(|e| e == &cycle).unwrap(),
        closure.elements.iter().position(|e| e == &swap).unwrap(),
    ];
    Ok(CatalogEntry {
        name: "sym:3".into(),
        monoid,
        reps,
        generators,
    })
}

// ---------------------------------------------------------------------------
// alt:5 via the icosahedral rotation group
// ---------------------------------------------------------------------------

const PHI: f64 = 1.618_033_988_749_895; // (1+√5)/2
const SQRT5: f64 = 2.236_067_977_499_79;
const MATCH_TOL: f64 = 1e-6;

fn axis_angle(axis: [f64; 3], theta: f64) -> SquareMatrix {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let u = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
    let (s, c) = theta.sin_cos();
    let k = 1.0 - c;
    SquareMatrix::from_real_rows(&[
        vec![
            c + u[0] * u[0] * k,
            u[0] * u[1] * k - u[2] * s,
            u[0] * u[2] * k + u[1] * s,
        ],
        vec![
            u[1] * u[0] * k + u[2] * s,
            c + u[1] * u[1] * k,
            u[1] * u[2] * k - u[0] * s,
        ],
        vec![
            u[2] * u[0] * k - u[1] * s,
            u[2] * u[1] * k + u[0] * s,
            c + u[2] * u[2] * k,
        ],
    ])
}

fn find_matrix(list: &[SquareMatrix], m: &SquareMatrix) -> Option<usize> {
    list.iter().position(|x| x.max_abs_diff(m) < MATCH_TOL)
}

/// Rotation axis of a non-identity rotation matrix (unit vector with a
/// canonical sign).
fn rotation_axis(m: &SquareMatrix) -> [f64; 3] {
    // rows of R − I; the axis is orthogonal to all of them
    let rows: Vec<[f64; 3]> = (0..3)
        .map(|i| {
            [
                m.get(i, 0).re - if i == 0 { 1.0 } else { 0.0 },
                m.get(i, 1).re - if i == 1 { 1.0 } else { 0.0 },
                m.get(i, 2).re - if i == 2 { 1.0 } else { 0.0 },
            ]
        })
        .collect();
    let cross = |a: &[f64; 3], b: &[f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let mut best = [0.0; 3];
    let mut best_norm = 0.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let v = cross(&rows[i], &rows[j]);
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > best_norm {
            best_norm = n;
            best = v;
        }
    }
    assert!(best_norm > 1e-9, "axis of a non-identity rotation");
    let mut u = [best[0] / best_norm, best[1] / best_norm, best[2] / best_norm];
    for c in u {
        if c.abs() > 1e-7 {
            if c < 0.0 {
                u = [-u[0], -u[1], -u[2]];
            }
            break;
        }
    }
    u
}

fn axis_class_index(axes: &[[f64; 3]], v: [f64; 3]) -> usize {
    for (i, a) in axes.iter().enumerate() {
        let dplus = (a[0] - v[0]).abs() + (a[1] - v[1]).abs() + (a[2] - v[2]).abs();
        let dminus = (a[0] + v[0]).abs() + (a[1] + v[1]).abs() + (a[2] + v[2]).abs();
        if dplus < MATCH_TOL || dminus < MATCH_TOL {
            return i;
        }
    }
    panic!("axis not found in class list");
}

/// Snaps a float to the lattice `(a + b√5)/4` with small integers and
/// returns its Galois conjugate `(a − b√5)/4`.
fn galois_conjugate(x: f64) -> f64 {
    for a in -8i64..=8 {
        for b in -4i64..=4 {
            let val = (a as f64 + b as f64 * SQRT5) / 4.0;
            if (val - x).abs() < 1e-7 {
                return (a as f64 - b as f64 * SQRT5) / 4.0;
            }
        }
    }
    panic!("icosahedral matrix entry {x} not on the (a + b√5)/4 lattice");
}

fn alt5_entry() -> &'static CatalogEntry {
    static ENTRY: OnceLock<CatalogEntry> = OnceLock::new();
    ENTRY.get_or_init(build_alt5)
}

fn build_alt5() -> CatalogEntry {
    // seed rotations: 72° about the vertex axis (0, 1, φ) and 180° about z
    // (a 2-fold edge axis of the icosahedron with vertices (0, ±1, ±φ) etc.)
    let r5 = axis_angle([0.0, 1.0, PHI], 2.0 * std::f64::consts::PI / 5.0);
    let r2 = axis_angle([0.0, 0.0, 1.0], std::f64::consts::PI);

    let mut matrices = vec![SquareMatrix::identity(3)];
    let generators = [r5, r2];
    let mut frontier = 0;
    while frontier < matrices.len() {
        let current = matrices[frontier].clone();
        for g in &generators {
            let next = current.mul(g);
            if find_matrix(&matrices, &next).is_none() {
                matrices.push(next);
            }
        }
        frontier += 1;
    }
    assert_eq!(matrices.len(), 60, "icosahedral rotation closure");

    let size = matrices.len();
    let mut cayley = vec![vec![0usize; size]; size];
    for x in 0..size {
        for y in 0..size {
            cayley[x][y] =
                find_matrix(&matrices, &matrices[x].mul(&matrices[y])).expect("closed");
        }
    }
    let monoid = FiniteMonoid::new(cayley, Some(0), None).expect("A5 table");

    // orders of elements, from the table
    let orders: Vec<usize> = (0..size)
        .map(|x| monoid.element_order(x).expect("group element"))
        .collect();

    // six 5-fold axes and fifteen 2-fold axes, as ± classes
    let mut axes5: Vec<[f64; 3]> = Vec::new();
    let mut axes2: Vec<[f64; 3]> = Vec::new();
    for (x, m) in matrices.iter().enumerate() {
        if orders[x] == 5 {
            let u = rotation_axis(m);
            if axes5
                .iter()
                .all(|a| axis_distinct(a, &u))
            {
                axes5.push(u);
            }
        } else if orders[x] == 2 {
            let u = rotation_axis(m);
            if axes2.iter().all(|a| axis_distinct(a, &u)) {
                axes2.push(u);
            }
        }
    }
    assert_eq!(axes5.len(), 6);
    assert_eq!(axes2.len(), 15);

    // partition the 2-fold axes into 5 mutually orthogonal triples
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut triple_of = vec![usize::MAX; 15];
    let mut triples: Vec<[usize; 3]> = Vec::new();
    for i in 0..15 {
        if triple_of[i] != usize::MAX {
            continue;
        }
        let mates: Vec<usize> = (0..15)
            .filter(|&j| j != i && dot(&axes2[i], &axes2[j]).abs() < 1e-6)
            .collect();
        assert_eq!(mates.len(), 2, "each 2-fold axis sits in one octahedral triple");
        let t = [i, mates[0], mates[1]];
        for &j in &t {
            triple_of[j] = triples.len();
        }
        triples.push(t);
    }
    assert_eq!(triples.len(), 5);

    // permutation actions: v ↦ Rᵀv (the inverse rotation) so that composition
    // follows the crate convention "apply x first, then y"
    let act = |m: &SquareMatrix, v: &[f64; 3]| -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| m.get(j, i).re * v[j]).sum();
        }
        out
    };
    let perm_on_axes6: Vec<Transformation> = matrices
        .iter()
        .map(|m| {
            Transformation::new(
                axes5
                    .iter()
                    .map(|v| axis_class_index(&axes5, act(m, v)))
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    let perm_on_triples: Vec<Transformation> = matrices
        .iter()
        .map(|m| {
            Transformation::new(
                triples
                    .iter()
                    .map(|t| triple_of[axis_class_index(&axes2, act(m, &axes2[t[0]]))])
                    .collect(),
            )
            .unwrap()
        })
        .collect();

    // Galois conjugate of the defining rep: flip √5 ↦ −√5 entrywise
    let conjugate: Vec<SquareMatrix> = matrices
        .iter()
        .map(|m| {
            let data = m
                .data()
                .iter()
                .map(|z| Complex64::new(galois_conjugate(z.re), 0.0))
                .collect();
            SquareMatrix::new(3, data)
        })
        .collect();

    let trivial = (0..size).map(|_| SquareMatrix::identity(1)).collect();
    let reps = RepresentationSet::new(vec![
        MatrixRep::verified(&monoid, 1, trivial).expect("trivial"),
        MatrixRep::verified(&monoid, 3, matrices.clone()).expect("defining 3-dim rotations"),
        MatrixRep::verified(&monoid, 3, conjugate).expect("conjugate 3-dim"),
        MatrixRep::verified(&monoid, 4, sum_zero_rep_matrices(&perm_on_triples, 5))
            .expect("standard 4-dim"),
        MatrixRep::verified(&monoid, 5, sum_zero_rep_matrices(&perm_on_axes6, 6))
            .expect("5-dim from the six 5-fold axes"),
    ]);

    let g5 = find_matrix(&matrices, &generators[0]).unwrap();
    let g2 = find_matrix(&matrices, &generators[1]).unwrap();
    CatalogEntry {
        name: "alt:5".into(),
        monoid,
        reps,
        generators: vec![g5, g2],
    }
}

fn axis_distinct(a: &[f64; 3], b: &[f64; 3]) -> bool {
    let dplus = (a[0] - b[0]).abs() + (a[1] - b[1]).abs() + (a[2] - b[2]).abs();
    let dminus = (a[0] + b[0]).abs() + (a[1] + b[1]).abs() + (a[2] + b[2]).abs();
    dplus > MATCH_TOL && dminus > MATCH_TOL
}

// ---------------------------------------------------------------------------
// recognition
// ---------------------------------------------------------------------------

/// Tries to identify `m` (a group) with a catalog group by explicit
/// Cayley-table isomorphism, desk scale `|G| ≤ 60`. On success returns the
/// catalog name and the catalog's irreps reindexed to `m`'s elements.
pub fn recognize_group(m: &FiniteMonoid) -> Option<(String, RepresentationSet)> {
    let order = m.size();
    if order > 60 {
        return None;
    }
    let mut candidates = vec![format!("cyclic:{order}")];
    if order % 2 == 0 && order >= 2 {
        candidates.push(format!("dihedral:{}", order / 2));
    }
    if order == 6 {
        candidates.push("sym:3".into());
    }
    if order == 60 {
        candidates.push("alt:5".into());
    }
    for name in candidates {
        let Ok(entry) = catalog_entry(&name) else {
            continue;
        };
        if let Some(iso) = find_isomorphism(&entry, m) {
            // iso[c] = image in m; invert to reindex the reps
            let mut preimage = vec![0usize; order];
            for (c, &g) in iso.iter().enumerate() {
                preimage[g] = c;
            }
            return Some((entry.name.clone(), entry.reps.reindexed(&preimage)));
        }
    }
    None
}

/// Searches for an isomorphism catalog → m by mapping the catalog's
/// generators to candidate images of equal order and extending along the
/// catalog's BFS words.
fn find_isomorphism(entry: &CatalogEntry, m: &FiniteMonoid) -> Option<Vec<usize>> {
    let order = entry.monoid.size();
    if m.size() != order {
        return None;
    }
    m.identity()?;

    // BFS words of the catalog group over its generators
    let mut words: Vec<Option<(usize, usize)>> = vec![None; order];
    let mut bfs_order = vec![entry.monoid.identity().unwrap()];
    let mut seen = vec![false; order];
    seen[bfs_order[0]] = true;
    let mut frontier = 0;
    while frontier < bfs_order.len() {
        let cur = bfs_order[frontier];
        for (gi, &g) in entry.generators.iter().enumerate() {
            let next = entry.monoid.product(cur, g);
            if !seen[next] {
                seen[next] = true;
                words[next] = Some((cur, gi));
                bfs_order.push(next);
            }
        }
        frontier += 1;
    }
    if bfs_order.len() != order {
        return None; // generators do not generate (catalog bug)
    }

    let gen_orders: Vec<usize> = entry
        .generators
        .iter()
        .map(|&g| entry.monoid.element_order(g).unwrap())
        .collect();
    let m_orders: Vec<Option<usize>> = (0..order).map(|x| m.element_order(x)).collect();

    let mut images = vec![0usize; entry.generators.len()];
    search_images(entry, m, &bfs_order, &words, &gen_orders, &m_orders, 0, &mut images)
}

#[allow(clippy::too_many_arguments)]
fn search_images(
    entry: &CatalogEntry,
    m: &FiniteMonoid,
    bfs_order: &[usize],
    words: &[Option<(usize, usize)>],
    gen_orders: &[usize],
    m_orders: &[Option<usize>],
    depth: usize,
    images: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    let order = entry.monoid.size();
    if depth == entry.generators.len() {
        // extend along BFS words, then verify bijectivity and homomorphism
        let e_c = entry.monoid.identity().unwrap();
        let e_m = m.identity().unwrap();
        let mut phi = vec![usize::MAX; order];
        phi[e_c] = e_m;
        for &c in bfs_order.iter().skip(1) {
            let (parent, gi) = words[c].unwrap();
            phi[c] = m.product(phi[parent], images[gi]);
        }
        let mut hit = vec![false; order];
        for &g in &phi {
            if g == usize::MAX || hit[g] {
                return None;
            }
            hit[g] = true;
        }
        for x in 0..order {
            for y in 0..order {
                if phi[entry.monoid.product(x, y)] != m.product(phi[x], phi[y]) {
                    return None;
                }
            }
        }
        return Some(phi);
    }
    for g in 0..order {
        if m_orders[g] == Some(gen_orders[depth]) {
            images[depth] = g;
            if let Some(found) = search_images(
                entry, m, bfs_order, words, gen_orders, m_orders, depth + 1, images,
            ) {
                return Some(found);
            }
        }
    }
    None
}
