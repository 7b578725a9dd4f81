//! Acceptance suite. Each criterion runs at its stated tolerance and prints
//! one pass/fail line; run with `--nocapture` to see the lines on success:
//!
//! ```text
//! cargo test -p autocirc-core --test acceptance -- --nocapture
//! ```

use std::panic::AssertUnwindSafe;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use autocirc_core::{
    circular_convolve, compile, direct_run, fourier_compose, regular_rep, run_plan,
    transition_monoid, verify_equivalence, ComplexVector, LayerSpec, PlanAlgebra, Semiautomaton,
    Strategy, StrategyOverride,
};
use autocirc_core::compiler::SemidirectHint;
use autocirc_core::representations::{catalog_entry, int_mul, CatalogEntry, HOMOMORPHISM_TOL};
use autocirc_core::semidirect::{
    sd_from_tables, sd_multiply, sd_scan_sequential, sd_scan_tree, SdElement, SemidirectStructure,
};

fn criterion(name: &str, body: impl FnOnce()) {
    match std::panic::catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("acceptance {name}: PASS"),
        Err(cause) => {
            println!("acceptance {name}: FAIL");
            std::panic::resume_unwind(cause);
        }
    }
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> ComplexVector {
    // entries in the unit disk
    ComplexVector::new(
        (0..n)
            .map(|_| {
                let r = rng.random_range(0.0..1.0f64).sqrt();
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(r, theta)
            })
            .collect(),
    )
}

#[test]
fn criterion_1_convolution_theorem() {
    criterion("1 convolution theorem", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for n in [2usize, 3, 4, 5, 7, 8, 11, 16] {
            for _ in 0..100 {
                let f = random_vector(n, &mut rng);
                let g = random_vector(n, &mut rng);
                let lhs = fourier_compose(&f, &g).unwrap();
                let rhs = circular_convolve(&f, &g).unwrap();
                let dist = lhs.infinity_distance(&rhs);
                assert!(dist <= 1e-9, "n={n}: ‖compose − convolve‖∞ = {dist:e}");
            }
        }
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1s");
    });
}

fn affine_automaton(p: usize, a: usize, b: usize) -> Semiautomaton {
    let col = (0..p).map(|x| (a * x + b) % p).collect();
    Semiautomaton::new(p, vec!["σ".into()], vec![col]).unwrap()
}

#[test]
fn criterion_2_modular_constant_depth() {
    criterion("2 modular automata, no dependence on T", || {
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        for p in [2usize, 3, 5, 7] {
            for a in 1..p {
                // p prime: every a in 1..p is invertible
                for b in 0..p {
                    let auto = affine_automaton(p, a, b);
                    let plan_1 = compile(&auto, None, StrategyOverride::Auto, 1).unwrap();
                    let plan_64 = compile(&auto, None, StrategyOverride::Auto, 64).unwrap();
                    assert_eq!(plan_1.strategy, Strategy::FourierAffine);
                    assert_eq!(
                        plan_1, plan_64,
                        "p={p} a={a} b={b}: plans for T=1 and T=64 must be identical"
                    );
                    assert_eq!(plan_1.metrics.width, p, "width must equal p exactly");
                    for _ in 0..200 {
                        let t = rng.random_range(1..=64);
                        let q0 = rng.random_range(0..p);
                        let input = vec![0usize; t];
                        let trace = run_plan(&plan_64, &auto, q0, &input).unwrap();
                        assert_eq!(trace.trajectory, direct_run(&auto, q0, &input).unwrap());
                    }
                }
            }
        }
    });
}

/// The right-regular automaton of a catalog group: one state per element,
/// one symbol per generator, `δ(g, σ) = g·gen_σ`.
fn cayley_automaton(entry: &CatalogEntry) -> Semiautomaton {
    let order = entry.monoid.size();
    let alphabet: Vec<String> = (0..entry.generators.len())
        .map(|i| format!("g{i}"))
        .collect();
    let columns: Vec<Vec<usize>> = entry
        .generators
        .iter()
        .map(|&g| (0..order).map(|x| entry.monoid.product(x, g)).collect())
        .collect();
    Semiautomaton::new(order, alphabet, columns).unwrap()
}

#[test]
fn criterion_3_group_automata() {
    criterion("3 group automata, width Σd² = |G|", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        let mut names: Vec<String> = (1..=12).map(|n| format!("cyclic:{n}")).collect();
        names.extend((3..=6).map(|n| format!("dihedral:{n}")));
        names.push("sym:3".into());
        names.push("alt:5".into());

        for name in &names {
            let entry = catalog_entry(name).unwrap();
            let order = entry.monoid.size();
            assert_eq!(
                entry.reps.total_dim(),
                order,
                "{name}: Σ d² must equal |G| exactly"
            );
            // homomorphism over all |G|² pairs at 1e−9
            for rep in entry.reps.reps() {
                for x in 0..order {
                    for y in 0..order {
                        let prod = rep.matrix(x).mul(rep.matrix(y));
                        let xy = entry.monoid.product(x, y);
                        let dist = prod.max_abs_diff(rep.matrix(xy));
                        assert!(dist <= HOMOMORPHISM_TOL, "{name}: ρ({x})ρ({y}) off by {dist:e}");
                    }
                }
            }
            if name == "alt:5" {
                assert!(
                    entry.reps.reps().iter().any(|r| r.dim() == 5),
                    "alt:5 catalog must contain a 5-dimensional rep"
                );
            }

            let auto = cayley_automaton(&entry);
            if auto.num_symbols() == 0 {
                continue; // cyclic:1 has no generators and nothing to run
            }
            let plan = compile(&auto, None, StrategyOverride::Rep, 128).unwrap();
            assert_eq!(plan.strategy, Strategy::GroupRep);
            assert_eq!(plan.metrics.width, order, "{name}: plan width must be |G|");
            for _ in 0..200 {
                let t = rng.random_range(1..=128);
                let q0 = rng.random_range(0..auto.num_states());
                let input: Vec<usize> = (0..t)
                    .map(|_| rng.random_range(0..auto.num_symbols()))
                    .collect();
                let trace = run_plan(&plan, &auto, q0, &input).unwrap();
                assert_eq!(trace.trajectory, direct_run(&auto, q0, &input).unwrap());
            }
        }

        // the priority order still reaches GroupRep on its own for a
        // non-affine group automaton
        let entry = catalog_entry("dihedral:4").unwrap();
        let auto = cayley_automaton(&entry);
        let plan = compile(&auto, None, StrategyOverride::Auto, 16).unwrap();
        assert_eq!(plan.strategy, Strategy::GroupRep);

        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30s");
    });
}

fn z_table(n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|x| (0..n).map(|y| (x + y) % n).collect())
        .collect()
}

fn negation_action(n: usize) -> Vec<Vec<usize>> {
    vec![(0..n).collect(), (0..n).map(|x| (n - x) % n).collect()]
}

/// The regular automaton of a semidirect structure, states `h·|N| + n`,
/// symbols the generator pairs `(1,0)` and `(0,1)`.
fn hinted_automaton(structure: SemidirectStructure) -> (Semiautomaton, SemidirectHint) {
    let encoding = structure.elements();
    let n_size = structure.n_size();
    let gens = [SdElement::new(1, 0), SdElement::new(0, 1)];
    let columns: Vec<Vec<usize>> = gens
        .iter()
        .map(|g| {
            encoding
                .iter()
                .map(|q| {
                    let landed = sd_multiply(&structure, *q, *g).unwrap();
                    landed.h * n_size + landed.n
                })
                .collect()
        })
        .collect();
    let auto = Semiautomaton::new(
        structure.order(),
        vec!["a".into(), "b".into()],
        columns,
    )
    .unwrap();
    (
        auto,
        SemidirectHint {
            structure,
            state_encoding: encoding,
        },
    )
}

#[test]
fn criterion_4_semidirect_scan() {
    criterion("4 semidirect scans and the width equality", || {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let structures = [
            ("Z3⋊Z2 negation", sd_from_tables(z_table(3), z_table(2), negation_action(3)).unwrap()),
            ("Z4⋊Z2 inversion", sd_from_tables(z_table(4), z_table(2), negation_action(4)).unwrap()),
            (
                "Z3×Z2 direct product",
                sd_from_tables(z_table(3), z_table(2), vec![(0..3).collect(); 2]).unwrap(),
            ),
        ];

        for (label, s) in &structures {
            for t in 1..=257usize {
                let expected_levels = if t == 1 {
                    0
                } else {
                    2 * (t.next_power_of_two().trailing_zeros() as usize)
                };
                for _ in 0..100 {
                    let elems: Vec<SdElement> = (0..t)
                        .map(|_| {
                            SdElement::new(
                                rng.random_range(0..s.n_size()),
                                rng.random_range(0..s.h_size()),
                            )
                        })
                        .collect();
                    let (tree, depth) = sd_scan_tree(s, &elems);
                    assert_eq!(tree, sd_scan_sequential(s, &elems), "{label} T={t}");
                    assert_eq!(
                        depth.total(),
                        expected_levels,
                        "{label} T={t}: levels must be 2·ceil(log₂ T)"
                    );
                }
            }

            // Appendix-style equality on every emitted plan
            let (auto, hint) = hinted_automaton(s.clone());
            for t in [1usize, 2, 8, 64, 257] {
                let plan = compile(&auto, Some(&hint), StrategyOverride::Scan, t).unwrap();
                assert_eq!(plan.strategy, Strategy::SemidirectScan);
                let dim_n = s.n_size();
                let dim_rho_h = match &plan.algebra {
                    PlanAlgebra::Semidirect { h_reps, .. } => h_reps.total_dim(),
                    _ => unreachable!(),
                };
                assert_eq!(
                    plan.metrics.embedding_dim,
                    dim_n + dim_rho_h,
                    "{label}: embedding_dim = dim(N)+dim(ρ_H)"
                );
                assert_eq!(
                    plan.metrics.attention_width, plan.metrics.embedding_dim,
                    "{label}: attention width = embedding dim"
                );
            }

            // the compiled scans also execute correctly
            let plan = compile(&auto, Some(&hint), StrategyOverride::Scan, 64).unwrap();
            let report = verify_equivalence(&plan, &auto, 100, 64, 404);
            assert!(report.is_success(), "{label}: {:?}", report.failures.first());
        }
    });
}

#[test]
fn criterion_5_generic_monoid_fallback() {
    criterion("5 generic monoid fallback", || {
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        let mut sampled = 0;
        while sampled < 50 {
            let num_states = rng.random_range(1..=4);
            let num_symbols = rng.random_range(1..=3);
            let alphabet: Vec<String> = (0..num_symbols).map(|i| format!("s{i}")).collect();
            let columns: Vec<Vec<usize>> = (0..num_symbols)
                .map(|_| (0..num_states).map(|_| rng.random_range(0..num_states)).collect())
                .collect();
            let auto = Semiautomaton::new(num_states, alphabet, columns).unwrap();
            let Ok(monoid) = transition_monoid(&auto, 10_000) else {
                continue; // closure too large: outside this criterion's population
            };
            sampled += 1;

            // regular representation is exact over the integers
            let reps = regular_rep(&monoid).unwrap();
            let rep = &reps.reps()[0];
            assert!(rep.is_integer_exact());
            for x in 0..monoid.size() {
                for y in 0..monoid.size() {
                    let prod = int_mul(
                        rep.dim(),
                        rep.exact_matrix(x).unwrap(),
                        rep.exact_matrix(y).unwrap(),
                    );
                    assert_eq!(
                        prod,
                        rep.exact_matrix(monoid.product(x, y)).unwrap(),
                        "regular rep homomorphism must be exact"
                    );
                }
            }
            // non-invertible elements give singular matrices
            for (i, label) in monoid.element_labels().unwrap().iter().enumerate() {
                let det = rep.matrix(i).abs_determinant();
                if label.is_permutation() {
                    assert!(det > 0.5);
                } else {
                    assert!(det < 1e-9, "element {i} should be singular");
                }
            }

            let plan = compile(&auto, None, StrategyOverride::Scan, 64).unwrap();
            assert_eq!(plan.strategy, Strategy::GenericMonoidScan);
            for _ in 0..5 {
                let t = rng.random_range(1..=64);
                let q0 = rng.random_range(0..num_states);
                let input: Vec<usize> = (0..t)
                    .map(|_| rng.random_range(0..num_symbols))
                    .collect();
                let trace = run_plan(&plan, &auto, q0, &input).unwrap();
                assert_eq!(trace.trajectory, direct_run(&auto, q0, &input).unwrap());
            }
        }
    });
}

#[test]
fn criterion_6_mutation_sensitivity() {
    criterion("6 mutation sensitivity", || {
        // every phase entry of a frequency-affine table
        let auto = Semiautomaton::new(
            5,
            vec!["u".into(), "v".into()],
            vec![
                (0..5).map(|x| (x + 1) % 5).collect(),
                (0..5).map(|x| (2 * x + 3) % 5).collect(),
            ],
        )
        .unwrap();
        let base = compile(&auto, None, StrategyOverride::Auto, 64).unwrap();
        assert_eq!(base.strategy, Strategy::FourierAffine);
        for symbol in 0..2 {
            for j in 0..5 {
                let mut corrupted = base.clone();
                let LayerSpec::FrequencyAffine { phase_tables, .. } = &mut corrupted.layers[1]
                else {
                    panic!("missing FrequencyAffine layer");
                };
                let entries = phase_tables[symbol].entries_mut();
                entries[j] = -entries[j];
                let report = verify_equivalence(&corrupted, &auto, 1000, 64, 606);
                assert!(
                    !report.is_success(),
                    "corrupting phase (symbol {symbol}, q {j}) must be detected"
                );
            }
        }

        // every cayley entry of a group-rep plan
        let auto = Semiautomaton::new(
            3,
            vec!["c".into(), "t".into()],
            vec![vec![1, 2, 0], vec![1, 0, 2]],
        )
        .unwrap();
        let base = compile(&auto, None, StrategyOverride::Rep, 64).unwrap();
        let order = match &base.algebra {
            PlanAlgebra::Rep { monoid, .. } => monoid.size(),
            _ => panic!("expected Rep algebra"),
        };
        for x in 0..order {
            for y in 0..order {
                let mut corrupted = base.clone();
                let PlanAlgebra::Rep { monoid, .. } = &mut corrupted.algebra else {
                    unreachable!()
                };
                monoid.cayley[x][y] = (monoid.cayley[x][y] + 1) % order;
                let report = verify_equivalence(&corrupted, &auto, 1000, 64, 707);
                assert!(
                    !report.is_success(),
                    "corrupting cayley[{x}][{y}] must be detected"
                );
            }
        }
    });
}
